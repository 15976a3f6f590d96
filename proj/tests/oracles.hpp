#pragma once
// Reference oracles that share nothing with the engine beyond the node type.

#include <array>
#include <deque>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cool/ir.hpp"
#include "cool/rational.hpp"

namespace oracle {

using cool::Node;
using cool::NodeKind;
using cool::Rational;

// Exact value of one side of a goal with its single nonterminal set to x.
inline Rational eval(const Node& n, const Rational& x) {
  if (n.kind() == NodeKind::number) return n.value();
  if (n.kind() == NodeKind::nonterminal) return x;
  const auto& k = n.children();
  if (k.size() == 1 && n.is_op("-")) return -eval(*k[0], x);
  if (k.size() != 2) throw std::logic_error("oracle: unexpected node " + n.label());
  auto l = eval(*k[0], x), r = eval(*k[1], x);
  if (n.is_op("+")) return l + r;
  if (n.is_op("-")) return l - r;
  if (n.is_op("*")) return l * r;
  if (n.is_op("/")) return l / r;
  if (n.is_op("^") && r == Rational(2)) return l * l;
  throw std::logic_error("oracle: unexpected node " + n.label());
}

// (a, b, c) of lhs - rhs by interpolation at -1, 0, 1.
inline std::array<Rational, 3> interpolate(const Node& equation) {
  auto f = [&](long v) {
    return eval(*equation.children()[0], Rational(v)) - eval(*equation.children()[1], Rational(v));
  };
  Rational fm = f(-1), f0 = f(0), fp = f(1), half(1, 2);
  return {(fp + fm) * half - f0, (fp - fm) * half, f0};
}

// Toy arithmetic rewriting on its own term type.
struct Term {
  char op = 0;  // 0 for a number, '+' or '*'
  long value = 0;
  std::shared_ptr<Term> l, r;
};
using TermPtr = std::shared_ptr<Term>;

inline TermPtr num(long v) { return std::make_shared<Term>(Term{0, v, nullptr, nullptr}); }
inline TermPtr bin(char op, TermPtr l, TermPtr r) {
  return std::make_shared<Term>(Term{op, 0, std::move(l), std::move(r)});
}

inline std::string show(const TermPtr& t) {
  if (!t->op) return std::to_string(t->value);
  return "(" + show(t->l) + t->op + show(t->r) + ")";
}

// One rewrite anywhere: n+m and n*m fold, 0*a -> 0, a+b -> b+a.
inline void neighbours(const TermPtr& t, std::vector<TermPtr>& out) {
  if (!t->op) return;
  if (!t->l->op && !t->r->op)
    out.push_back(num(t->op == '+' ? t->l->value + t->r->value : t->l->value * t->r->value));
  if (t->op == '*' && !t->l->op && t->l->value == 0) out.push_back(num(0));
  if (t->op == '+') out.push_back(bin('+', t->r, t->l));
  std::vector<TermPtr> sub;
  neighbours(t->l, sub);
  for (auto& s : sub) out.push_back(bin(t->op, s, t->r));
  sub.clear();
  neighbours(t->r, sub);
  for (auto& s : sub) out.push_back(bin(t->op, t->l, s));
}

// Rewrites until a number plus the final assignment; -1 past `limit` terms.
inline int bfs_distance(const TermPtr& start, std::size_t limit) {
  std::unordered_map<std::string, int> dist{{show(start), 0}};
  std::deque<TermPtr> queue{start};
  while (!queue.empty()) {
    auto t = queue.front();
    queue.pop_front();
    int d = dist[show(t)];
    if (!t->op) return d + 1;
    std::vector<TermPtr> next;
    neighbours(t, next);
    for (auto& n : next) {
      if (dist.emplace(show(n), d + 1).second) queue.push_back(n);
      if (dist.size() > limit) return -1;
    }
  }
  return -1;
}

inline TermPtr random_term(std::mt19937_64& rng, int leaves) {
  if (leaves == 1) return num(std::uniform_int_distribution<long>(0, 3)(rng));
  int left = std::uniform_int_distribution<int>(1, leaves - 1)(rng);
  char op = std::bernoulli_distribution(0.5)(rng) ? '+' : '*';
  return bin(op, random_term(rng, left), random_term(rng, leaves - left));
}

// The same five rewrites as DSL rules, every one at unit cost.
inline const char* kToyRules = R"(
expr:@(-1){immediate:a+immediate:b}{ new:t = a+b; return:t; }
expr:@(-1){immediate:a*immediate:b}{ new:t = a*b; return:t; }
expr:@(-1){0*#a}{ return:0; }
expr:@(-1){#a+#b}{ return:b+a; }
@(-1){$x == immediate:a}{ x = a; };
)";

}  // namespace oracle
