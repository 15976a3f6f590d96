#include "cool/pattern.hpp"

#include <functional>
#include <stdexcept>

namespace cool {

namespace {

Pattern leaf(Pattern::Kind k, std::string name) { return Pattern{k, std::move(name), {}, {}}; }

Pattern compile_noun(const Syntax& s) {
  using K = Syntax::Kind;
  switch (s.kind) {
    case K::ident: return leaf(Pattern::Kind::noun, s.text);
    case K::hash: return leaf(Pattern::Kind::noun_capture, s.text);
    case K::dollar: return leaf(Pattern::Kind::nonterminal, s.text);
    case K::string: return leaf(Pattern::Kind::string, s.text);
    default: throw std::invalid_argument("unsupported noun pattern '" + to_source(s) + "'");
  }
}

bool bindings_equal(const Bindings& a, const Bindings& b) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!ia->second || !ib->second) {
      if (ia->second != ib->second) return false;
    } else if (!same_tree(ia->second, ib->second)) {
      return false;
    }
  }
  return true;
}

void push_unique(std::vector<Bindings>& out, Bindings b) {
  for (const auto& e : out) {
    if (bindings_equal(e, b)) return;
  }
  out.push_back(std::move(b));
}

bool capture_accepts(Pattern::Kind k, const Node& n) {
  switch (k) {
    case Pattern::Kind::grounded: return n.grounded();
    case Pattern::Kind::any:
    case Pattern::Kind::optional: return true;
    case Pattern::Kind::nonterminal: return !n.grounded();
    case Pattern::Kind::immediate: return n.kind() == NodeKind::number;
    case Pattern::Kind::noun_capture: return n.kind() == NodeKind::identifier;
    default: return false;
  }
}

void match_into(const Pattern& p, const NodePtr& node, const Bindings& base, std::vector<Bindings>& out);

// Matches the children of an operator pattern pairwise.
void match_seq(const Pattern& p, const NodePtr& node, std::size_t i, const Bindings& base,
               std::vector<Bindings>& out) {
  if (i == p.kids.size()) {
    push_unique(out, base);
    return;
  }
  std::vector<Bindings> partial;
  match_into(p.kids[i], node->children()[i], base, partial);
  for (const auto& b : partial) match_seq(p, node, i + 1, b, out);
}

bool is_optional_free(const Pattern& p, const Bindings& base) {
  return p.kind == Pattern::Kind::optional && !base.count(p.name);
}

void match_into(const Pattern& p, const NodePtr& node, const Bindings& base, std::vector<Bindings>& out) {
  using K = Pattern::Kind;
  switch (p.kind) {
    case K::number:
      if (node->kind() == NodeKind::number && node->value() == p.value) push_unique(out, base);
      return;
    case K::string:
      if (node->kind() == NodeKind::string && node->label() == p.name) push_unique(out, base);
      return;
    case K::noun:
      if (node->kind() == NodeKind::identifier && node->label() == p.name) push_unique(out, base);
      return;
    case K::grounded:
    case K::any:
    case K::optional:
    case K::nonterminal:
    case K::immediate:
    case K::noun_capture: {
      if (auto it = base.find(p.name); it != base.end()) {
        if (it->second && same_tree(it->second, node)) push_unique(out, base);
        return;
      }
      if (!capture_accepts(p.kind, *node)) return;
      Bindings b = base;
      b[p.name] = node;
      push_unique(out, std::move(b));
      return;
    }
    case K::op: {
      std::size_t before = out.size();
      if (node->kind() == NodeKind::op && node->label() == p.name && node->children().size() == p.kids.size()) {
        match_seq(p, node, 0, base, out);
      }
      if (out.size() != before || p.kids.size() != 2) return;
      // A missing operand of + or - collapses the operator onto the other side.
      bool plus = p.name == "+";
      if (!plus && p.name != "-") return;
      if (is_optional_free(p.kids[1], base)) {
        Bindings b = base;
        b[p.kids[1].name] = nullptr;
        match_into(p.kids[0], node, b, out);
      }
      if (plus && is_optional_free(p.kids[0], base)) {
        Bindings b = base;
        b[p.kids[0].name] = nullptr;
        match_into(p.kids[1], node, b, out);
      }
      return;
    }
    case K::relation:
    case K::gender: {
      const char* label = p.kind == K::relation ? "rel" : "gender";
      if (node->kind() == NodeKind::phrase && node->label() == label) match_seq(p, node, 0, base, out);
      return;
    }
    case K::set:
      if (node->is_op("{}") && node->children().size() == p.kids.size()) match_seq(p, node, 0, base, out);
      return;
  }
}

}  // namespace

Pattern compile_pattern(const Syntax& s) {
  using K = Syntax::Kind;
  using P = Pattern::Kind;
  switch (s.kind) {
    case K::number: {
      Pattern p = leaf(P::number, {});
      p.value = s.value;
      return p;
    }
    case K::string: return leaf(P::string, s.text);
    case K::ident: return leaf(P::grounded, s.text);
    case K::dollar: return leaf(P::nonterminal, s.text);
    case K::hash: return leaf(P::any, s.text);
    case K::hash_opt: return leaf(P::optional, s.text);
    case K::immediate: return leaf(P::immediate, s.text);
    case K::op: {
      if (s.text == "neg") {
        // -e is stored as (-1)*e
        Pattern minus_one = leaf(P::number, {});
        minus_one.value = -1;
        return Pattern{P::op, "*", {}, {minus_one, compile_pattern(*s.kids[0])}};
      }
      Pattern p{P::op, s.text, {}, {}};
      for (const auto& k : s.kids) p.kids.push_back(compile_pattern(*k));
      return p;
    }
    case K::relation:
      return Pattern{P::relation, {}, {},
                     {compile_pattern(*s.kids[0]), compile_pattern(*s.kids[1]), compile_noun(*s.kids[2])}};
    case K::gender:
      return Pattern{P::gender, {}, {}, {compile_pattern(*s.kids[0]), compile_noun(*s.kids[1])}};
    case K::set: {
      Pattern p{P::set, {}, {}, {}};
      for (const auto& k : s.kids) p.kids.push_back(compile_pattern(*k));
      return p;
    }
  }
  throw std::invalid_argument("bad pattern");
}

void capture_names(const Pattern& p, std::set<std::string>& out) {
  using P = Pattern::Kind;
  switch (p.kind) {
    case P::grounded:
    case P::any:
    case P::optional:
    case P::nonterminal:
    case P::immediate:
    case P::noun_capture:
      out.insert(p.name);
      break;
    default:
      break;
  }
  for (const auto& k : p.kids) capture_names(k, out);
}

std::vector<Bindings> match_here(const Pattern& pattern, const NodePtr& node, const Bindings& base) {
  std::vector<Bindings> out;
  match_into(pattern, node, base, out);
  return out;
}

std::vector<Match> match_all(const Pattern& pattern, const NodePtr& root, const Bindings& base, bool root_only) {
  std::vector<Match> out;
  Location loc;
  std::function<void(const NodePtr&)> visit = [&](const NodePtr& n) {
    for (auto& b : match_here(pattern, n, base)) out.push_back({loc, std::move(b)});
    if (root_only) return;
    for (std::size_t i = 0; i < n->children().size(); ++i) {
      loc.push_back(i);
      visit(n->children()[i]);
      loc.pop_back();
    }
  };
  visit(root);
  return out;
}

}  // namespace cool
