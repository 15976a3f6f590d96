#include "cool/dsl.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cool/parser.hpp"

namespace cool {

// ---------------------------------------------------------------------------
// Arithmetic

NodePtr fold(const NodePtr& n) {
  if (!n || n->kind() != NodeKind::op) return n;
  std::vector<NodePtr> kids;
  bool changed = false;
  for (const auto& k : n->children()) {
    kids.push_back(fold(k));
    changed |= kids.back() != k;
  }
  const auto& op = n->label();
  if (kids.size() == 2 && kids[0]->kind() == NodeKind::number && kids[1]->kind() == NodeKind::number) {
    const Rational& a = kids[0]->value();
    const Rational& b = kids[1]->value();
    try {
      if (op == "+") return Node::number(a + b);
      if (op == "-") return Node::number(a - b);
      if (op == "*") return Node::number(a * b);
      if (op == "/") {
        if (b.is_zero()) throw RuleError("division by zero");
        return Node::number(a / b);
      }
      if (op == "^") {
        if (auto r = a.pow(b)) return Node::number(*r);
      }
    } catch (const ArithmeticError&) {
      // keep the symbolic form
    }
  }
  return changed ? Node::op(op, std::move(kids)) : n;
}

std::optional<double> evaluate(const Node& n) {
  if (n.kind() == NodeKind::number) return n.value().to_double();
  if (n.kind() != NodeKind::op || n.children().size() != 2) return std::nullopt;
  auto a = evaluate(*n.children()[0]);
  auto b = evaluate(*n.children()[1]);
  if (!a || !b) return std::nullopt;
  const auto& op = n.label();
  if (op == "+") return *a + *b;
  if (op == "-") return *a - *b;
  if (op == "*") return *a * *b;
  if (op == "/") return *a / *b;
  if (op == "^") return std::pow(*a, *b);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

void collect_body(Rule& r, const std::vector<Statement>& body);

void collect_guard(Rule& r, const GuardPtr& g) {
  if (!g) return;
  if (g->pattern) r.body_patterns.emplace(g->pattern.get(), compile_pattern(*g->pattern));
  for (const auto& k : g->kids) collect_guard(r, k);
}

void collect_body(Rule& r, const std::vector<Statement>& body) {
  for (const auto& st : body) {
    if (st.kind == Statement::Kind::jump) r.jump_targets.push_back(st.target);
    collect_guard(r, st.guard);
    collect_body(r, st.body);
    collect_body(r, st.else_body);
  }
}

}  // namespace

std::vector<Dsl::Activation> Dsl::sub_dsl(int stage) const {
  if (stage < 1 || stage > col_length) {
    throw std::out_of_range("stage " + std::to_string(stage) + " outside 1.." + std::to_string(col_length));
  }
  std::vector<Activation> out;
  for (const auto& r : rules) {
    if (r.active(stage)) out.push_back({&r, r.value(stage)});
  }
  return out;
}

Dsl compile_dsl(const std::string& name, const std::vector<RuleSource>& sources) {
  Dsl dsl;
  dsl.name = name;
  dsl.col_length = 1;
  for (const auto& s : sources) {
    for (std::size_t i = 0; i < s.heuristic.size(); ++i) {
      if (!s.heuristic[i].is_zero()) dsl.col_length = std::max(dsl.col_length, static_cast<int>(i) + 1);
    }
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    Rule r;
    r.index = i;
    r.id = name + "#" + std::to_string(i);
    r.source = sources[i];
    try {
      r.head = compile_pattern(*sources[i].head);
      collect_body(r, sources[i].body);
    } catch (const std::invalid_argument& e) {
      throw RuleError("rule at line " + std::to_string(sources[i].line) + ": " + e.what());
    }
    capture_names(r.head, r.head_captures);
    r.h = sources[i].heuristic;
    r.h.resize(dsl.col_length, Rational(0));
    dsl.rules.push_back(std::move(r));
  }
  return dsl;
}

Dsl load_dsl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read DSL file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return compile_dsl(std::filesystem::path(path).stem().string(), parse_rules(ss.str()));
}

Dsl with_heuristics(const Dsl& dsl, HeuristicMode mode) {
  if (mode == HeuristicMode::col) return dsl;
  Dsl out = dsl;
  out.col_length = 1;
  for (auto& r : out.rules) {
    std::optional<Rational> best;
    for (const auto& v : r.h) {
      if (!v.is_zero() && (!best || v > *best)) best = v;
    }
    Rational value = mode == HeuristicMode::plain ? Rational(-1) : best.value_or(Rational(0));
    if (mode == HeuristicMode::plain && !best) value = 0;
    r.h = {value};
  }
  return out;
}

std::vector<Binding> match(const Rule& rule, const PartialProgram& p) {
  std::vector<Binding> out;
  bool root_only = rule.source.kind == HeadKind::terminal;
  for (auto& m : match_all(rule.head, p.tree, {}, root_only)) out.push_back({std::move(m.bindings), m.location});
  return out;
}

// ---------------------------------------------------------------------------
// Rule bodies

namespace {

struct Instantiator {
  Instantiator(const Bindings& e, const std::set<std::string>& caps) : env(e), head_captures(caps) {}

  const Bindings& env;
  const std::set<std::string>& head_captures;
  std::size_t refs = 0;
  std::size_t reused = 0;
  std::set<std::string> used;

  NodePtr ref(const std::string& name) {
    auto it = env.find(name);
    if (it == env.end()) throw RuleError("unbound capture '" + name + "'");
    if (it->second && head_captures.count(name)) {
      ++refs;
      reused += it->second->size();
      used.insert(name);
    }
    return it->second;
  }

  NodePtr noun(const Syntax& s) {
    if (s.kind == Syntax::Kind::ident) return Node::identifier(s.text);
    return build(s);
  }

  NodePtr build(const Syntax& s) {
    using K = Syntax::Kind;
    switch (s.kind) {
      case K::number: return Node::number(s.value);
      case K::string: return Node::string(s.text);
      case K::ident: return env.count(s.text) ? ref(s.text) : Node::identifier(s.text);
      case K::dollar: return env.count(s.text) ? ref(s.text) : Node::nonterminal(s.text);
      case K::hash:
      case K::hash_opt:
      case K::immediate: return ref(s.text);
      case K::relation: {
        auto a = build(*s.kids[0]);
        auto b = build(*s.kids[1]);
        auto n = noun(*s.kids[2]);
        if (!a || !b || !n) throw RuleError("absent capture inside a relation phrase");
        return Node::relation(a, b, n);
      }
      case K::gender: {
        auto a = build(*s.kids[0]);
        auto g = noun(*s.kids[1]);
        if (!a || !g) throw RuleError("absent capture inside a gender phrase");
        return Node::gender(a, g);
      }
      case K::set: {
        std::vector<NodePtr> items;
        for (const auto& k : s.kids) {
          if (auto n = build(*k)) items.push_back(n);
        }
        return Node::op("{}", std::move(items));
      }
      case K::op: {
        if (s.text == "neg") {
          auto x = build(*s.kids[0]);
          if (!x) return nullptr;
          if (x->kind() == NodeKind::number) return Node::number(-x->value());
          return Node::op("*", {Node::number(-1), x});
        }
        auto l = build(*s.kids[0]);
        auto r = build(*s.kids[1]);
        const auto& op = s.text;
        // absent operands behave as zero
        if (op == "+" || op == "&") {
          if (!l) return r;
          if (!r) return l;
        } else if (op == "-") {
          if (!r) return l;
          if (!l) l = Node::number(0);
        } else if (op == "==" || op == "=") {
          if (!l) l = Node::number(0);
          if (!r) r = Node::number(0);
        } else if (!l || !r) {
          return nullptr;
        }
        return Node::op(op, {l, r});
      }
    }
    return nullptr;
  }
};

enum class Ctl { next, end };

struct Engine {
  const Dsl& dsl;
  const Rule& rule;
  const PartialProgram& p;
  const Binding& b;
  NodePtr old;
  ApplyOutcome out;
  bool aborted = false;
  bool jumped = false;

  NodePtr value_of(const SyntaxPtr& expr, const Bindings& env) {
    Instantiator inst(env, rule.head_captures);
    auto n = inst.build(*expr);
    if (!n) return Node::number(0);
    if (!n->grounded()) throw RuleError("arithmetic on non-grounded operand in rule " + rule.id);
    return fold(n);
  }

  void emit(NodePtr replacement, std::size_t ops, int stage, const Bindings& env) {
    std::size_t rotations = 0;
    auto tree = normalize_conjunctions(replace_at(p.tree, b.location, std::move(replacement)), &rotations);
    if (same_tree(tree, p.tree) && stage == p.stage) return;
    PartialProgram d;
    d.tree = tree;
    d.stage = stage;
    d.bound_domain = dsl.name;
    out.derived.push_back(std::move(d));
    out.ops.push_back(std::max<std::size_t>(1, ops + rotations));
    out.bindings.push_back(env);
  }

  void emit_return(const SyntaxPtr& tmpl, const Bindings& env) {
    Instantiator inst(env, rule.head_captures);
    auto n = inst.build(*tmpl);
    if (!n) n = Node::number(0);
    std::size_t kept = 0;
    for (const auto& name : inst.used) kept += env.at(name)->size();
    std::size_t removed = old->size() - std::min(old->size(), kept);
    std::size_t inserted = n->size() - std::min(n->size(), inst.reused);
    emit(n, removed + inserted + inst.refs, p.stage, env);
  }

  void emit_assign(const Statement& st, const Bindings& env) {
    std::string label = st.name;
    if (auto it = env.find(st.name); it != env.end()) {
      // The capture landed on a compound subtree: nothing to assign, so no derivation.
      if (!it->second || it->second->kind() != NodeKind::nonterminal) return;
      label = it->second->label();
    }
    Instantiator inst(env, rule.head_captures);
    auto value = inst.build(*st.expr);
    if (!value) value = Node::number(0);
    if (!value->grounded()) return;
    value = fold(value);
    auto n = Node::op("=", {Node::identifier(label), value});
    emit(n, old->size() + n->size(), p.stage, env);
  }

  void emit_jump(int target) {
    if (target < 1) throw RuleError("jump target out of range in rule " + rule.id);
    target = std::min(target, dsl.col_length);
    jumped = true;
    out.jump_target = target;
    if (target == p.stage) return;
    PartialProgram d = p;
    d.stage = target;
    d.bound_domain = dsl.name;
    out.derived.push_back(d);
    out.ops.push_back(1);
    out.bindings.push_back(b.captures);
  }

  // -------------------------------------------------------------------------

  std::vector<Bindings> solve(const Guard& g, const Bindings& env) {
    using K = Guard::Kind;
    switch (g.kind) {
      case K::exist:
      case K::find: {
        NodePtr subject;
        if (g.subject == "this") {
          subject = p.tree;
        } else {
          auto it = env.find(g.subject);
          if (it == env.end()) throw RuleError("unbound subject '" + g.subject + "' in rule " + rule.id);
          subject = it->second;
        }
        std::vector<Match> matches;
        if (subject) matches = match_all(rule.body_patterns.at(g.pattern.get()), subject, env);
        if (!g.expect) return matches.empty() ? std::vector<Bindings>{env} : std::vector<Bindings>{};
        if (g.kind == K::exist) return matches.empty() ? std::vector<Bindings>{} : std::vector<Bindings>{env};
        std::vector<Bindings> sols;
        for (auto& m : matches) sols.push_back(std::move(m.bindings));
        return sols;
      }
      case K::compare:
        return compare(g, env) ? std::vector<Bindings>{env} : std::vector<Bindings>{};
      case K::negate:
        return solve(*g.kids[0], env).empty() ? std::vector<Bindings>{env} : std::vector<Bindings>{};
      case K::conj: {
        std::vector<Bindings> sols{env};
        for (const auto& k : g.kids) {
          std::vector<Bindings> next;
          for (const auto& s : sols) {
            for (auto& t : solve(*k, s)) next.push_back(std::move(t));
          }
          sols = std::move(next);
          if (sols.empty()) break;
        }
        return sols;
      }
      case K::disj: {
        for (const auto& k : g.kids) {
          auto sols = solve(*k, env);
          if (!sols.empty()) return sols;
        }
        return {};
      }
    }
    return {};
  }

  bool compare(const Guard& g, const Bindings& env) {
    Instantiator li(env, rule.head_captures);
    Instantiator ri(env, rule.head_captures);
    auto l = li.build(*g.lhs);
    auto r = ri.build(*g.rhs);
    if (!l) l = Node::number(0);
    if (!r) r = Node::number(0);
    l = fold(l);
    r = fold(r);
    const auto& c = g.cmp;
    std::optional<double> dl, dr;
    if (l->kind() == NodeKind::number && r->kind() == NodeKind::number) {
      auto ord = l->value() <=> r->value();
      if (c == "==") return ord == 0;
      if (c == "!=") return ord != 0;
      if (c == "<") return ord < 0;
      if (c == "<=") return ord <= 0;
      if (c == ">") return ord > 0;
      return ord >= 0;
    }
    if (c == "==") return same_tree(l, r);
    if (c == "!=") return !same_tree(l, r);
    dl = evaluate(*l);
    dr = evaluate(*r);
    if (!dl || !dr) return false;
    if (c == "<") return *dl < *dr;
    if (c == "<=") return *dl <= *dr;
    if (c == ">") return *dl > *dr;
    return *dl >= *dr;
  }

  Ctl exec(const std::vector<Statement>& body, Bindings& env) {
    using K = Statement::Kind;
    for (const auto& st : body) {
      switch (st.kind) {
        case K::ret:
          emit_return(st.expr, env);
          return Ctl::end;
        case K::abort:
          aborted = true;
          return Ctl::end;
        case K::jump:
          emit_jump(st.target);
          return Ctl::end;
        case K::assign:
          emit_assign(st, env);
          return Ctl::end;
        case K::bind:
          env[st.name] = value_of(st.expr, env);
          break;
        case K::placeholder:
        case K::reset:
          env.erase(st.name);
          break;
        case K::branch: {
          auto sols = solve(*st.guard, env);
          if (!sols.empty()) {
            Bindings inner = sols.front();
            if (exec(st.body, inner) == Ctl::end) return Ctl::end;
            env = std::move(inner);
          } else if (st.has_else) {
            Bindings inner = env;
            if (exec(st.else_body, inner) == Ctl::end) return Ctl::end;
            env = std::move(inner);
          }
          break;
        }
        case K::loop: {
          // each solution of the guard is one iteration; terminators end only that iteration
          for (auto& sol : solve(*st.guard, env)) exec(st.body, sol);
          break;
        }
      }
    }
    return Ctl::next;
  }
};

bool terminates(const std::vector<Statement>& body) {
  using K = Statement::Kind;
  for (const auto& st : body) {
    switch (st.kind) {
      case K::ret:
      case K::abort:
      case K::jump:
      case K::assign:
        return true;
      case K::branch:
        if (st.has_else && terminates(st.body) && terminates(st.else_body)) return true;
        break;
      default:
        break;
    }
  }
  return false;
}

}  // namespace

ApplyOutcome apply(const Dsl& dsl, const Rule& rule, const PartialProgram& p, const Binding& b) {
  Engine e{dsl, rule, p, b, node_at(p.tree, b.location), {}};
  Bindings env = b.captures;
  e.exec(rule.source.body, env);
  for (auto n : e.out.ops) e.out.tree_ops += n;
  if (e.out.derived.empty()) {
    e.out.flow = e.aborted ? Flow::aborted : Flow::stay;
  } else {
    e.out.flow = e.jumped ? Flow::jump : Flow::advance_allowed;
  }
  if (!e.jumped) e.out.jump_target = 0;
  return std::move(e.out);
}

std::vector<StaticDiagnostic> check_dsl(const Dsl& dsl) {
  using S = StaticDiagnostic::Severity;
  std::vector<StaticDiagnostic> out;
  std::vector<int> per_stage(dsl.col_length + 1, 0);
  for (const auto& r : dsl.rules) {
    bool any = false;
    for (int s = 1; s <= dsl.col_length; ++s) {
      if (r.active(s)) {
        any = true;
        ++per_stage[s];
      }
    }
    int line = r.source.line;
    if (!any) out.push_back({S::warning, "rule " + r.id + " is unreachable: every heuristic component is zero", line});
    for (int t : r.jump_targets) {
      if (t < 1 || t > dsl.col_length) {
        out.push_back({S::error,
                       "rule " + r.id + " jumps to stage " + std::to_string(t) + " outside 1.." +
                           std::to_string(dsl.col_length),
                       line});
      }
    }
    if (!terminates(r.source.body)) {
      out.push_back({S::warning, "rule " + r.id + " has a path that ends without return, abort or logicjump", line});
    }
  }
  for (int s = 1; s <= dsl.col_length; ++s) {
    if (per_stage[s] == 0) out.push_back({S::warning, "stage " + std::to_string(s) + " has no active rules", 0});
  }
  return out;
}

}  // namespace cool
