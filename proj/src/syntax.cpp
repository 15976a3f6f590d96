#include "cool/syntax.hpp"

#include <sstream>
#include <stdexcept>

namespace cool {

SyntaxPtr Syntax::make(Kind k, std::string text, std::vector<SyntaxPtr> kids) {
  auto s = std::make_shared<Syntax>();
  s->kind = k;
  s->text = std::move(text);
  s->kids = std::move(kids);
  return s;
}

SyntaxPtr Syntax::num(Rational v) {
  auto s = std::make_shared<Syntax>();
  s->kind = Kind::number;
  s->value = v;
  return s;
}

bool syntax_equal(const SyntaxPtr& a, const SyntaxPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->text != b->text || a->value != b->value || a->kids.size() != b->kids.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a->kids.size(); ++i) {
    if (!syntax_equal(a->kids[i], b->kids[i])) return false;
  }
  return true;
}

namespace {

int prec(const Syntax& s) {
  if (s.kind != Syntax::Kind::op) return 100;
  const auto& o = s.text;
  if (o == "&") return 10;
  if (o == "==" || o == "=") return 20;
  if (o == "+" || o == "-") return 30;
  if (o == "*" || o == "/") return 40;
  if (o == "neg") return 45;
  if (o == "^") return 50;
  return 100;
}

void emit(const Syntax& s, std::ostringstream& out);

void emit_operand(const Syntax& s, int parent, bool wrap_equal, std::ostringstream& out) {
  int p = prec(s);
  bool neg_num = s.kind == Syntax::Kind::number && s.value.sign() < 0;
  bool wrap = p < parent || (wrap_equal && p == parent) || neg_num;
  if (wrap) out << '(';
  emit(s, out);
  if (wrap) out << ')';
}

void emit(const Syntax& s, std::ostringstream& out) {
  using K = Syntax::Kind;
  switch (s.kind) {
    case K::number: out << s.value.to_string(); return;
    case K::string: out << '"' << s.text << '"'; return;
    case K::ident: out << s.text; return;
    case K::dollar: out << '$' << s.text; return;
    case K::hash: out << '#' << s.text; return;
    case K::hash_opt: out << "#?" << s.text; return;
    case K::immediate: out << "immediate:" << s.text; return;
    case K::relation: {
      out << '(';
      emit(*s.kids[0], out);
      out << ") is (";
      emit(*s.kids[1], out);
      out << ")s ";
      if (s.kids[2]->kind == K::dollar) {
        out << "($" << s.kids[2]->text << ')';
      } else {
        emit(*s.kids[2], out);
      }
      return;
    }
    case K::gender:
      out << '(';
      emit(*s.kids[0], out);
      out << ") is ";
      emit(*s.kids[1], out);
      return;
    case K::set:
      out << '{';
      for (std::size_t i = 0; i < s.kids.size(); ++i) {
        if (i) out << ", ";
        emit(*s.kids[i], out);
      }
      out << '}';
      return;
    case K::op: {
      int p = prec(s);
      if (s.text == "neg") {
        out << '-';
        emit_operand(*s.kids[0], p, true, out);
        return;
      }
      bool right_assoc = s.text == "^" || s.text == "&";
      emit_operand(*s.kids[0], p, right_assoc, out);
      if (s.text == "*" || s.text == "/" || s.text == "^") {
        out << s.text;
      } else {
        out << ' ' << s.text << ' ';
      }
      emit_operand(*s.kids[1], p, !right_assoc, out);
      return;
    }
  }
}

void indent(std::ostringstream& out, int depth) {
  for (int i = 0; i < depth; ++i) out << "    ";
}

void emit_statements(const std::vector<Statement>& body, int depth, std::ostringstream& out) {
  using K = Statement::Kind;
  for (const auto& st : body) {
    indent(out, depth);
    switch (st.kind) {
      case K::ret: out << "return: " << to_source(*st.expr) << ";\n"; break;
      case K::abort: out << "abort;\n"; break;
      case K::jump: out << "logicjump(" << st.target << ");\n"; break;
      case K::bind: out << "new:" << st.name << " = " << to_source(*st.expr) << ";\n"; break;
      case K::placeholder: out << "placeholder:" << st.name << ";\n"; break;
      case K::reset: out << st.name << ".reset();\n"; break;
      case K::assign: out << st.name << " = " << to_source(*st.expr) << ";\n"; break;
      case K::branch:
        out << "if(" << to_source(*st.guard) << "){\n";
        emit_statements(st.body, depth + 1, out);
        indent(out, depth);
        out << "}";
        if (st.has_else) {
          out << " else {\n";
          emit_statements(st.else_body, depth + 1, out);
          indent(out, depth);
          out << "}";
        }
        out << "\n";
        break;
      case K::loop:
        out << "while(" << to_source(*st.guard) << "){\n";
        emit_statements(st.body, depth + 1, out);
        indent(out, depth);
        out << "}\n";
        break;
    }
  }
}

}  // namespace

std::string to_source(const Syntax& s) {
  std::ostringstream out;
  emit(s, out);
  return out.str();
}

void collect_dollars(const Syntax& s, std::set<std::string>& out) {
  if (s.kind == Syntax::Kind::dollar) out.insert(s.text);
  for (const auto& k : s.kids) collect_dollars(*k, out);
}

bool guard_equal(const GuardPtr& a, const GuardPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->subject != b->subject || a->expect != b->expect || a->cmp != b->cmp ||
      a->kids.size() != b->kids.size()) {
    return false;
  }
  if (!syntax_equal(a->pattern, b->pattern) || !syntax_equal(a->lhs, b->lhs) || !syntax_equal(a->rhs, b->rhs)) {
    return false;
  }
  for (std::size_t i = 0; i < a->kids.size(); ++i) {
    if (!guard_equal(a->kids[i], b->kids[i])) return false;
  }
  return true;
}

std::string to_source(const Guard& g) {
  using K = Guard::Kind;
  auto wrap = [](const Guard& k, K parent) {
    bool need = (parent == K::conj && k.kind == K::disj) ||
                (parent == K::negate && (k.kind == K::conj || k.kind == K::disj));
    return need ? "(" + to_source(k) + ")" : to_source(k);
  };
  switch (g.kind) {
    case K::conj:
    case K::disj: {
      std::string sep = g.kind == K::conj ? " && " : " || ";
      std::string s;
      for (std::size_t i = 0; i < g.kids.size(); ++i) {
        if (i) s += sep;
        s += wrap(*g.kids[i], g.kind);
      }
      return s;
    }
    case K::negate:
      return "!" + (g.kids[0]->kind == K::compare ? "(" + to_source(*g.kids[0]) + ")" : wrap(*g.kids[0], K::negate));
    case K::exist:
    case K::find: {
      std::string s = (g.subject == "this" ? std::string("this expr") : g.subject) + "." +
                      (g.kind == K::exist ? "exist" : "find") + " subexpr{" + to_source(*g.pattern) + "}";
      if (!g.expect) s += " == false";
      return s;
    }
    case K::compare:
      return to_source(*g.lhs) + " " + g.cmp + " " + to_source(*g.rhs);
  }
  return {};
}

bool statements_equal(const std::vector<Statement>& a, const std::vector<Statement>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.kind != y.kind || x.name != y.name || x.target != y.target || x.has_else != y.has_else) return false;
    if (!syntax_equal(x.expr, y.expr) || !guard_equal(x.guard, y.guard)) return false;
    if (!statements_equal(x.body, y.body) || !statements_equal(x.else_body, y.else_body)) return false;
  }
  return true;
}

bool rule_equal(const RuleSource& a, const RuleSource& b) {
  return a.kind == b.kind && a.heuristic == b.heuristic && syntax_equal(a.head, b.head) &&
         statements_equal(a.body, b.body);
}

std::string to_source(const RuleSource& r) {
  std::ostringstream out;
  if (r.kind == HeadKind::expression) out << "expr:";
  out << "@(";
  for (std::size_t i = 0; i < r.heuristic.size(); ++i) {
    if (i) out << ',';
    out << r.heuristic[i].to_string();
  }
  out << "){" << to_source(*r.head) << "}{\n";
  emit_statements(r.body, 1, out);
  out << "}\n";
  return out.str();
}

std::string to_source(const std::vector<RuleSource>& rules) {
  std::string s;
  for (const auto& r : rules) s += to_source(r);
  return s;
}

NodePtr lower(const Syntax& s, const std::set<std::string>& unknowns) {
  using K = Syntax::Kind;
  switch (s.kind) {
    case K::number: return Node::number(s.value);
    case K::string: return Node::string(s.text);
    case K::ident: return unknowns.count(s.text) ? Node::nonterminal(s.text) : Node::identifier(s.text);
    case K::dollar: return Node::nonterminal(s.text);
    case K::relation:
      return Node::relation(lower(*s.kids[0], unknowns), lower(*s.kids[1], unknowns), lower(*s.kids[2], unknowns));
    case K::gender: return Node::gender(lower(*s.kids[0], unknowns), lower(*s.kids[1], unknowns));
    case K::set: {
      std::vector<NodePtr> kids;
      for (const auto& k : s.kids) kids.push_back(lower(*k, unknowns));
      return Node::op("{}", std::move(kids));
    }
    case K::op: {
      if (s.text == "neg") {
        auto inner = lower(*s.kids[0], unknowns);
        if (inner->kind() == NodeKind::number) return Node::number(-inner->value());
        return Node::op("*", {Node::number(-1), inner});
      }
      return Node::op(s.text, {lower(*s.kids[0], unknowns), lower(*s.kids[1], unknowns)});
    }
    case K::hash:
    case K::hash_opt:
    case K::immediate:
      throw std::invalid_argument("pattern capture '" + to_source(s) + "' outside a rule head");
  }
  return nullptr;
}

}  // namespace cool
