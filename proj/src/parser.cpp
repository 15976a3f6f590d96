#include "cool/parser.hpp"

#include <cctype>
#include <regex>
#include <sstream>

namespace cool {

ParseError::ParseError(const std::string& message, int line, int column, std::string token)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message +
                         (token.empty() ? std::string() : " near '" + token + "'")),
      line_(line),
      column_(column),
      token_(std::move(token)) {}

namespace {

enum class Tok { ident, number, string, punct, end };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
  bool space_before;
};

struct Comment {
  int line;
  std::string text;
};

struct Lexed {
  std::vector<Token> tokens;
  std::vector<Comment> comments;
};

const char* const kPuncts[] = {"-->", "...", "==", "!=", "<=", ">=", "&&", "||", "(", ")", "{", "}", "[", "]",
                               ",",   ";",   ":",  ".",  "+",  "-",  "*",  "/",  "^", "=", "<", ">", "!", "&",
                               "|",   "#",   "?",  "$",  "@"};

Lexed lex(std::string_view src) {
  Lexed out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  bool space = true;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      space = true;
      continue;
    }
    if (src.substr(i, 2) == "//") {
      std::size_t end = src.find('\n', i);
      if (end == std::string_view::npos) end = src.size();
      out.comments.push_back({line, std::string(src.substr(i + 2, end - i - 2))});
      advance(end - i);
      space = true;
      continue;
    }
    Token t{Tok::punct, {}, line, col, space};
    space = false;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      t.kind = Tok::number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"') throw ParseError("unterminated string", line, col, "\"");
      t.kind = Tok::string;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      advance(j + 1 - i);
    } else {
      bool found = false;
      for (const char* p : kPuncts) {
        std::string_view ps(p);
        if (src.substr(i, ps.size()) == ps) {
          t.text = std::string(ps);
          advance(ps.size());
          found = true;
          break;
        }
      }
      if (!found) throw ParseError("unexpected character", line, col, std::string(1, c));
    }
    out.tokens.push_back(std::move(t));
  }
  out.tokens.push_back({Tok::end, {}, line, col, true});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::end; }
  bool is_punct(std::string_view p, std::size_t k = 0) const {
    return peek(k).kind == Tok::punct && peek(k).text == p;
  }
  bool is_ident(std::string_view w, std::size_t k = 0) const {
    return peek(k).kind == Tok::ident && peek(k).text == w;
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(std::string_view p) {
    if (!is_punct(p)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    throw ParseError(message, t.line, t.col, t.kind == Tok::end ? "<end of input>" : t.text);
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }
  void expect_word(std::string_view w) {
    if (!is_ident(w)) fail("expected '" + std::string(w) + "'");
    next();
  }
  std::string ident(const char* what) {
    if (peek().kind != Tok::ident) fail(std::string("expected ") + what);
    return next().text;
  }
  std::size_t pos() const { return pos_; }
  void reset(std::size_t p) { pos_ = p; }

  // -------------------------------------------------------------------------
  // Expressions, lowest precedence first.

  SyntaxPtr expression() { return conjunction(); }

  SyntaxPtr conjunction() {
    auto lhs = equality();
    if (accept("&")) return Syntax::make(Syntax::Kind::op, "&", {lhs, conjunction()});
    return lhs;
  }

  SyntaxPtr equality() {
    auto lhs = additive();
    while (is_punct("==") || is_punct("=")) {
      std::string op = next().text;
      lhs = Syntax::make(Syntax::Kind::op, op, {lhs, additive()});
    }
    return lhs;
  }

  SyntaxPtr additive() {
    auto lhs = multiplicative();
    while ((is_punct("+") || is_punct("-")) && !is_punct("-->")) {
      std::string op = next().text;
      lhs = Syntax::make(Syntax::Kind::op, op, {lhs, multiplicative()});
    }
    return lhs;
  }

  SyntaxPtr multiplicative() {
    auto lhs = unary();
    while (is_punct("*") || is_punct("/")) {
      std::string op = next().text;
      lhs = Syntax::make(Syntax::Kind::op, op, {lhs, unary()});
    }
    return lhs;
  }

  SyntaxPtr unary() {
    if (accept("-")) {
      if (peek().kind == Tok::number && !is_punct("^", 1)) {
        auto v = Rational::parse(next().text);
        return Syntax::num(-*v);
      }
      return Syntax::make(Syntax::Kind::op, "neg", {unary()});
    }
    return power();
  }

  SyntaxPtr power() {
    auto base = primary();
    if (accept("^")) return Syntax::make(Syntax::Kind::op, "^", {base, unary()});
    return base;
  }

  SyntaxPtr primary() {
    using K = Syntax::Kind;
    const Token& t = peek();
    if (t.kind == Tok::number) {
      auto v = Rational::parse(t.text);
      if (!v) fail("bad number");
      next();
      return Syntax::num(*v);
    }
    if (t.kind == Tok::string) return Syntax::make(K::string, next().text);
    if (accept("$")) return Syntax::make(K::dollar, adjacent_ident("$"));
    if (accept("#")) {
      if (accept("?")) return Syntax::make(K::hash_opt, adjacent_ident("#?"));
      return Syntax::make(K::hash, adjacent_ident("#"));
    }
    if (t.kind == Tok::ident) {
      if (t.text == "immediate" && is_punct(":", 1)) {
        next();
        next();
        return Syntax::make(K::immediate, ident("capture name after immediate:"));
      }
      return Syntax::make(K::ident, next().text);
    }
    if (accept("{")) {
      std::vector<SyntaxPtr> items;
      if (!is_punct("}")) {
        items.push_back(expression());
        while (accept(",")) items.push_back(expression());
      }
      expect("}");
      return Syntax::make(K::set, {}, std::move(items));
    }
    if (accept("(")) {
      auto inner = expression();
      expect(")");
      if (is_ident("is")) return phrase(inner);
      return inner;
    }
    fail("expected an expression");
  }

  // `(a) is (b)s noun`, `(a) is (b)s ($r)`, `(a) is male`
  SyntaxPtr phrase(SyntaxPtr subject) {
    using K = Syntax::Kind;
    next();  // is
    if (accept("(")) {
      auto object = expression();
      expect(")");
      if (!is_ident("s") || peek().space_before) fail("expected possessive 's' after relation object");
      next();
      SyntaxPtr noun;
      if (accept("(")) {
        expect("$");
        noun = Syntax::make(K::dollar, adjacent_ident("$"));
        expect(")");
      } else {
        noun = noun_or_capture();
      }
      return Syntax::make(K::relation, {}, {subject, object, noun});
    }
    return Syntax::make(K::gender, {}, {subject, noun_or_capture()});
  }

  // Rule patterns may capture the noun itself with `#name`.
  SyntaxPtr noun_or_capture() {
    if (accept("#")) return Syntax::make(Syntax::Kind::hash, adjacent_ident("#"));
    return Syntax::make(Syntax::Kind::ident, noun_word());
  }

  std::string noun_word() {
    std::string word = ident("kinship noun");
    while (is_punct("-") && !peek().space_before && peek(1).kind == Tok::ident && !peek(1).space_before) {
      next();
      word += "-" + next().text;
    }
    return word;
  }

  std::string adjacent_ident(const char* sigil) {
    if (peek().kind != Tok::ident || peek().space_before) fail(std::string("expected a name after '") + sigil + "'");
    return next().text;
  }

  // -------------------------------------------------------------------------
  // Guards

  GuardPtr guard() {
    auto g = guard_and();
    if (!is_punct("||")) return g;
    auto out = std::make_shared<Guard>();
    out->kind = Guard::Kind::disj;
    out->kids.push_back(g);
    while (accept("||")) out->kids.push_back(guard_and());
    return out;
  }

  GuardPtr guard_and() {
    auto g = guard_not();
    if (!is_punct("&&")) return g;
    auto out = std::make_shared<Guard>();
    out->kind = Guard::Kind::conj;
    out->kids.push_back(g);
    while (accept("&&")) out->kids.push_back(guard_not());
    return out;
  }

  GuardPtr guard_not() {
    if (accept("!")) {
      auto out = std::make_shared<Guard>();
      out->kind = Guard::Kind::negate;
      out->kids.push_back(guard_not());
      return out;
    }
    if (is_punct("(")) {
      std::size_t save = pos();
      try {
        next();
        auto g = guard();
        expect(")");
        if (!is_comparison()) return g;
      } catch (const ParseError&) {
      }
      reset(save);
    }
    return guard_atom();
  }

  bool is_comparison() const {
    for (const char* c : {"==", "!=", "<", "<=", ">", ">="}) {
      if (is_punct(c)) return true;
    }
    return false;
  }

  GuardPtr guard_atom() {
    auto out = std::make_shared<Guard>();
    bool subject_this = is_ident("this") && is_ident("expr", 1) && is_punct(".", 2);
    bool subject_name = peek().kind == Tok::ident && is_punct(".", 1) &&
                        (is_ident("exist", 2) || is_ident("find", 2));
    if (subject_this || subject_name) {
      if (subject_this) {
        next();
        next();
        out->subject = "this";
      } else {
        out->subject = next().text;
      }
      expect(".");
      std::string verb = ident("exist or find");
      if (verb == "exist") {
        out->kind = Guard::Kind::exist;
      } else if (verb == "find") {
        out->kind = Guard::Kind::find;
      } else {
        fail("unsupported subexpression query '" + verb + "'");
      }
      expect_word("subexpr");
      expect("{");
      out->pattern = expression();
      expect("}");
      if (is_punct("==") && (is_ident("false", 1) || is_ident("true", 1))) {
        next();
        out->expect = next().text == "true";
      }
      return out;
    }
    out->kind = Guard::Kind::compare;
    out->lhs = additive();
    if (!is_comparison()) fail("expected a comparison");
    out->cmp = next().text;
    out->rhs = additive();
    return out;
  }

  // -------------------------------------------------------------------------
  // Statements and rules

  std::vector<Statement> block() {
    expect("{");
    auto body = statements();
    expect("}");
    return body;
  }

  std::vector<Statement> statements() {
    std::vector<Statement> body;
    while (!is_punct("}") && !at_end()) {
      if (accept("...") || accept(";")) continue;
      body.push_back(statement());
    }
    return body;
  }

  Statement statement() {
    using K = Statement::Kind;
    Statement st;
    if (is_ident("return") && is_punct(":", 1)) {
      next();
      next();
      st.kind = K::ret;
      st.expr = expression();
      expect(";");
      return st;
    }
    if (is_ident("abort")) {
      next();
      st.kind = K::abort;
      expect(";");
      return st;
    }
    if (is_ident("logicjump")) {
      next();
      st.kind = K::jump;
      expect("(");
      if (peek().kind != Tok::number) fail("expected a stage number");
      st.target = std::stoi(next().text);
      expect(")");
      expect(";");
      return st;
    }
    if (is_ident("if") || is_ident("while")) {
      st.kind = next().text == "if" ? K::branch : K::loop;
      expect("(");
      st.guard = guard();
      expect(")");
      st.body = block();
      if (st.kind == K::branch && is_ident("else")) {
        next();
        st.has_else = true;
        if (is_ident("if")) {
          st.else_body.push_back(statement());
        } else {
          st.else_body = block();
        }
      }
      return st;
    }
    if ((is_ident("new") || is_ident("placeholder")) && is_punct(":", 1)) {
      bool is_new = next().text == "new";
      next();
      st.name = ident("a name");
      if (is_new) {
        st.kind = K::bind;
        expect("=");
        st.expr = expression();
      } else {
        st.kind = K::placeholder;
      }
      expect(";");
      return st;
    }
    if (peek().kind == Tok::ident && is_punct(".", 1) && is_ident("reset", 2)) {
      st.kind = K::reset;
      st.name = next().text;
      next();
      next();
      expect("(");
      expect(")");
      expect(";");
      return st;
    }
    if (peek().kind == Tok::ident && is_punct("=", 1)) {
      st.kind = K::assign;
      st.name = next().text;
      next();
      st.expr = expression();
      expect(";");
      return st;
    }
    fail("unsupported statement");
  }

  std::vector<Rational> heuristic() {
    expect("@");
    expect("(");
    std::vector<Rational> h;
    do {
      bool neg = accept("-");
      if (peek().kind != Tok::number) fail("expected a heuristic value");
      auto v = Rational::parse(next().text);
      h.push_back(neg ? -*v : *v);
    } while (accept(","));
    expect(")");
    return h;
  }

  RuleSource rule() {
    RuleSource r;
    r.line = peek().line;
    if (is_ident("expr") && is_punct(":", 1)) {
      next();
      next();
      r.kind = HeadKind::expression;
    } else if (is_punct("@")) {
      r.kind = HeadKind::terminal;
    } else {
      fail("expected a rule");
    }
    r.heuristic = heuristic();
    expect("{");
    r.head = expression();
    expect("}");
    r.body = block();
    accept(";");
    return r;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::optional<std::string> gold_from_comment(const std::string& text) {
  static const std::regex phrase(R"([Aa]ns:\s*\(\s*\w+\s*\)\s*is\s*\(\s*\w+\s*\)s\s+([A-Za-z-]+))");
  static const std::regex plain(R"([Aa]ns:\s*(.*\S))");
  std::smatch m;
  if (std::regex_search(text, m, phrase)) return m[1].str();
  if (std::regex_search(text, m, plain)) return m[1].str();
  return std::nullopt;
}

}  // namespace

NodePtr lower_goal(const Syntax& statement) {
  std::set<std::string> unknowns;
  collect_dollars(statement, unknowns);
  return lower(statement, unknowns);
}

std::vector<RuleSource> parse_rules(std::string_view text) {
  Parser p(lex(text).tokens);
  std::vector<RuleSource> rules;
  while (!p.at_end()) {
    if (p.accept("...") || p.accept(";")) continue;
    rules.push_back(p.rule());
  }
  return rules;
}

SyntaxPtr parse_expression(std::string_view text) {
  Parser p(lex(text).tokens);
  auto e = p.expression();
  p.accept(";");
  if (!p.at_end()) p.fail("trailing input after expression");
  return e;
}

TaskFile parse_task_file(std::string_view text) {
  auto lexed = lex(text);
  Parser p(lexed.tokens);
  TaskFile file;
  std::set<std::string> loads;
  std::vector<Declaration> decls;
  int window_start = 0;  // comments after this line belong to the next task

  auto gold_before = [&](int line) {
    std::optional<std::string> gold;
    for (const auto& c : lexed.comments) {
      if (c.line > window_start && c.line <= line) {
        if (auto g = gold_from_comment(c.text)) gold = g;
      }
    }
    return gold;
  };

  while (!p.at_end()) {
    if (p.accept("...") || p.accept(";")) continue;
    const Token& start = p.peek();
    if (p.accept("#")) {
      std::string directive = p.adjacent_ident("#");
      if (directive != "load") {
        throw ParseError("unknown directive '#" + directive + "'", start.line, start.col, directive);
      }
      p.expect("(");
      std::string lib = p.ident("a library name");
      p.expect(")");
      loads.insert(lib);
      file.items.push_back({TaskFile::Item::Kind::load, lib, nullptr, std::nullopt});
      continue;
    }
    if (p.is_ident("new") && p.is_punct(":", 1)) {
      p.next();
      p.next();
      std::string name = p.ident("a variable name");
      p.expect("=");
      auto value = p.expression();
      p.expect(";");
      decls.push_back({name, value});
      file.items.push_back({TaskFile::Item::Kind::declaration, name, value, std::nullopt});
      continue;
    }
    if (p.peek().kind == Tok::ident && p.is_punct("-->", 1)) {
      std::string name = p.next().text;
      p.next();
      if (p.peek().kind != Tok::string) p.fail("expected an output target string");
      std::string target = p.next().text;
      if (target != "#FILE(SCREEN)") {
        throw ParseError("unsupported output target", start.line, start.col, target);
      }
      p.expect(";");
      if (file.tasks.empty()) throw ParseError("output directive before any task", start.line, start.col, name);
      file.tasks.back().report.push_back(name);
      file.items.push_back({TaskFile::Item::Kind::report, name, nullptr, std::nullopt});
      window_start = start.line;
      continue;
    }
    auto statement = p.expression();
    int end_line = p.peek().line;
    p.expect(";");
    std::set<std::string> dollars;
    collect_dollars(*statement, dollars);
    if (dollars.empty()) {
      throw ParseError("statement has no nonterminal", start.line, start.col, start.text);
    }
    TaskSpec task;
    task.domain_hint = loads;
    task.statement = statement;
    try {
      task.goal.tree = lower_goal(*statement);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), start.line, start.col, start.text);
    }
    task.declarations = decls;
    task.gold_answer = gold_before(start.line);
    task.line = start.line;
    file.tasks.push_back(task);
    file.items.push_back({TaskFile::Item::Kind::task, {}, statement, task.gold_answer});
    window_start = end_line;
  }
  return file;
}

std::vector<TaskSpec> parse_tasks(std::string_view text) { return parse_task_file(text).tasks; }

bool task_files_equal(const TaskFile& a, const TaskFile& b) {
  if (a.items.size() != b.items.size()) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    const auto& x = a.items[i];
    const auto& y = b.items[i];
    if (x.kind != y.kind || x.name != y.name || x.gold != y.gold || !syntax_equal(x.value, y.value)) return false;
  }
  return true;
}

std::string to_source(const TaskFile& file) {
  using K = TaskFile::Item::Kind;
  std::ostringstream out;
  for (const auto& item : file.items) {
    switch (item.kind) {
      case K::load: out << "#load(" << item.name << ")\n"; break;
      case K::declaration: out << "new:" << item.name << " = " << to_source(*item.value) << ";\n"; break;
      case K::task:
        if (item.gold) out << "// Ans: " << *item.gold << "\n";
        out << to_source(*item.value) << ";\n";
        break;
      case K::report: out << item.name << "-->\"#FILE(SCREEN)\";\n"; break;
    }
  }
  return out.str();
}

}  // namespace cool
