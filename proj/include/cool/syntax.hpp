#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cool/ir.hpp"
#include "cool/rational.hpp"

namespace cool {

/// Surface syntax shared by task files, rule heads, rule templates and body
/// expressions. Rule heads are compiled to patterns, templates are
/// instantiated against bindings, task goals are lowered to `Node` trees.
struct Syntax;
using SyntaxPtr = std::shared_ptr<const Syntax>;

struct Syntax {
  enum class Kind {
    number,
    string,
    ident,      // a
    dollar,     // $a
    hash,       // #a
    hash_opt,   // #?a
    immediate,  // immediate:a
    op,         // binary operator, or "neg" (unary minus)
    relation,   // (a) is (b)s noun
    gender,     // (a) is male
    set,        // {a, b}
  };

  Kind kind;
  std::string text;  // identifier name, string contents, or operator symbol
  Rational value;
  std::vector<SyntaxPtr> kids;

  static SyntaxPtr make(Kind k, std::string text = {}, std::vector<SyntaxPtr> kids = {});
  static SyntaxPtr num(Rational v);
};

bool syntax_equal(const SyntaxPtr& a, const SyntaxPtr& b);
std::string to_source(const Syntax& s);

/// Names of every `$name` occurrence.
void collect_dollars(const Syntax& s, std::set<std::string>& out);

struct Guard;
using GuardPtr = std::shared_ptr<const Guard>;

struct Guard {
  enum class Kind { conj, disj, negate, exist, find, compare };
  Kind kind;
  std::vector<GuardPtr> kids;
  /// exist/find: "this" for `this expr`, otherwise a bound name.
  std::string subject;
  SyntaxPtr pattern;
  bool expect = true;  // `== false` stores false
  /// compare
  std::string cmp;
  SyntaxPtr lhs, rhs;
};

bool guard_equal(const GuardPtr& a, const GuardPtr& b);
std::string to_source(const Guard& g);

struct Statement {
  enum class Kind {
    ret,          // return: template;
    abort,        // abort;
    jump,         // logicjump(n);
    branch,       // if (guard) {...} else {...}
    loop,         // while (guard) {...}
    bind,         // new: name = expr;
    placeholder,  // placeholder: name;
    reset,        // name.reset();
    assign,       // name = expr;
  };
  Kind kind;
  SyntaxPtr expr;
  std::string name;
  int target = 0;
  GuardPtr guard;
  std::vector<Statement> body;
  std::vector<Statement> else_body;
  bool has_else = false;
};

bool statements_equal(const std::vector<Statement>& a, const std::vector<Statement>& b);

enum class HeadKind { expression, terminal };

struct RuleSource {
  SyntaxPtr head;
  std::vector<Rational> heuristic;
  std::vector<Statement> body;
  HeadKind kind = HeadKind::expression;
  int line = 0;
};

bool rule_equal(const RuleSource& a, const RuleSource& b);
std::string to_source(const RuleSource& r);
std::string to_source(const std::vector<RuleSource>& rules);

/// Lowers surface syntax to a tree. `unknowns` lists names that denote the
/// task's nonterminals even when written without `$`.
NodePtr lower(const Syntax& s, const std::set<std::string>& unknowns = {});

}  // namespace cool
