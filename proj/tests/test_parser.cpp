#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cool/parser.hpp"

using namespace cool;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(COOL_FIXTURES) + "/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("rule listings parse and print to a fixpoint") {
  for (const char* name : {"family_listing.cooldsl", "quadratic_listing.cooldsl"}) {
    CAPTURE(name);
    auto rules = parse_rules(slurp(name));
    CHECK(rules.size() >= 5);
    auto printed = to_source(rules);
    auto again = parse_rules(printed);
    REQUIRE(again.size() == rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) CHECK(rule_equal(rules[i], again[i]));
    CHECK(to_source(again) == printed);
  }
}

TEST_CASE("task listings parse and print to a fixpoint") {
  for (const char* name : {"relational_a.cool", "relational_b.cool", "symbolic_a.cool", "symbolic_b.cool",
                           "multidomain.cool", "code1.cool", "code2.cool"}) {
    CAPTURE(name);
    auto file = parse_task_file(slurp(name));
    CHECK(!file.tasks.empty());
    auto printed = to_source(file);
    auto again = parse_task_file(printed);
    CHECK(task_files_equal(file, again));
    CHECK(to_source(again) == printed);
  }
}

TEST_CASE("heuristic vectors") {
  auto rules = parse_rules("expr:@(9){(a) is (b)s grandson}{ return:(a) is male & (a) is (b)s grandchild; }");
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].heuristic == std::vector<Rational>{9});
  CHECK(rules[0].head->kind == Syntax::Kind::relation);
  CHECK(rules[0].kind == HeadKind::expression);

  rules = parse_rules("expr:@(0,0,0,0,0,-4){$a==$b}{ return:b==a; }");
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].heuristic.back() == Rational(-4));
  CHECK(rules[0].heuristic.size() == 6);

  CHECK(parse_rules("").empty());
  CHECK(parse_rules("// only a comment\n").empty());

  rules = parse_rules("expr:@(0,3.8){(#?b+#?c)*#?a}{return:b*a+c*a;}");
  CHECK(rules[0].heuristic[1] == Rational(19, 5));
}

TEST_CASE("terminal heads") {
  auto rules = parse_rules(slurp("quadratic_listing.cooldsl"));
  CHECK(rules.back().kind == HeadKind::terminal);
  CHECK(rules.back().heuristic.size() == 8);
  CHECK(rules.front().kind == HeadKind::expression);
}

TEST_CASE("task files") {
  auto tasks = parse_tasks(slurp("code1.cool"));
  REQUIRE(tasks.size() == 1);
  CHECK(tasks[0].domain_hint == std::set<std::string>{"family"});
  CHECK(to_text(*tasks[0].goal.tree).find("($relation)") != std::string::npos);
  CHECK(!is_complete(tasks[0].goal));

  tasks = parse_tasks("$x^2 + 4*$x == 3;");
  REQUIRE(tasks.size() == 1);
  CHECK(to_text(*tasks[0].goal.tree) == "$x^2 + 4*$x == 3");

  CHECK(parse_tasks("#load(family)").empty());
  auto file = parse_task_file("#load(family)\n");
  CHECK(file.items.size() == 1);

  tasks = parse_tasks(slurp("relational_a.cool"));
  REQUIRE(tasks.size() == 2);
  CHECK(tasks[0].gold_answer == "brother");
  CHECK(tasks[1].gold_answer == "mother-in-law");
  CHECK(tasks[0].report == std::vector<std::string>{"relation"});
  CHECK(tasks[0].declarations.size() == 5);

  tasks = parse_tasks(slurp("relational_b.cool"));
  REQUIRE(tasks.size() == 2);
  CHECK(tasks[0].gold_answer == "nephew");
  CHECK(tasks[1].gold_answer == "brother");

  tasks = parse_tasks(slurp("symbolic_a.cool"));
  REQUIRE(tasks.size() == 2);
  // bare x shares the nonterminal introduced by $x
  CHECK(to_text(*tasks[0].goal.tree) == "6*$x^2 == 3*$x - 7");

  tasks = parse_tasks(slurp("multidomain.cool"));
  REQUIRE(tasks.size() == 2);
  CHECK(tasks[0].domain_hint == std::set<std::string>{"family", "quadratic"});
  CHECK(tasks[1].gold_answer == "daughter-in-law");
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_rules("expr:@(1){a+}{return:a;}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 13);
    CHECK(e.token() == "}");
  }
  try {
    parse_rules("expr:@(1){a}{\n  return:a;\n  frobnicate a;\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_tasks("#import(family)"), ParseError);
  CHECK_THROWS_AS(parse_tasks("1 + 2 == 3;"), ParseError);
  CHECK_THROWS_AS(parse_rules("expr:@(1){a}{ while(this expr.count subexpr{a}){ abort; } }"), ParseError);
}

TEST_CASE("expressions round trip") {
  for (const char* src : {"a - (b - c)", "(a - b) - c", "a^b^c", "(a^b)^c", "-x^2", "(-x)^2", "a*(-3)",
                          "(a) is (b)s mother-in-law & (a) is female", "{x1, x2}", "$x*(36*$x + 50) - 11*(19 - 30*$x) == $x^2",
                          "a & (b & c)", "(a & b) & c", "x = \"null\"", "(0 - b)/(2*a)"}) {
    CAPTURE(src);
    auto e = parse_expression(src);
    auto again = parse_expression(to_source(*e));
    CHECK(syntax_equal(e, again));
  }
  CHECK(to_source(*parse_expression("a-(b-c)")) == "a - (b - c)");
  CHECK(to_source(*parse_expression("(-2)*a*b")) == "(-2)*a*b");
}
