#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cool/dsl.hpp"
#include "cool/parser.hpp"
#include "cool/search.hpp"
#include "oracles.hpp"

using namespace cool;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PartialProgram program(const std::string& text) {
  PartialProgram p;
  p.tree = lower_goal(*parse_expression(text));
  return p;
}

std::string trace_text(const SynthesisResult& r) {
  std::ostringstream out;
  write_trace_jsonl(r, out, "t");
  return out.str();
}

const char* kSkipRules = R"(
expr:@(0,1){#a}{ return:a+0; }
@(0,0,5){$x == immediate:a}{ x = a; };
)";

}  // namespace

TEST_CASE("kinship chain from the first example resolves to son") {
  auto tasks = parse_tasks(slurp(COOL_FIXTURES "/code1.cool"));
  REQUIRE(tasks.size() == 1);
  auto family = load_dsl(std::string(COOL_DATA_DIR) + "/family.cooldsl");
  auto r = synthesize(tasks[0].goal, {&family}, NnfcController{}, SearchConfig{});
  REQUIRE(r.success);
  REQUIRE(r.answers.count("relation"));
  CHECK(r.answers.at("relation")->label() == "son");
  CHECK(r.metrics.transformation_pairs <= 1000);
  CHECK(r.solution.size() <= 50);
  CHECK(r.reason.empty());
}

TEST_CASE("a goal without nonterminals is already solved") {
  auto quad = load_dsl(std::string(COOL_DATA_DIR) + "/quadratic.cooldsl");
  auto r = synthesize(program("2 + 3 == 5"), {&quad}, NnfcController{}, SearchConfig{});
  CHECK(r.success);
  CHECK(r.metrics.transformation_pairs == 0);
  CHECK(r.metrics.tree_operations == 0);
  CHECK(r.trace.empty());
}

TEST_CASE("uniform unit cost: found path length equals the BFS minimum") {
  auto toy = compile_dsl("toy", parse_rules(oracle::kToyRules));
  REQUIRE(toy.rules.size() == 5);
  std::mt19937_64 rng(2024);
  SearchConfig cfg;
  cfg.max_pairs = 1'000'000;
  cfg.verify_pop_order = true;
  int instances = 0;
  while (instances < 100) {
    auto term = oracle::random_term(rng, std::uniform_int_distribution<int>(2, 5)(rng));
    int expected = oracle::bfs_distance(term, 10'000);
    if (expected < 0) continue;
    ++instances;
    auto r = synthesize(program("$x == " + oracle::show(term)), {&toy}, NnfcController{}, cfg);
    CAPTURE(oracle::show(term));
    REQUIRE(r.success);
    CHECK(static_cast<int>(r.solution.size()) == expected);
  }
}

TEST_CASE("skip regulation: gradient jumps an exploding stage, suppress does not") {
  auto dsl = compile_dsl("skip", parse_rules(kSkipRules));
  REQUIRE(dsl.col_length == 3);
  auto goal = program("$x == 4");

  SearchConfig gradient;
  gradient.skip_mode = SkipMode::gradient;
  auto g = synthesize(goal, {&dsl}, NnfcController{}, gradient);
  REQUIRE(g.success);
  CHECK(g.answers.at("x")->value() == Rational(4));
  CHECK(g.trace[g.solution.front()].kind == PairKind::skip);
  CHECK(regulate_skip(1, 5, SkipMode::gradient) == 4);

  auto s = synthesize(goal, {&dsl}, NnfcController{}, SearchConfig{});
  CHECK_FALSE(s.success);
  CHECK(s.reason == "max_pairs");
  CHECK(s.metrics.transformation_pairs == 1000);
  for (const auto& r : s.trace) CHECK(r.kind != PairKind::skip);
}

TEST_CASE("limits name their reason") {
  auto dsl = compile_dsl("skip", parse_rules(kSkipRules));
  SearchConfig tight;
  tight.max_pairs = 5;
  auto r = synthesize(program("$x == 4"), {&dsl}, NnfcController{}, tight);
  CHECK_FALSE(r.success);
  CHECK(r.reason == "max_pairs");
  CHECK(r.metrics.transformation_pairs == 5);

  auto toy = compile_dsl("toy", parse_rules(oracle::kToyRules));
  SearchConfig shallow;
  shallow.max_path_len = 2;
  auto deep = synthesize(program("$x == 1+2+3+1"), {&toy}, NnfcController{}, shallow);
  CHECK_FALSE(deep.success);
  CHECK(deep.reason == "max_path_len");

  auto stuck = synthesize(program("$x == $x"), {&toy}, NnfcController{}, SearchConfig{});
  CHECK_FALSE(stuck.success);
  CHECK(stuck.reason == "exhausted");
}

TEST_CASE("search is deterministic and its pop order verifies") {
  auto quad = load_dsl(std::string(COOL_DATA_DIR) + "/quadratic.cooldsl");
  SearchConfig cfg;
  cfg.verify_pop_order = true;
  auto goal = program("($x+1)^2 == 2*$x + 7");
  auto a = synthesize(goal, {&quad}, NnfcController{}, cfg);
  auto b = synthesize(goal, {&quad}, NnfcController{}, SearchConfig{});
  REQUIRE(a.success);
  CHECK(trace_text(a) == trace_text(b));
  CHECK(a.metrics.tree_operations == b.metrics.tree_operations);
}

TEST_CASE("path classification partitions the trace") {
  auto quad = load_dsl(std::string(COOL_DATA_DIR) + "/quadratic.cooldsl");
  auto r = synthesize(program("$x^2 + 4*$x == 3"), {&quad}, NnfcController{}, SearchConfig{});
  REQUIRE(r.success);
  REQUIRE_FALSE(r.paths.empty());
  CHECK(r.paths.front().status == PathStatus::feasible);
  CHECK(r.paths.front().pairs == r.solution);
  std::vector<int> seen(r.trace.size(), 0);
  for (const auto& p : r.paths) {
    CHECK_FALSE(p.pairs.empty());
    for (std::size_t k = 1; k < p.pairs.size(); ++k)
      CHECK(r.trace[p.pairs[k]].parent == static_cast<long>(p.pairs[k - 1]));
    for (auto id : p.pairs) {
      ++seen[id];
      CHECK(r.trace[id].status == p.status);
    }
    if (p.status == PathStatus::unfinished) CHECK_FALSE(r.trace[p.pairs.back()].applied);
    if (p.status == PathStatus::infeasible) CHECK(r.trace[p.pairs.back()].applied);
  }
  for (int c : seen) CHECK(c == 1);

  // hand-built: root -> {1 -> 3, 2}; 3 is the solution leaf, 2 never popped
  std::vector<TraceRecord> t(4);
  t[0].parent = -1;
  t[1].parent = 0;
  t[2].parent = 0;
  t[3].parent = 1;
  for (auto i : {0, 1, 3}) t[i].applied = true;
  auto paths = classify_paths(t, {0, 1, 3});
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].status == PathStatus::feasible);
  CHECK(paths[1].status == PathStatus::unfinished);
  CHECK(paths[1].pairs == std::vector<std::size_t>{2});
}

TEST_CASE("trace JSONL carries gold guidance") {
  auto quad = load_dsl(std::string(COOL_DATA_DIR) + "/quadratic.cooldsl");
  auto r = synthesize(program("$x^2 + 4*$x == 3"), {&quad}, NnfcController{}, SearchConfig{});
  REQUIRE(r.success);
  auto text = trace_text(r);
  std::istringstream lines(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j["task"] == "t");
    for (const char* field : {"pair", "parent", "kind", "program", "stage", "rule", "u0", "u1", "u2", "g", "f",
                              "applied", "outcome", "status"})
      CHECK_MESSAGE(j.contains(field), field);
    ++n;
  }
  CHECK(n == r.trace.size());

  std::istringstream in(text);
  auto replayed = gold_steps_from_jsonl(in);
  auto direct = gold_steps(r);
  REQUIRE(replayed.size() == direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) {
    CHECK(replayed[i].program == direct[i].program);
    CHECK(replayed[i].stage == direct[i].stage);
    CHECK(replayed[i].heads == direct[i].heads);
  }
}

TEST_CASE("cheapest gold path is accepted and no longer than the unguided one") {
  auto quad = load_dsl(std::string(COOL_DATA_DIR) + "/quadratic.cooldsl");
  auto goal = program("$x^2 + 4*$x == 3");
  auto base = synthesize(goal, {&quad}, NnfcController{}, SearchConfig{});
  auto gold = cheapest_gold(goal, {&quad}, SearchConfig{}, [](const PartialProgram& p, const Bindings&) {
    return is_complete(p);
  });
  REQUIRE(gold);
  CHECK_FALSE(gold->empty());
  auto none = cheapest_gold(goal, {&quad}, SearchConfig{}, [](const PartialProgram&, const Bindings&) {
    return false;
  }, 200);
  CHECK_FALSE(none);

  NnfcController guided;
  guided.attach(0, std::make_shared<GoldReplayPredictor>(*gold));
  auto r = synthesize(goal, {&quad}, guided, SearchConfig{});
  CHECK(r.success);
  CHECK(r.metrics.transformation_pairs <= base.metrics.transformation_pairs);
}
