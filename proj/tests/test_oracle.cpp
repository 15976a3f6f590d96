#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cool/oracle.hpp"
#include "cool/parser.hpp"

using namespace cool;

namespace {

PartialProgram program(const std::string& text) {
  PartialProgram p;
  p.tree = lower_goal(*parse_expression(text));
  return p;
}

// Answers with a fixed walk per unit and records every request.
class Recorder : public Predictor {
 public:
  std::vector<PredictorRequest> seen;
  std::map<char, PredictionHeads> by_unit;
  PredictionHeads predict(const PredictorRequest& r) override {
    seen.push_back(r);
    return by_unit.at(r.unit);
  }
  std::string describe() const override { return "recorder"; }
};

PredictionHeads walk(JumpPath j, double next_stage) {
  PredictionHeads h;
  h.jumps = std::move(j);
  h.next_stage = next_stage;
  return h;
}

const NodeFeatures& at(const std::vector<NodeFeatures>& rows, const Location& loc) {
  for (const auto& r : rows)
    if (r.location == loc) return r;
  FAIL("no row at location");
  return rows.front();
}

}  // namespace

TEST_CASE("encode: post-order rows with one-hot flags") {
  auto p = program("$x + 3 == 5");
  p.bound_domain = "quadratic";
  auto rows = encode(p, 2);
  // ==( +( $x, 3 ), 5 ): five nodes, root last
  REQUIRE(rows.size() == 5);
  CHECK(rows.back().location.empty());
  CHECK(rows.back().root == std::array<int, 2>{0, 1});
  CHECK(rows.back().op == "==");
  CHECK(rows.back().operand_position == std::array<int, 3>{0, 0, 1});

  const auto& x = at(rows, {0, 0});
  CHECK(x.type == "nonterminal");
  CHECK(x.identifier == "x");
  CHECK(x.nonterminal == std::array<int, 2>{0, 1});
  CHECK(x.grounded == std::array<int, 2>{1, 0});
  CHECK(x.current_stage == 0);
  CHECK(x.operand_position == std::array<int, 3>{1, 0, 0});
  CHECK(x.domain == "quadratic");

  const auto& three = at(rows, {0, 1});
  CHECK(three.type == "number");
  CHECK(three.number == 3.0);
  CHECK(three.grounded == std::array<int, 2>{0, 1});
  CHECK(three.current_stage == 2);
  CHECK(three.operand_position == std::array<int, 3>{0, 1, 0});

  for (const auto& r : rows) {
    CHECK_FALSE(r.applied);
    CHECK_FALSE(r.next_stage);
    CHECK(r.tac_line >= 0);
  }
}

TEST_CASE("encode: conjunct roots are marked") {
  auto rows = encode(program("(a) is (b)s son & (b) is (c)s father"), 1);
  int roots = 0;
  for (const auto& r : rows) roots += r.root[1];
  CHECK(roots == 3);  // the & plus both conjuncts
}

TEST_CASE("coupled query chains A -> B -> C") {
  auto p = program("$x + 3 == 5");
  Recorder rec;
  rec.by_unit['A'] = walk({Jump::left, Jump::stop}, 1);
  rec.by_unit['B'] = walk({Jump::left, Jump::right, Jump::stop}, 3);
  rec.by_unit['C'] = walk({Jump::stop}, 4);

  auto out = query_coupled(rec, p, 1, "quadratic", true);
  REQUIRE(out.size() == 3);
  REQUIRE(rec.seen.size() == 3);
  CHECK(rec.seen[0].unit == 'A');
  CHECK(rec.seen[1].unit == 'B');
  CHECK(rec.seen[2].unit == 'C');
  CHECK(rec.seen[0].dsl == "quadratic");
  CHECK(rec.seen[0].program == rec.seen[2].program);

  for (const auto& r : rec.seen[0].nodes) CHECK_FALSE(r.applied);
  for (const auto& r : rec.seen[1].nodes) {
    CHECK(r.applied == (r.location == Location{0} ? 1 : 0));
    CHECK_FALSE(r.next_stage);
  }
  for (const auto& r : rec.seen[2].nodes) {
    CHECK(r.applied == (r.location == Location{0, 1} ? 1 : 0));
    CHECK(r.next_stage == 3);
  }
}

TEST_CASE("coupled query: a walk off the tree marks nothing") {
  auto p = program("$x == 5");
  Recorder rec;
  rec.by_unit['A'] = walk({Jump::left, Jump::left, Jump::stop}, 1);
  rec.by_unit['B'] = rec.by_unit['A'];
  rec.by_unit['C'] = rec.by_unit['A'];
  query_coupled(rec, p, 1, "q", true);
  for (const auto& r : rec.seen[1].nodes) CHECK(r.applied == 0);
}

TEST_CASE("uncoupled query asks unit A only") {
  Recorder rec;
  rec.by_unit['A'] = walk({Jump::stop}, 1);
  auto out = query_coupled(rec, program("$x == 5"), 1, "q", false);
  CHECK(out.size() == 1);
  CHECK(rec.seen.size() == 1);
}

TEST_CASE("gold replay: known states replay, others are infeasible") {
  PredictionHeads h = walk({Jump::right, Jump::stop}, 2);
  h.value = 4;
  GoldReplayPredictor gold({{"$x == 5", 1, h}});
  CHECK(gold.known_states() == 1);
  PredictorRequest r;
  r.program = "$x == 5";
  r.stage = 1;
  CHECK(gold.predict(r) == h);
  r.stage = 3;
  auto off = gold.predict(r);
  CHECK(off.domain);
  CHECK_FALSE(off.feasible);
  CHECK(off.next_stage == 3);
}

TEST_CASE("noisy predictor: rho 0 is transparent, rho 1 flips every binary head") {
  PredictionHeads h = walk({Jump::left, Jump::stop}, 2);
  h.value = 6;
  auto inner = std::make_shared<ConstantPredictor>(h);
  PredictorRequest r;
  r.unit = 'A';
  NoisyPredictor clean(inner, 0.0, 1);
  NoisyPredictor flipped(inner, 1.0, 1);
  for (int i = 0; i < 20; ++i) {
    CHECK(clean.predict(r) == h);
    auto f = flipped.predict(r);
    CHECK(f.domain != h.domain);
    CHECK(f.feasible != h.feasible);
    CHECK(f.sign_positive != h.sign_positive);
    CHECK(f.expression != h.expression);
    CHECK(f.jumps == h.jumps);
    CHECK(f.value == h.value);
  }
  r.unit = 'B';
  CHECK(flipped.predict(r) == h);  // only unit A is corrupted
}

TEST_CASE("noisy predictor: filter rejection rate matches 1 - (1 - rho)^4") {
  const double rho = 0.3;
  const int steps = 1000;
  const double expected = 1 - std::pow(1 - rho, NoisyPredictor::kFlippableHeads);
  const double sigma = std::sqrt(expected * (1 - expected) / steps);
  CHECK(expected == doctest::Approx(0.7599));

  PredictionHeads h = walk({Jump::left, Jump::stop}, 2);
  h.value = 6;
  auto p = program("$x + 3 == 5");
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    NoisyPredictor noisy(std::make_shared<ConstantPredictor>(h), rho, seed);
    int rejected = 0;
    for (int i = 0; i < steps; ++i) {
      auto heads = query_coupled(noisy, p, 1, "q", true);
      if (!filter({heads[0], heads[1], heads[2]})) ++rejected;
    }
    double rate = static_cast<double>(rejected) / steps;
    CAPTURE(seed);
    CAPTURE(rate);
    CHECK(std::abs(rate - expected) <= 3 * sigma);
  }
}
