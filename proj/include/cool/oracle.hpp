#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cool/ir.hpp"
#include "cool/nnfc.hpp"

namespace cool {

/// One row per tree node, post-order, matching the predictor input table.
struct NodeFeatures {
  std::array<int, 2> grounded{};     // one-hot: no, yes
  std::string domain;
  std::array<int, 2> root{};
  std::array<int, 2> nonterminal{};
  std::string type;                  // identifier | number | string | operator | phrase | nonterminal
  std::string identifier;
  std::string string;
  std::optional<double> number;
  std::string op;
  int current_stage = 0;             // 0 unless the node is grounded
  std::array<int, 3> operand_position{};  // left operand, right operand, operation
  std::optional<int> applied;        // units B and C
  std::optional<int> next_stage;     // unit C
  int tac_line = -1;                 // line whose result this node is, or that first reads it
  Location location;                 // not part of the feature vector
};

std::vector<NodeFeatures> encode(const PartialProgram& p, int stage);

struct PredictorRequest {
  char unit = 'A';
  std::string dsl;
  int stage = 1;
  std::string program;  // tree text, for lookup-based predictors
  TacProgram tac;
  std::vector<NodeFeatures> nodes;
};

class PredictorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual PredictionHeads predict(const PredictorRequest& request) = 0;
  virtual std::string describe() const = 0;
};

/// Issues A, then B with A's jumps marked as applied, then C with B's jumps
/// and next stage. Without coupling only A is asked and the result holds one
/// entry.
std::vector<PredictionHeads> query_coupled(Predictor& predictor, const PartialProgram& p, int stage,
                                           const std::string& dsl, bool coupling,
                                           std::size_t max_tree_depth = kDefaultMaxTreeDepth);

/// Expected guidance for one state on a known solution path.
struct GoldStep {
  std::string program;
  int stage = 1;
  PredictionHeads heads;
};

/// Replays recorded guidance for states on the solution path; any other
/// state is reported in-domain but infeasible, with an empty guidance head.
class GoldReplayPredictor : public Predictor {
 public:
  explicit GoldReplayPredictor(std::vector<GoldStep> steps);
  PredictionHeads predict(const PredictorRequest& request) override;
  std::string describe() const override { return "mock:gold"; }
  std::size_t known_states() const { return table_.size(); }

 private:
  std::map<std::pair<std::string, int>, PredictionHeads> table_;
};

class ConstantPredictor : public Predictor {
 public:
  explicit ConstantPredictor(PredictionHeads heads) : heads_(std::move(heads)) {}
  PredictionHeads predict(const PredictorRequest&) override { return heads_; }
  std::string describe() const override { return "mock:constant"; }

 private:
  PredictionHeads heads_;
};

/// Wraps another predictor and flips each binary head of the selected units
/// with probability rho.
class NoisyPredictor : public Predictor {
 public:
  NoisyPredictor(std::shared_ptr<Predictor> inner, double rho, std::uint64_t seed, std::string units = "A");
  PredictionHeads predict(const PredictorRequest& request) override;
  std::string describe() const override;
  /// Binary heads subject to corruption per unit call.
  static constexpr int kFlippableHeads = 4;

 private:
  std::shared_ptr<Predictor> inner_;
  double rho_;
  std::string units_;
  std::mt19937_64 rng_;
};

}  // namespace cool
