#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cool/dsl.hpp"
#include "cool/ir.hpp"
#include "cool/nnfc.hpp"
#include "cool/oracle.hpp"

namespace cool {

enum class SkipMode { suppress, gradient };

struct SearchConfig {
  std::size_t max_pairs = 1000;
  std::size_t max_path_len = 50;
  std::size_t max_tree_depth = kDefaultMaxTreeDepth;
  SkipMode skip_mode = SkipMode::suppress;
  /// Cross-check every pop against an independent ordered set.
  bool verify_pop_order = false;
};

struct Metrics {
  std::size_t tree_operations = 0;
  std::size_t transformation_pairs = 0;
  std::size_t nn_invocations = 0;
  std::size_t nn_queries = 0;
  std::size_t filter_passed = 0;
  std::size_t filter_rejected = 0;
  std::size_t transport_failures = 0;
  std::size_t expansions = 0;
  /// Longest rule-pair path reached, counting the final step of a solution.
  std::size_t max_depth = 0;
  double seconds = 0;
};

/// Calls one predictor per loaded DSL and turns its heads into u-values for
/// the candidate pairs of a state.
class NnfcController {
 public:
  struct Candidate {
    std::size_t dsl;
    CandidateFeatures features;
  };

  NnfcController() = default;
  void attach(std::size_t dsl_index, std::shared_ptr<Predictor> predictor);
  bool enabled() const { return !predictors_.empty(); }

  bool coupling = true;
  /// Off: heads go straight into adjust, with no agreement filter and no clipper.
  bool feedback = true;
  ControlLaw law;

  std::vector<ControlSignals> control(const PartialProgram& p, int stage, const std::vector<std::string>& dsl_names,
                                      const std::vector<Candidate>& candidates, Metrics& metrics,
                                      std::size_t max_tree_depth) const;

 private:
  std::map<std::size_t, std::shared_ptr<Predictor>> predictors_;
};

/// Skip bias for jumping over a stage whose value is `h_skipped` straight to
/// one valued `h_target`. Suppress mode never skips.
double regulate_skip(double h_skipped, double h_target, SkipMode mode);

enum class PairKind { rule, advance, skip };
enum class PathStatus { feasible, infeasible, unfinished };

std::string to_string(PairKind k);
std::string to_string(PathStatus s);

/// One transformation pair (or stage pseudo-pair) as seen by the search.
struct TraceRecord {
  std::size_t pair = 0;
  long parent = -1;  // pair that produced the source program; -1 for the goal
  PairKind kind = PairKind::rule;
  NodePtr tree;      // source program
  std::string program;
  int stage = 1;
  std::string domain;
  std::string rule;
  JumpPath jumps;
  int next_stage = 1;
  bool expression = true;
  double u0 = 0, u1 = 0, u2 = 0, g = 0, f = 0;
  bool applied = false;
  std::string outcome = "pending";  // pending | derived | aborted | stay | duplicate | success
  std::size_t derived = 0;
  std::size_t tree_ops = 0;
  PathStatus status = PathStatus::unfinished;
};

struct SynthesisPath {
  std::vector<std::size_t> pairs;  // root first
  PathStatus status = PathStatus::unfinished;
};

struct SynthesisResult {
  bool success = false;
  std::string reason;  // failure cause: max_pairs | max_path_len | exhausted
  PartialProgram program;
  /// Captures in force when the final rule produced the program.
  Bindings final_bindings;
  /// `name = value` assignments in the final program.
  std::map<std::string, NodePtr> answers;
  Metrics metrics;
  std::vector<TraceRecord> trace;
  std::vector<SynthesisPath> paths;
  /// Pairs along the successful path, root first.
  std::vector<std::size_t> solution;
};

SynthesisResult synthesize(const PartialProgram& goal, const std::vector<const Dsl*>& dsls,
                           const NnfcController& controller, const SearchConfig& cfg);

/// Partitions the pairs of a finished run into root-to-leaf paths.
std::vector<SynthesisPath> classify_paths(const std::vector<TraceRecord>& trace,
                                          const std::vector<std::size_t>& solution);

/// Guidance a perfect predictor would give along the solution of `result`.
std::vector<GoldStep> gold_steps(const SynthesisResult& result);

using GoldAcceptor = std::function<bool(const PartialProgram&, const Bindings&)>;

/// The accepted solution that enqueues the fewest rule pairs along its path,
/// found by uniform-cost search where entering a state costs its pair count.
/// Gives up after `max_expansions` states.
std::optional<std::vector<GoldStep>> cheapest_gold(const PartialProgram& goal, const std::vector<const Dsl*>& dsls,
                                                   const SearchConfig& cfg, const GoldAcceptor& accept,
                                                   std::size_t max_expansions = 20000);

/// Trace JSONL: one object per pair.
void write_trace_jsonl(const SynthesisResult& result, std::ostream& out, const std::string& task_id = "");
/// Rebuilds gold guidance from the feasible records of a trace file.
std::vector<GoldStep> gold_steps_from_jsonl(std::istream& in);

}  // namespace cool
