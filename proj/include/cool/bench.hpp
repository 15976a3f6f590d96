#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cool/dsl.hpp"
#include "cool/parser.hpp"
#include "cool/search.hpp"

namespace cool::bench {

enum class TaskKind { relational, symbolic };

std::string to_string(TaskKind k);

struct GenSpec {
  TaskKind kind = TaskKind::relational;
  char difficulty = 'A';
  std::size_t count = 300;
  std::uint64_t seed = 1;
};

struct BenchTask {
  std::string id;
  TaskKind kind = TaskKind::relational;
  char difficulty = 'A';
  std::vector<std::string> libraries;
  std::string statement;  // source text of the goal
  PartialProgram goal;
  std::string gold;       // kinship noun, or "a=.., b=.., c=.."
  std::array<Rational, 3> coefficients{};  // symbolic only
};

std::vector<BenchTask> gen_relational(const GenSpec& spec);
std::vector<BenchTask> gen_symbolic(const GenSpec& spec);
std::vector<BenchTask> generate(const GenSpec& spec);

/// Coefficients (a, b, c) of lhs - rhs for a goal `lhs == rhs` in one
/// nonterminal; nullopt when the difference is not a polynomial of degree <= 2.
std::optional<std::array<Rational, 3>> quadratic_coefficients(const Node& equation);

/// Real roots by the quadratic formula, larger first; nullopt when the
/// discriminant is negative.
std::optional<std::pair<double, double>> quadratic_roots(const std::array<Rational, 3>& abc);

/// Task files round-trip through the ordinary task parser.
std::string to_task_file(const std::vector<BenchTask>& tasks);
std::vector<BenchTask> from_task_file(const std::string& text, const std::string& id_prefix = "t");

struct Verdict {
  bool correct = false;
  std::string answer;
  std::string detail;
};
Verdict check_answer(const BenchTask& task, const SynthesisResult& result);

// ---------------------------------------------------------------------------
// Groups and runs

enum class Guidance { none, trained, nnfc };

struct GroupConfig {
  std::string slug;
  HeuristicMode mode = HeuristicMode::col;
  Guidance guidance = Guidance::none;
  bool coupling = true;

  std::string display() const;
};

/// Slugs: dsl, dsl-heuristic, col, dsl+nn, dsl-heuristic+nn, col+nn, col+nnfc.
GroupConfig parse_group(const std::string& slug, bool coupling);
const std::vector<std::string>& group_slugs();

/// Loads `<dir>/<name>.cooldsl`.
Dsl load_library(const std::string& name, const std::string& dir = COOL_DATA_DIR);

struct RunOptions {
  GroupConfig group;
  /// none | mock:gold | mock:replay | mock:constant | mock:noisy:RHO | tcp:HOST:PORT | stdio:COMMAND
  std::string predictor = "none";
  SearchConfig search;
  std::size_t batch_size = 50;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::string benchmark;
  std::string library_dir = COOL_DATA_DIR;
  /// Receives trace JSONL for every task when set.
  std::ostream* trace_out = nullptr;
};

struct TaskOutcome {
  std::string id;
  std::size_t batch = 0;
  bool success = false;
  bool correct = false;
  std::string reason;
  std::string answer;
  Metrics metrics;
};

struct Stats {
  std::size_t tasks = 0;
  double accuracy = 0;  // percent
  double tree_operations = 0;
  double transformation_pairs = 0;
  double nn_invocations = 0;
  double seconds = 0;
  std::size_t filter_passed = 0;
  std::size_t filter_rejected = 0;
  double attenuation = 0;  // rejected / (passed + rejected)
  std::size_t transport_failures = 0;
  /// Predictor service lost during the batch: a failed query or retrain.
  bool degraded = false;
};

struct GroupReport {
  std::string benchmark;
  std::string group;
  std::vector<TaskOutcome> tasks;
  std::vector<Stats> batches;
  Stats overall;
  /// 95% half-widths across batches, keyed by column name.
  std::map<std::string, double> ci95;
};

GroupReport run_static(const std::vector<BenchTask>& tasks, const RunOptions& options);
/// Sequential batches; an external predictor is asked to retrain after each.
GroupReport run_dynamic(const std::vector<BenchTask>& tasks, const RunOptions& options);

/// Dynamic schedules: difficulty A for the first half of the batches then B,
/// or mixed relational/symbolic batches for "multidomain".
std::vector<BenchTask> dynamic_schedule(const std::string& kind, std::size_t batches, std::size_t batch_size,
                                        std::uint64_t seed);

/// Column headers of the summary table.
const std::vector<std::string>& report_columns();
void write_csv(const std::vector<GroupReport>& reports, std::ostream& out);
void write_batches_csv(const std::vector<GroupReport>& reports, std::ostream& out);
void write_json(const std::vector<GroupReport>& reports, std::ostream& out);

}  // namespace cool::bench
