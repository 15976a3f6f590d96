#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cool/ir.hpp"
#include "cool/pattern.hpp"
#include "cool/syntax.hpp"

namespace cool {

class RuleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Rule {
  std::string id;  // "<dsl>#<index>"
  std::size_t index = 0;
  RuleSource source;
  Pattern head;
  std::vector<Rational> h;  // zero-padded to the CoL length
  std::set<std::string> head_captures;
  std::vector<int> jump_targets;
  /// exist/find patterns of the body, keyed by their syntax node.
  std::map<const Syntax*, Pattern> body_patterns;

  bool active(int stage) const { return stage >= 1 && stage <= static_cast<int>(h.size()) && !h[stage - 1].is_zero(); }
  Rational value(int stage) const { return active(stage) ? h[stage - 1] : Rational(0); }
};

struct Dsl {
  std::string name;
  std::vector<Rule> rules;
  int col_length = 1;

  struct Activation {
    const Rule* rule;
    Rational value;
  };
  /// Rules active at `stage` with their effective heuristic value.
  std::vector<Activation> sub_dsl(int stage) const;
};

Dsl compile_dsl(const std::string& name, const std::vector<RuleSource>& rules);
/// Reads and compiles a rule file; the library name is the file stem.
Dsl load_dsl(const std::string& path);

/// The control groups differ from CoL only in their heuristic vectors.
enum class HeuristicMode { col, plain, heuristic_only };
Dsl with_heuristics(const Dsl& dsl, HeuristicMode mode);

struct Binding {
  Bindings captures;
  Location location;
};

std::vector<Binding> match(const Rule& rule, const PartialProgram& p);

enum class Flow { stay, advance_allowed, jump, aborted };

struct ApplyOutcome {
  std::vector<PartialProgram> derived;
  /// Tree operations per derived program.
  std::vector<std::size_t> ops;
  /// Bindings in force when each derived program was produced.
  std::vector<Bindings> bindings;
  Flow flow = Flow::stay;
  int jump_target = 0;
  std::size_t tree_ops = 0;
};

ApplyOutcome apply(const Dsl& dsl, const Rule& rule, const PartialProgram& p, const Binding& b);

// ---------------------------------------------------------------------------
// Exact evaluation helpers shared with the benchmark code.

/// Folds grounded arithmetic exactly where possible; inexact powers stay symbolic.
NodePtr fold(const NodePtr& n);
/// Numeric value of a grounded arithmetic tree.
std::optional<double> evaluate(const Node& n);

struct StaticDiagnostic {
  enum class Severity { error, warning };
  Severity severity;
  std::string message;
  int line = 0;
};

/// Stage coverage, unreachable rules and jump targets.
std::vector<StaticDiagnostic> check_dsl(const Dsl& dsl);

}  // namespace cool
