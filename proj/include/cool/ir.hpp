#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cool/rational.hpp"

namespace cool {

enum class NodeKind { identifier, number, string, op, phrase, nonterminal };

std::string to_string(NodeKind kind);

class Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable syntax-tree node. Structural hash, size and groundedness are
/// computed once at construction, so trees can be shared freely.
///
/// Relation phrases use label "rel" with children (subject, object, noun) for
/// `(a) is (b)s noun`, and label "gender" with children (subject, gender) for
/// `(a) is male`. Conjunction chains are right-leaning binary `&` nodes.
class Node {
 public:
  static NodePtr identifier(std::string name);
  static NodePtr nonterminal(std::string name);
  static NodePtr number(Rational value);
  static NodePtr string(std::string text);
  static NodePtr op(std::string symbol, std::vector<NodePtr> children);
  static NodePtr relation(NodePtr subject, NodePtr object, NodePtr noun);
  static NodePtr gender(NodePtr subject, NodePtr gender);

  NodeKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  const Rational& value() const { return value_; }
  const std::vector<NodePtr>& children() const { return children_; }
  bool grounded() const { return grounded_; }
  std::size_t size() const { return size_; }
  std::size_t depth() const { return depth_; }
  std::uint64_t hash() const { return hash_; }

  bool is_op(std::string_view symbol) const { return kind_ == NodeKind::op && label_ == symbol; }
  bool is_leaf() const { return children_.empty(); }

  /// Structural equality (kind, label, value, children).
  static bool equal(const Node& a, const Node& b);

 private:
  Node(NodeKind kind, std::string label, Rational value, std::vector<NodePtr> children);

  NodeKind kind_;
  std::string label_;
  Rational value_;
  std::vector<NodePtr> children_;
  bool grounded_ = true;
  std::size_t size_ = 1;
  std::size_t depth_ = 1;
  std::uint64_t hash_ = 0;
};

inline bool same_tree(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return Node::equal(*a, *b);
}

/// Expected arity of an operator symbol; -1 for variadic (`{}` sets).
int operator_arity(std::string_view symbol);

std::size_t count_nonterminals(const Node& node);
bool contains_nonterminal(const Node& node);

/// Source-like rendering. Reparsing the text yields a structurally equal tree.
std::string to_text(const Node& node);

// ---------------------------------------------------------------------------
// Navigation

enum class Jump { left, right, stop };

using JumpPath = std::vector<Jump>;

inline constexpr std::size_t kDefaultMaxTreeDepth = 16;

class NavigationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Location of a subtree as child indices from the root.
using Location = std::vector<std::size_t>;

JumpPath to_jumps(const Location& location);
NodePtr node_at(const NodePtr& root, const Location& location);
/// Returns a new tree with the subtree at `location` replaced; unchanged
/// siblings are shared with the input.
NodePtr replace_at(const NodePtr& root, const Location& location, NodePtr replacement);

// ---------------------------------------------------------------------------
// Partial programs

struct PartialProgram {
  NodePtr tree;
  int stage = 1;
  std::optional<std::string> bound_domain;
  std::uint64_t id = 0;
};

bool is_complete(const PartialProgram& p);
bool is_complete(const Node& tree);

/// Follows `jumps` from the root until `stop` (or the end of the list).
const Node& navigate(const PartialProgram& p, const JumpPath& jumps,
                     std::size_t max_tree_depth = kDefaultMaxTreeDepth);

/// Flattens nested conjunctions into a single right-leaning chain. `rotations`
/// receives the number of relinked `&` nodes.
NodePtr normalize_conjunctions(const NodePtr& tree, std::size_t* rotations = nullptr);

// ---------------------------------------------------------------------------
// Three-address code

struct TacArg {
  std::string name;
  std::string type = "other";  // identifier | number | string | other
  int changeable = 0;
};

struct TacLine {
  TacArg operand1;
  TacArg operand2;
  TacArg op;
  TacArg result;
  bool grounded = false;
  bool root = false;
  std::string bound_domain;
  /// Location of the source node; not serialized.
  Location source;
};

struct TacProgram {
  std::vector<TacLine> lines;
};

TacProgram to_tac(const PartialProgram& p);
/// Folds results back into operands; inverse of to_tac up to result names.
NodePtr from_tac(const TacProgram& tac);

}  // namespace cool
