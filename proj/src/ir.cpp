#include "cool/ir.hpp"

#include <functional>
#include <sstream>
#include <unordered_map>

namespace cool {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t v) {
  v *= 0x9e3779b97f4a7c15ULL;
  v ^= v >> 31;
  return (seed ^ v) * 0x100000001b3ULL + 0x7f4a7c159e3779b9ULL;
}

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

int precedence(const Node& n) {
  if (n.kind() != NodeKind::op) return 100;
  const auto& s = n.label();
  if (s == "&") return 1;
  if (s == "==" || s == "=") return 2;
  if (s == "+" || s == "-") return 3;
  if (s == "*" || s == "/") return 4;
  if (s == "^") return 5;
  return 100;
}

void render(const Node& n, std::ostringstream& out);

void render_operand(const Node& child, int parent_prec, bool wrap_equal, std::ostringstream& out) {
  int p = precedence(child);
  bool negative_number = child.kind() == NodeKind::number && child.value().sign() < 0;
  bool wrap = p < parent_prec || (wrap_equal && p == parent_prec) || negative_number;
  if (wrap) out << '(';
  render(child, out);
  if (wrap) out << ')';
}

void render(const Node& n, std::ostringstream& out) {
  switch (n.kind()) {
    case NodeKind::identifier:
      out << n.label();
      return;
    case NodeKind::nonterminal:
      out << '$' << n.label();
      return;
    case NodeKind::number:
      out << n.value().to_string();
      return;
    case NodeKind::string:
      out << '"' << n.label() << '"';
      return;
    case NodeKind::phrase: {
      out << '(';
      render(*n.children()[0], out);
      out << ") is ";
      if (n.label() == "gender") {
        render(*n.children()[1], out);
        return;
      }
      out << '(';
      render(*n.children()[1], out);
      out << ")s ";
      const auto& noun = *n.children()[2];
      if (noun.kind() == NodeKind::nonterminal) {
        out << "($" << noun.label() << ')';
      } else {
        render(noun, out);
      }
      return;
    }
    case NodeKind::op: {
      if (n.label() == "{}") {
        out << '{';
        for (std::size_t i = 0; i < n.children().size(); ++i) {
          if (i) out << ", ";
          render(*n.children()[i], out);
        }
        out << '}';
        return;
      }
      int p = precedence(n);
      bool right_assoc = n.label() == "^" || n.label() == "&";
      render_operand(*n.children()[0], p, right_assoc, out);
      if (n.label() == "&") {
        out << " & ";
      } else if (n.label() == "==" || n.label() == "=") {
        out << ' ' << n.label() << ' ';
      } else if (n.label() == "+" || n.label() == "-") {
        out << ' ' << n.label() << ' ';
      } else {
        out << n.label();
      }
      render_operand(*n.children()[1], p, !right_assoc, out);
      return;
    }
  }
}

}  // namespace

std::string to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::identifier: return "identifier";
    case NodeKind::number: return "number";
    case NodeKind::string: return "string";
    case NodeKind::op: return "operator";
    case NodeKind::phrase: return "relation-phrase";
    case NodeKind::nonterminal: return "nonterminal";
  }
  return "?";
}

Node::Node(NodeKind kind, std::string label, Rational value, std::vector<NodePtr> children)
    : kind_(kind), label_(std::move(label)), value_(value), children_(std::move(children)) {
  hash_ = mix(static_cast<std::uint64_t>(kind_) + 1, hash_string(label_));
  if (kind_ == NodeKind::number) {
    hash_ = mix(hash_, static_cast<std::uint64_t>(value_.num()));
    hash_ = mix(hash_, static_cast<std::uint64_t>(value_.den()));
  }
  grounded_ = kind_ != NodeKind::nonterminal;
  for (const auto& c : children_) {
    hash_ = mix(hash_, c->hash_);
    size_ += c->size_;
    depth_ = std::max(depth_, c->depth_ + 1);
    grounded_ = grounded_ && c->grounded_;
  }
}

NodePtr Node::identifier(std::string name) {
  return NodePtr(new Node(NodeKind::identifier, std::move(name), {}, {}));
}

NodePtr Node::nonterminal(std::string name) {
  return NodePtr(new Node(NodeKind::nonterminal, std::move(name), {}, {}));
}

NodePtr Node::number(Rational value) { return NodePtr(new Node(NodeKind::number, "", value, {})); }

NodePtr Node::string(std::string text) {
  return NodePtr(new Node(NodeKind::string, std::move(text), {}, {}));
}

NodePtr Node::op(std::string symbol, std::vector<NodePtr> children) {
  int arity = operator_arity(symbol);
  if (arity == 0) throw std::invalid_argument("unknown operator '" + symbol + "'");
  if (arity > 0 && children.size() != static_cast<std::size_t>(arity)) {
    throw std::invalid_argument("operator '" + symbol + "' expects " + std::to_string(arity) + " operands");
  }
  for (const auto& c : children) {
    if (!c) throw std::invalid_argument("null operand");
  }
  return NodePtr(new Node(NodeKind::op, std::move(symbol), {}, std::move(children)));
}

NodePtr Node::relation(NodePtr subject, NodePtr object, NodePtr noun) {
  return NodePtr(new Node(NodeKind::phrase, "rel", {}, {std::move(subject), std::move(object), std::move(noun)}));
}

NodePtr Node::gender(NodePtr subject, NodePtr gender) {
  return NodePtr(new Node(NodeKind::phrase, "gender", {}, {std::move(subject), std::move(gender)}));
}

bool Node::equal(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.hash_ != b.hash_ || a.kind_ != b.kind_ || a.size_ != b.size_ || a.label_ != b.label_) return false;
  if (a.kind_ == NodeKind::number && a.value_ != b.value_) return false;
  if (a.children_.size() != b.children_.size()) return false;
  for (std::size_t i = 0; i < a.children_.size(); ++i) {
    if (!equal(*a.children_[i], *b.children_[i])) return false;
  }
  return true;
}

int operator_arity(std::string_view s) {
  if (s == "+" || s == "-" || s == "*" || s == "/" || s == "^" || s == "==" || s == "=" || s == "&") return 2;
  if (s == "{}") return -1;
  return 0;
}

std::size_t count_nonterminals(const Node& node) {
  if (node.grounded()) return 0;
  std::size_t n = node.kind() == NodeKind::nonterminal ? 1 : 0;
  for (const auto& c : node.children()) n += count_nonterminals(*c);
  return n;
}

bool contains_nonterminal(const Node& node) { return !node.grounded(); }

std::string to_text(const Node& node) {
  std::ostringstream out;
  render(node, out);
  return out.str();
}

JumpPath to_jumps(const Location& location) {
  JumpPath path;
  for (auto i : location) path.push_back(i == 0 ? Jump::left : Jump::right);
  path.push_back(Jump::stop);
  return path;
}

NodePtr node_at(const NodePtr& root, const Location& location) {
  NodePtr cur = root;
  for (auto i : location) {
    if (i >= cur->children().size()) throw NavigationError("location leaves the tree");
    cur = cur->children()[i];
  }
  return cur;
}

NodePtr replace_at(const NodePtr& root, const Location& location, NodePtr replacement) {
  std::function<NodePtr(const NodePtr&, std::size_t)> rec = [&](const NodePtr& cur, std::size_t depth) -> NodePtr {
    if (depth == location.size()) return replacement;
    auto idx = location[depth];
    if (idx >= cur->children().size()) throw NavigationError("location leaves the tree");
    auto kids = cur->children();
    kids[idx] = rec(kids[idx], depth + 1);
    switch (cur->kind()) {
      case NodeKind::op:
        return Node::op(cur->label(), std::move(kids));
      case NodeKind::phrase:
        if (cur->label() == "rel") return Node::relation(kids[0], kids[1], kids[2]);
        return Node::gender(kids[0], kids[1]);
      default:
        throw NavigationError("leaf has no children");
    }
  };
  return rec(root, 0);
}

bool is_complete(const Node& tree) { return tree.grounded(); }
bool is_complete(const PartialProgram& p) { return p.tree && p.tree->grounded(); }

const Node& navigate(const PartialProgram& p, const JumpPath& jumps, std::size_t max_tree_depth) {
  const Node* cur = p.tree.get();
  std::size_t steps = 0;
  for (Jump j : jumps) {
    if (j == Jump::stop) break;
    if (++steps > max_tree_depth) throw NavigationError("jump path exceeds max tree depth");
    std::size_t idx = j == Jump::left ? 0 : 1;
    if (idx >= cur->children().size()) throw NavigationError("jump path leaves the tree");
    cur = cur->children()[idx].get();
  }
  return *cur;
}

namespace {

void collect_conjuncts(const NodePtr& n, std::vector<NodePtr>& out) {
  if (n->is_op("&")) {
    collect_conjuncts(n->children()[0], out);
    collect_conjuncts(n->children()[1], out);
  } else {
    out.push_back(n);
  }
}

}  // namespace

NodePtr normalize_conjunctions(const NodePtr& tree, std::size_t* rotations) {
  if (!tree->is_op("&")) {
    if (tree->is_leaf()) return tree;
    bool changed = false;
    auto kids = tree->children();
    for (auto& k : kids) {
      auto nk = normalize_conjunctions(k, rotations);
      if (nk != k) {
        k = nk;
        changed = true;
      }
    }
    if (!changed) return tree;
    if (tree->kind() == NodeKind::op) return Node::op(tree->label(), std::move(kids));
    if (tree->label() == "rel") return Node::relation(kids[0], kids[1], kids[2]);
    return Node::gender(kids[0], kids[1]);
  }
  if (!tree->children()[0]->is_op("&")) {
    auto right = normalize_conjunctions(tree->children()[1], rotations);
    auto left = normalize_conjunctions(tree->children()[0], rotations);
    if (right == tree->children()[1] && left == tree->children()[0]) return tree;
    return Node::op("&", {left, right});
  }
  std::vector<NodePtr> parts;
  collect_conjuncts(tree, parts);
  for (auto& part : parts) part = normalize_conjunctions(part, rotations);
  NodePtr chain = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) {
    chain = Node::op("&", {parts[i], chain});
    if (rotations) ++*rotations;
  }
  return chain;
}

// ---------------------------------------------------------------------------
// TAC

namespace {

TacArg leaf_arg(const Node& n) {
  TacArg a;
  switch (n.kind()) {
    case NodeKind::identifier:
      a = {n.label(), "identifier", 0};
      break;
    case NodeKind::nonterminal:
      a = {n.label(), "identifier", 1};
      break;
    case NodeKind::number:
      a = {n.value().to_string(), "number", 0};
      break;
    case NodeKind::string:
      a = {n.label(), "string", 0};
      break;
    default:
      break;
  }
  return a;
}

struct TacBuilder {
  TacProgram out;
  std::string domain;
  int next = 0;

  TacArg fresh() { return {"t" + std::to_string(next++), "identifier", 1}; }

  TacArg emit(const Node& n, const Location& loc, bool is_root) {
    if (n.is_leaf()) return leaf_arg(n);
    TacLine line;
    line.grounded = n.grounded();
    line.root = is_root;
    line.bound_domain = domain;
    line.source = loc;
    auto child_loc = [&](std::size_t i) {
      auto l = loc;
      l.push_back(i);
      return l;
    };
    if (n.kind() == NodeKind::phrase && n.label() == "rel") {
      TacLine poss;
      poss.operand1 = emit(*n.children()[1], child_loc(1), false);
      poss.operand2 = emit(*n.children()[2], child_loc(2), false);
      poss.op = {"s", "other", 0};
      poss.result = fresh();
      poss.grounded = n.children()[1]->grounded() && n.children()[2]->grounded();
      poss.bound_domain = domain;
      poss.source = loc;
      auto subject = emit(*n.children()[0], child_loc(0), false);
      out.lines.push_back(poss);
      line.operand1 = subject;
      line.operand2 = poss.result;
      line.op = {"is", "other", 0};
    } else if (n.kind() == NodeKind::phrase) {
      line.operand1 = emit(*n.children()[0], child_loc(0), false);
      line.operand2 = emit(*n.children()[1], child_loc(1), false);
      line.op = {"is", "other", 0};
    } else {
      const auto& kids = n.children();
      bool subtask_child = n.is_op("&");
      if (!kids.empty()) line.operand1 = emit(*kids[0], child_loc(0), subtask_child && !kids[0]->is_op("&"));
      if (kids.size() > 1) line.operand2 = emit(*kids[1], child_loc(1), subtask_child && !kids[1]->is_op("&"));
      line.op = {n.label(), "other", 0};
    }
    line.result = fresh();
    out.lines.push_back(line);
    return out.lines.back().result;
  }
};

}  // namespace

TacProgram to_tac(const PartialProgram& p) {
  TacBuilder b;
  b.domain = p.bound_domain.value_or("");
  if (p.tree->is_leaf()) {
    TacLine line;
    line.operand1 = leaf_arg(*p.tree);
    line.result = b.fresh();
    line.grounded = p.tree->grounded();
    line.root = true;
    line.bound_domain = b.domain;
    b.out.lines.push_back(line);
    return b.out;
  }
  b.emit(*p.tree, {}, true);
  return b.out;
}

NodePtr from_tac(const TacProgram& tac) {
  if (tac.lines.empty()) throw std::invalid_argument("empty TAC program");
  std::unordered_map<std::string, NodePtr> results;
  std::unordered_map<std::string, std::pair<NodePtr, NodePtr>> possessives;
  auto arg_node = [&](const TacArg& a) -> NodePtr {
    if (auto it = results.find(a.name); it != results.end() && a.type == "identifier") return it->second;
    if (a.type == "number") {
      auto v = Rational::parse(a.name);
      if (!v) throw std::invalid_argument("bad number in TAC: " + a.name);
      return Node::number(*v);
    }
    if (a.type == "string") return Node::string(a.name);
    if (a.type == "identifier") return a.changeable ? Node::nonterminal(a.name) : Node::identifier(a.name);
    throw std::invalid_argument("bad TAC operand: " + a.name);
  };
  NodePtr last;
  for (const auto& line : tac.lines) {
    NodePtr node;
    if (line.op.name.empty()) {
      node = arg_node(line.operand1);
    } else if (line.op.name == "s") {
      possessives[line.result.name] = {arg_node(line.operand1), arg_node(line.operand2)};
      continue;
    } else if (line.op.name == "is") {
      auto subject = arg_node(line.operand1);
      if (auto it = possessives.find(line.operand2.name); it != possessives.end()) {
        node = Node::relation(subject, it->second.first, it->second.second);
      } else {
        node = Node::gender(subject, arg_node(line.operand2));
      }
    } else {
      std::vector<NodePtr> kids;
      if (!line.operand1.name.empty()) kids.push_back(arg_node(line.operand1));
      if (!line.operand2.name.empty()) kids.push_back(arg_node(line.operand2));
      node = Node::op(line.op.name, std::move(kids));
    }
    results[line.result.name] = node;
    last = node;
  }
  return last;
}

}  // namespace cool
