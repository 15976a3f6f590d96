#include "cool/oracle.hpp"

#include <cmath>
#include <functional>
#include <map>

namespace cool {

namespace {

std::string type_name(NodeKind k) {
  switch (k) {
    case NodeKind::identifier: return "identifier";
    case NodeKind::number: return "number";
    case NodeKind::string: return "string";
    case NodeKind::op: return "operator";
    case NodeKind::phrase: return "phrase";
    case NodeKind::nonterminal: return "nonterminal";
  }
  return "other";
}

}  // namespace

std::vector<NodeFeatures> encode(const PartialProgram& p, int stage) {
  std::vector<NodeFeatures> rows;
  if (!p.tree) return rows;
  std::string domain = p.bound_domain.value_or("");

  // Internal nodes point at the TAC line producing them, leaves at the line
  // that reads them.
  std::map<Location, int> line_of;
  auto tac = to_tac(p);
  for (std::size_t i = 0; i < tac.lines.size(); ++i) line_of[tac.lines[i].source] = static_cast<int>(i);

  std::function<void(const Node&, Location&, int, bool)> walk = [&](const Node& n, Location& loc, int position,
                                                                    bool subtask_root) {
    for (std::size_t i = 0; i < n.children().size(); ++i) {
      loc.push_back(i);
      int pos = n.children().size() == 2 ? static_cast<int>(i) : -1;
      walk(*n.children()[i], loc, pos, n.is_op("&") && !n.children()[i]->is_op("&"));
      loc.pop_back();
    }
    NodeFeatures f;
    f.grounded = n.grounded() ? std::array<int, 2>{0, 1} : std::array<int, 2>{1, 0};
    f.domain = domain;
    f.root = loc.empty() || subtask_root ? std::array<int, 2>{0, 1} : std::array<int, 2>{1, 0};
    bool nt = n.kind() == NodeKind::nonterminal;
    f.nonterminal = nt ? std::array<int, 2>{0, 1} : std::array<int, 2>{1, 0};
    f.type = type_name(n.kind());
    if (n.kind() == NodeKind::identifier || nt) f.identifier = n.label();
    if (n.kind() == NodeKind::string) f.string = n.label();
    if (n.kind() == NodeKind::number) f.number = n.value().to_double();
    if (n.kind() == NodeKind::op || n.kind() == NodeKind::phrase) f.op = n.label();
    f.current_stage = n.grounded() ? stage : 0;
    if (position == 0) f.operand_position[0] = 1;
    if (position == 1) f.operand_position[1] = 1;
    if (!n.is_leaf()) f.operand_position[2] = 1;
    f.location = loc;
    if (auto it = line_of.find(loc); it != line_of.end()) {
      f.tac_line = it->second;
    } else if (!loc.empty()) {
      Location parent(loc.begin(), loc.end() - 1);
      if (auto pit = line_of.find(parent); pit != line_of.end()) f.tac_line = pit->second;
    } else {
      f.tac_line = 0;
    }
    rows.push_back(std::move(f));
  };
  Location loc;
  walk(*p.tree, loc, -1, false);
  return rows;
}

std::vector<PredictionHeads> query_coupled(Predictor& predictor, const PartialProgram& p, int stage,
                                           const std::string& dsl, bool coupling, std::size_t max_tree_depth) {
  PredictorRequest req;
  req.dsl = dsl;
  req.stage = stage;
  req.program = to_text(*p.tree);
  req.tac = to_tac(p);
  req.nodes = encode(p, stage);

  auto mark_applied = [&](const JumpPath& jumps, std::optional<int> next) {
    std::optional<Location> target;
    if (jumps.size() <= max_tree_depth) {
      Location loc;
      const Node* n = p.tree.get();
      bool ok = true;
      for (Jump j : jumps) {
        if (j == Jump::stop) break;
        std::size_t i = j == Jump::left ? 0 : 1;
        if (i >= n->children().size()) {
          ok = false;
          break;
        }
        loc.push_back(i);
        n = n->children()[i].get();
      }
      if (ok) target = loc;
    }
    for (auto& row : req.nodes) {
      row.applied = target && row.location == *target ? 1 : 0;
      row.next_stage = next;
    }
  };

  std::vector<PredictionHeads> out;
  req.unit = 'A';
  out.push_back(predictor.predict(req));
  if (!coupling) return out;

  req.unit = 'B';
  mark_applied(out[0].jumps, std::nullopt);
  out.push_back(predictor.predict(req));

  req.unit = 'C';
  mark_applied(out[1].jumps, static_cast<int>(std::lround(out[1].next_stage)));
  out.push_back(predictor.predict(req));
  return out;
}

GoldReplayPredictor::GoldReplayPredictor(std::vector<GoldStep> steps) {
  for (auto& s : steps) table_.emplace(std::make_pair(s.program, s.stage), s.heads);
}

PredictionHeads GoldReplayPredictor::predict(const PredictorRequest& request) {
  auto it = table_.find({request.program, request.stage});
  if (it != table_.end()) return it->second;
  PredictionHeads off;
  off.domain = true;
  off.feasible = false;
  off.next_stage = request.stage;
  return off;
}

NoisyPredictor::NoisyPredictor(std::shared_ptr<Predictor> inner, double rho, std::uint64_t seed, std::string units)
    : inner_(std::move(inner)), rho_(rho), units_(std::move(units)), rng_(seed) {}

PredictionHeads NoisyPredictor::predict(const PredictorRequest& request) {
  PredictionHeads h = inner_->predict(request);
  if (units_.find(request.unit) == std::string::npos) return h;
  std::bernoulli_distribution flip(rho_);
  if (flip(rng_)) h.domain = !h.domain;
  if (flip(rng_)) h.feasible = !h.feasible;
  if (flip(rng_)) h.sign_positive = !h.sign_positive;
  if (flip(rng_)) h.expression = !h.expression;
  return h;
}

std::string NoisyPredictor::describe() const {
  return "mock:noisy(" + std::to_string(rho_) + "," + units_ + ")<" + inner_->describe() + ">";
}

}  // namespace cool
