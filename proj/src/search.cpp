#include "cool/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_map>

#include "cool/wire.hpp"

namespace cool {

// ---------------------------------------------------------------------------
// Controller

void NnfcController::attach(std::size_t dsl_index, std::shared_ptr<Predictor> predictor) {
  predictors_[dsl_index] = std::move(predictor);
}

std::vector<ControlSignals> NnfcController::control(const PartialProgram& p, int stage,
                                                    const std::vector<std::string>& dsl_names,
                                                    const std::vector<Candidate>& candidates, Metrics& metrics,
                                                    std::size_t max_tree_depth) const {
  std::vector<ControlSignals> out(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) out[i].u0 = out[i].u1 = out[i].u2 = candidates[i].features.value;
  if (predictors_.empty() || candidates.empty()) return out;

  // One query per relevant predictor; a bound program only consults its own DSL.
  std::vector<std::size_t> queried;
  std::map<std::size_t, std::optional<PredictionHeads>> guidance;
  std::map<std::size_t, std::optional<std::array<PredictionHeads, 3>>> raw;
  for (const auto& [dsl, predictor] : predictors_) {
    if (p.bound_domain && dsl_names[dsl] != *p.bound_domain) continue;
    queried.push_back(dsl);
    try {
      auto heads = query_coupled(*predictor, p, stage, dsl_names[dsl], coupling, max_tree_depth);
      ++metrics.nn_queries;
      metrics.nn_invocations += heads.size();
      if (coupling) {
        std::array<PredictionHeads, 3> e0{heads[0], heads[1], heads[2]};
        raw[dsl] = e0;
        if (feedback) {
          auto e1 = filter(e0, law.tolerance);
          ++(e1 ? metrics.filter_passed : metrics.filter_rejected);
          guidance[dsl] = e1;
        } else {
          guidance[dsl] = heads[2];
        }
      } else {
        guidance[dsl] = heads[0];
      }
    } catch (const PredictorError&) {
      ++metrics.transport_failures;
      guidance[dsl] = std::nullopt;
    }
  }

  std::vector<bool> claims;
  for (auto d : queried) claims.push_back(guidance[d] && guidance[d]->domain);
  auto permitted = arbitrate(claims);
  std::map<std::size_t, bool> may_adjust;
  for (std::size_t i = 0; i < queried.size(); ++i) may_adjust[queried[i]] = permitted[i];

  std::vector<bool> aligned(candidates.size(), false);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto dsl = candidates[i].dsl;
    if (!guidance.count(dsl)) continue;
    const auto& e1 = guidance[dsl];
    out[i].e0 = raw[dsl];
    out[i].e1 = e1;
    if (!e1) continue;
    aligned[i] = e1->domain && e1->feasible && guidance_matches(*e1, candidates[i].features, law.tolerance);
    if (may_adjust[dsl]) out[i].u1 = adjust(out[i].u0, *e1, candidates[i].features, law);
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool alternative = false;
    for (std::size_t j = 0; j < candidates.size() && !alternative; ++j)
      alternative = j != i && aligned[j] && candidates[j].dsl == candidates[i].dsl;
    out[i].aligned = aligned[i];
    out[i].u2 = feedback ? clip(out[i].u1, aligned[i], alternative) : out[i].u1;
  }
  return out;
}

double regulate_skip(double h_skipped, double h_target, SkipMode mode) {
  if (mode == SkipMode::suppress) return -std::numeric_limits<double>::infinity();
  return h_target - h_skipped;
}

std::string to_string(PairKind k) {
  switch (k) {
    case PairKind::rule: return "rule";
    case PairKind::advance: return "advance";
    case PairKind::skip: return "skip";
  }
  return "?";
}

std::string to_string(PathStatus s) {
  switch (s) {
    case PathStatus::feasible: return "feasible";
    case PathStatus::infeasible: return "infeasible";
    case PathStatus::unfinished: return "unfinished";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Search

namespace {

struct State {
  PartialProgram program;
  double g = 0;
  long parent_state = -1;
  long via_pair = -1;
  std::size_t depth = 0;  // rule pairs on the path so far
  std::string key;
};

struct PairData {
  std::size_t state;
  std::size_t dsl = 0;
  const Rule* rule = nullptr;
  Binding binding;
  int target_stage = 0;  // advance / skip
};

struct QueueItem {
  double f;
  std::uint64_t seq;
  std::size_t pair;
  bool operator>(const QueueItem& o) const { return f != o.f ? f > o.f : seq > o.seq; }
};

std::string state_key(const PartialProgram& p) {
  return to_text(*p.tree) + "\x1f" + std::to_string(p.stage) + "\x1f" + p.bound_domain.value_or("");
}

void collect_answers(const NodePtr& n, std::map<std::string, NodePtr>& out) {
  if (n->is_op("=") && n->children().size() == 2) {
    const auto& lhs = n->children()[0];
    if (lhs->kind() == NodeKind::identifier || lhs->kind() == NodeKind::nonterminal) out[lhs->label()] = n->children()[1];
  }
  for (const auto& c : n->children()) collect_answers(c, out);
}

class Search {
 public:
  Search(const std::vector<const Dsl*>& dsls, const NnfcController& controller, const SearchConfig& cfg)
      : dsls_(dsls), controller_(controller), cfg_(cfg) {
    for (auto d : dsls_) names_.push_back(d->name);
  }

  SynthesisResult run(const PartialProgram& goal) {
    auto start = std::chrono::steady_clock::now();
    PartialProgram p0 = goal;
    p0.tree = normalize_conjunctions(p0.tree);
    if (p0.stage < 1) p0.stage = 1;
    if (is_complete(p0)) {
      result_.success = true;
      result_.program = p0;
      collect_answers(p0.tree, result_.answers);
    } else {
      State s0;
      s0.program = p0;
      s0.key = state_key(p0);
      states_.push_back(s0);
      best_[s0.key] = 0;
      if (expand(0)) loop();
      if (!result_.success && result_.reason.empty()) result_.reason = refused_for_length_ ? "max_path_len" : "exhausted";
    }
    result_.metrics.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result_.paths = classify_paths(result_.trace, result_.solution);
    for (auto& path : result_.paths)
      for (auto id : path.pairs) result_.trace[id].status = path.status;
    return std::move(result_);
  }

 private:
  int max_stage(const PartialProgram& p) const {
    int m = 1;
    for (auto d : dsls_)
      if (!p.bound_domain || d->name == *p.bound_domain) m = std::max(m, d->col_length);
    return m;
  }

  /// Largest rule value active at `stage`, for skip regulation.
  double stage_value(const PartialProgram& p, int stage) const {
    double best = 0;
    bool any = false;
    for (auto d : dsls_) {
      if (p.bound_domain && d->name != *p.bound_domain) continue;
      if (stage > d->col_length) continue;
      for (const auto& a : d->sub_dsl(stage)) {
        double v = a.value.to_double();
        if (!any || v > best) best = v;
        any = true;
      }
    }
    return best;
  }

  std::size_t new_record(std::size_t state, PairKind kind) {
    const State& s = states_[state];
    TraceRecord r;
    r.pair = result_.trace.size();
    r.parent = s.via_pair;
    r.kind = kind;
    r.tree = s.program.tree;
    r.program = to_text(*s.program.tree);
    r.stage = s.program.stage;
    r.domain = s.program.bound_domain.value_or("");
    r.g = s.g;
    result_.trace.push_back(std::move(r));
    PairData pd;
    pd.state = state;
    pairs_.push_back(std::move(pd));
    return result_.trace.size() - 1;
  }

  void push(std::size_t pair, double f) {
    QueueItem item{f, seq_++, pair};
    open_.push(item);
    if (cfg_.verify_pop_order) shadow_.insert({f, item.seq});
  }

  /// Enqueues every pair of a state. Returns false once the pair budget is spent.
  bool expand(std::size_t state_index) {
    ++result_.metrics.expansions;
    const PartialProgram p = states_[state_index].program;
    const double g = states_[state_index].g;
    const int stage = p.stage;

    struct Cand {
      std::size_t dsl;
      const Rule* rule;
      Binding binding;
    };
    std::vector<Cand> cands;
    std::vector<NnfcController::Candidate> features;
    if (states_[state_index].depth < cfg_.max_path_len) {
      for (std::size_t d = 0; d < dsls_.size(); ++d) {
        const Dsl& dsl = *dsls_[d];
        if (p.bound_domain && dsl.name != *p.bound_domain) continue;
        if (stage > dsl.col_length) continue;
        for (const auto& act : dsl.sub_dsl(stage)) {
          for (auto& b : match(*act.rule, p)) {
            CandidateFeatures cf;
            cf.jumps = to_jumps(b.location);
            cf.next_stage = act.rule->jump_targets.empty() ? stage
                                                           : std::min(act.rule->jump_targets.front(), dsl.col_length);
            cf.value = act.value.to_double();
            cf.expression = act.rule->source.kind == HeadKind::expression;
            features.push_back({d, cf});
            cands.push_back({d, act.rule, std::move(b)});
          }
        }
      }
    } else {
      for (std::size_t d = 0; d < dsls_.size(); ++d) {
        const Dsl& dsl = *dsls_[d];
        if ((!p.bound_domain || dsl.name == *p.bound_domain) && stage <= dsl.col_length) {
          for (const auto& act : dsl.sub_dsl(stage))
            if (!match(*act.rule, p).empty()) refused_for_length_ = true;
        }
      }
    }

    auto signals = controller_.control(p, stage, names_, features, result_.metrics, cfg_.max_tree_depth);
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (result_.metrics.transformation_pairs >= cfg_.max_pairs) {
        result_.reason = "max_pairs";
        return false;
      }
      ++result_.metrics.transformation_pairs;
      auto id = new_record(state_index, PairKind::rule);
      auto& rec = result_.trace[id];
      const auto& sig = signals[i];
      rec.rule = cands[i].rule->id;
      rec.jumps = features[i].features.jumps;
      rec.next_stage = features[i].features.next_stage;
      rec.expression = features[i].features.expression;
      rec.u0 = sig.u0;
      rec.u1 = sig.u1;
      rec.u2 = sig.u2;
      rec.f = (g - sig.u2) - sig.u2;
      pairs_[id].dsl = cands[i].dsl;
      pairs_[id].rule = cands[i].rule;
      pairs_[id].binding = std::move(cands[i].binding);
      push(id, rec.f);
    }

    if (stage < max_stage(p)) {
      auto id = new_record(state_index, PairKind::advance);
      result_.trace[id].next_stage = stage + 1;
      result_.trace[id].f = g;
      pairs_[id].target_stage = stage + 1;
      push(id, g);
    }
    if (stage + 2 <= max_stage(p)) {
      double bias = regulate_skip(stage_value(p, stage + 1), stage_value(p, stage + 2), cfg_.skip_mode);
      if (std::isfinite(bias)) {
        auto id = new_record(state_index, PairKind::skip);
        auto& rec = result_.trace[id];
        rec.next_stage = stage + 2;
        rec.u0 = rec.u1 = rec.u2 = bias;
        rec.f = g - bias;
        pairs_[id].target_stage = stage + 2;
        push(id, rec.f);
      }
    }
    return true;
  }

  bool on_path(long state, const std::string& key) const {
    for (long s = state; s >= 0; s = states_[s].parent_state)
      if (states_[s].key == key) return true;
    return false;
  }

  /// Registers a derived program. Returns its state index, or -1 for duplicates.
  long admit(PartialProgram child, long parent, long via_pair, double g, std::size_t depth) {
    State s;
    s.key = state_key(child);
    if (auto it = best_.find(s.key); it != best_.end() && it->second <= g) return -1;
    if (on_path(parent, s.key)) return -1;
    best_[s.key] = g;
    s.program = std::move(child);
    s.program.id = states_.size();
    s.g = g;
    s.parent_state = parent;
    s.via_pair = via_pair;
    s.depth = depth;
    result_.metrics.max_depth = std::max(result_.metrics.max_depth, depth);
    states_.push_back(std::move(s));
    return static_cast<long>(states_.size()) - 1;
  }

  void succeed(std::size_t pair, const PartialProgram& program, const Bindings& bindings) {
    result_.success = true;
    result_.program = program;
    result_.final_bindings = bindings;
    collect_answers(program.tree, result_.answers);
    std::vector<std::size_t> chain;
    for (long id = static_cast<long>(pair); id >= 0; id = result_.trace[id].parent) chain.push_back(id);
    std::reverse(chain.begin(), chain.end());
    result_.solution = std::move(chain);
  }

  void loop() {
    while (!open_.empty()) {
      QueueItem item = open_.top();
      open_.pop();
      if (cfg_.verify_pop_order) {
        auto first = shadow_.begin();
        if (first->first != item.f || first->second != item.seq)
          throw std::logic_error("priority queue popped out of order");
        shadow_.erase(first);
      }
      auto pid = item.pair;
      auto& rec = result_.trace[pid];
      rec.applied = true;
      const std::size_t sidx = pairs_[pid].state;
      const PartialProgram src = states_[sidx].program;
      const double g = states_[sidx].g;
      const std::size_t depth = states_[sidx].depth;

      if (rec.kind != PairKind::rule) {
        PartialProgram next = src;
        next.stage = pairs_[pid].target_stage;
        long s = admit(next, static_cast<long>(sidx), static_cast<long>(pid), g, depth);
        if (s < 0) {
          result_.trace[pid].outcome = "duplicate";
          continue;
        }
        result_.trace[pid].outcome = "derived";
        result_.trace[pid].derived = 1;
        if (!expand(static_cast<std::size_t>(s))) return;
        continue;
      }

      const Dsl& dsl = *dsls_[pairs_[pid].dsl];
      auto outcome = apply(dsl, *pairs_[pid].rule, src, pairs_[pid].binding);
      result_.metrics.tree_operations += outcome.tree_ops;
      {
        auto& r = result_.trace[pid];
        r.tree_ops = outcome.tree_ops;
        r.outcome = outcome.flow == Flow::aborted ? "aborted" : outcome.derived.empty() ? "stay" : "derived";
      }
      const double u2 = result_.trace[pid].u2;
      std::size_t admitted = 0;
      for (std::size_t k = 0; k < outcome.derived.size(); ++k) {
        PartialProgram child = outcome.derived[k];
        if (!child.bound_domain) child.bound_domain = dsl.name;
        if (is_complete(child)) {
          result_.trace[pid].outcome = "success";
          result_.trace[pid].derived = admitted + 1;
          result_.metrics.max_depth = std::max(result_.metrics.max_depth, depth + 1);
          succeed(pid, child, outcome.bindings[k]);
          return;
        }
        long s = admit(child, static_cast<long>(sidx), static_cast<long>(pid), g - u2, depth + 1);
        if (s < 0) continue;
        ++admitted;
        result_.trace[pid].derived = admitted;
        if (!expand(static_cast<std::size_t>(s))) return;
      }
      if (!outcome.derived.empty() && admitted == 0) result_.trace[pid].outcome = "duplicate";
    }
  }

  const std::vector<const Dsl*>& dsls_;
  const NnfcController& controller_;
  const SearchConfig& cfg_;
  std::vector<std::string> names_;
  std::vector<State> states_;
  std::vector<PairData> pairs_;
  std::unordered_map<std::string, double> best_;
  std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<QueueItem>> open_;
  std::set<std::pair<double, std::uint64_t>> shadow_;
  std::uint64_t seq_ = 0;
  bool refused_for_length_ = false;
  SynthesisResult result_;
};

}  // namespace

SynthesisResult synthesize(const PartialProgram& goal, const std::vector<const Dsl*>& dsls,
                           const NnfcController& controller, const SearchConfig& cfg) {
  if (cfg.max_pairs == 0 || cfg.max_path_len == 0) throw std::invalid_argument("search limits must be positive");
  Search s(dsls, controller, cfg);
  return s.run(goal);
}

// ---------------------------------------------------------------------------
// Paths

std::vector<SynthesisPath> classify_paths(const std::vector<TraceRecord>& trace,
                                          const std::vector<std::size_t>& solution) {
  std::vector<SynthesisPath> paths;
  if (trace.empty()) return paths;
  std::vector<bool> has_child(trace.size(), false), assigned(trace.size(), false);
  for (const auto& r : trace)
    if (r.parent >= 0) has_child[static_cast<std::size_t>(r.parent)] = true;

  if (!solution.empty()) {
    SynthesisPath p{solution, PathStatus::feasible};
    for (auto id : solution) assigned[id] = true;
    paths.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (has_child[i] || assigned[i]) continue;
    SynthesisPath p;
    p.status = trace[i].applied ? PathStatus::infeasible : PathStatus::unfinished;
    for (long id = static_cast<long>(i); id >= 0 && !assigned[id]; id = trace[id].parent) {
      p.pairs.push_back(static_cast<std::size_t>(id));
      assigned[id] = true;
    }
    std::reverse(p.pairs.begin(), p.pairs.end());
    paths.push_back(std::move(p));
  }
  return paths;
}

// ---------------------------------------------------------------------------
// Gold guidance and trace files

namespace {

PredictionHeads heads_for(const TraceRecord& r) {
  PredictionHeads h;
  h.domain = true;
  h.feasible = true;
  if (r.kind == PairKind::rule) {
    h.jumps = r.jumps;
    h.next_stage = r.next_stage;
    h.sign_positive = r.u0 > 0;
    h.value = r.u0;
    h.expression = r.expression;
  } else {
    h.jumps = {};
    h.next_stage = r.next_stage;
    h.sign_positive = true;
    h.value = 0;
    h.expression = true;
  }
  return h;
}

std::string jumps_text(const JumpPath& j) {
  std::string s;
  for (auto x : j) s += x == Jump::left ? 'L' : x == Jump::right ? 'R' : 'S';
  return s;
}

JumpPath jumps_from_text(const std::string& s) {
  JumpPath j;
  for (char c : s) j.push_back(c == 'L' ? Jump::left : c == 'R' ? Jump::right : Jump::stop);
  return j;
}

}  // namespace

std::vector<GoldStep> gold_steps(const SynthesisResult& result) {
  std::vector<GoldStep> out;
  for (auto id : result.solution) {
    const auto& r = result.trace[id];
    out.push_back({r.program, r.stage, heads_for(r)});
  }
  return out;
}

std::optional<std::vector<GoldStep>> cheapest_gold(const PartialProgram& goal, const std::vector<const Dsl*>& dsls,
                                                   const SearchConfig& cfg, const GoldAcceptor& accept,
                                                   std::size_t max_expansions) {
  struct Node_ {
    PartialProgram program;
    long parent = -1;
    PredictionHeads step;  // what was done to the parent to get here
    std::size_t depth = 0;
  };
  std::vector<Node_> nodes;
  std::unordered_map<std::string, std::size_t> best;
  using Item = std::tuple<std::size_t, std::uint64_t, std::size_t>;  // cost, seq, node
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> open;
  std::uint64_t seq = 0;

  auto chain = [&](long leaf, const PredictionHeads& last) {
    std::vector<GoldStep> out;
    std::vector<long> ids;
    for (long i = leaf; i >= 0; i = nodes[i].parent) ids.push_back(i);
    std::reverse(ids.begin(), ids.end());
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const auto& n = nodes[ids[k]];
      const auto& heads = k + 1 < ids.size() ? nodes[ids[k + 1]].step : last;
      out.push_back({to_text(*n.program.tree), n.program.stage, heads});
    }
    return out;
  };
  auto offer = [&](PartialProgram q, long parent, const PredictionHeads& step, std::size_t cost, std::size_t depth) {
    auto key = state_key(q);
    if (auto it = best.find(key); it != best.end() && it->second <= cost) return;
    best[key] = cost;
    nodes.push_back({std::move(q), parent, step, depth});
    open.push({cost, seq++, nodes.size() - 1});
  };

  PartialProgram p0 = goal;
  p0.tree = normalize_conjunctions(p0.tree);
  if (p0.stage < 1) p0.stage = 1;
  offer(p0, -1, {}, 0, 0);
  std::size_t expanded = 0;
  while (!open.empty() && expanded < max_expansions) {
    auto [cost, unused, id] = open.top();
    open.pop();
    (void)unused;
    const PartialProgram p = nodes[id].program;
    const std::size_t depth = nodes[id].depth;
    if (best[state_key(p)] < cost) continue;
    ++expanded;

    struct Cand {
      const Dsl* dsl;
      const Rule* rule;
      Binding binding;
      PredictionHeads heads;
    };
    std::vector<Cand> cands;
    int top_stage = 1;
    for (auto d : dsls) {
      if (p.bound_domain && d->name != *p.bound_domain) continue;
      top_stage = std::max(top_stage, d->col_length);
      if (p.stage > d->col_length || depth >= cfg.max_path_len) continue;
      for (const auto& act : d->sub_dsl(p.stage)) {
        for (auto& b : match(*act.rule, p)) {
          PredictionHeads h;
          h.domain = h.feasible = true;
          h.jumps = to_jumps(b.location);
          h.next_stage = act.rule->jump_targets.empty() ? p.stage : std::min(act.rule->jump_targets.front(), d->col_length);
          h.value = act.value.to_double();
          h.sign_positive = h.value > 0;
          h.expression = act.rule->source.kind == HeadKind::expression;
          cands.push_back({d, act.rule, std::move(b), h});
        }
      }
    }
    // The real search enqueues all of these before any child exists.
    const std::size_t next_cost = cost + cands.size();
    if (next_cost > cfg.max_pairs) continue;
    for (const auto& c : cands) {
      auto outcome = apply(*c.dsl, *c.rule, p, c.binding);
      for (std::size_t k = 0; k < outcome.derived.size(); ++k) {
        PartialProgram q = outcome.derived[k];
        if (!q.bound_domain) q.bound_domain = c.dsl->name;
        if (is_complete(q)) {
          if (accept(q, outcome.bindings[k])) return chain(static_cast<long>(id), c.heads);
          continue;
        }
        offer(std::move(q), static_cast<long>(id), c.heads, next_cost, depth + 1);
      }
    }
    if (p.stage < top_stage) {
      PartialProgram q = p;
      q.stage = p.stage + 1;
      PredictionHeads h;
      h.domain = h.feasible = h.sign_positive = h.expression = true;
      h.next_stage = q.stage;
      offer(std::move(q), static_cast<long>(id), h, next_cost, depth);
    }
  }
  return std::nullopt;
}

void write_trace_jsonl(const SynthesisResult& result, std::ostream& out, const std::string& task_id) {
  for (const auto& r : result.trace) {
    wire::json j;
    if (!task_id.empty()) j["task"] = task_id;
    j["pair"] = r.pair;
    j["parent"] = r.parent;
    j["kind"] = to_string(r.kind);
    j["program"] = r.program;
    PartialProgram p;
    p.tree = r.tree;
    p.stage = r.stage;
    if (!r.domain.empty()) p.bound_domain = r.domain;
    j["tac"] = wire::tac_to_json(to_tac(p))["codeTable"];
    j["stage"] = r.stage;
    j["domain"] = r.domain;
    j["rule"] = r.rule;
    j["jumps"] = jumps_text(r.jumps);
    j["next_stage"] = r.next_stage;
    j["head"] = r.expression ? "expression" : "terminal";
    j["u0"] = r.u0;
    j["u1"] = r.u1;
    j["u2"] = r.u2;
    j["g"] = r.g;
    j["f"] = r.f;
    j["applied"] = r.applied;
    j["outcome"] = r.outcome;
    j["status"] = to_string(r.status);
    j["tree_ops"] = r.tree_ops;
    out << j.dump() << '\n';
  }
}

std::vector<GoldStep> gold_steps_from_jsonl(std::istream& in) {
  std::vector<GoldStep> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = wire::json::parse(line);
    if (j.value("status", "") != "feasible") continue;
    TraceRecord r;
    r.kind = j.value("kind", "rule") == "rule" ? PairKind::rule : PairKind::advance;
    r.program = j.value("program", "");
    r.stage = j.value("stage", 1);
    r.jumps = jumps_from_text(j.value("jumps", ""));
    r.next_stage = j.value("next_stage", 1);
    r.u0 = j.value("u0", 0.0);
    r.expression = j.value("head", "expression") == "expression";
    out.push_back({r.program, r.stage, heads_for(r)});
  }
  return out;
}

}  // namespace cool
