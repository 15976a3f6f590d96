#include "cool/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cool/kinship.hpp"
#include "cool/wire.hpp"

namespace cool::bench {

std::string to_string(TaskKind k) { return k == TaskKind::relational ? "relational" : "symbolic"; }

// ---------------------------------------------------------------------------
// Relational tasks

std::vector<BenchTask> gen_relational(const GenSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  int length = spec.difficulty == 'B' ? 4 : 3;
  std::vector<BenchTask> out;
  for (std::size_t i = 0; i < spec.count; ++i) {
    auto chain = kinship::sample_chain(rng, length);
    std::string text;
    for (const auto& e : chain.edges)
      text += "(" + chain.names[e.to] + ") is (" + chain.names[e.from] + ")s " + e.noun + " & ";
    text += "(" + chain.names.back() + ") is (" + chain.names.front() + ")s ($relation)";
    BenchTask t;
    t.id = "rel" + std::string(1, spec.difficulty) + "-" + std::to_string(i);
    t.kind = TaskKind::relational;
    t.difficulty = spec.difficulty;
    t.libraries = {"family"};
    t.statement = text;
    t.goal.tree = lower_goal(*parse_expression(text));
    t.gold = chain.answer_noun;
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symbolic tasks

namespace {

using Poly = std::array<Rational, 3>;

std::optional<Poly> poly_of(const Node& n) {
  switch (n.kind()) {
    case NodeKind::number: return Poly{n.value(), Rational(0), Rational(0)};
    case NodeKind::nonterminal: return Poly{Rational(0), Rational(1), Rational(0)};
    case NodeKind::op: break;
    default: return std::nullopt;
  }
  if (n.children().size() != 2) return std::nullopt;
  auto l = poly_of(*n.children()[0]);
  if (!l) return std::nullopt;
  const std::string& op = n.label();
  if (op == "^") {
    const auto& e = *n.children()[1];
    if (e.kind() != NodeKind::number || e.value() != Rational(2)) return std::nullopt;
    if (!(*l)[2].is_zero()) return std::nullopt;
    return Poly{(*l)[0] * (*l)[0], Rational(2) * (*l)[0] * (*l)[1], (*l)[1] * (*l)[1]};
  }
  auto r = poly_of(*n.children()[1]);
  if (!r) return std::nullopt;
  if (op == "+" || op == "-" || op == "==") {
    Poly out;
    for (int i = 0; i < 3; ++i) out[i] = op == "+" ? (*l)[i] + (*r)[i] : (*l)[i] - (*r)[i];
    return out;
  }
  if (op == "*") {
    std::array<Rational, 5> prod{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) prod[i + j] = prod[i + j] + (*l)[i] * (*r)[j];
    if (!prod[3].is_zero() || !prod[4].is_zero()) return std::nullopt;
    return Poly{prod[0], prod[1], prod[2]};
  }
  return std::nullopt;
}

// Degree before any cancellation, so intermediate expansions stay quadratic.
int syntactic_degree(const Node& n) {
  if (n.kind() == NodeKind::nonterminal) return 1;
  if (n.kind() != NodeKind::op) return 0;
  int l = syntactic_degree(*n.children()[0]), r = syntactic_degree(*n.children()[1]);
  if (n.is_op("*")) return l + r;
  if (n.is_op("^")) return l * 2;
  return std::max(l, r);
}

bool every_subtree_quadratic(const Node& n) {
  if (n.kind() == NodeKind::op && !n.is_op("==") && (!poly_of(n) || syntactic_degree(n) > 2)) return false;
  for (const auto& c : n.children())
    if (!every_subtree_quadratic(*c)) return false;
  return true;
}

std::size_t leaves(const Node& n) {
  if (n.is_leaf()) return 1;
  std::size_t s = 0;
  for (const auto& c : n.children()) s += leaves(*c);
  return s;
}

NodePtr random_side(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> number(1, 12);
  std::uniform_real_distribution<double> u(0, 1);
  if (n <= 1) return u(rng) < 0.5 ? Node::nonterminal("x") : Node::number(Rational(number(rng)));
  if (u(rng) < 0.15) return Node::op("^", {random_side(rng, n - 1), Node::number(Rational(2))});
  double pick = u(rng);
  std::string op = pick < 0.4 ? "+" : pick < 0.65 ? "-" : "*";
  int k = std::uniform_int_distribution<int>(1, n - 1)(rng);
  return Node::op(op, {random_side(rng, k), random_side(rng, n - k)});
}

std::string rational_text(const Rational& r) { return r.to_string(); }

}  // namespace

std::optional<std::array<Rational, 3>> quadratic_coefficients(const Node& equation) {
  if (!equation.is_op("==")) return std::nullopt;
  auto p = poly_of(equation);
  if (!p) return std::nullopt;
  return std::array<Rational, 3>{(*p)[2], (*p)[1], (*p)[0]};
}

std::optional<std::pair<double, double>> quadratic_roots(const std::array<Rational, 3>& abc) {
  double a = abc[0].to_double(), b = abc[1].to_double(), c = abc[2].to_double();
  double d = b * b - 4 * a * c;
  try {
    if (abc[1] * abc[1] - Rational(4) * abc[0] * abc[2] < Rational(0)) return std::nullopt;
  } catch (const ArithmeticError&) {
    long double la = abc[0].to_double(), lb = abc[1].to_double(), lc = abc[2].to_double();
    if (lb * lb - 4 * la * lc < 0) return std::nullopt;
  }
  double s = std::sqrt(std::max(d, 0.0));
  return std::make_pair((-b + s) / (2 * a), (-b - s) / (2 * a));
}

std::vector<BenchTask> gen_symbolic(const GenSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  int lo = spec.difficulty == 'B' ? 8 : 4, hi = spec.difficulty == 'B' ? 10 : 6;
  std::vector<BenchTask> out;
  while (out.size() < spec.count) {
    int n = std::uniform_int_distribution<int>(lo, hi)(rng);
    int left = std::uniform_int_distribution<int>(std::max(1, n / 2), n - 1)(rng);
    auto eq = Node::op("==", {random_side(rng, left), random_side(rng, n - left)});
    if (static_cast<int>(leaves(*eq)) < lo || static_cast<int>(leaves(*eq)) > hi) continue;
    if (!contains_nonterminal(*eq)) continue;
    std::optional<std::array<Rational, 3>> abc;
    try {
      if (!every_subtree_quadratic(*eq)) continue;
      abc = quadratic_coefficients(*eq);
    } catch (const ArithmeticError&) {
      continue;  // constants past 64 bits; draw again
    }
    if (!abc || (*abc)[0].is_zero()) continue;
    BenchTask t;
    t.id = "sym" + std::string(1, spec.difficulty) + "-" + std::to_string(out.size());
    t.kind = TaskKind::symbolic;
    t.difficulty = spec.difficulty;
    t.libraries = {"quadratic"};
    t.statement = to_text(*eq);
    t.goal.tree = lower_goal(*parse_expression(t.statement));
    t.coefficients = *abc;
    t.gold = "a=" + rational_text((*abc)[0]) + ", b=" + rational_text((*abc)[1]) + ", c=" + rational_text((*abc)[2]);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<BenchTask> generate(const GenSpec& spec) {
  return spec.kind == TaskKind::relational ? gen_relational(spec) : gen_symbolic(spec);
}

// ---------------------------------------------------------------------------
// Task files

std::string to_task_file(const std::vector<BenchTask>& tasks) {
  std::ostringstream out;
  std::vector<std::string> loaded;
  for (const auto& t : tasks)
    for (const auto& l : t.libraries)
      if (std::find(loaded.begin(), loaded.end(), l) == loaded.end()) loaded.push_back(l);
  for (const auto& l : loaded) out << "#load(" << l << ")\n";
  bool rel = false, sym = false;
  for (const auto& t : tasks) (t.kind == TaskKind::relational ? rel : sym) = true;
  if (rel) out << "new:relation = \"\";\n";
  if (sym) out << "new:x = 1;\n";
  for (const auto& t : tasks) {
    out << "\n";
    if (t.kind == TaskKind::relational) {
      std::smatch sm;
      std::regex_search(t.statement, sm, std::regex(R"(\((\w+)\) is \((\w+)\)s \(\$relation\))"));
      out << "// Ans: (" << sm[1] << ") is (" << sm[2] << ")s " << t.gold << "\n";
      out << t.statement << ";\nrelation-->\"#FILE(SCREEN)\";\n";
    } else {
      out << "// Ans: " << t.gold << "\n";
      out << t.statement << ";\nx-->\"#FILE(SCREEN)\";\n";
    }
  }
  return out.str();
}

std::vector<BenchTask> from_task_file(const std::string& text, const std::string& id_prefix) {
  std::vector<BenchTask> out;
  auto specs = parse_tasks(text);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    BenchTask t;
    t.id = id_prefix + std::to_string(i);
    t.goal = s.goal;
    t.statement = to_text(*s.goal.tree);
    t.libraries.assign(s.domain_hint.begin(), s.domain_hint.end());
    auto abc = quadratic_coefficients(*s.goal.tree);
    t.kind = abc ? TaskKind::symbolic : TaskKind::relational;
    if (abc) {
      t.coefficients = *abc;
      t.gold = "a=" + rational_text((*abc)[0]) + ", b=" + rational_text((*abc)[1]) + ", c=" + rational_text((*abc)[2]);
    } else {
      t.gold = s.gold_answer.value_or("");
    }
    t.difficulty = '?';
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Answer checking

Verdict check_answer(const BenchTask& task, const SynthesisResult& result) {
  Verdict v;
  if (!result.success) {
    v.detail = "no program: " + result.reason;
    return v;
  }
  if (task.kind == TaskKind::relational) {
    auto it = result.answers.find("relation");
    if (it == result.answers.end() || it->second->kind() != NodeKind::string) {
      v.detail = "program assigns no relation";
      return v;
    }
    v.answer = it->second->label();
    v.correct = v.answer == task.gold;
    if (!v.correct) v.detail = "expected " + task.gold;
    return v;
  }

  std::array<Rational, 3> got{};
  const char* names[] = {"a", "b", "c"};
  for (int i = 0; i < 3; ++i) {
    auto it = result.final_bindings.find(names[i]);
    if (it == result.final_bindings.end() || !it->second || it->second->kind() != NodeKind::number) {
      v.detail = std::string("coefficient ") + names[i] + " missing";
      return v;
    }
    got[i] = it->second->value();
  }
  v.answer = "a=" + rational_text(got[0]) + ", b=" + rational_text(got[1]) + ", c=" + rational_text(got[2]);
  if (got != task.coefficients) {
    v.detail = "coefficients differ from " + task.gold;
    return v;
  }
  auto x = result.answers.find("x");
  if (x == result.answers.end()) {
    v.detail = "program assigns no roots";
    return v;
  }
  v.answer += "; x = " + to_text(*x->second);
  auto roots = quadratic_roots(task.coefficients);
  if (!roots) {
    v.correct = x->second->kind() == NodeKind::string && x->second->label() == "null";
    if (!v.correct) v.detail = "expected no real roots";
    return v;
  }
  const auto& set = x->second;
  if (!set->is_op("{}") || set->children().size() != 2) {
    v.detail = "expected two roots";
    return v;
  }
  auto r1 = evaluate(*set->children()[0]), r2 = evaluate(*set->children()[1]);
  v.correct = r1 && r2 && std::fabs(*r1 - roots->first) <= 1e-9 && std::fabs(*r2 - roots->second) <= 1e-9;
  if (!v.correct) v.detail = "roots off";
  return v;
}

// ---------------------------------------------------------------------------
// Groups

std::string GroupConfig::display() const {
  std::string base = mode == HeuristicMode::plain ? "DSL" : mode == HeuristicMode::heuristic_only ? "DSL (Heuristic)" : "CoL DSL";
  if (guidance == Guidance::trained) base += "+NN";
  if (guidance == Guidance::nnfc) base += "+NNFC";
  if (guidance != Guidance::none && coupling) base += " (Cp)";
  return base;
}

const std::vector<std::string>& group_slugs() {
  static const std::vector<std::string> s = {"dsl",    "dsl-heuristic", "col",     "dsl+nn",
                                             "dsl-heuristic+nn", "col+nn", "col+nnfc"};
  return s;
}

GroupConfig parse_group(const std::string& slug, bool coupling) {
  GroupConfig g;
  g.slug = slug;
  g.coupling = coupling;
  std::string base = slug;
  if (auto plus = slug.find('+'); plus != std::string::npos) {
    base = slug.substr(0, plus);
    auto nn = slug.substr(plus + 1);
    if (nn == "nn") g.guidance = Guidance::trained;
    else if (nn == "nnfc") g.guidance = Guidance::nnfc;
    else throw std::invalid_argument("unknown group '" + slug + "'");
  }
  if (base == "dsl") g.mode = HeuristicMode::plain;
  else if (base == "dsl-heuristic") g.mode = HeuristicMode::heuristic_only;
  else if (base == "col") g.mode = HeuristicMode::col;
  else throw std::invalid_argument("unknown group '" + slug + "'");
  if (g.guidance == Guidance::nnfc && g.mode != HeuristicMode::col)
    throw std::invalid_argument("NNFC groups require the CoL DSL");
  return g;
}

Dsl load_library(const std::string& name, const std::string& dir) { return load_dsl(dir + "/" + name + ".cooldsl"); }

// ---------------------------------------------------------------------------
// Runs

namespace {

struct Libraries {
  std::map<std::string, Dsl> dsls;
  std::mutex mutex;

  const Dsl& get(const std::string& name, const RunOptions& o) {
    std::lock_guard lock(mutex);
    auto it = dsls.find(name);
    if (it == dsls.end()) it = dsls.emplace(name, with_heuristics(load_library(name, o.library_dir), o.group.mode)).first;
    return it->second;
  }
};

bool is_mock(const std::string& p) { return p.rfind("mock:", 0) == 0; }

void gather_answers(const NodePtr& n, std::map<std::string, NodePtr>& out) {
  if (n->is_op("=") && n->children().size() == 2) out[n->children()[0]->label()] = n->children()[1];
  for (const auto& c : n->children()) gather_answers(c, out);
}

// mock:replay follows the group's own unguided solution; the other gold mocks
// follow the cheapest correct solution, falling back to the replay.
std::vector<GoldStep> gold_for(const BenchTask& task, const std::vector<const Dsl*>& dsls, const RunOptions& o) {
  if (o.predictor != "mock:replay") {
    auto accept = [&task](const PartialProgram& q, const Bindings& b) {
      SynthesisResult r;
      r.success = true;
      r.program = q;
      r.final_bindings = b;
      gather_answers(q.tree, r.answers);
      return check_answer(task, r).correct;
    };
    if (auto cheapest = cheapest_gold(task.goal, dsls, o.search, accept)) return *cheapest;
  }
  auto unguided = synthesize(task.goal, dsls, NnfcController{}, o.search);
  if (unguided.success && check_answer(task, unguided).correct) return gold_steps(unguided);
  return {};
}

std::shared_ptr<Predictor> make_predictor(const std::string& spec, const std::vector<GoldStep>& gold,
                                          std::uint64_t seed) {
  if (spec == "mock:gold" || spec == "mock:replay") return std::make_shared<GoldReplayPredictor>(gold);
  if (spec == "mock:constant") return std::make_shared<ConstantPredictor>(PredictionHeads{});
  if (spec.rfind("mock:noisy:", 0) == 0) {
    double rho = std::stod(spec.substr(11));
    return std::make_shared<NoisyPredictor>(std::make_shared<GoldReplayPredictor>(gold), rho, seed, "A");
  }
  throw std::invalid_argument("unknown mock predictor '" + spec + "'");
}

TaskOutcome run_one(const BenchTask& task, std::size_t index, const RunOptions& o, Libraries& libs,
                    const std::shared_ptr<Predictor>& shared_predictor, std::mutex& trace_mutex) {
  std::vector<const Dsl*> dsls;
  for (const auto& l : task.libraries) dsls.push_back(&libs.get(l, o));

  NnfcController controller;
  controller.coupling = o.group.coupling;
  controller.feedback = o.group.guidance == Guidance::nnfc;
  if (o.group.guidance != Guidance::none && o.predictor != "none") {
    std::shared_ptr<Predictor> predictor = shared_predictor;
    if (is_mock(o.predictor)) {
      std::vector<GoldStep> gold;
      if (o.predictor != "mock:constant") gold = gold_for(task, dsls, o);
      predictor = make_predictor(o.predictor, gold, o.seed * 1000003ULL + index);
    }
    for (std::size_t d = 0; d < dsls.size(); ++d) controller.attach(d, predictor);
  }

  auto result = synthesize(task.goal, dsls, controller, o.search);
  auto verdict = check_answer(task, result);
  TaskOutcome out;
  out.id = task.id;
  out.batch = o.batch_size ? index / o.batch_size : 0;
  out.success = result.success;
  out.correct = verdict.correct;
  out.reason = result.success ? verdict.detail : result.reason;
  out.answer = verdict.answer;
  out.metrics = result.metrics;
  if (o.trace_out) {
    std::lock_guard lock(trace_mutex);
    write_trace_jsonl(result, *o.trace_out, task.id);
  }
  return out;
}

Stats summarize(const std::vector<TaskOutcome>& tasks) {
  Stats s;
  s.tasks = tasks.size();
  if (tasks.empty()) return s;
  std::size_t correct = 0;
  for (const auto& t : tasks) {
    correct += t.correct;
    s.tree_operations += t.metrics.tree_operations;
    s.transformation_pairs += t.metrics.transformation_pairs;
    s.nn_invocations += t.metrics.nn_invocations;
    s.seconds += t.metrics.seconds;
    s.filter_passed += t.metrics.filter_passed;
    s.filter_rejected += t.metrics.filter_rejected;
    s.transport_failures += t.metrics.transport_failures;
  }
  s.degraded = s.transport_failures > 0;
  double n = static_cast<double>(tasks.size());
  s.accuracy = 100.0 * correct / n;
  s.tree_operations /= n;
  s.transformation_pairs /= n;
  s.nn_invocations /= n;
  s.seconds /= n;
  auto decisions = s.filter_passed + s.filter_rejected;
  s.attenuation = decisions ? static_cast<double>(s.filter_rejected) / decisions : 0.0;
  return s;
}

double t95(std::size_t df) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                 2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                 2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df == 0) return 0;
  return df <= 30 ? table[df - 1] : 1.96;
}

void finish(GroupReport& report, const RunOptions& o) {
  std::map<std::size_t, std::vector<TaskOutcome>> by_batch;
  for (const auto& t : report.tasks) by_batch[t.batch].push_back(t);
  for (auto& [b, ts] : by_batch) report.batches.push_back(summarize(ts));
  report.overall = summarize(report.tasks);
  auto ci = [&](auto get) {
    std::size_t n = report.batches.size();
    if (n < 2) return 0.0;
    double mean = 0;
    for (const auto& b : report.batches) mean += get(b);
    mean /= n;
    double var = 0;
    for (const auto& b : report.batches) var += (get(b) - mean) * (get(b) - mean);
    var /= (n - 1);
    return t95(n - 1) * std::sqrt(var / n);
  };
  const auto& cols = report_columns();
  report.ci95[cols[2]] = ci([](const Stats& s) { return s.accuracy; });
  report.ci95[cols[3]] = ci([](const Stats& s) { return s.tree_operations; });
  report.ci95[cols[4]] = ci([](const Stats& s) { return s.transformation_pairs; });
  report.ci95[cols[5]] = ci([](const Stats& s) { return s.nn_invocations; });
  report.ci95[cols[6]] = ci([](const Stats& s) { return s.seconds; });
  (void)o;
}

void run_range(const std::vector<BenchTask>& tasks, std::size_t begin, std::size_t end, const RunOptions& o,
               Libraries& libs, const std::shared_ptr<Predictor>& shared, std::vector<TaskOutcome>& out,
               unsigned threads) {
  std::mutex trace_mutex;
  std::atomic<std::size_t> next{begin};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < end; i = next++) {
      try {
        out[i] = run_one(tasks[i], i, o, libs, shared, trace_mutex);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

unsigned thread_count(const RunOptions& o, bool external) {
  if (external) return 1;
  unsigned n = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  return n;
}

}  // namespace

GroupReport run_static(const std::vector<BenchTask>& tasks, const RunOptions& o) {
  GroupReport report;
  report.benchmark = o.benchmark;
  report.group = o.group.display();
  if (tasks.empty()) return report;
  Libraries libs;
  std::shared_ptr<Predictor> shared;
  bool external = o.group.guidance != Guidance::none && o.predictor != "none" && !is_mock(o.predictor);
  if (external) shared = std::make_shared<wire::WirePredictor>(o.predictor, o.search.max_tree_depth);
  report.tasks.resize(tasks.size());
  run_range(tasks, 0, tasks.size(), o, libs, shared, report.tasks, thread_count(o, external));
  finish(report, o);
  return report;
}

GroupReport run_dynamic(const std::vector<BenchTask>& tasks, const RunOptions& o) {
  GroupReport report;
  report.benchmark = o.benchmark;
  report.group = o.group.display();
  if (tasks.empty()) return report;
  Libraries libs;
  std::shared_ptr<wire::WirePredictor> shared;
  bool external = o.group.guidance != Guidance::none && o.predictor != "none" && !is_mock(o.predictor);
  if (external) shared = std::make_shared<wire::WirePredictor>(o.predictor, o.search.max_tree_depth);
  report.tasks.resize(tasks.size());
  std::size_t batch = o.batch_size ? o.batch_size : tasks.size();
  std::vector<std::size_t> failed_training;
  for (std::size_t begin = 0; begin < tasks.size(); begin += batch) {
    std::size_t end = std::min(tasks.size(), begin + batch);
    std::ostringstream batch_trace;
    RunOptions bo = o;
    if (external) bo.trace_out = &batch_trace;
    run_range(tasks, begin, end, bo, libs, shared, report.tasks, thread_count(o, external));
    if (o.trace_out && external) *o.trace_out << batch_trace.str();
    if (external) {
      try {
        shared->train(batch_trace.str());
      } catch (const PredictorError&) {
        failed_training.push_back(begin / batch);
      }
    }
  }
  finish(report, o);
  for (auto b : failed_training)
    if (b < report.batches.size()) report.batches[b].degraded = true;
  return report;
}

std::vector<BenchTask> dynamic_schedule(const std::string& kind, std::size_t batches, std::size_t batch_size,
                                        std::uint64_t seed) {
  std::vector<BenchTask> out;
  if (kind == "multidomain") {
    for (std::size_t b = 0; b < batches; ++b) {
      char diff = b < batches / 2 ? 'A' : 'B';
      auto rel = gen_relational({TaskKind::relational, diff, batch_size / 2, seed + 7919 * b});
      auto sym = gen_symbolic({TaskKind::symbolic, diff, batch_size - batch_size / 2, seed + 7919 * b + 1});
      std::vector<BenchTask> mixed;
      for (auto& t : rel) mixed.push_back(std::move(t));
      for (auto& t : sym) mixed.push_back(std::move(t));
      std::mt19937_64 rng(seed + b);
      std::shuffle(mixed.begin(), mixed.end(), rng);
      for (auto& t : mixed) {
        t.libraries = {"family", "quadratic"};
        t.id = "b" + std::to_string(b) + "-" + t.id;
        out.push_back(std::move(t));
      }
    }
    return out;
  }
  TaskKind k = kind == "symbolic" ? TaskKind::symbolic : TaskKind::relational;
  if (kind != "symbolic" && kind != "relational") throw std::invalid_argument("unknown schedule '" + kind + "'");
  for (std::size_t b = 0; b < batches; ++b) {
    char diff = b < batches / 2 ? 'A' : 'B';
    for (auto& t : generate({k, diff, batch_size, seed + 7919 * b})) {
      t.id = "b" + std::to_string(b) + "-" + t.id;
      out.push_back(std::move(t));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> c = {"Benchmark",
                                             "Group",
                                             "Accuracy (%)",
                                             "Avg. Tree Operation",
                                             "Avg. Transformation Pair",
                                             "Avg. Neural Network Invocation",
                                             "Avg. Time Spent (s)"};
  return c;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string num(double v, int precision = 4) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(precision);
  o << v;
  return o.str();
}

nlohmann::json stats_json(const Stats& s) {
  const auto& c = report_columns();
  return {{"tasks", s.tasks},
          {c[2], s.accuracy},
          {c[3], s.tree_operations},
          {c[4], s.transformation_pairs},
          {c[5], s.nn_invocations},
          {c[6], s.seconds},
          {"filter_passed", s.filter_passed},
          {"filter_rejected", s.filter_rejected},
          {"attenuation", s.attenuation},
          {"transport_failures", s.transport_failures},
          {"degraded", s.degraded}};
}

}  // namespace

void write_csv(const std::vector<GroupReport>& reports, std::ostream& out) {
  const auto& c = report_columns();
  for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << csv_field(c[i]);
  out << "\n";
  for (const auto& r : reports) {
    const auto& s = r.overall;
    out << csv_field(r.benchmark) << "," << csv_field(r.group) << "," << num(s.accuracy, 2) << ","
        << num(s.tree_operations, 2) << "," << num(s.transformation_pairs, 2) << "," << num(s.nn_invocations, 2) << ","
        << num(s.seconds, 5) << "\n";
  }
}

void write_batches_csv(const std::vector<GroupReport>& reports, std::ostream& out) {
  const auto& c = report_columns();
  out << "Benchmark,Group,Batch,Tasks";
  for (std::size_t i = 2; i < c.size(); ++i) out << "," << csv_field(c[i]);
  out << ",Attenuation Ratio,Degraded\n";
  for (const auto& r : reports) {
    for (std::size_t b = 0; b < r.batches.size(); ++b) {
      const auto& s = r.batches[b];
      out << csv_field(r.benchmark) << "," << csv_field(r.group) << "," << b + 1 << "," << s.tasks << ","
          << num(s.accuracy, 2) << "," << num(s.tree_operations, 2) << "," << num(s.transformation_pairs, 2) << ","
          << num(s.nn_invocations, 2) << "," << num(s.seconds, 5) << "," << num(s.attenuation, 4) << "," << (s.degraded ? 1 : 0) << "\n";
    }
  }
}

void write_json(const std::vector<GroupReport>& reports, std::ostream& out) {
  nlohmann::json all = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["Benchmark"] = r.benchmark;
    j["Group"] = r.group;
    j["overall"] = stats_json(r.overall);
    j["ci95"] = r.ci95;
    j["batches"] = nlohmann::json::array();
    for (const auto& b : r.batches) j["batches"].push_back(stats_json(b));
    j["tasks"] = nlohmann::json::array();
    for (const auto& t : r.tasks) {
      j["tasks"].push_back({{"id", t.id},
                            {"batch", t.batch + 1},
                            {"success", t.success},
                            {"correct", t.correct},
                            {"reason", t.reason},
                            {"answer", t.answer},
                            {"tree_operations", t.metrics.tree_operations},
                            {"transformation_pairs", t.metrics.transformation_pairs},
                            {"nn_invocations", t.metrics.nn_invocations},
                            {"nn_queries", t.metrics.nn_queries},
                            {"filter_passed", t.metrics.filter_passed},
                            {"max_depth", t.metrics.max_depth},
                            {"filter_rejected", t.metrics.filter_rejected},
                            {"seconds", t.metrics.seconds}});
    }
    all.push_back(std::move(j));
  }
  out << all.dump(2) << "\n";
}

}  // namespace cool::bench
