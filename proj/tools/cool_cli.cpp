#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cool/bench.hpp"
#include "cool/dsl.hpp"
#include "cool/oracle.hpp"
#include "cool/parser.hpp"
#include "cool/search.hpp"
#include "cool/wire.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cool;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes.
constexpr int kOk = 0;
constexpr int kTaskFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Options shared by every command that searches.
struct SearchFlags {
  std::size_t max_pairs = 1000;
  std::size_t max_path_len = 50;
  std::size_t max_tree_depth = kDefaultMaxTreeDepth;
  std::string skip = "suppress";
  std::string group = "col";
  std::string predictor = "none";
  std::string coupling = "on";
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string library_dir = COOL_DATA_DIR;

  void add(CLI::App* app) {
    app->add_option("--max-pairs", max_pairs, "transformation-pair budget per task")->capture_default_str();
    app->add_option("--max-path-len", max_path_len, "longest synthesis path")->capture_default_str();
    app->add_option("--max-tree-depth", max_tree_depth, "jump-head depth on the wire")->capture_default_str();
    app->add_option("--skip", skip, "stage skipping: suppress | gradient")
        ->check(CLI::IsMember({"suppress", "gradient"}))
        ->capture_default_str();
    app->add_option("--group", group, "group slug")->capture_default_str();
    app->add_option("--predictor", predictor,
                    "none | mock:gold | mock:replay | mock:constant | mock:noisy:RHO | tcp:HOST:PORT | stdio:COMMAND")
        ->capture_default_str();
    app->add_option("--coupling", coupling, "inner coupling structure")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    app->add_option("--seed", seed, "generator and mock seed")->capture_default_str();
    app->add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();
    app->add_option("--library-dir", library_dir, "where #load finds <name>.cooldsl")->capture_default_str();
  }

  SearchConfig search() const {
    SearchConfig c;
    c.max_pairs = max_pairs;
    c.max_path_len = max_path_len;
    c.max_tree_depth = max_tree_depth;
    c.skip_mode = skip == "gradient" ? SkipMode::gradient : SkipMode::suppress;
    return c;
  }

  bench::RunOptions run_options(const std::string& group_slug) const {
    bench::RunOptions o;
    try {
      o.group = bench::parse_group(group_slug, coupling == "on");
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    o.predictor = predictor;
    o.search = search();
    o.seed = seed;
    o.threads = threads;
    o.library_dir = library_dir;
    return o;
  }

  json to_json() const {
    return {{"max_pairs", max_pairs}, {"max_path_len", max_path_len}, {"max_tree_depth", max_tree_depth},
            {"skip", skip},           {"group", group},               {"predictor", predictor},
            {"coupling", coupling},   {"seed", seed},                 {"threads", threads},
            {"library_dir", library_dir}};
  }
};

void write_manifest(const std::string& path, const std::string& command, const json& config,
                    const std::vector<std::string>& inputs) {
  json m;
  m["tool"] = "cool";
  m["version"] = kVersion;
  m["protocol_version"] = wire::kProtocolVersion;
  m["command"] = command;
  m["config"] = config;
  m["config_hash"] = hex(fnv1a(config.dump()));
  json files = json::array();
  for (const auto& f : inputs) {
    std::ifstream in(f);
    std::stringstream ss;
    ss << in.rdbuf();
    files.push_back({{"path", f}, {"fnv1a", hex(fnv1a(ss.str()))}});
  }
  m["inputs"] = files;
  m["started"] = static_cast<long long>(std::time(nullptr));
  std::ofstream out(path);
  out << m.dump(2) << "\n";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const std::string& tasks_path, const std::vector<std::string>& extra_dsls, const SearchFlags& flags,
              const std::string& trace_path, const std::string& manifest_path, bool quiet) {
  auto text = read_file(tasks_path);
  TaskFile file = parse_task_file(text);
  auto tasks = bench::from_task_file(text, "task");
  auto options = flags.run_options(flags.group);

  std::ofstream trace;
  if (!trace_path.empty()) {
    trace.open(trace_path);
    if (!trace) throw UsageError("cannot write " + trace_path);
  }
  std::vector<std::string> inputs{tasks_path};

  std::vector<Dsl> extra;
  for (const auto& path : extra_dsls) {
    inputs.push_back(path);
    extra.push_back(with_heuristics(load_dsl(path), options.group.mode));
  }

  bool all_ok = true;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& spec = file.tasks[i];
    std::vector<Dsl> loaded;
    for (const auto& name : spec.domain_hint) {
      auto path = options.library_dir + "/" + name + ".cooldsl";
      if (!fs::exists(path)) throw UsageError("library '" + name + "' not found in " + options.library_dir);
      loaded.push_back(with_heuristics(load_dsl(path), options.group.mode));
    }
    std::vector<const Dsl*> dsls;
    for (const auto& d : loaded) dsls.push_back(&d);
    for (const auto& d : extra) dsls.push_back(&d);
    if (dsls.empty()) throw UsageError("task " + std::to_string(i + 1) + " loads no DSL (use #load or --dsl)");

    NnfcController controller;
    controller.coupling = options.group.coupling;
    std::shared_ptr<Predictor> predictor;
    if (options.group.guidance != bench::Guidance::none && options.predictor != "none") {
      if (options.predictor.rfind("mock:", 0) == 0) {
        auto unguided = synthesize(spec.goal, dsls, NnfcController{}, options.search);
        auto gold = unguided.success ? gold_steps(unguided) : std::vector<GoldStep>{};
        if (options.predictor == "mock:constant")
          predictor = std::make_shared<ConstantPredictor>(PredictionHeads{});
        else if (options.predictor.rfind("mock:noisy:", 0) == 0)
          predictor = std::make_shared<NoisyPredictor>(std::make_shared<GoldReplayPredictor>(gold),
                                                       std::stod(options.predictor.substr(11)), flags.seed + i);
        else
          predictor = std::make_shared<GoldReplayPredictor>(gold);
      } else {
        predictor = std::make_shared<wire::WirePredictor>(options.predictor, options.search.max_tree_depth);
      }
      for (std::size_t d = 0; d < dsls.size(); ++d) controller.attach(d, predictor);
    }

    auto result = synthesize(spec.goal, dsls, controller, options.search);
    if (trace) write_trace_jsonl(result, trace, tasks[i].id);
    auto verdict = bench::check_answer(tasks[i], result);
    bool has_gold = spec.gold_answer.has_value() || tasks[i].kind == bench::TaskKind::symbolic;

    json out;
    out["task"] = tasks[i].id;
    out["goal"] = to_text(*spec.goal.tree);
    out["success"] = result.success;
    if (result.success) {
      out["program"] = to_text(*result.program.tree);
      json answers = json::object();
      for (const auto& [name, value] : result.answers)
        answers[name] = value->kind() == NodeKind::string ? value->label() : to_text(*value);
      out["answers"] = answers;
    } else {
      out["reason"] = result.reason;
    }
    if (has_gold) {
      out["expected"] = tasks[i].gold;
      out["correct"] = verdict.correct;
    }
    const auto& m = result.metrics;
    out["metrics"] = {{"tree_operations", m.tree_operations},   {"transformation_pairs", m.transformation_pairs},
                      {"nn_invocations", m.nn_invocations},     {"filter_passed", m.filter_passed},
                      {"filter_rejected", m.filter_rejected},   {"transport_failures", m.transport_failures},
                      {"max_depth", m.max_depth},
                      {"seconds", m.seconds}};
    if (!quiet) std::cout << out.dump() << "\n";
    all_ok = all_ok && result.success && (!has_gold || verdict.correct);
  }
  if (!manifest_path.empty()) write_manifest(manifest_path, "synth", flags.to_json(), inputs);
  return all_ok ? kOk : kTaskFailed;
}

// ---------------------------------------------------------------------------
// check

int cmd_check(const std::vector<std::string>& paths) {
  int status = kOk;
  for (const auto& path : paths) {
    auto text = read_file(path);
    try {
      if (fs::path(path).extension() == ".cooldsl") {
        auto dsl = compile_dsl(fs::path(path).stem().string(), parse_rules(text));
        auto diags = check_dsl(dsl);
        std::size_t errors = 0;
        for (const auto& d : diags) {
          bool err = d.severity == StaticDiagnostic::Severity::error;
          errors += err;
          std::cout << path << ":" << d.line << ": " << (err ? "error" : "warning") << ": " << d.message << "\n";
        }
        std::cout << path << ": " << dsl.rules.size() << " rules, CoL length " << dsl.col_length << ", "
                  << errors << " errors\n";
        if (errors) status = std::max(status, kTaskFailed);
      } else {
        auto file = parse_task_file(text);
        std::cout << path << ": " << file.tasks.size() << " tasks\n";
      }
    } catch (const ParseError& e) {
      std::cout << path << ":" << e.line() << ":" << e.column() << ": parse error: " << e.what() << "\n";
      status = kUsage;
    } catch (const RuleError& e) {
      std::cout << path << ": rule error: " << e.what() << "\n";
      status = kUsage;
    }
  }
  return status;
}

// ---------------------------------------------------------------------------
// bench

struct GenFlags {
  std::string kind = "relational";
  std::string difficulty = "A";
  std::size_t count = 300;
};

std::vector<bench::BenchTask> make_tasks(const GenFlags& g, std::uint64_t seed, const std::string& tasks_path) {
  if (!tasks_path.empty()) return bench::from_task_file(read_file(tasks_path), "t");
  bench::GenSpec spec;
  spec.kind = g.kind == "symbolic" ? bench::TaskKind::symbolic : bench::TaskKind::relational;
  spec.difficulty = g.difficulty[0];
  spec.count = g.count;
  spec.seed = seed;
  return bench::generate(spec);
}

void write_reports(const std::vector<bench::GroupReport>& reports, const std::string& prefix) {
  bench::write_csv(reports, std::cout);
  if (prefix.empty()) return;
  if (auto dir = fs::path(prefix).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream csv(prefix + ".csv"), batches(prefix + ".batches.csv"), js(prefix + ".json");
  if (!csv || !batches || !js) throw UsageError("cannot write reports under " + prefix);
  bench::write_csv(reports, csv);
  bench::write_batches_csv(reports, batches);
  bench::write_json(reports, js);
}

int run_groups(bool dynamic, const std::vector<bench::BenchTask>& tasks, const std::string& benchmark,
               const std::vector<std::string>& groups, const SearchFlags& flags, std::size_t batch_size,
               const std::string& out_prefix, const std::string& trace_path, const json& extra_config,
               const std::vector<std::string>& inputs) {
  std::ofstream trace;
  if (!trace_path.empty()) {
    trace.open(trace_path);
    if (!trace) throw UsageError("cannot write " + trace_path);
  }
  std::vector<bench::GroupReport> reports;
  for (const auto& g : groups) {
    auto o = flags.run_options(g);
    o.batch_size = batch_size;
    o.benchmark = benchmark;
    if (trace) o.trace_out = &trace;
    reports.push_back(dynamic ? bench::run_dynamic(tasks, o) : bench::run_static(tasks, o));
  }
  write_reports(reports, out_prefix);
  if (!out_prefix.empty()) {
    json config = flags.to_json();
    config["groups"] = groups;
    config["batch_size"] = batch_size;
    config.update(extra_config);
    write_manifest(out_prefix + ".manifest.json", dynamic ? "bench run-dynamic" : "bench run-static", config, inputs);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// serve-mock

int cmd_serve_mock(const std::string& kind, const std::string& gold_trace, double rho, std::uint64_t seed,
                   int port, int max_connections, const std::string& units) {
  std::vector<GoldStep> gold;
  if (!gold_trace.empty()) {
    std::ifstream in(gold_trace);
    if (!in) throw UsageError("cannot read " + gold_trace);
    gold = gold_steps_from_jsonl(in);
  }
  std::shared_ptr<Predictor> predictor;
  if (kind == "constant")
    predictor = std::make_shared<ConstantPredictor>(PredictionHeads{});
  else if (kind == "noisy")
    predictor = std::make_shared<NoisyPredictor>(std::make_shared<GoldReplayPredictor>(gold), rho, seed, units);
  else
    predictor = std::make_shared<GoldReplayPredictor>(gold);

  if (port < 0) {
    wire::serve_stream(*predictor, std::cin, std::cout);
    return kOk;
  }
  wire::serve_tcp(*predictor, port, max_connections, [](int p) {
    std::cout << "listening 127.0.0.1:" << p << std::endl;
  });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cool: staged DSL program synthesis with feedback-controlled neural guidance"};
  app.set_config("--config", "", "INI/TOML file with option defaults");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SearchFlags flags;

  // synth
  auto* synth = app.add_subcommand("synth", "synthesize every task of a task file");
  std::string tasks_path, trace_path, manifest_path;
  std::vector<std::string> dsl_paths;
  bool quiet = false;
  synth->add_option("--tasks,tasks", tasks_path, "task file")->required()->check(CLI::ExistingFile);
  synth->add_option("--dsl", dsl_paths, "extra DSL files besides #load")->check(CLI::ExistingFile);
  synth->add_option("--trace", trace_path, "write trace JSONL here");
  synth->add_option("--manifest", manifest_path, "write a run manifest here");
  synth->add_flag("--quiet", quiet, "only the exit status");
  flags.add(synth);

  // check
  auto* check = app.add_subcommand("check", "parse and statically check DSL and task files");
  std::vector<std::string> check_paths;
  check->add_option("files", check_paths, ".cooldsl or task files")->required()->check(CLI::ExistingFile);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "benchmark generation and experiment runs");
  bench_cmd->require_subcommand(1);
  GenFlags gen;
  std::string out_path, groups_csv = "dsl,col", bench_tasks, schedule = "relational", bench_trace;
  std::size_t batch_size = 50, batches = 6;

  auto* gen_cmd = bench_cmd->add_subcommand("gen", "write a generated task file");
  gen_cmd->add_option("--kind", gen.kind)->check(CLI::IsMember({"relational", "symbolic"}))->capture_default_str();
  gen_cmd->add_option("--difficulty", gen.difficulty)->check(CLI::IsMember({"A", "B"}))->capture_default_str();
  gen_cmd->add_option("--count", gen.count)->capture_default_str();
  gen_cmd->add_option("--seed", flags.seed)->capture_default_str();
  gen_cmd->add_option("--out", out_path, "task file to write (stdout if omitted)");

  auto* rs = bench_cmd->add_subcommand("run-static", "fixed-domain runs, reported per group");
  rs->add_option("--kind", gen.kind)->check(CLI::IsMember({"relational", "symbolic"}))->capture_default_str();
  rs->add_option("--difficulty", gen.difficulty)->check(CLI::IsMember({"A", "B"}))->capture_default_str();
  rs->add_option("--count", gen.count)->capture_default_str();
  rs->add_option("--tasks", bench_tasks, "use a task file instead of generating")->check(CLI::ExistingFile);
  rs->add_option("--groups", groups_csv, "comma-separated group slugs")->capture_default_str();
  rs->add_option("--batch-size", batch_size)->capture_default_str();
  rs->add_option("--out", out_path, "report prefix: PREFIX.csv, .batches.csv, .json, .manifest.json");
  rs->add_option("--trace", bench_trace, "trace JSONL of every task");
  flags.add(rs);

  auto* rd = bench_cmd->add_subcommand("run-dynamic", "batched runs with retraining between batches");
  rd->add_option("--schedule", schedule)
      ->check(CLI::IsMember({"relational", "symbolic", "multidomain"}))
      ->capture_default_str();
  rd->add_option("--batches", batches)->capture_default_str();
  rd->add_option("--batch-size", batch_size)->capture_default_str();
  rd->add_option("--groups", groups_csv, "comma-separated group slugs")->capture_default_str();
  rd->add_option("--out", out_path, "report prefix");
  rd->add_option("--trace", bench_trace, "trace JSONL of every task");
  flags.add(rd);

  // serve-mock
  auto* serve = app.add_subcommand("serve-mock", "answer predictor requests with a mock");
  std::string mock_kind = "gold", gold_trace, units = "A";
  double rho = 0.3;
  int port = -1, max_connections = 0;
  serve->add_option("--kind", mock_kind)->check(CLI::IsMember({"gold", "constant", "noisy"}))->capture_default_str();
  serve->add_option("--gold", gold_trace, "trace JSONL whose feasible records are replayed");
  serve->add_option("--rho", rho, "flip probability for the noisy mock")->capture_default_str();
  serve->add_option("--units", units, "units the noisy mock corrupts")->capture_default_str();
  serve->add_option("--seed", flags.seed)->capture_default_str();
  serve->add_option("--tcp", port, "listen on this loopback port (0 = any); stdio when omitted");
  serve->add_option("--max-connections", max_connections, "exit after this many connections (0 = never)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(tasks_path, dsl_paths, flags, trace_path, manifest_path, quiet);
    if (check->parsed()) return cmd_check(check_paths);
    if (gen_cmd->parsed()) {
      auto tasks = make_tasks(gen, flags.seed, "");
      auto text = bench::to_task_file(tasks);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path);
        if (!out) throw UsageError("cannot write " + out_path);
        out << text;
      }
      return kOk;
    }
    if (rs->parsed()) {
      auto tasks = make_tasks(gen, flags.seed, bench_tasks);
      std::string name = bench_tasks.empty() ? gen.kind : fs::path(bench_tasks).stem().string();
      json extra = {{"kind", gen.kind}, {"difficulty", gen.difficulty}, {"count", tasks.size()}};
      std::vector<std::string> inputs;
      if (!bench_tasks.empty()) inputs.push_back(bench_tasks);
      return run_groups(false, tasks, name, split_list(groups_csv), flags, batch_size, out_path, bench_trace, extra,
                        inputs);
    }
    if (rd->parsed()) {
      auto tasks = bench::dynamic_schedule(schedule, batches, batch_size, flags.seed);
      json extra = {{"schedule", schedule}, {"batches", batches}};
      return run_groups(true, tasks, schedule, split_list(groups_csv), flags, batch_size, out_path, bench_trace, extra,
                        {});
    }
    if (serve->parsed()) return cmd_serve_mock(mock_kind, gold_trace, rho, flags.seed, port, max_connections, units);
  } catch (const UsageError& e) {
    std::cerr << "cool: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "cool: parse error at " << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "cool: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
