#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "cool/oracle.hpp"
#include "cool/parser.hpp"
#include "cool/search.hpp"
#include "cool/wire.hpp"

using namespace cool;
using wire::json;

namespace {

PartialProgram program(const std::string& text) {
  PartialProgram p;
  p.tree = lower_goal(*parse_expression(text));
  return p;
}

PredictionHeads sample_heads() {
  PredictionHeads h;
  h.domain = true;
  h.feasible = false;
  h.jumps = {Jump::left, Jump::right, Jump::stop};
  h.next_stage = 3;
  h.sign_positive = false;
  h.value = -2.5;
  h.expression = false;
  return h;
}

json parse(const std::string& s) { return json::parse(s); }

}  // namespace

TEST_CASE("request round trip keeps every feature") {
  auto p = program("$x^2 + 4*$x == 3");
  PredictorRequest r;
  r.unit = 'B';
  r.dsl = "quadratic";
  r.stage = 2;
  r.program = to_text(*p.tree);
  r.tac = to_tac(p);
  r.nodes = encode(p, 2);
  r.nodes[0].applied = 1;
  r.nodes[1].next_stage = 4;

  auto j = wire::request_to_json(r);
  CHECK(j["type"] == "predict");
  CHECK(j["version"] == wire::kProtocolVersion);
  CHECK(j["nodes"].size() == r.nodes.size());
  CHECK(j["codeTable"].size() == r.tac.lines.size());

  auto back = wire::request_from_json(parse(j.dump()));
  CHECK(back.unit == 'B');
  CHECK(back.dsl == r.dsl);
  CHECK(back.stage == 2);
  CHECK(back.program == r.program);
  REQUIRE(back.nodes.size() == r.nodes.size());
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    CAPTURE(i);
    CHECK(back.nodes[i].grounded == r.nodes[i].grounded);
    CHECK(back.nodes[i].type == r.nodes[i].type);
    CHECK(back.nodes[i].number == r.nodes[i].number);
    CHECK(back.nodes[i].op == r.nodes[i].op);
    CHECK(back.nodes[i].operand_position == r.nodes[i].operand_position);
    CHECK(back.nodes[i].applied == r.nodes[i].applied);
    CHECK(back.nodes[i].next_stage == r.nodes[i].next_stage);
    CHECK(back.nodes[i].tac_line == r.nodes[i].tac_line);
  }
  CHECK(wire::tac_to_json(back.tac) == wire::tac_to_json(r.tac));
}

TEST_CASE("prediction round trip and head sizes") {
  auto h = sample_heads();
  auto j = wire::heads_to_json(h, 'C');
  auto sizes = head_sizes();
  CHECK(j["domain"].size() == sizes.domain);
  CHECK(j["feasibility"].size() == sizes.feasibility);
  CHECK(j["jumps"].size() == sizes.jumps);
  CHECK(sizes.jumps == kDefaultMaxTreeDepth * 3);
  CHECK(j["next stage"].size() == sizes.next_stage);
  CHECK(j["heuristic sign"].size() == sizes.sign);
  CHECK(j["heuristic value"].size() == sizes.value);
  CHECK(j["expression"].size() == sizes.expression);
  CHECK(wire::heads_from_json(parse(j.dump())) == h);

  // soft scores decode by argmax
  j["domain"] = json::array({0.4, 0.6});
  j["feasibility"] = json::array({0.7, 0.3});
  auto soft = wire::heads_from_json(j);
  CHECK(soft.domain);
  CHECK_FALSE(soft.feasible);

  auto deep = wire::heads_to_json(h, 'A', 4);
  CHECK(deep["jumps"].size() == 12);
  CHECK(wire::heads_from_json(deep, 4) == h);
  CHECK_THROWS_AS(wire::heads_from_json(deep), wire::ProtocolError);
}

TEST_CASE("schema violations are rejected") {
  auto good = wire::heads_to_json(sample_heads(), 'A');
  auto broken = [&](auto mutate) {
    auto j = good;
    mutate(j);
    return j;
  };
  CHECK_THROWS_AS(wire::heads_from_json(broken([](json& j) { j["domain"] = json::array({1.0}); })),
                  wire::ProtocolError);
  CHECK_THROWS_AS(wire::heads_from_json(broken([](json& j) { j.erase("expression"); })), wire::ProtocolError);
  CHECK_THROWS_AS(wire::heads_from_json(broken([](json& j) { j["version"] = 99; })), wire::ProtocolError);
  CHECK_THROWS_AS(wire::heads_from_json(broken([](json& j) { j["unit"] = "D"; })), wire::ProtocolError);
  CHECK_THROWS_AS(wire::heads_from_json(broken([](json& j) { j["heuristic value"] = json::array({1, 2}); })),
                  wire::ProtocolError);
  CHECK_THROWS_AS(wire::heads_from_json(json{{"type", "error"}, {"message", "boom"}}), wire::ProtocolError);

  auto req = wire::request_to_json(PredictorRequest{});
  req.erase("codeTable");
  CHECK_THROWS_AS(wire::request_from_json(req), wire::ProtocolError);
}

TEST_CASE("server: health, train, predict and error replies") {
  ConstantPredictor constant(sample_heads());

  auto health = parse(wire::handle_line(constant, R"({"type":"health","version":1})"));
  CHECK(health["type"] == "health");
  CHECK(health["predictor"] == "mock:constant");

  auto trained = parse(wire::handle_line(constant, R"({"type":"train","version":1,"records":[{},{},{}]})"));
  CHECK(trained["type"] == "trained");
  CHECK(trained["records"] == 3);

  PredictorRequest r;
  r.unit = 'B';
  auto reply = parse(wire::handle_line(constant, wire::request_to_json(r).dump()));
  CHECK(reply["unit"] == "B");
  CHECK(wire::heads_from_json(reply) == sample_heads());

  for (const char* bad : {"not json", R"({"type":"dance"})", R"({"type":"train","records":5})",
                          R"({"type":"predict","version":7})"}) {
    CAPTURE(bad);
    auto e = parse(wire::handle_line(constant, bad));
    CHECK(e["type"] == "error");
    CHECK_FALSE(e["message"].get<std::string>().empty());
  }

  std::istringstream in(std::string(R"({"type":"health","version":1})") + "\n\n" + "garbage\n");
  std::ostringstream out;
  wire::serve_stream(constant, in, out);
  std::istringstream lines(out.str());
  std::string a, b, c;
  std::getline(lines, a);
  std::getline(lines, b);
  CHECK(parse(a)["type"] == "health");
  CHECK(parse(b)["type"] == "error");
  CHECK_FALSE(std::getline(lines, c));
}

TEST_CASE("tcp transport") {
  ConstantPredictor constant(sample_heads());
  std::promise<int> ready;
  auto port = ready.get_future();
  std::thread server([&] { wire::serve_tcp(constant, 0, 1, [&](int p) { ready.set_value(p); }); });
  {
    wire::WirePredictor client("tcp:127.0.0.1:" + std::to_string(port.get()));
    CHECK(client.health() == "mock:constant v1");
    PredictorRequest r;
    r.unit = 'C';
    CHECK(client.predict(r) == sample_heads());
    CHECK(client.train("{\"pair\":0}\n{\"pair\":1}\n") == 2);
  }
  server.join();
}

TEST_CASE("bad endpoints fail loudly") {
  CHECK_THROWS_AS(wire::WirePredictor("carrier-pigeon"), PredictorError);
  CHECK_THROWS_AS(wire::WirePredictor("tcp:nohostport"), PredictorError);
  wire::WirePredictor dead("stdio:true");
  CHECK_THROWS_AS(dead.health(), PredictorError);
}

TEST_CASE("stdio transport: serve-mock replays a trace like the in-process oracle") {
  auto dsl = load_dsl(std::string(COOL_DATA_DIR) + "/quadratic.cooldsl");
  auto goal = program("$x^2 + 4*$x == 3");
  auto base = synthesize(goal, {&dsl}, NnfcController{}, SearchConfig{});
  REQUIRE(base.success);

  auto trace = std::filesystem::temp_directory_path() / "cool_test_wire_trace.jsonl";
  {
    std::ofstream out(trace);
    write_trace_jsonl(base, out, "t0");
  }

  NnfcController local;
  local.attach(0, std::make_shared<GoldReplayPredictor>(gold_steps(base)));
  auto expected = synthesize(goal, {&dsl}, local, SearchConfig{});

  auto client = std::make_shared<wire::WirePredictor>(std::string("stdio:") + COOL_CLI + " serve-mock --gold " +
                                                      trace.string());
  CHECK(client->health().rfind("mock:gold", 0) == 0);
  NnfcController remote;
  remote.attach(0, client);
  auto got = synthesize(goal, {&dsl}, remote, SearchConfig{});

  CHECK(got.success);
  CHECK(got.metrics.transport_failures == 0);
  CHECK(got.metrics.transformation_pairs == expected.metrics.transformation_pairs);
  CHECK(got.metrics.nn_invocations == expected.metrics.nn_invocations);
  CHECK(to_text(*got.program.tree) == to_text(*expected.program.tree));
  std::filesystem::remove(trace);
}
