#include "cool/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <functional>
#include <istream>
#include <sstream>
#include <ostream>
#include <thread>
#include <vector>

namespace cool::wire {

namespace {

json arg_json(const TacArg& a, bool full) {
  json j{{"argName", a.name}, {"argType", a.type}};
  if (full) {
    j["changeable"] = a.changeable;
    j["className"] = "";
    j["isClass"] = 0;
  }
  return j;
}

TacArg arg_from(const json& j) {
  TacArg a;
  a.name = j.value("argName", "");
  a.type = j.value("argType", "other");
  a.changeable = j.value("changeable", 0);
  return a;
}

json two_way(bool positive) { return json::array({positive ? 0.0 : 1.0, positive ? 1.0 : 0.0}); }

bool decide(const json& j, const char* name) {
  const auto& v = j.at(name);
  if (!v.is_array() || v.size() != 2) throw ProtocolError(std::string("head '") + name + "' must have 2 entries");
  return v[1].get<double>() > v[0].get<double>();
}

double scalar(const json& j, const char* name) {
  const auto& v = j.at(name);
  if (!v.is_array() || v.size() != 1) throw ProtocolError(std::string("head '") + name + "' must have 1 entry");
  return v[0].get<double>();
}

char unit_of(const json& j) {
  auto u = j.value("unit", std::string("A"));
  if (u.size() != 1 || u[0] < 'A' || u[0] > 'C') throw ProtocolError("unit must be A, B or C");
  return u[0];
}

void write_all(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw PredictorError(std::string("write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

bool read_line(int fd, std::string& buffer, std::string& line) {
  for (;;) {
    auto nl = buffer.find('\n');
    if (nl != std::string::npos) {
      line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      return true;
    }
    char chunk[4096];
    ssize_t n = ::read(fd, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

json error_json(const std::string& message) {
  return {{"type", "error"}, {"version", kProtocolVersion}, {"message", message}};
}

}  // namespace

json tac_to_json(const TacProgram& tac) {
  json rows = json::array();
  for (const auto& l : tac.lines) {
    json row;
    row["boundtfdomain"] = l.bound_domain;
    row["grounded"] = l.grounded;
    row["operand1"] = arg_json(l.operand1, true);
    row["operand2"] = arg_json(l.operand2, true);
    row["operator"] = arg_json(l.op, false);
    row["result"] = arg_json(l.result, true);
    row["root"] = l.root;
    rows.push_back(std::move(row));
  }
  return json{{"codeTable", rows}};
}

TacProgram tac_from_json(const json& j) {
  TacProgram tac;
  if (!j.contains("codeTable") || !j["codeTable"].is_array()) throw ProtocolError("missing codeTable");
  for (const auto& row : j["codeTable"]) {
    TacLine l;
    l.bound_domain = row.value("boundtfdomain", "");
    l.grounded = row.value("grounded", false);
    l.root = row.value("root", false);
    l.operand1 = arg_from(row.at("operand1"));
    l.operand2 = arg_from(row.at("operand2"));
    l.op = arg_from(row.at("operator"));
    l.result = arg_from(row.at("result"));
    tac.lines.push_back(std::move(l));
  }
  return tac;
}

json features_to_json(const NodeFeatures& f) {
  json j;
  j["grounded"] = f.grounded;
  j["domain"] = f.domain;
  j["root"] = f.root;
  j["non-terminal"] = f.nonterminal;
  j["type"] = f.type;
  j["identifier"] = f.identifier;
  j["string"] = f.string;
  j["number"] = f.number ? json(*f.number) : json(nullptr);
  j["operator"] = f.op;
  j["current stage"] = f.current_stage;
  j["operand position"] = f.operand_position;
  if (f.applied) j["applied"] = *f.applied;
  if (f.next_stage) j["next stage"] = *f.next_stage;
  j["tac_line"] = f.tac_line;
  return j;
}

json request_to_json(const PredictorRequest& r, std::size_t max_tree_depth) {
  json j;
  j["type"] = "predict";
  j["version"] = kProtocolVersion;
  j["unit"] = std::string(1, r.unit);
  j["dsl"] = r.dsl;
  j["stage"] = r.stage;
  j["max_tree_depth"] = max_tree_depth;
  j["program"] = r.program;
  j["codeTable"] = tac_to_json(r.tac)["codeTable"];
  json nodes = json::array();
  for (const auto& n : r.nodes) nodes.push_back(features_to_json(n));
  j["nodes"] = std::move(nodes);
  return j;
}

PredictorRequest request_from_json(const json& j) {
  if (j.value("type", "") != "predict") throw ProtocolError("not a predict request");
  if (j.value("version", 0) != kProtocolVersion) throw ProtocolError("unsupported protocol version");
  PredictorRequest r;
  r.unit = unit_of(j);
  r.dsl = j.value("dsl", "");
  r.stage = j.value("stage", 1);
  r.program = j.value("program", "");
  r.tac = tac_from_json(j);
  for (const auto& n : j.value("nodes", json::array())) {
    NodeFeatures f;
    f.grounded = n.at("grounded").get<std::array<int, 2>>();
    f.domain = n.value("domain", "");
    f.root = n.at("root").get<std::array<int, 2>>();
    f.nonterminal = n.at("non-terminal").get<std::array<int, 2>>();
    f.type = n.value("type", "");
    f.identifier = n.value("identifier", "");
    f.string = n.value("string", "");
    if (n.contains("number") && !n["number"].is_null()) f.number = n["number"].get<double>();
    f.op = n.value("operator", "");
    f.current_stage = n.value("current stage", 0);
    f.operand_position = n.at("operand position").get<std::array<int, 3>>();
    if (n.contains("applied")) f.applied = n["applied"].get<int>();
    if (n.contains("next stage")) f.next_stage = n["next stage"].get<int>();
    f.tac_line = n.value("tac_line", -1);
    r.nodes.push_back(std::move(f));
  }
  return r;
}

json heads_to_json(const PredictionHeads& h, char unit, std::size_t max_tree_depth) {
  json j;
  j["type"] = "prediction";
  j["version"] = kProtocolVersion;
  j["unit"] = std::string(1, unit);
  j["domain"] = two_way(h.domain);
  j["feasibility"] = two_way(h.feasible);
  json jumps = json::array();
  bool stopped = false;
  for (std::size_t i = 0; i < max_tree_depth; ++i) {
    Jump step = Jump::stop;
    if (!stopped && i < h.jumps.size()) step = h.jumps[i];
    if (step == Jump::stop) stopped = true;
    jumps.push_back(step == Jump::left ? 1.0 : 0.0);
    jumps.push_back(step == Jump::right ? 1.0 : 0.0);
    jumps.push_back(step == Jump::stop ? 1.0 : 0.0);
  }
  j["jumps"] = std::move(jumps);
  j["next stage"] = json::array({h.next_stage});
  j["heuristic sign"] = two_way(h.sign_positive);
  j["heuristic value"] = json::array({h.value});
  j["expression"] = two_way(h.expression);
  return j;
}

PredictionHeads heads_from_json(const json& j, std::size_t max_tree_depth) {
  if (j.value("type", "") == "error") throw ProtocolError("predictor error: " + j.value("message", ""));
  if (j.value("type", "") != "prediction") throw ProtocolError("not a prediction");
  if (j.value("version", 0) != kProtocolVersion) throw ProtocolError("unsupported protocol version");
  unit_of(j);
  try {
    PredictionHeads h;
    h.domain = decide(j, "domain");
    h.feasible = decide(j, "feasibility");
    const auto& jumps = j.at("jumps");
    if (!jumps.is_array() || jumps.size() != max_tree_depth * 3)
      throw ProtocolError("head 'jumps' must have " + std::to_string(max_tree_depth * 3) + " entries");
    for (std::size_t i = 0; i < max_tree_depth; ++i) {
      double l = jumps[3 * i].get<double>(), r = jumps[3 * i + 1].get<double>(), s = jumps[3 * i + 2].get<double>();
      Jump step = (s >= l && s >= r) ? Jump::stop : (l >= r ? Jump::left : Jump::right);
      h.jumps.push_back(step);
      if (step == Jump::stop) break;
    }
    h.next_stage = scalar(j, "next stage");
    h.sign_positive = decide(j, "heuristic sign");
    h.value = scalar(j, "heuristic value");
    h.expression = decide(j, "expression");
    return h;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed prediction: ") + e.what());
  }
}

std::string handle_line(Predictor& predictor, const std::string& line) {
  try {
    json req = json::parse(line);
    auto type = req.value("type", "");
    if (type == "health")
      return json{{"type", "health"}, {"version", kProtocolVersion}, {"predictor", predictor.describe()}}.dump();
    if (type == "train") {
      // Mocks have nothing to fit; the reply still confirms what arrived.
      const auto& records = req.at("records");
      if (!records.is_array()) throw ProtocolError("train: records must be an array");
      return json{{"type", "trained"}, {"version", kProtocolVersion}, {"records", records.size()}}.dump();
    }
    if (type != "predict") return error_json("unknown request type '" + type + "'").dump();
    auto r = request_from_json(req);
    std::size_t depth = req.value("max_tree_depth", kDefaultMaxTreeDepth);
    return heads_to_json(predictor.predict(r), r.unit, depth).dump();
  } catch (const std::exception& e) {
    return error_json(e.what()).dump();
  }
}

void serve_stream(Predictor& predictor, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out << handle_line(predictor, line) << '\n';
    out.flush();
  }
}

void serve_tcp(Predictor& predictor, int port, int max_connections, const std::function<void(int)>& on_ready) {
  int server = ::socket(AF_INET, SOCK_STREAM, 0);
  if (server < 0) throw std::runtime_error("socket failed");
  int yes = 1;
  ::setsockopt(server, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::bind(server, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(server, 16) < 0) {
    ::close(server);
    throw std::runtime_error(std::string("cannot listen: ") + std::strerror(errno));
  }
  socklen_t len = sizeof addr;
  ::getsockname(server, reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_ready) on_ready(ntohs(addr.sin_port));

  std::mutex predictor_mutex;
  std::vector<std::thread> workers;
  for (int served = 0; max_connections == 0 || served < max_connections; ++served) {
    int conn = ::accept(server, nullptr, nullptr);
    if (conn < 0) {
      if (errno == EINTR) continue;
      break;
    }
    workers.emplace_back([&predictor, &predictor_mutex, conn] {
      std::string buffer, line;
      while (read_line(conn, buffer, line)) {
        if (line.empty()) continue;
        std::string reply;
        {
          std::lock_guard lock(predictor_mutex);
          reply = handle_line(predictor, line);
        }
        try {
          write_all(conn, reply + "\n");
        } catch (const std::exception&) {
          break;
        }
      }
      ::close(conn);
    });
  }
  for (auto& w : workers) w.join();
  ::close(server);
}

WirePredictor::WirePredictor(const std::string& endpoint, std::size_t max_tree_depth)
    : endpoint_(endpoint), max_tree_depth_(max_tree_depth) {
  if (endpoint.rfind("tcp:", 0) == 0) {
    auto rest = endpoint.substr(4);
    auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw PredictorError("tcp endpoint needs HOST:PORT");
    std::string host = rest.substr(0, colon), port = rest.substr(colon + 1);
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0 || !res)
      throw PredictorError("cannot resolve " + endpoint);
    int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd < 0 || ::connect(fd, res->ai_addr, res->ai_addrlen) < 0) {
      ::freeaddrinfo(res);
      if (fd >= 0) ::close(fd);
      throw PredictorError("cannot connect to " + endpoint);
    }
    ::freeaddrinfo(res);
    in_fd_ = out_fd_ = fd;
  } else if (endpoint.rfind("stdio:", 0) == 0) {
    std::string command = endpoint.substr(6);
    int to_child[2], from_child[2];
    if (::pipe(to_child) < 0 || ::pipe(from_child) < 0) throw PredictorError("pipe failed");
    ::signal(SIGPIPE, SIG_IGN);
    pid_t pid = ::fork();
    if (pid < 0) throw PredictorError("fork failed");
    if (pid == 0) {
      ::dup2(to_child[0], 0);
      ::dup2(from_child[1], 1);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    out_fd_ = to_child[1];
    in_fd_ = from_child[0];
    child_ = pid;
  } else {
    throw PredictorError("unknown endpoint '" + endpoint + "' (expected tcp:HOST:PORT or stdio:COMMAND)");
  }
}

WirePredictor::~WirePredictor() {
  if (out_fd_ >= 0) ::close(out_fd_);
  if (in_fd_ >= 0 && in_fd_ != out_fd_) ::close(in_fd_);
  if (child_ > 0) ::waitpid(child_, nullptr, 0);
}

json WirePredictor::round_trip(const json& request) {
  std::lock_guard lock(mutex_);
  if (out_fd_ < 0) throw PredictorError("predictor connection closed");
  write_all(out_fd_, request.dump() + "\n");
  std::string line;
  if (!read_line(in_fd_, buffer_, line)) throw PredictorError("predictor closed the connection");
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw PredictorError(std::string("unparseable response: ") + e.what());
  }
}

PredictionHeads WirePredictor::predict(const PredictorRequest& request) {
  auto reply = round_trip(request_to_json(request, max_tree_depth_));
  try {
    return heads_from_json(reply, max_tree_depth_);
  } catch (const ProtocolError& e) {
    throw PredictorError(e.what());
  }
}

std::string WirePredictor::health() {
  auto reply = round_trip(json{{"type", "health"}, {"version", kProtocolVersion}});
  if (reply.value("type", "") != "health") throw PredictorError("bad health reply");
  return reply.value("predictor", "") + " v" + std::to_string(reply.value("version", 0));
}

std::size_t WirePredictor::train(const std::string& trace_jsonl) {
  json records = json::array();
  std::istringstream in(trace_jsonl);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) records.push_back(json::parse(line));
  auto reply = round_trip(json{{"type", "train"}, {"version", kProtocolVersion}, {"records", records}});
  if (reply.value("type", "") != "trained") throw PredictorError("bad train reply: " + reply.dump());
  return reply.value("records", std::size_t{0});
}

}  // namespace cool::wire
