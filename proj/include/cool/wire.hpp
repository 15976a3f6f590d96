#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cool/ir.hpp"
#include "cool/nnfc.hpp"
#include "cool/oracle.hpp"

namespace cool::wire {

using json = nlohmann::json;

inline constexpr int kProtocolVersion = 1;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json tac_to_json(const TacProgram& tac);  // {"codeTable": [...]}
TacProgram tac_from_json(const json& j);

json features_to_json(const NodeFeatures& f);
json request_to_json(const PredictorRequest& r, std::size_t max_tree_depth = kDefaultMaxTreeDepth);
PredictorRequest request_from_json(const json& j);

json heads_to_json(const PredictionHeads& h, char unit, std::size_t max_tree_depth = kDefaultMaxTreeDepth);
/// Validates head sizes; throws ProtocolError on any mismatch.
PredictionHeads heads_from_json(const json& j, std::size_t max_tree_depth = kDefaultMaxTreeDepth);

/// Answers one request line. Never throws; malformed input yields an error object.
std::string handle_line(Predictor& predictor, const std::string& line);
/// Serves newline-delimited requests until end of input.
void serve_stream(Predictor& predictor, std::istream& in, std::ostream& out);

/// Listens on 127.0.0.1:`port` (0 picks a free port); `on_ready` receives the
/// bound port. Each connection gets its own thread; predictor calls are
/// serialized. Returns after `max_connections` connections close (0 = forever).
void serve_tcp(Predictor& predictor, int port, int max_connections, const std::function<void(int)>& on_ready);

/// Client side. Endpoints: "tcp:HOST:PORT" or "stdio:COMMAND" (spawned with
/// /bin/sh, requests on its stdin, responses on its stdout).
class WirePredictor : public Predictor {
 public:
  explicit WirePredictor(const std::string& endpoint, std::size_t max_tree_depth = kDefaultMaxTreeDepth);
  ~WirePredictor() override;
  WirePredictor(const WirePredictor&) = delete;
  WirePredictor& operator=(const WirePredictor&) = delete;

  PredictionHeads predict(const PredictorRequest& request) override;
  std::string describe() const override { return endpoint_; }
  /// Health probe; returns the server's self-description.
  std::string health();
  /// Ships a batch of trace JSONL for retraining; returns the record count acknowledged.
  std::size_t train(const std::string& trace_jsonl);

 private:
  json round_trip(const json& request);

  std::string endpoint_;
  std::size_t max_tree_depth_;
  int in_fd_ = -1;   // we read responses here
  int out_fd_ = -1;  // we write requests here
  int child_ = -1;
  std::string buffer_;
  std::mutex mutex_;
};

}  // namespace cool::wire
