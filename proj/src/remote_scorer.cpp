#include "rubriceval/remote_scorer.hpp"

#include <httplib.h>

#include "rubriceval/codec.hpp"
#include "rubriceval/error.hpp"

namespace rubriceval {

namespace {

std::pair<std::string, std::string> split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw EvalError(ErrorCode::InvalidManifest, "endpoint must include a scheme: " + url);
  }
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

void apply_timeout(httplib::Client& client, std::chrono::milliseconds timeout) {
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
}

httplib::Headers auth_headers(const std::string& token) {
  httplib::Headers headers;
  if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
  return headers;
}

}  // namespace

nlohmann::ordered_json encode_scoring_request(const ScoringRequest& request) {
  nlohmann::ordered_json j;
  j["note_id"] = request.note_id;
  j["rubric_id"] = request.rubric_id;
  j["criterion_index"] = request.criterion_index;
  j["run_index"] = request.run_index;
  j["note_content"] = request.note_content;
  j["criterion_text"] = request.criterion.text;
  j["context"] = to_json(request.context);
  return j;
}

double decode_scoring_response(const std::string& body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw EvalError(ErrorCode::MalformedRecord, "scorer response is not a JSON object");
  }
  auto it = j.find("satisfaction");
  if (it == j.end() || !it->is_number()) {
    throw EvalError(ErrorCode::MalformedRecord, "scorer response lacks numeric 'satisfaction'");
  }
  return it->get<double>();
}

RemoteScoringAgent::RemoteScoringAgent(RemoteScorerConfig config) : config_(std::move(config)) {
  std::tie(base_, path_) = split_endpoint(config_.endpoint);
}

double RemoteScoringAgent::satisfaction(const ScoringRequest& request) {
  // A client per call keeps the agent safe for concurrent workers.
  httplib::Client client(base_);
  apply_timeout(client, config_.timeout);
  auto res = client.Post(path_, auth_headers(config_.bearer_token),
                         encode_scoring_request(request).dump(), "application/json");
  if (!res) {
    throw TransportError("cannot reach " + config_.endpoint + ": " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("scorer returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw EvalError(ErrorCode::AgentTransportFailure,
                    "scorer rejected request with HTTP " + std::to_string(res->status));
  }
  return decode_scoring_response(res->body);
}

RemoteCompletionPort::RemoteCompletionPort(RemoteCompletionConfig config) : config_(std::move(config)) {
  std::tie(base_, path_) = split_endpoint(config_.endpoint);
}

Completion RemoteCompletionPort::complete(std::string_view case_id, std::string_view prompt,
                                          std::string_view output_schema) {
  httplib::Client client(base_);
  apply_timeout(client, config_.timeout);
  nlohmann::ordered_json body;
  body["case_id"] = case_id;
  body["model_id"] = config_.model_id;
  body["prompt"] = prompt;
  body["schema"] = output_schema;
  auto res = client.Post(path_, auth_headers(config_.bearer_token), body.dump(), "application/json");
  if (!res) {
    throw EvalError(ErrorCode::IoFailure,
                    "cannot reach " + config_.endpoint + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw EvalError(ErrorCode::IoFailure, "completion endpoint returned HTTP " + std::to_string(res->status));
  }
  auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j["text"].is_string()) {
    throw EvalError(ErrorCode::UnparseableResponse, "completion response lacks 'text'");
  }
  Completion c;
  c.text = j["text"].get<std::string>();
  c.usage.input_tokens = j.value("input_tokens", std::int64_t{0});
  c.usage.output_tokens = j.value("output_tokens", std::int64_t{0});
  return c;
}

}  // namespace rubriceval
