#pragma once

// HTTP transport for a scoring agent running out of process.
//
// POST <endpoint> with a JSON body
//   {"note_id", "rubric_id", "criterion_index", "run_index",
//    "note_content", "criterion_text", "context": <case record>}
// answered by
//   {"satisfaction": <number in [0,1]>}
//
// Connection errors, 429 and 5xx responses surface as TransportError so the
// engine's retry policy applies; other failures are not retried.

#include <chrono>
#include <string>

#include <json.hpp>

#include "rubriceval/generation.hpp"
#include "rubriceval/scoring.hpp"

namespace rubriceval {

struct RemoteScorerConfig {
  std::string endpoint;  // http://host[:port]/path
  std::string bearer_token;
  std::string scorer_id = "remote";
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds timeout{30000};
};

nlohmann::ordered_json encode_scoring_request(const ScoringRequest& request);
double decode_scoring_response(const std::string& body);

class RemoteScoringAgent final : public ScoringAgent {
 public:
  explicit RemoteScoringAgent(RemoteScorerConfig config);

  double satisfaction(const ScoringRequest& request) override;
  std::string scorer_id() const override { return config_.scorer_id; }
  std::size_t max_in_flight() const override { return config_.max_in_flight; }

 private:
  RemoteScorerConfig config_;
  std::string base_;
  std::string path_;
};

// Text-completion port over HTTP for rubric generation.
//
// POST <endpoint> {"case_id", "model_id", "prompt", "schema"}
// answered by {"text", "input_tokens", "output_tokens"}.
struct RemoteCompletionConfig {
  std::string endpoint;
  std::string bearer_token;
  std::string model_id = "o3";
  std::chrono::milliseconds timeout{120000};
};

class RemoteCompletionPort final : public CompletionPort {
 public:
  explicit RemoteCompletionPort(RemoteCompletionConfig config);

  Completion complete(std::string_view case_id, std::string_view prompt,
                      std::string_view output_schema) override;
  std::string model_id() const override { return config_.model_id; }

 private:
  RemoteCompletionConfig config_;
  std::string base_;
  std::string path_;
};

}  // namespace rubriceval
