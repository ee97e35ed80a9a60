#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rubriceval/error.hpp"
#include "rubriceval/scoring.hpp"

namespace rubriceval {

struct ScoreTask {
  const NoteOutput* note = nullptr;
  const Rubric* rubric = nullptr;
  const Case* context = nullptr;
  std::int64_t run_index = 0;
};

struct RunFailure {
  std::string note_id;
  std::string rubric_id;
  std::int64_t run_index = 0;
  ErrorCode code = ErrorCode::AgentTransportFailure;
  std::string message;
};

struct BatchResult {
  // Sorted by (note_id, rubric_id, run_index) regardless of schedule.
  std::vector<ScoreRecord> records;
  std::vector<RunFailure> failures;
};

// Runs every task on up to `workers` threads (further capped by the agent's
// max_in_flight). A failing run is recorded and does not stop the batch.
BatchResult score_batch(std::span<const ScoreTask> tasks, ScoringAgent& agent, int workers,
                        const RetryPolicy& policy = {},
                        const TimestampSource& now = utc_timestamp);

}  // namespace rubriceval
