#include "rubriceval/batch.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <thread>
#include <tuple>

namespace rubriceval {

namespace {

auto record_key(const ScoreRecord& r) { return std::tie(r.note_id, r.rubric_id, r.run_index); }
auto failure_key(const RunFailure& f) { return std::tie(f.note_id, f.rubric_id, f.run_index); }

}  // namespace

BatchResult score_batch(std::span<const ScoreTask> tasks, ScoringAgent& agent, int workers,
                        const RetryPolicy& policy, const TimestampSource& now) {
  std::vector<std::optional<ScoreRecord>> slots(tasks.size());
  std::vector<std::optional<RunFailure>> failed(tasks.size());

  std::size_t threads = static_cast<std::size_t>(std::max(1, workers));
  if (agent.max_in_flight() > 0) threads = std::min(threads, agent.max_in_flight());
  threads = std::min(threads, std::max<std::size_t>(1, tasks.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& t = tasks[i];
      try {
        slots[i] = score_run(*t.note, *t.rubric, agent, t.run_index, *t.context, policy, now);
      } catch (const EvalError& e) {
        failed[i] = RunFailure{t.note->note_id, t.rubric->rubric_id, t.run_index, e.code(), e.what()};
      } catch (const std::exception& e) {
        failed[i] = RunFailure{t.note->note_id, t.rubric->rubric_id, t.run_index,
                               ErrorCode::AgentTransportFailure, e.what()};
      }
    }
  };

  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(work);
  }

  BatchResult result;
  for (auto& s : slots) {
    if (s) result.records.push_back(std::move(*s));
  }
  for (auto& f : failed) {
    if (f) result.failures.push_back(std::move(*f));
  }
  std::ranges::sort(result.records, {}, [](const ScoreRecord& r) { return record_key(r); });
  std::ranges::sort(result.failures, {}, [](const RunFailure& f) { return failure_key(f); });
  return result;
}

}  // namespace rubriceval
