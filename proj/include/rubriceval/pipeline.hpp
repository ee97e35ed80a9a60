#pragma once

// Stage orchestration behind the command-line tool. Each stage reads its
// inputs from the dataset plus whatever earlier stages left in the output
// directory, so stages can be run one at a time or chained by `full`.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rubriceval/dataset.hpp"
#include "rubriceval/generation.hpp"
#include "rubriceval/scoring.hpp"

namespace rubriceval {

enum class PipelineMode { Validate, GenRubrics, Score, Agree, Summarize, Cost, Full };

std::string_view to_string(PipelineMode mode);
// Accepts the CLI spellings: validate, gen-rubrics (or gen_rubrics), score,
// agree, summarize, cost, full.
PipelineMode parse_pipeline_mode(std::string_view s);

enum class FailureCategory { None, Ingest, Scoring, Analytics, Io };

std::string_view to_string(FailureCategory category);
// 0, 2, 3, 4, 5 in declaration order.
int exit_code(FailureCategory category);

struct PipelineOptions {
  int workers = 1;
  // Reserved for stages that sample; none of the current stages do.
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> output_dir;
  // Append a fresh set of experiment runs instead of topping up missing ones.
  bool rescore = false;
  TimestampSource now = utc_timestamp;
  RetryPolicy retry;
  std::function<void(std::string_view)> log;
  // Test seams; the manifest decides when these are null.
  ScoringAgent* agent = nullptr;
  CompletionPort* completion = nullptr;
};

struct PipelineOutcome {
  FailureCategory category = FailureCategory::None;
  int exit_code = 0;
  std::size_t failed_units = 0;
  std::string message;
  std::vector<std::filesystem::path> artifacts;
  std::vector<std::string> warnings;
};

PipelineOutcome run_pipeline(const DatasetManifest& manifest, PipelineMode mode,
                             const PipelineOptions& options = {});

// Loads the manifest first; a bad manifest is an ingest failure.
PipelineOutcome run_pipeline(const std::filesystem::path& manifest_path, PipelineMode mode,
                             const PipelineOptions& options = {});

// Artifact file names, relative to the output directory.
namespace artifact {
inline constexpr std::string_view kValidationResults = "validation_results.jsonl";
inline constexpr std::string_view kValidationScores = "validation_scores.jsonl";
inline constexpr std::string_view kValidationFailures = "validation_failures.jsonl";
inline constexpr std::string_view kValidationSummaryCsv = "validation_summary.csv";
inline constexpr std::string_view kValidationSummaryTxt = "validation_summary.txt";
inline constexpr std::string_view kRubricStatus = "rubric_status.jsonl";
inline constexpr std::string_view kGeneratedRubrics = "generated_rubrics";
inline constexpr std::string_view kGenerationRequests = "generation_requests.jsonl";
inline constexpr std::string_view kGenerationFailures = "generation_failures.jsonl";
inline constexpr std::string_view kScores = "scores.jsonl";
inline constexpr std::string_view kScoringFailures = "scoring_failures.jsonl";
inline constexpr std::string_view kStabilityCsv = "stability.csv";
inline constexpr std::string_view kStabilityTxt = "stability.txt";
inline constexpr std::string_view kAgreementRecords = "agreement_records.jsonl";
inline constexpr std::string_view kTable3Csv = "table3.csv";
inline constexpr std::string_view kTable3Txt = "table3.txt";
inline constexpr std::string_view kTable3ByPairing = "table3_by_pairing.csv";
inline constexpr std::string_view kCeilingCsv = "ceiling_diagnostics.csv";
inline constexpr std::string_view kCeilingTxt = "ceiling_diagnostics.txt";
inline constexpr std::string_view kTable2Csv = "table2.csv";
inline constexpr std::string_view kTable2Txt = "table2.txt";
inline constexpr std::string_view kBoxplot = "boxplot.csv";
inline constexpr std::string_view kVendorCsv = "vendor_preference.csv";
inline constexpr std::string_view kVendorTxt = "vendor_preference.txt";
inline constexpr std::string_view kCostJson = "cost_report.json";
inline constexpr std::string_view kCostTxt = "cost_report.txt";
}  // namespace artifact

}  // namespace rubriceval
