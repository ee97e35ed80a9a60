// rubriceval: command-line front end for the rubric evaluation pipeline.
//
//   rubriceval --manifest data/fixture/manifest.json full
//   rubriceval --manifest m.json --workers 8 score
//
// Exit status: 0 ok, 2 ingest, 3 scoring, 4 analytics, 5 io.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rubriceval/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace rubriceval;

  CLI::App app{"Case-specific rubric evaluation: gate, score, agree, summarize, cost"};
  app.require_subcommand(1, 1);

  std::string manifest_path;
  int workers = 1;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::string fixed_timestamp;
  bool rescore = false;
  bool quiet = false;

  app.add_option("-m,--manifest", manifest_path, "Dataset manifest (JSON)")->required();
  app.add_option("-w,--workers", workers, "Concurrent scoring requests")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for any sampling step");
  app.add_option("-o,--output-dir", output_dir, "Override the manifest's output directory");
  app.add_option("--fixed-timestamp", fixed_timestamp, "Stamp every record with this created_at value");
  app.add_flag("--rescore", rescore, "Append a new set of experiment runs to the score store");
  app.add_flag("-q,--quiet", quiet, "Only print the final status line");

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"validate", "Gate clinician rubrics with the best/worst check"},
      {"gen-rubrics", "Generate one LLM rubric per case"},
      {"score", "Score every note against its case's rubrics"},
      {"agree", "Rank agreement between rubric sources (Kendall tau-b)"},
      {"summarize", "Score distributions and vendor preference"},
      {"cost", "Clinician and LLM cost per rubric"},
      {"full", "Run every stage in order"},
  };
  for (const auto& s : subs) app.add_subcommand(s.name, s.help);

  CLI11_PARSE(app, argc, argv);

  PipelineOptions options;
  options.workers = workers;
  options.seed = seed;
  options.rescore = rescore;
  if (!output_dir.empty()) options.output_dir = output_dir;
  if (!fixed_timestamp.empty()) options.now = [fixed_timestamp] { return fixed_timestamp; };
  if (!quiet) options.log = [](std::string_view line) { std::cerr << line << '\n'; };

  PipelineMode mode;
  try {
    mode = parse_pipeline_mode(app.get_subcommands().front()->get_name());
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return EXIT_FAILURE;
  }

  const auto outcome = run_pipeline(std::filesystem::path(manifest_path), mode, options);
  if (!quiet) {
    for (const auto& a : outcome.artifacts) std::cerr << "wrote " << a.string() << '\n';
  }
  if (outcome.exit_code == 0) {
    std::cout << fmt::format("{}: ok ({} artifacts, {} warnings)\n", to_string(mode), outcome.artifacts.size(),
                             outcome.warnings.size());
  } else {
    std::cout << fmt::format("{}: {} failure, {} failed unit(s)\n  {}\n", to_string(mode),
                             to_string(outcome.category), outcome.failed_units, outcome.message);
  }
  return outcome.exit_code;
}
