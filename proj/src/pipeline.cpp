#include "rubriceval/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <memory>
#include <set>
#include <thread>
#include <tuple>
#include <utility>

#include <fmt/format.h>

#include "rubriceval/aggregation.hpp"
#include "rubriceval/agreement.hpp"
#include "rubriceval/batch.hpp"
#include "rubriceval/codec.hpp"
#include "rubriceval/cost.hpp"
#include "rubriceval/error.hpp"
#include "rubriceval/remote_scorer.hpp"
#include "rubriceval/report.hpp"
#include "rubriceval/stats.hpp"
#include "rubriceval/validate.hpp"
#include "rubriceval/validation_gate.hpp"

namespace rubriceval {

namespace fs = std::filesystem;

namespace {

// At most this many validated clinician rubrics per case enter experiment
// scoring, chosen in rubric_id order.
constexpr std::size_t kClinicianRubricsPerCase = 2;

struct StageFailure {
  FailureCategory category;
  std::size_t failed_units;
  std::string message;
};

template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, n));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  if (threads == 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(work);
}

std::string jsonl(const std::vector<ordered_json>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l.dump();
    out += '\n';
  }
  return out;
}

ordered_json nullable(std::optional<double> v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string str(std::size_t v) { return std::to_string(v); }

class Runner {
 public:
  Runner(const DatasetManifest& manifest, const PipelineOptions& options)
      : m_(manifest), opt_(options), out_(options.output_dir.value_or(manifest.output_dir)) {}

  PipelineOutcome run(PipelineMode mode) {
    try {
      stage("ingest", FailureCategory::Ingest, [&] { load(); });
      switch (mode) {
        case PipelineMode::Validate: stage("validate", FailureCategory::Scoring, [&] { validate(); }); break;
        case PipelineMode::GenRubrics: stage("gen-rubrics", FailureCategory::Scoring, [&] { generate(true); }); break;
        case PipelineMode::Score: stage("score", FailureCategory::Scoring, [&] { score(); }); break;
        case PipelineMode::Agree: stage("agree", FailureCategory::Analytics, [&] { agree(); }); break;
        case PipelineMode::Summarize: stage("summarize", FailureCategory::Analytics, [&] { summarize(); }); break;
        case PipelineMode::Cost: stage("cost", FailureCategory::Analytics, [&] { cost(true); }); break;
        case PipelineMode::Full:
          stage("validate", FailureCategory::Scoring, [&] { validate(); });
          stage("gen-rubrics", FailureCategory::Scoring, [&] { generate(false); });
          stage("score", FailureCategory::Scoring, [&] { score(); });
          stage("agree", FailureCategory::Analytics, [&] { agree(); });
          stage("summarize", FailureCategory::Analytics, [&] { summarize(); });
          stage("cost", FailureCategory::Analytics, [&] { cost(false); });
          break;
      }
    } catch (const StageFailure& f) {
      outcome_.category = f.category;
      outcome_.failed_units = f.failed_units;
      outcome_.message = f.message;
    }
    outcome_.exit_code = exit_code(outcome_.category);
    return std::move(outcome_);
  }

 private:
  template <class Fn>
  void stage(std::string_view name, FailureCategory category, Fn&& fn) {
    log(fmt::format("[{}] start", name));
    try {
      fn();
    } catch (const StageFailure&) {
      throw;
    } catch (const EvalError& e) {
      auto cat = category;
      if (e.code() == ErrorCode::IoFailure) cat = FailureCategory::Io;
      if (e.code() == ErrorCode::InvalidManifest) cat = FailureCategory::Ingest;
      throw StageFailure{cat, 1, fmt::format("{}: {}", name, e.what())};
    } catch (const fs::filesystem_error& e) {
      throw StageFailure{FailureCategory::Io, 1, fmt::format("{}: {}", name, e.what())};
    }
    log(fmt::format("[{}] done", name));
  }

  void log(const std::string& line) const {
    if (opt_.log) opt_.log(line);
  }

  void warn(std::string w) {
    log("warning: " + w);
    outcome_.warnings.push_back(std::move(w));
  }

  fs::path path(std::string_view name) const { return out_ / fs::path(name); }

  void emit(std::string_view name, const std::string& content) {
    const auto p = path(name);
    write_text(p, content);
    outcome_.artifacts.push_back(p);
  }

  // ---- shared state ---------------------------------------------------

  void load() {
    ds_ = load_dataset(m_);
    fs::create_directories(out_);

    const auto gen_dir = path(artifact::kGeneratedRubrics);
    if (fs::is_directory(gen_dir)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(gen_dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
      }
      std::ranges::sort(files);
      for (const auto& f : files) {
        auto raw = nlohmann::json::parse(read_text(f), nullptr, false);
        if (raw.is_discarded()) throw EvalError(ErrorCode::ParseError, f.string() + ": not valid JSON");
        upsert(validate_rubric_structure(raw));
      }
    }

    const auto status_path = path(artifact::kRubricStatus);
    if (fs::exists(status_path)) {
      read_jsonl(status_path, [&](const nlohmann::json& j, std::size_t) {
        const auto id = j.at("rubric_id").get<std::string>();
        if (Rubric* r = ds_.find_rubric(id)) {
          r->status = parse_rubric_status(j.at("status").get<std::string>());
        } else {
          warn("status recorded for unknown rubric " + id);
        }
      });
    }
  }

  void upsert(Rubric r) {
    if (!ds_.find_case(r.case_id)) {
      throw EvalError(ErrorCode::DanglingReference,
                      "rubric " + r.rubric_id + " references unknown case " + r.case_id);
    }
    if (Rubric* existing = ds_.find_rubric(r.rubric_id)) {
      *existing = std::move(r);
      return;
    }
    ds_.rubrics.push_back(std::move(r));
    std::ranges::sort(ds_.rubrics, {}, &Rubric::rubric_id);
    ds_.rubric_index.clear();
    for (std::size_t i = 0; i < ds_.rubrics.size(); ++i) ds_.rubric_index.emplace(ds_.rubrics[i].rubric_id, i);
  }

  ScoringAgent& agent() {
    if (opt_.agent) return *opt_.agent;
    if (!agent_) {
      if (m_.scorer.mode == ScorerMode::Reference) {
        agent_ = std::make_unique<ReferenceScorer>();
      } else {
        RemoteScorerConfig cfg;
        cfg.endpoint = m_.scorer.endpoint;
        cfg.bearer_token = credential(m_.scorer.credentials_env);
        cfg.scorer_id = m_.scorer.scorer_id;
        cfg.max_in_flight = m_.scorer.max_in_flight;
        cfg.timeout = m_.scorer.timeout;
        agent_ = std::make_unique<RemoteScoringAgent>(std::move(cfg));
      }
    }
    return *agent_;
  }

  static std::string credential(const std::string& env) {
    if (env.empty()) return {};
    const char* v = std::getenv(env.c_str());
    if (!v) throw EvalError(ErrorCode::InvalidManifest, "environment variable " + env + " is not set");
    return v;
  }

  std::size_t threads() {
    const auto& a = agent();
    std::size_t t = static_cast<std::size_t>(std::max(1, opt_.workers));
    if (a.max_in_flight() > 0) t = std::min(t, a.max_in_flight());
    return t;
  }

  void write_status() {
    std::vector<ordered_json> lines;
    for (const auto& r : ds_.rubrics) {
      ordered_json j;
      j["rubric_id"] = r.rubric_id;
      j["case_id"] = r.case_id;
      j["source"] = to_string(r.source);
      j["status"] = to_string(r.status);
      lines.push_back(std::move(j));
    }
    emit(artifact::kRubricStatus, jsonl(lines));
  }

  // The rubrics that take part in experiment scoring, grouped by case.
  std::map<std::string, std::vector<const Rubric*>> scored_rubrics() {
    std::map<std::string, std::vector<const Rubric*>> by_case;
    std::map<std::string, std::size_t> clinicians;
    for (const auto& r : ds_.rubrics) {
      if (r.status != RubricStatus::Validated) continue;
      if (r.source == RubricSource::Clinician && clinicians[r.case_id]++ >= kClinicianRubricsPerCase) continue;
      by_case[r.case_id].push_back(&r);
    }
    return by_case;
  }

  std::vector<ScoreRecord> load_store() {
    std::vector<ScoreRecord> records;
    const auto p = path(artifact::kScores);
    if (!fs::exists(p)) return records;
    try {
      read_jsonl(p, [&](const nlohmann::json& j, std::size_t) { records.push_back(score_from_json(j)); });
    } catch (const EvalError& e) {
      throw EvalError(ErrorCode::IoFailure, std::string("score store unreadable: ") + e.what());
    }
    return records;
  }

  // Store records restricted to the scored rubric set, grouped by experiment.
  std::map<std::string, std::vector<ScoreRecord>> experiment_records() {
    std::set<std::string> active;
    for (const auto& [c, rs] : scored_rubrics()) {
      for (const Rubric* r : rs) active.insert(r->rubric_id);
    }
    std::map<std::string, std::vector<ScoreRecord>> out;
    for (auto& rec : load_store()) {
      if (!active.contains(rec.rubric_id)) continue;
      const NoteOutput* n = ds_.find_note(rec.note_id);
      if (!n) {
        warn("score store references unknown note " + rec.note_id);
        continue;
      }
      out[n->experiment_id].push_back(std::move(rec));
    }
    return out;
  }

  // ---- validate -------------------------------------------------------

  void validate() {
    std::vector<Rubric*> gated;
    for (auto& r : ds_.rubrics) {
      if (r.source == RubricSource::Clinician) gated.push_back(&r);
    }
    std::vector<std::optional<ValidationResult>> results(gated.size());
    std::vector<std::optional<std::pair<ErrorCode, std::string>>> errors(gated.size());
    std::vector<RubricStatus> status(gated.size());
    ScoringAgent& a = agent();
    parallel_for(gated.size(), threads(), [&](std::size_t i) {
      Rubric work = *gated[i];
      try {
        results[i] = run_validation(work, *ds_.find_case(work.case_id), ds_.notes, a, opt_.retry, opt_.now);
        status[i] = work.status;
      } catch (const EvalError& e) {
        errors[i] = std::pair{e.code(), std::string(e.what())};
      }
    });

    std::vector<ordered_json> result_lines, score_lines, failure_lines;
    std::vector<double> gaps, margins;
    std::size_t accepted = 0, rejected = 0;
    for (std::size_t i = 0; i < gated.size(); ++i) {
      if (errors[i]) {
        failure_lines.push_back({{"rubric_id", gated[i]->rubric_id},
                                 {"code", to_string(errors[i]->first)},
                                 {"message", errors[i]->second}});
        continue;
      }
      const auto& v = *results[i];
      gated[i]->status = status[i];
      (v.accepted ? accepted : rejected)++;
      gaps.push_back(v.discrimination_gap);
      margins.push_back(v.separation_margin);
      ordered_json j;
      j["rubric_id"] = v.rubric_id;
      j["case_id"] = gated[i]->case_id;
      j["author_id"] = gated[i]->author_id;
      j["best_note_id"] = v.best_note_id;
      j["worst_note_id"] = v.worst_note_id;
      j["best_scores"] = v.best_scores;
      j["worst_scores"] = v.worst_scores;
      j["min_best"] = v.min_best;
      j["max_worst"] = v.max_worst;
      j["separation_margin"] = v.separation_margin;
      j["discrimination_gap"] = v.discrimination_gap;
      j["accepted"] = v.accepted;
      result_lines.push_back(std::move(j));
      for (const auto& rec : v.runs) score_lines.push_back(to_json(rec));
    }

    emit(artifact::kValidationResults, jsonl(result_lines));
    emit(artifact::kValidationScores, jsonl(score_lines));
    emit(artifact::kValidationFailures, jsonl(failure_lines));
    write_status();

    Table t({"metric", "value"});
    std::optional<GapSummary> g;
    if (!gaps.empty()) g = summarize_gaps(gaps);
    auto opt = [&](auto f) -> std::optional<double> { return g ? std::optional<double>(f(*g)) : std::nullopt; };
    Table csv({"metric", "value"});
    for (const auto& [k, n] : {std::pair<std::string, std::size_t>{"rubrics_gated", gated.size()},
                               {"accepted", accepted},
                               {"rejected", rejected},
                               {"failed", failure_lines.size()}}) {
      csv.add_row({k, str(n)});
      t.add_row({k, str(n)});
    }
    std::vector<std::pair<std::string, std::optional<double>>> rows = {
        {"gap_mean", opt([](const GapSummary& s) { return s.mean; })},
        {"gap_median", opt([](const GapSummary& s) { return s.median; })},
        {"gap_q1", opt([](const GapSummary& s) { return s.q1; })},
        {"gap_q3", opt([](const GapSummary& s) { return s.q3; })},
        {"margin_median", margins.empty() ? std::nullopt : std::optional(stats::median(margins))},
    };
    for (const auto& [k, v] : rows) {
      csv.add_row({k, cell(v)});
      t.add_row({k, cell_fixed(v, 2)});
    }
    emit(artifact::kValidationSummaryCsv, csv.to_csv());
    emit(artifact::kValidationSummaryTxt, t.to_aligned("Rubric validation", method_footnotes()));

    if (!failure_lines.empty()) {
      throw StageFailure{FailureCategory::Scoring, failure_lines.size(),
                         fmt::format("validate: {} of {} rubrics could not be gated", failure_lines.size(),
                                     gated.size())};
    }
  }

  // ---- gen-rubrics ----------------------------------------------------

  void generate(bool required) {
    if (!m_.generation && !opt_.completion) {
      if (required) throw EvalError(ErrorCode::InvalidManifest, "manifest has no generation section");
      warn("no generation section; LLM rubrics come from the rubric directory only");
      return;
    }
    std::unique_ptr<CompletionPort> owned;
    CompletionPort* port = opt_.completion;
    const GenerationConfig cfg = m_.generation.value_or(GenerationConfig{});
    if (!port) {
      if (cfg.mode == CompletionMode::Stub) {
        owned = std::make_unique<StubCompletionPort>(cfg.responses_dir, cfg.model_id);
      } else {
        RemoteCompletionConfig rc;
        rc.endpoint = cfg.endpoint;
        rc.bearer_token = credential(cfg.credentials_env);
        rc.model_id = cfg.model_id;
        owned = std::make_unique<RemoteCompletionPort>(std::move(rc));
      }
      port = owned.get();
    }
    if (cfg.template_path.empty()) throw EvalError(ErrorCode::InvalidManifest, "generation needs template_path");
    const std::string tmpl = read_text(cfg.template_path);

    std::vector<std::optional<GeneratedRubric>> made(ds_.cases.size());
    std::vector<std::optional<std::pair<ErrorCode, std::string>>> errors(ds_.cases.size());
    parallel_for(ds_.cases.size(), static_cast<std::size_t>(std::max(1, opt_.workers)), [&](std::size_t i) {
      try {
        made[i] = generate_rubric(ds_.cases[i], *port, tmpl, cfg.max_attempts);
      } catch (const EvalError& e) {
        errors[i] = std::pair{e.code(), std::string(e.what())};
      }
    });

    std::vector<ordered_json> requests, failures;
    for (std::size_t i = 0; i < ds_.cases.size(); ++i) {
      if (errors[i]) {
        failures.push_back({{"case_id", ds_.cases[i].case_id},
                            {"code", to_string(errors[i]->first)},
                            {"message", errors[i]->second}});
        continue;
      }
      auto& g = *made[i];
      const auto file = fs::path(artifact::kGeneratedRubrics) / (g.rubric.rubric_id + ".json");
      emit(file.string(), to_json(g.rubric).dump(2) + "\n");
      ordered_json j;
      j["case_id"] = g.request.case_id;
      j["rubric_id"] = g.rubric.rubric_id;
      j["model_id"] = g.request.model_id;
      j["attempts"] = g.request.attempts;
      j["input_tokens"] = g.request.token_usage.input_tokens;
      j["output_tokens"] = g.request.token_usage.output_tokens;
      j["prompt_text"] = g.request.prompt_text;
      requests.push_back(std::move(j));
      upsert(std::move(g.rubric));
    }
    std::ranges::sort(requests, {}, [](const ordered_json& j) { return j["case_id"].get<std::string>(); });
    std::ranges::sort(failures, {}, [](const ordered_json& j) { return j["case_id"].get<std::string>(); });
    emit(artifact::kGenerationRequests, jsonl(requests));
    emit(artifact::kGenerationFailures, jsonl(failures));
    write_status();
    if (!failures.empty()) {
      throw StageFailure{FailureCategory::Scoring, failures.size(),
                         fmt::format("gen-rubrics: {} of {} cases produced no valid rubric", failures.size(),
                                     ds_.cases.size())};
    }
  }

  // ---- score ----------------------------------------------------------

  void score() {
    const auto by_case = scored_rubrics();
    for (const auto& c : ds_.cases) {
      auto it = by_case.find(c.case_id);
      std::size_t clin = 0, llm = 0;
      if (it != by_case.end()) {
        for (const Rubric* r : it->second) (r->source == RubricSource::Clinician ? clin : llm)++;
      }
      if (clin < kClinicianRubricsPerCase || llm == 0) {
        warn(fmt::format("case {} has {} validated clinician and {} LLM rubrics", c.case_id, clin, llm));
      }
    }

    auto existing = load_store();
    std::map<std::pair<std::string, std::string>, std::pair<std::int64_t, std::int64_t>> seen;  // count, max
    for (const auto& r : existing) {
      auto [it, fresh] = seen.try_emplace({r.note_id, r.rubric_id}, 0, -1);
      it->second.first++;
      it->second.second = std::max(it->second.second, r.run_index);
    }

    std::vector<const NoteOutput*> notes;
    for (const auto& n : ds_.notes) notes.push_back(&n);
    std::ranges::sort(notes, {}, &NoteOutput::note_id);

    std::vector<ScoreTask> tasks;
    for (const NoteOutput* n : notes) {
      auto it = by_case.find(n->case_id);
      if (it == by_case.end()) continue;
      for (const Rubric* r : it->second) {
        auto [count, last] = seen.contains({n->note_id, r->rubric_id}) ? seen.at({n->note_id, r->rubric_id})
                                                                       : std::pair<std::int64_t, std::int64_t>{0, -1};
        const std::int64_t want = opt_.rescore ? m_.experiment_runs : std::max<std::int64_t>(0, m_.experiment_runs - count);
        for (std::int64_t k = 1; k <= want; ++k) {
          tasks.push_back({n, r, ds_.find_case(n->case_id), last + k});
        }
      }
    }
    log(fmt::format("[score] {} runs to score, {} already stored", tasks.size(), existing.size()));

    auto result = score_batch(tasks, agent(), static_cast<int>(threads()), opt_.retry, opt_.now);

    std::string appended;
    for (const auto& r : result.records) appended += to_json(r).dump() + "\n";
    const auto store = path(artifact::kScores);
    append_text(store, appended);
    outcome_.artifacts.push_back(store);

    std::vector<ordered_json> failures;
    for (const auto& f : result.failures) {
      failures.push_back({{"note_id", f.note_id},
                          {"rubric_id", f.rubric_id},
                          {"run_index", f.run_index},
                          {"code", to_string(f.code)},
                          {"message", f.message}});
    }
    emit(artifact::kScoringFailures, jsonl(failures));

    existing.insert(existing.end(), result.records.begin(), result.records.end());
    write_stability(existing);

    if (!failures.empty()) {
      throw StageFailure{FailureCategory::Scoring, failures.size(),
                         fmt::format("score: {} of {} runs failed", failures.size(), tasks.size())};
    }
  }

  void write_stability(const std::vector<ScoreRecord>& all) {
    std::map<std::pair<std::string, std::string>, std::vector<ScoreRecord>> groups;
    for (const auto& r : all) groups[{r.note_id, r.rubric_id}].push_back(r);
    std::map<std::string, std::vector<double>> ranges;  // by rubric source
    for (const auto& [key, recs] : groups) {
      if (recs.size() < 2) continue;
      const Rubric* rub = ds_.find_rubric(key.second);
      if (!rub) continue;
      const auto s = stability_range(recs);
      ranges[std::string(to_string(rub->source))].push_back(s.score_range);
      ranges["all"].push_back(s.score_range);
    }
    Table csv({"rubric_source", "n_pairs", "median_range", "mean_range", "p95_range", "max_range"});
    Table txt({"rubric_source", "n_pairs", "median_range", "mean_range", "p95_range", "max_range"});
    for (const std::string src : {"clinician", "llm", "all"}) {
      auto it = ranges.find(src);
      if (it == ranges.end()) continue;
      const auto& v = it->second;
      const double med = stats::median(v), mean = stats::mean(v), p95 = stats::nearest_rank(v, 0.95),
                   mx = *std::ranges::max_element(v);
      csv.add_row({src, str(v.size()), cell(med), cell(mean), cell(p95), cell(mx)});
      txt.add_row({src, str(v.size()), cell_fixed(med), cell_fixed(mean), cell_fixed(p95), cell_fixed(mx)});
    }
    emit(artifact::kStabilityCsv, csv.to_csv());
    emit(artifact::kStabilityTxt, txt.to_aligned("Scoring stability (range across runs, percentage points)",
                                                 method_footnotes()));
  }

  // ---- agree ----------------------------------------------------------

  std::map<std::string, std::vector<double>> margins_by_experiment() {
    std::map<std::string, std::vector<double>> out;
    const auto p = path(artifact::kValidationResults);
    if (!fs::exists(p)) return out;
    read_jsonl(p, [&](const nlohmann::json& j, std::size_t) {
      const NoteOutput* best = ds_.find_note(j.at("best_note_id").get<std::string>());
      if (best) out[best->experiment_id].push_back(j.at("separation_margin").get<double>());
    });
    return out;
  }

  void agree() {
    const auto by_exp = experiment_records();
    if (by_exp.empty()) throw EvalError(ErrorCode::EmptyInput, "score store is empty; run score first");

    std::vector<AgreementRecord> records;
    std::map<std::string, std::size_t> missing;
    for (const auto& exp : m_.experiments) {
      auto it = by_exp.find(exp);
      if (it == by_exp.end()) {
        warn("no scores for experiment " + exp);
        continue;
      }
      // (case, rubric) -> records
      std::map<std::pair<std::string, std::string>, std::vector<ScoreRecord>> groups;
      for (const auto& r : it->second) groups[{ds_.find_note(r.note_id)->case_id, r.rubric_id}].push_back(r);
      std::map<std::string, std::vector<CaseRanking>> by_case;
      for (const auto& [key, recs] : groups) {
        const Rubric* rub = ds_.find_rubric(key.second);
        by_case[key.first].push_back(
            CaseRanking{key.first, exp, key.second, rub->source, rank_by_score(mean_score_by_note(recs))});
      }
      for (const auto& c : ds_.cases) {
        auto rk = by_case.find(c.case_id);
        if (rk == by_case.end()) {
          missing[exp]++;
          warn(fmt::format("case {} has no rankings in {}", c.case_id, exp));
          continue;
        }
        auto ca = pair_agreements(c.case_id, exp, rk->second);
        if (!ca.warnings.empty()) missing[exp]++;
        for (auto& w : ca.warnings) warn(std::move(w));
        records.insert(records.end(), ca.records.begin(), ca.records.end());
      }
    }

    std::vector<ordered_json> lines;
    for (const auto& r : records) {
      ordered_json j;
      j["case_id"] = r.case_id;
      j["experiment_id"] = r.experiment_id;
      j["pair_kind"] = to_string(r.pair_kind);
      j["rubric_a"] = r.rubric_a;
      j["rubric_b"] = r.rubric_b;
      j["tau_b"] = nullable(r.tau);
      j["mean_rank_diff"] = r.mean_rank_diff;
      j["n_notes"] = r.n_notes;
      if (r.pair_kind == PairKind::ClinLlm) j["clinician_slot"] = r.clinician_slot;
      lines.push_back(std::move(j));
    }
    emit(artifact::kAgreementRecords, jsonl(lines));

    const auto rows = convergence_table(records, m_.experiments);
    const std::vector<std::string> head = {"experiment_id", "clin_clin_median_tau", "clin_llm_median_tau", "delta",
                                           "n_clin_clin", "n_clin_llm", "excluded_clin_clin", "excluded_clin_llm",
                                           "clin_clin_median_rank_diff", "clin_llm_median_rank_diff",
                                           "cases_missing_rankings"};
    Table csv(head), txt(head);
    Table pairing({"experiment_id", "clinician_slot", "clin_llm_median_tau"});
    for (const auto& r : rows) {
      const auto miss = str(missing[r.experiment_id]);
      csv.add_row({r.experiment_id, cell(r.clin_clin_median_tau), cell(r.clin_llm_median_tau), cell(r.delta),
                   str(r.n_clin_clin), str(r.n_clin_llm), str(r.excluded_clin_clin), str(r.excluded_clin_llm),
                   cell(r.clin_clin_median_rank_diff), cell(r.clin_llm_median_rank_diff), miss});
      txt.add_row({r.experiment_id, cell_fixed(r.clin_clin_median_tau, 3), cell_fixed(r.clin_llm_median_tau, 3),
                   cell_fixed(r.delta, 3), str(r.n_clin_clin), str(r.n_clin_llm), str(r.excluded_clin_clin),
                   str(r.excluded_clin_llm), cell_fixed(r.clin_clin_median_rank_diff, 3),
                   cell_fixed(r.clin_llm_median_rank_diff, 3), miss});
      for (std::size_t s = 0; s < r.clin_llm_median_tau_by_slot.size(); ++s) {
        pairing.add_row({r.experiment_id, str(s), cell(r.clin_llm_median_tau_by_slot[s])});
      }
    }
    emit(artifact::kTable3Csv, csv.to_csv());
    emit(artifact::kTable3Txt, txt.to_aligned("Rubric agreement (Kendall tau-b medians)", method_footnotes()));
    emit(artifact::kTable3ByPairing, pairing.to_csv());

    const auto margins = margins_by_experiment();
    const std::vector<std::string> chead = {"experiment_id", "n_scores", "stddev", "q1", "median", "q3", "iqr",
                                            "n_margins", "margin_min", "margin_q1", "margin_median",
                                            "margin_q3", "margin_max"};
    Table ccsv(chead), ctxt(chead);
    for (const auto& exp : m_.experiments) {
      auto it = by_exp.find(exp);
      if (it == by_exp.end()) continue;
      std::vector<double> scores;
      for (const auto& r : it->second) scores.push_back(r.normalized_score);
      static const std::vector<double> none;
      auto mi = margins.find(exp);
      const auto d = ceiling_diagnostics(scores, mi == margins.end() ? none : mi->second);
      auto m = [&](double stats::FiveNumber::*f) -> std::optional<double> {
        return d.margin_quantiles ? std::optional((*d.margin_quantiles).*f) : std::nullopt;
      };
      const std::vector<std::optional<double>> vals = {d.stddev, d.q1, d.median, d.q3, d.iqr};
      const std::vector<std::optional<double>> mvals = {m(&stats::FiveNumber::min), m(&stats::FiveNumber::q1),
                                                        m(&stats::FiveNumber::median), m(&stats::FiveNumber::q3),
                                                        m(&stats::FiveNumber::max)};
      std::vector<std::string> a = {exp, str(d.n_scores)}, b = a;
      for (auto v : vals) a.push_back(cell(v)), b.push_back(cell_fixed(v));
      a.push_back(str(d.n_margins));
      b.push_back(str(d.n_margins));
      for (auto v : mvals) a.push_back(cell(v)), b.push_back(cell_fixed(v));
      ccsv.add_row(std::move(a));
      ctxt.add_row(std::move(b));
    }
    emit(artifact::kCeilingCsv, ccsv.to_csv());
    emit(artifact::kCeilingTxt, ctxt.to_aligned("Ceiling diagnostics", method_footnotes()));
  }

  // ---- summarize ------------------------------------------------------

  void summarize() {
    const auto by_exp = experiment_records();
    const std::vector<std::string> head = {"experiment_id", "n_records", "median", "q1", "q3", "stddev"};
    Table csv(head), txt(head);
    Table box({"experiment_id", "min", "q1", "median", "q3", "max"});
    for (const auto& exp : m_.experiments) {
      auto it = by_exp.find(exp);
      if (it == by_exp.end()) {
        warn("no scores for experiment " + exp);
        continue;
      }
      const auto s = summarize_experiment(exp, it->second);
      csv.add_row({exp, str(s.n_records), cell(s.median), cell(s.q1), cell(s.q3), cell(s.stddev)});
      txt.add_row({exp, str(s.n_records), cell_fixed(s.median, 1), cell_fixed(s.q1, 1), cell_fixed(s.q3, 1),
                   cell_fixed(s.stddev, 1)});
      box.add_row({exp, cell(s.box.min), cell(s.box.q1), cell(s.box.median), cell(s.box.q3), cell(s.box.max)});
    }
    emit(artifact::kTable2Csv, csv.to_csv());
    emit(artifact::kTable2Txt, txt.to_aligned("Normalized score distribution by experiment (%)", method_footnotes()));
    emit(artifact::kBoxplot, box.to_csv());

    const auto labelings = collect_labelings(ds_.notes);
    const std::vector<std::string> vhead = {"subset", "vendor", "times_evaluated", "times_best", "times_worst",
                                            "pct_best", "pct_worst", "net_rate"};
    Table vcsv(vhead), vtxt(vhead);
    for (const bool both : {false, true}) {
      const std::string subset = both ? "both_present" : "inclusive";
      auto rep = vendor_preference(labelings, both);
      for (auto& w : rep.warnings) warn(subset + ": " + w);
      for (const auto& r : rep.rows) {
        const std::vector<std::string> base = {subset, std::string(to_string(r.vendor)), str(r.times_evaluated),
                                               str(r.times_best), str(r.times_worst)};
        auto a = base, b = base;
        for (double v : {r.pct_best, r.pct_worst, r.net_rate}) a.push_back(cell(v)), b.push_back(cell_fixed(v, 1));
        vcsv.add_row(std::move(a));
        vtxt.add_row(std::move(b));
      }
    }
    emit(artifact::kVendorCsv, vcsv.to_csv());
    emit(artifact::kVendorTxt, vtxt.to_aligned("Vendor preference in best/worst labelings", method_footnotes()));
  }

  // ---- cost -----------------------------------------------------------

  void cost(bool required) {
    if (!m_.cost) {
      if (required) throw EvalError(ErrorCode::InvalidManifest, "manifest has no cost section");
      warn("no cost section; cost report skipped");
      return;
    }
    const CostConfig& cfg = *m_.cost;
    std::vector<ClinicianEffort> effort;
    read_jsonl(cfg.effort_path, [&](const nlohmann::json& j, std::size_t) { effort.push_back(effort_from_json(j)); });
    const double hours = total_hours(effort);

    std::int64_t accepted = 0;
    if (cfg.accepted_rubrics) {
      accepted = *cfg.accepted_rubrics;
    } else {
      for (const auto& r : ds_.rubrics) {
        accepted += r.source == RubricSource::Clinician && r.status == RubricStatus::Validated;
      }
    }
    const auto clin = clinician_cost(hours, accepted, Currency(cfg.hourly_rate));

    ordered_json report;
    report["clinician"] = {{"total_hours", hours},
                           {"evaluators", effort.size()},
                           {"accepted_rubrics", accepted},
                           {"hourly_rate", cfg.hourly_rate},
                           {"minutes_per_rubric", clin.minutes_per_rubric},
                           {"cost_per_rubric", clin.cost_per_rubric.value()}};
    Table txt({"item", "value"});
    txt.add_row({"clinician hours", cell_fixed(hours, 2)});
    txt.add_row({"accepted clinician rubrics", std::to_string(accepted)});
    txt.add_row({"hourly rate", Currency(cfg.hourly_rate).str()});
    txt.add_row({"minutes per clinician rubric", cell_fixed(clin.minutes_per_rubric, 1)});
    txt.add_row({"cost per clinician rubric", clin.cost_per_rubric.str()});

    std::optional<TokenSpendOverride> spend = cfg.token_spend;
    const auto req_path = path(artifact::kGenerationRequests);
    if (!spend && fs::exists(req_path)) {
      TokenSpendOverride s;
      read_jsonl(req_path, [&](const nlohmann::json& j, std::size_t) {
        s.model_id = j.at("model_id").get<std::string>();
        s.input_tokens += j.at("input_tokens").get<std::int64_t>();
        s.output_tokens += j.at("output_tokens").get<std::int64_t>();
        s.rubric_count += 1;
      });
      if (s.rubric_count > 0) spend = s;
    }

    if (!spend) {
      warn("no token spend recorded; LLM cost omitted");
      report["llm"] = nullptr;
      report["cost_ratio"] = nullptr;
    } else {
      const auto prices = load_price_table(nlohmann::json::parse(read_text(cfg.prices_path)));
      auto pit = prices.find(spend->model_id);
      if (pit == prices.end()) {
        throw EvalError(ErrorCode::InvalidPrice, "no price configured for model " + spend->model_id);
      }
      const TokenSpend ts{spend->model_id, spend->input_tokens, spend->output_tokens, pit->second};
      const auto llm = llm_cost(ts, spend->rubric_count);
      const double ratio = cost_ratio(clin.cost_per_rubric, llm.cost_per_rubric);
      report["llm"] = {{"model_id", ts.model_id},
                       {"input_tokens", ts.input_tokens},
                       {"output_tokens", ts.output_tokens},
                       {"rubric_count", spend->rubric_count},
                       {"assumed_price",
                        {{"input_per_million", ts.price.per_million_input.value()},
                         {"output_per_million", ts.price.per_million_output.value()},
                         {"reasoning_multiplier", ts.price.reasoning_multiplier}}},
                       {"total_cost", llm.total_cost.value()},
                       {"cost_per_rubric", llm.cost_per_rubric.value()}};
      report["cost_ratio"] = ratio;
      txt.add_row({"LLM model", ts.model_id});
      txt.add_row({"input / output tokens", fmt::format("{} / {}", ts.input_tokens, ts.output_tokens)});
      txt.add_row({"generated rubrics", std::to_string(spend->rubric_count)});
      txt.add_row({"assumed price per M input", ts.price.per_million_input.str()});
      txt.add_row({"assumed price per M output", ts.price.per_million_output.str()});
      txt.add_row({"reasoning multiplier", cell_fixed(ts.price.reasoning_multiplier, 2)});
      txt.add_row({"total LLM cost", llm.total_cost.str()});
      txt.add_row({"cost per LLM rubric", llm.cost_per_rubric.str()});
      txt.add_row({"clinician / LLM cost ratio", cell_fixed(ratio, 0)});
    }
    emit(artifact::kCostJson, report.dump(2) + "\n");
    emit(artifact::kCostTxt, txt.to_aligned("Rubric cost", {"Prices are assumptions read from " +
                                                             cfg.prices_path.filename().string() +
                                                             "; totals are only as good as that file."}));
  }

  const DatasetManifest& m_;
  const PipelineOptions& opt_;
  fs::path out_;
  Dataset ds_;
  std::unique_ptr<ScoringAgent> agent_;
  PipelineOutcome outcome_;
};

}  // namespace

std::string_view to_string(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::Validate: return "validate";
    case PipelineMode::GenRubrics: return "gen-rubrics";
    case PipelineMode::Score: return "score";
    case PipelineMode::Agree: return "agree";
    case PipelineMode::Summarize: return "summarize";
    case PipelineMode::Cost: return "cost";
    case PipelineMode::Full: return "full";
  }
  return "?";
}

PipelineMode parse_pipeline_mode(std::string_view s) {
  for (auto m : {PipelineMode::Validate, PipelineMode::GenRubrics, PipelineMode::Score, PipelineMode::Agree,
                 PipelineMode::Summarize, PipelineMode::Cost, PipelineMode::Full}) {
    if (s == to_string(m)) return m;
  }
  if (s == "gen_rubrics") return PipelineMode::GenRubrics;
  throw EvalError(ErrorCode::InvalidTag, "unknown pipeline mode '" + std::string(s) + "'");
}

std::string_view to_string(FailureCategory category) {
  switch (category) {
    case FailureCategory::None: return "none";
    case FailureCategory::Ingest: return "ingest";
    case FailureCategory::Scoring: return "scoring";
    case FailureCategory::Analytics: return "analytics";
    case FailureCategory::Io: return "io";
  }
  return "?";
}

int exit_code(FailureCategory category) {
  switch (category) {
    case FailureCategory::None: return 0;
    case FailureCategory::Ingest: return 2;
    case FailureCategory::Scoring: return 3;
    case FailureCategory::Analytics: return 4;
    case FailureCategory::Io: return 5;
  }
  return 1;
}

PipelineOutcome run_pipeline(const DatasetManifest& manifest, PipelineMode mode, const PipelineOptions& options) {
  return Runner(manifest, options).run(mode);
}

PipelineOutcome run_pipeline(const fs::path& manifest_path, PipelineMode mode, const PipelineOptions& options) {
  DatasetManifest manifest;
  try {
    manifest = load_manifest(manifest_path);
  } catch (const EvalError& e) {
    PipelineOutcome out;
    out.category = e.code() == ErrorCode::IoFailure ? FailureCategory::Io : FailureCategory::Ingest;
    out.exit_code = exit_code(out.category);
    out.failed_units = 1;
    out.message = std::string("ingest: ") + e.what();
    return out;
  }
  return run_pipeline(manifest, mode, options);
}

}  // namespace rubriceval
