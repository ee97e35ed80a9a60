#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "rubriceval/model.hpp"

namespace testing_support {

using namespace rubriceval;

inline Case make_case(const std::string& id = "case-x", bool with_note = true) {
  Case c;
  c.case_id = id;
  c.transcript = {{"clinician", "How is the cough?"}, {"patient", "Better since the inhaler."}};
  if (with_note) c.point_in_time_note = "Prior note: asthma, on albuterol.";
  c.context.conditions = {"asthma"};
  c.context.medications = {"albuterol"};
  c.tags = {"primary care", "follow-up", EncounterLength::Short, ProblemCount::Single, Acuity::Low};
  return c;
}

inline Criterion crit(std::string text, std::int64_t w, CriterionKind k, std::vector<std::string> evidence) {
  return Criterion{std::move(text), w, k, std::move(evidence)};
}

// A structurally valid rubric with one completeness and one non-repetition
// criterion plus `extra` plain ones.
inline Rubric make_rubric(const std::string& id, const std::string& case_id, RubricSource src,
                          const std::string& author, int extra = 1) {
  Rubric r;
  r.rubric_id = id;
  r.case_id = case_id;
  r.source = src;
  r.author_id = author;
  r.criteria.push_back(crit("Reward for documenting the cough trend", 3, CriterionKind::Completeness,
                            {"cough improved", "inhaler"}));
  r.criteria.push_back(crit("Reward for not restating the asthma history", 1, CriterionKind::NonRepetition,
                            {"interval update"}));
  for (int i = 0; i < extra; ++i) {
    r.criteria.push_back(crit("Reward for noting item " + std::to_string(i), 2, CriterionKind::Other,
                              {"item " + std::to_string(i)}));
  }
  return r;
}

inline NoteOutput make_note(const std::string& id, const std::string& case_id, const std::string& content,
                            Vendor vendor = Vendor::OpenAi, const std::string& exp = "exp-1") {
  NoteOutput n;
  n.note_id = id;
  n.case_id = case_id;
  n.experiment_id = exp;
  n.vendor = vendor;
  n.generator_config = exp + "/cfg";
  n.content = content;
  return n;
}

// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("rubriceval-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path / name;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }
};

// Copies the shipped data tree so tests can mutate it; returns the copied
// fixture manifest.
inline std::filesystem::path copy_fixture(const TempDir& dir) {
  namespace fs = std::filesystem;
  fs::copy(RUBRICEVAL_DATA_DIR, dir.path / "data", fs::copy_options::recursive);
  fs::remove_all(dir.path / "data" / "fixture" / "out");
  return dir.path / "data" / "fixture" / "manifest.json";
}

inline std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

inline void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  for (const auto& l : lines) out << l << '\n';
}

}  // namespace testing_support
