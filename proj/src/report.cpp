#include "rubriceval/report.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "rubriceval/codec.hpp"

namespace rubriceval {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void Table::add_row(std::vector<std::string> cells) {
  cells.resize(headers_.size());
  rows_.push_back(std::move(cells));
}

std::string Table::to_csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cells[i]);
    }
    out += '\n';
  };
  line(headers_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::string Table::to_aligned(const std::string& title, const std::vector<std::string>& footnotes) const {
  std::vector<std::size_t> width(headers_.size());
  for (std::size_t i = 0; i < headers_.size(); ++i) width[i] = headers_[i].size();
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out = title + "\n\n";
  auto line = [&](const std::vector<std::string>& cells) {
    std::string l;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) l += "  ";
      // first column left-aligned, numbers right-aligned
      l += i == 0 ? fmt::format("{:<{}}", cells[i], width[i]) : fmt::format("{:>{}}", cells[i], width[i]);
    }
    while (!l.empty() && l.back() == ' ') l.pop_back();
    out += l + '\n';
  };
  line(headers_);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') + '\n';
  for (const auto& r : rows_) line(r);
  if (!footnotes.empty()) {
    out += '\n';
    for (std::size_t i = 0; i < footnotes.size(); ++i) {
      out += fmt::format("[{}] {}\n", i + 1, footnotes[i]);
    }
  }
  return out;
}

std::string cell(std::optional<double> v) { return v ? format_real(*v) : "NA"; }

std::string cell_fixed(std::optional<double> v, int digits) {
  return v ? fmt::format("{:.{}f}", *v, digits) : "NA";
}

const std::vector<std::string>& method_footnotes() {
  static const std::vector<std::string> notes = {
      "Agreement uses Kendall tau-b (tie-corrected). Fully tied rankings have no defined tau; "
      "they are excluded from medians and counted in the excluded columns.",
      "Each rubric's ranking of a case's notes uses the mean normalized score over that rubric's "
      "scoring runs.",
      "Quartiles and medians interpolate linearly between order statistics (h = (n-1)p); standard "
      "deviation uses the n-1 denominator; P95 is nearest-rank.",
      "Separation margin = min(best-note runs) - max(worst-note runs) over the three validation runs.",
      "Clin-LLM medians pool every clinician rubric paired with the LLM rubric; the per-pairing split "
      "is written to table3_by_pairing.csv.",
  };
  return notes;
}

}  // namespace rubriceval
