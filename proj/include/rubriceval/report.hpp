#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rubriceval {

// A small table rendered two ways: RFC-4180-ish CSV for machines and
// column-aligned text with a footnote block for people.
class Table {
 public:
  explicit Table(std::vector<std::string> headers) : headers_(std::move(headers)) {}

  void add_row(std::vector<std::string> cells);

  std::string to_csv() const;
  std::string to_aligned(const std::string& title, const std::vector<std::string>& footnotes) const;

  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

 private:
  std::vector<std::string> headers_;
  std::vector<std::vector<std::string>> rows_;
};

// Full-precision cell for CSV; empty optional renders as "NA".
std::string cell(std::optional<double> v);
// Rounded cell for aligned text.
std::string cell_fixed(std::optional<double> v, int digits = 2);

// Method declarations attached to every emitted report.
const std::vector<std::string>& method_footnotes();

}  // namespace rubriceval
