#pragma once

// Rubric cost accounting: clinician validation hours and LLM token spend.
// Prices are always configuration (see data/config/prices.json).

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include <json.hpp>

namespace rubriceval {

// Single-currency amount. Arithmetic stays in double so cost functions are
// exactly linear in their rates; str() rounds to 4 fractional digits.
class Currency {
 public:
  constexpr Currency() = default;
  constexpr explicit Currency(double amount) : amount_(amount) {}

  constexpr double value() const { return amount_; }
  std::string str() const;

  friend constexpr Currency operator+(Currency a, Currency b) { return Currency(a.amount_ + b.amount_); }
  friend constexpr Currency operator*(Currency a, double k) { return Currency(a.amount_ * k); }
  friend constexpr Currency operator/(Currency a, double k) { return Currency(a.amount_ / k); }
  friend constexpr bool operator==(Currency, Currency) = default;

 private:
  double amount_ = 0.0;
};

struct DateRange {
  std::string start;
  std::string end;
};

struct ClinicianEffort {
  std::string evaluator_id;
  double hours = 0.0;
  DateRange period;
};

// Throws MalformedRecord for negative or non-finite hours.
ClinicianEffort effort_from_json(const nlohmann::json& raw);
double total_hours(std::span<const ClinicianEffort> entries);

struct PricePoint {
  Currency per_million_input;
  Currency per_million_output;
  double reasoning_multiplier = 1.0;
};

struct TokenSpend {
  std::string model_id;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  PricePoint price;
};

// {"models": {"<model_id>": {"input_per_million": x, "output_per_million": y,
//                            "reasoning_multiplier": m}}}
std::map<std::string, PricePoint> load_price_table(const nlohmann::json& raw);

struct ClinicianCost {
  double minutes_per_rubric = 0.0;
  Currency cost_per_rubric;
};

ClinicianCost clinician_cost(double total_hours, std::int64_t accepted_rubrics, Currency hourly_rate);

struct LlmCost {
  Currency total_cost;
  Currency cost_per_rubric;
};

// total = in/1e6 * price_in + out/1e6 * multiplier * price_out.
// Throws ZeroRubrics or InvalidPrice.
LlmCost llm_cost(const TokenSpend& spend, std::int64_t rubric_count);

// Throws DivisionByZero when the LLM cost is not positive.
double cost_ratio(Currency clinician_cost_per_rubric, Currency llm_cost_per_rubric);

}  // namespace rubriceval
