#include "rubriceval/cost.hpp"

#include <cmath>

#include <fmt/format.h>

#include "json_fields.hpp"
#include "rubriceval/error.hpp"

namespace rubriceval {

std::string Currency::str() const { return fmt::format("{:.4f}", amount_); }

ClinicianEffort effort_from_json(const nlohmann::json& raw) {
  ClinicianEffort e;
  e.evaluator_id = detail::require_string(raw, "evaluator_id");
  e.hours = detail::require_number(raw, "hours");
  if (!std::isfinite(e.hours) || e.hours < 0.0) {
    throw EvalError(ErrorCode::MalformedRecord, "hours must be finite and >= 0");
  }
  if (auto it = raw.find("period"); it != raw.end() && it->is_object()) {
    e.period.start = detail::optional_string(*it, "start");
    e.period.end = detail::optional_string(*it, "end");
  }
  return e;
}

double total_hours(std::span<const ClinicianEffort> entries) {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.hours;
  return sum;
}

std::map<std::string, PricePoint> load_price_table(const nlohmann::json& raw) {
  const auto& models = detail::require(raw, "models");
  if (!models.is_object()) throw EvalError(ErrorCode::InvalidPrice, "'models' must be an object");
  std::map<std::string, PricePoint> out;
  for (const auto& [id, entry] : models.items()) {
    PricePoint p{Currency(detail::require_number(entry, "input_per_million")),
                 Currency(detail::require_number(entry, "output_per_million")),
                 entry.value("reasoning_multiplier", 1.0)};
    if (!(p.per_million_input.value() > 0.0) || !(p.per_million_output.value() > 0.0) ||
        !(p.reasoning_multiplier >= 1.0)) {
      throw EvalError(ErrorCode::InvalidPrice, "model " + id + " needs positive prices and multiplier >= 1");
    }
    out.emplace(id, p);
  }
  return out;
}

ClinicianCost clinician_cost(double total_hours, std::int64_t accepted_rubrics, Currency hourly_rate) {
  if (accepted_rubrics < 1) throw EvalError(ErrorCode::ZeroRubrics, "no accepted rubrics");
  ClinicianCost c;
  c.minutes_per_rubric = 60.0 * total_hours / static_cast<double>(accepted_rubrics);
  c.cost_per_rubric = hourly_rate * (c.minutes_per_rubric / 60.0);
  return c;
}

LlmCost llm_cost(const TokenSpend& spend, std::int64_t rubric_count) {
  if (rubric_count < 1) throw EvalError(ErrorCode::ZeroRubrics, "no generated rubrics");
  const auto& p = spend.price;
  if (!(p.per_million_input.value() > 0.0) || !(p.per_million_output.value() > 0.0) ||
      !(p.reasoning_multiplier >= 1.0)) {
    throw EvalError(ErrorCode::InvalidPrice, "prices must be positive and multiplier >= 1");
  }
  if (spend.input_tokens < 0 || spend.output_tokens < 0) {
    throw EvalError(ErrorCode::InvalidPrice, "negative token count");
  }
  const double in_m = static_cast<double>(spend.input_tokens) / 1e6;
  const double out_m = static_cast<double>(spend.output_tokens) / 1e6;
  LlmCost c;
  c.total_cost = p.per_million_input * in_m + p.per_million_output * (out_m * p.reasoning_multiplier);
  c.cost_per_rubric = c.total_cost / static_cast<double>(rubric_count);
  return c;
}

double cost_ratio(Currency clinician_cost_per_rubric, Currency llm_cost_per_rubric) {
  if (!(llm_cost_per_rubric.value() > 0.0)) {
    throw EvalError(ErrorCode::DivisionByZero, "LLM cost per rubric is not positive");
  }
  return clinician_cost_per_rubric.value() / llm_cost_per_rubric.value();
}

}  // namespace rubriceval
