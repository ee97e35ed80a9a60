#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rubriceval/error.hpp"

namespace rubriceval::detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  if (!j.is_object()) throw EvalError(ErrorCode::MalformedRecord, "record is not an object");
  auto it = j.find(key);
  if (it == j.end()) {
    throw EvalError(ErrorCode::MalformedRecord, std::string("missing field '") + key + "'");
  }
  return *it;
}

inline std::string require_string(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) {
    throw EvalError(ErrorCode::MalformedRecord, std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

inline std::string optional_string(const nlohmann::json& j, const char* key,
                                   std::string fallback = {}) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_string()) {
    throw EvalError(ErrorCode::MalformedRecord, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

inline std::vector<std::string> string_list(const nlohmann::json& j, const char* key,
                                            bool required) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) {
      throw EvalError(ErrorCode::MalformedRecord, std::string("missing field '") + key + "'");
    }
    return {};
  }
  if (!it->is_array()) {
    throw EvalError(ErrorCode::MalformedRecord, std::string("field '") + key + "' must be a list");
  }
  std::vector<std::string> out;
  for (const auto& e : *it) {
    if (!e.is_string()) {
      throw EvalError(ErrorCode::MalformedRecord,
                      std::string("field '") + key + "' must contain strings");
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline std::int64_t require_integer(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number_integer()) {
    throw EvalError(ErrorCode::MalformedRecord, std::string("field '") + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

inline double require_number(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number()) {
    throw EvalError(ErrorCode::MalformedRecord, std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

}  // namespace rubriceval::detail
