#pragma once

#include <chrono>
#include <optional>
#include <string>

#include <json.hpp>

#include "cruciverba/clue_style.h"
#include "cruciverba/validator.h"

namespace cruciverba {

struct ClueRecord {
  std::string id;
  std::string title;
  std::string url;
  std::string category;
  std::string context;
  std::string keyword;  // the answer
  ClueStyle style = ClueStyle::kUnrestricted;
  std::string clue;
  std::string model_id;
  std::optional<char> rating;  // 'A'..'E'
  ValidationReport validation;
  std::optional<double> rouge1;
  std::optional<double> rouge2;
  std::optional<double> rougeL;
  std::chrono::system_clock::time_point created_at;
  bool deleted = false;

  friend bool operator==(const ClueRecord&, const ClueRecord&) = default;
};

// Field names are the JSONL schema documented in the README. "deleted" is
// written only for tombstoned records.
nlohmann::json to_json(const ClueRecord& r);
// Throws SchemaError on missing or mistyped fields.
ClueRecord clue_record_from_json(const nlohmann::json& j);

// Throws InvariantViolation when the rating is outside A..E or the keyword
// fails the keyword filter.
void check_invariants(const ClueRecord& r);

}  // namespace cruciverba
