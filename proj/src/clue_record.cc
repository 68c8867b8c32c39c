#include "cruciverba/clue_record.h"

#include "cruciverba/curation.h"
#include "cruciverba/error.h"
#include "cruciverba/util.h"

namespace cruciverba {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) throw Error(ErrorCode::kSchemaError, std::string(key) + " must be a number or null");
  return j[key].get<double>();
}

}  // namespace

json to_json(const ClueRecord& r) {
  json j{{"id", r.id},
         {"title", r.title},
         {"url", r.url},
         {"category", r.category},
         {"context", r.context},
         {"keyword", r.keyword},
         {"style", to_string(r.style)},
         {"clue", r.clue},
         {"model_id", r.model_id},
         {"rating", r.rating ? json(std::string(1, *r.rating)) : json(nullptr)},
         {"validation", to_json(r.validation)},
         {"rouge1", optional_number(r.rouge1)},
         {"rouge2", optional_number(r.rouge2)},
         {"rougeL", optional_number(r.rougeL)},
         {"created_at", format_utc(r.created_at)}};
  if (r.deleted) j["deleted"] = true;
  return j;
}

ClueRecord clue_record_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaError, "record is not a JSON object");
  try {
    ClueRecord r;
    r.id = j.at("id").get<std::string>();
    r.title = j.value("title", "");
    r.url = j.value("url", "");
    r.category = j.value("category", "");
    r.context = j.at("context").get<std::string>();
    r.keyword = j.at("keyword").get<std::string>();
    const std::string style = j.at("style").get<std::string>();
    const auto parsed = parse_clue_style(style);
    if (!parsed) throw Error(ErrorCode::kSchemaError, "unknown style '" + style + "'");
    r.style = *parsed;
    r.clue = j.at("clue").get<std::string>();
    r.model_id = j.value("model_id", "");
    if (j.contains("rating") && !j["rating"].is_null()) {
      const std::string rating = j["rating"].get<std::string>();
      if (rating.size() != 1) throw Error(ErrorCode::kSchemaError, "rating must be a single letter");
      r.rating = rating[0];
    }
    if (j.contains("validation") && !j["validation"].is_null()) {
      r.validation = validation_from_json(j["validation"]);
    }
    r.rouge1 = read_optional_number(j, "rouge1");
    r.rouge2 = read_optional_number(j, "rouge2");
    r.rougeL = read_optional_number(j, "rougeL");
    r.created_at = parse_utc(j.at("created_at").get<std::string>());
    r.deleted = j.value("deleted", false);
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, e.what());
  }
}

void check_invariants(const ClueRecord& r) {
  if (r.rating && !is_valid_rating(*r.rating)) {
    throw Error(ErrorCode::kInvariantViolation, std::string("rating '") + *r.rating + "' is not one of A-E");
  }
  if (!filter_keyword(r.keyword)) {
    throw Error(ErrorCode::kInvariantViolation, "keyword '" + r.keyword + "' fails the keyword filter");
  }
  if (r.clue.empty()) throw Error(ErrorCode::kInvariantViolation, "clue is empty");
}

}  // namespace cruciverba
