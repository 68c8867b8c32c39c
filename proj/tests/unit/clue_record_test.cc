#include "cruciverba/clue_record.h"

#include <gtest/gtest.h>

#include "cruciverba/error.h"
#include "records.h"

namespace cruciverba {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(ClueRecord, JsonRoundTrip) {
  ClueRecord r = testing::sample_record(3, ClueStyle::kCopularSentence);
  r.id = "c000003";
  r.rating = 'B';
  r.rouge2 = 1.0 / 3;
  r.rougeL = 0.1;
  EXPECT_EQ(clue_record_from_json(to_json(r)), r);
  EXPECT_EQ(clue_record_from_json(nlohmann::json::parse(to_json(r).dump())), r);
  r.deleted = true;
  EXPECT_EQ(to_json(r).at("deleted"), true);
  EXPECT_EQ(clue_record_from_json(to_json(r)), r);
}

TEST(ClueRecord, JsonFieldNames) {
  ClueRecord r = testing::sample_record(1);
  r.id = "c000001";
  const auto j = to_json(r);
  for (const char* k : {"id", "title", "url", "category", "context", "keyword", "style", "clue", "model_id", "rating",
                        "validation", "rouge1", "rouge2", "rougeL", "created_at"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_FALSE(j.contains("deleted"));
  EXPECT_TRUE(j.at("rating").is_null());
  EXPECT_TRUE(j.at("rouge2").is_null());
  EXPECT_EQ(j.at("style"), "bare_np");
  EXPECT_EQ(j.at("created_at"), "2025-01-15T09:00:00Z");
}

TEST(ClueRecord, SchemaErrors) {
  ClueRecord r = testing::sample_record(1);
  r.id = "c1";
  auto j = to_json(r);
  j.erase("clue");
  EXPECT_EQ(code_of([&] { clue_record_from_json(j); }), ErrorCode::kSchemaError);
  j = to_json(r);
  j["style"] = "fill_in";
  EXPECT_EQ(code_of([&] { clue_record_from_json(j); }), ErrorCode::kSchemaError);
  j = to_json(r);
  j["rating"] = "AB";
  EXPECT_EQ(code_of([&] { clue_record_from_json(j); }), ErrorCode::kSchemaError);
  j = to_json(r);
  j["keyword"] = 7;
  EXPECT_EQ(code_of([&] { clue_record_from_json(j); }), ErrorCode::kSchemaError);
  EXPECT_EQ(code_of([&] { clue_record_from_json(nlohmann::json::array()); }), ErrorCode::kSchemaError);
}

TEST(ClueRecord, Invariants) {
  ClueRecord r = testing::sample_record(1);
  EXPECT_NO_THROW(check_invariants(r));
  r.rating = 'F';
  EXPECT_EQ(code_of([&] { check_invariants(r); }), ErrorCode::kInvariantViolation);
  r.rating = 'E';
  EXPECT_NO_THROW(check_invariants(r));
  r.keyword = "R2-D2";
  EXPECT_EQ(code_of([&] { check_invariants(r); }), ErrorCode::kInvariantViolation);
}

}  // namespace
}  // namespace cruciverba
