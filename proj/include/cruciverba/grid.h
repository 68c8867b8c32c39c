#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace cruciverba {

// Uppercase, accents folded, spaces removed: "South Ribble" -> "SOUTHRIBBLE".
// Errors: EmptyAfterNormalization, InvalidArgument (a character outside A-Z
// remains).
std::string normalize_answer(std::string_view raw);

struct Entry {
  std::string id;
  std::string answer_display;
  std::string answer_grid;  // [A-Z]{2,}
  std::string clue;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// Normalizes the answer. Throws InvalidArgument if it is shorter than 2.
Entry make_entry(std::string id, std::string answer_display, std::string clue);

enum class Direction { kAcross, kDown };

std::string_view to_string(Direction d);

struct Placement {
  std::string entry_id;
  int row = 0;
  int col = 0;
  Direction direction = Direction::kAcross;

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct Intersection {
  std::string entry_a;  // the Across entry
  std::string entry_b;  // the Down entry
  int row = 0;
  int col = 0;

  friend bool operator==(const Intersection&, const Intersection&) = default;
};

struct CrosswordLayout {
  int width = 0;
  int height = 0;
  std::vector<Placement> placements;  // in placement order
  std::vector<Intersection> intersections;  // row-major

  friend bool operator==(const CrosswordLayout&, const CrosswordLayout&) = default;
};

struct GridConfig {
  int max_width = 30;
  int max_height = 30;
  uint64_t node_budget = 100000;
  uint64_t seed = 0;
};

struct UnplacedEntry {
  std::string entry_id;
  std::string reason;  // "NoPlacement" or "DuplicateAnswer"
};

struct BuildResult {
  CrosswordLayout layout;
  std::vector<UnplacedEntry> unplaced;
  bool budget_exhausted = false;
  uint64_t nodes = 0;
};

// Backtracking criss-cross search. Entries are tried longest first; each new
// word must cross an already placed one. Returns the largest layout found
// within the node budget. Deterministic for a given entry order and seed.
// Errors: InvalidArgument (0 or more than 50 entries, bad answer_grid),
// NoPlacement (no entry fits the bounds).
BuildResult build(const std::vector<Entry>& entries, const GridConfig& config = {});

struct LayoutCheck {
  bool ok = true;
  std::vector<std::string> issues;
};

// Letter consistency, bounds, same-direction exclusivity, no parallel
// contact, every letter run of length >= 2 being exactly one placement,
// connectivity and the intersections list.
LayoutCheck validate_layout(const CrosswordLayout& layout, const std::vector<Entry>& entries);

enum class RenderFormat { kText, kJson, kPrintableHtml };

RenderFormat parse_render_format(std::string_view s);

struct NumberedPlacement {
  int number = 0;
  Placement placement;
  const Entry* entry = nullptr;
};

// Standard numbering: cells that start a word are numbered row-major.
std::vector<NumberedPlacement> number_placements(const CrosswordLayout& layout, const std::vector<Entry>& entries);

// "(4)" or "(5,6)" for multi-word answers.
std::string enumeration(const Entry& e);

// Throws InvalidLayout when validate_layout fails.
std::string render(const CrosswordLayout& layout, const std::vector<Entry>& entries, RenderFormat format);

inline constexpr std::string_view kLayoutSchema = "cruciverba.layout/v1";

nlohmann::json layout_to_json(const CrosswordLayout& layout, const std::vector<Entry>& entries);
// Reads the layout part of the schema back. Throws SchemaError.
CrosswordLayout layout_from_json(const nlohmann::json& j);
std::vector<Entry> entries_from_layout_json(const nlohmann::json& j);

}  // namespace cruciverba
