#include "cruciverba/grid.h"

#include <algorithm>
#include <array>
#include <climits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include "cruciverba/error.h"
#include "cruciverba/text.h"

namespace cruciverba {

using nlohmann::json;

std::string normalize_answer(std::string_view raw) {
  const std::string upper = text::to_upper(text::fold_accents(text::nfc(raw)));
  std::string out;
  for (char32_t c : text::decode(upper)) {
    if (text::is_space(c)) continue;
    if (c < U'A' || c > U'Z') {
      throw Error(ErrorCode::kInvalidArgument, "answer \"" + std::string(raw) + "\" has a character outside A-Z");
    }
    out.push_back(static_cast<char>(c));
  }
  if (out.empty()) throw Error(ErrorCode::kEmptyAfterNormalization, "answer \"" + std::string(raw) + "\"");
  return out;
}

Entry make_entry(std::string id, std::string answer_display, std::string clue) {
  Entry e{std::move(id), std::move(answer_display), {}, std::move(clue)};
  e.answer_grid = normalize_answer(e.answer_display);
  if (e.answer_grid.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "answer \"" + e.answer_display + "\" is shorter than 2 letters");
  }
  return e;
}

std::string_view to_string(Direction d) { return d == Direction::kAcross ? "across" : "down"; }

namespace {

constexpr uint8_t kAcrossBit = 1;
constexpr uint8_t kDownBit = 2;

uint8_t bit_of(Direction d) { return d == Direction::kAcross ? kAcrossBit : kDownBit; }
int dr(Direction d) { return d == Direction::kDown ? 1 : 0; }
int dc(Direction d) { return d == Direction::kAcross ? 1 : 0; }
Direction perpendicular(Direction d) { return d == Direction::kAcross ? Direction::kDown : Direction::kAcross; }

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

bool valid_grid_answer(const std::string& s) {
  return s.size() >= 2 && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

struct Candidate {
  int row;
  int col;
  Direction dir;
  int crossings;
  int contacts;  // new letters touching a parallel neighbour
  int64_t area;
  uint64_t tiebreak;
};

struct Placed {
  std::size_t entry;
  int row;
  int col;
  Direction dir;
};

class Search {
 public:
  Search(const std::vector<const Entry*>& entries, const GridConfig& cfg)
      : entries_(entries),
        cfg_(cfg),
        rows_(3 * cfg.max_height + 2),
        cols_(3 * cfg.max_width + 2),
        origin_row_(cfg.max_height + 1),
        origin_col_(cfg.max_width + 1),
        letters_(static_cast<std::size_t>(rows_ * cols_), 0),
        masks_(static_cast<std::size_t>(rows_ * cols_), 0),
        is_placed_(entries.size(), false),
        deferred_(entries.size(), false) {}

  void run() {
    for (std::size_t root = 0; root < entries_.size() && !finished(); ++root) {
      const int len = static_cast<int>(word(root).size());
      std::vector<Direction> dirs;
      if (len <= cfg_.max_width) dirs.push_back(Direction::kAcross);
      if (len <= cfg_.max_height && (dirs.empty() || cfg_.max_width != cfg_.max_height)) {
        dirs.push_back(Direction::kDown);
      }
      for (Direction d : dirs) {
        if (finished()) break;
        place(root, origin_row_, origin_col_, d);
        dfs();
        unplace();
      }
    }
  }

  const std::vector<Placed>& best() const { return best_; }
  bool exhausted() const { return exhausted_; }
  uint64_t nodes() const { return nodes_; }

 private:
  const std::string& word(std::size_t i) const { return entries_[i]->answer_grid; }
  std::size_t at(int r, int c) const { return static_cast<std::size_t>(r * cols_ + c); }
  char letter(int r, int c) const {
    if (r < 0 || c < 0 || r >= rows_ || c >= cols_) return 0;
    return letters_[at(r, c)];
  }
  bool finished() const { return exhausted_ || best_.size() == entries_.size(); }

  void dfs() {
    if (nodes_ >= cfg_.node_budget) {
      exhausted_ = true;
      return;
    }
    ++nodes_;
    if (placed_.size() > best_.size() && runs_match_words()) best_ = placed_;
    if (finished()) return;
    const std::size_t remaining = entries_.size() - placed_.size();
    if (placed_.size() + remaining <= best_.size()) return;

    std::size_t chosen = entries_.size();
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (is_placed_[i] || deferred_[i]) continue;
      candidates = candidates_for(i);
      if (!candidates.empty()) {
        chosen = i;
        break;
      }
    }
    if (chosen == entries_.size()) return;

    for (const Candidate& cand : candidates) {
      std::vector<bool> saved = deferred_;
      std::fill(deferred_.begin(), deferred_.end(), false);
      place(chosen, cand.row, cand.col, cand.dir);
      dfs();
      unplace();
      deferred_ = std::move(saved);
      if (finished()) return;
    }
    deferred_[chosen] = true;
    dfs();
    deferred_[chosen] = false;
  }

  std::vector<Candidate> candidates_for(std::size_t idx) const {
    const std::string& w = word(idx);
    std::set<std::tuple<int, int, int>> seen;
    std::vector<Candidate> out;
    for (const Placed& p : placed_) {
      const std::string& pw = word(p.entry);
      const Direction nd = perpendicular(p.dir);
      for (int k = 0; k < static_cast<int>(pw.size()); ++k) {
        const int r = p.row + k * dr(p.dir);
        const int c = p.col + k * dc(p.dir);
        if (masks_[at(r, c)] == (kAcrossBit | kDownBit)) continue;
        for (int i = 0; i < static_cast<int>(w.size()); ++i) {
          if (w[static_cast<std::size_t>(i)] != pw[static_cast<std::size_t>(k)]) continue;
          const int sr = r - i * dr(nd);
          const int sc = c - i * dc(nd);
          if (!seen.insert({sr, sc, static_cast<int>(nd)}).second) continue;
          if (auto cand = evaluate(w, sr, sc, nd)) out.push_back(*cand);
        }
      }
    }
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(a.contacts, b.crossings, a.area, a.tiebreak, a.row, a.col, a.dir) <
             std::tie(b.contacts, a.crossings, b.area, b.tiebreak, b.row, b.col, b.dir);
    });
    return out;
  }

  std::optional<Candidate> evaluate(const std::string& w, int r0, int c0, Direction d) const {
    const int len = static_cast<int>(w.size());
    const int r1 = r0 + (len - 1) * dr(d);
    const int c1 = c0 + (len - 1) * dc(d);
    const int min_r = std::min(min_r_, r0), max_r = std::max(max_r_, r1);
    const int min_c = std::min(min_c_, c0), max_c = std::max(max_c_, c1);
    if (max_r - min_r + 1 > cfg_.max_height || max_c - min_c + 1 > cfg_.max_width) return std::nullopt;
    if (letter(r0 - dr(d), c0 - dc(d)) != 0 || letter(r1 + dr(d), c1 + dc(d)) != 0) return std::nullopt;
    const Direction pd = perpendicular(d);
    int crossings = 0;
    int contacts = 0;
    for (int k = 0; k < len; ++k) {
      const int r = r0 + k * dr(d);
      const int c = c0 + k * dc(d);
      const char existing = letter(r, c);
      if (existing != 0) {
        if (existing != w[static_cast<std::size_t>(k)] || (masks_[at(r, c)] & bit_of(d)) != 0) return std::nullopt;
        ++crossings;
      } else if (letter(r - dr(pd), c - dc(pd)) != 0 || letter(r + dr(pd), c + dc(pd)) != 0) {
        // Legal only if later words turn the side run into an entry.
        ++contacts;
      }
    }
    if (crossings == 0) return std::nullopt;
    const uint64_t key = splitmix64(cfg_.seed ^ splitmix64((static_cast<uint64_t>(r0 - origin_row_ + 0x8000) << 32) ^
                                                          (static_cast<uint64_t>(c0 - origin_col_ + 0x8000) << 1) ^
                                                          static_cast<uint64_t>(d)));
    const int64_t area = static_cast<int64_t>(max_r - min_r + 1) * (max_c - min_c + 1);
    return Candidate{r0, c0, d, crossings, contacts, area, key};
  }

  // Every maximal run of two or more letters is exactly one placed word.
  bool runs_match_words() const {
    std::set<std::tuple<int, int, int, int>> words;
    for (const Placed& p : placed_) {
      words.insert({static_cast<int>(p.dir), p.row, p.col, static_cast<int>(word(p.entry).size())});
    }
    std::size_t runs = 0;
    for (int r = min_r_; r <= max_r_; ++r) {
      for (int c = min_c_; c <= max_c_; ++c) {
        if (letter(r, c) == 0) continue;
        for (Direction d : {Direction::kAcross, Direction::kDown}) {
          if (letter(r - dr(d), c - dc(d)) != 0 || letter(r + dr(d), c + dc(d)) == 0) continue;
          int len = 0;
          while (letter(r + len * dr(d), c + len * dc(d)) != 0) ++len;
          if (!words.contains({static_cast<int>(d), r, c, len})) return false;
          ++runs;
        }
      }
    }
    return runs == words.size();
  }

  void place(std::size_t idx, int r0, int c0, Direction d) {
    const std::string& w = word(idx);
    std::vector<std::size_t> filled;
    for (int k = 0; k < static_cast<int>(w.size()); ++k) {
      const std::size_t cell = at(r0 + k * dr(d), c0 + k * dc(d));
      if (letters_[cell] == 0) {
        letters_[cell] = w[static_cast<std::size_t>(k)];
        filled.push_back(cell);
      }
      masks_[cell] |= bit_of(d);
    }
    const int r1 = r0 + (static_cast<int>(w.size()) - 1) * dr(d);
    const int c1 = c0 + (static_cast<int>(w.size()) - 1) * dc(d);
    bounds_stack_.push_back({min_r_, max_r_, min_c_, max_c_});
    if (placed_.empty()) {
      min_r_ = r0, max_r_ = r1, min_c_ = c0, max_c_ = c1;
    } else {
      min_r_ = std::min(min_r_, r0), max_r_ = std::max(max_r_, r1);
      min_c_ = std::min(min_c_, c0), max_c_ = std::max(max_c_, c1);
    }
    placed_.push_back({idx, r0, c0, d});
    filled_stack_.push_back(std::move(filled));
    is_placed_[idx] = true;
  }

  void unplace() {
    const Placed p = placed_.back();
    placed_.pop_back();
    const std::string& w = word(p.entry);
    for (int k = 0; k < static_cast<int>(w.size()); ++k) {
      masks_[at(p.row + k * dr(p.dir), p.col + k * dc(p.dir))] &= static_cast<uint8_t>(~bit_of(p.dir));
    }
    for (std::size_t cell : filled_stack_.back()) letters_[cell] = 0;
    filled_stack_.pop_back();
    const auto b = bounds_stack_.back();
    bounds_stack_.pop_back();
    min_r_ = b[0], max_r_ = b[1], min_c_ = b[2], max_c_ = b[3];
    is_placed_[p.entry] = false;
  }

  const std::vector<const Entry*>& entries_;
  const GridConfig& cfg_;
  const int rows_;
  const int cols_;
  const int origin_row_;
  const int origin_col_;
  std::vector<char> letters_;
  std::vector<uint8_t> masks_;
  std::vector<bool> is_placed_;
  std::vector<bool> deferred_;
  std::vector<Placed> placed_;
  std::vector<std::vector<std::size_t>> filled_stack_;
  std::vector<std::array<int, 4>> bounds_stack_;
  int min_r_ = 0, max_r_ = 0, min_c_ = 0, max_c_ = 0;
  std::vector<Placed> best_;
  bool exhausted_ = false;
  uint64_t nodes_ = 0;
};

std::vector<Intersection> compute_intersections(const CrosswordLayout& layout,
                                                const std::map<std::string, const Entry*>& by_id) {
  std::map<std::pair<int, int>, std::pair<std::string, std::string>> cells;  // across id, down id
  for (const auto& p : layout.placements) {
    auto it = by_id.find(p.entry_id);
    if (it == by_id.end()) continue;
    for (int k = 0; k < static_cast<int>(it->second->answer_grid.size()); ++k) {
      auto& slot = cells[{p.row + k * dr(p.direction), p.col + k * dc(p.direction)}];
      (p.direction == Direction::kAcross ? slot.first : slot.second) = p.entry_id;
    }
  }
  std::vector<Intersection> out;
  for (const auto& [cell, ids] : cells) {
    if (!ids.first.empty() && !ids.second.empty()) out.push_back({ids.first, ids.second, cell.first, cell.second});
  }
  return out;
}

std::map<std::string, const Entry*> index_entries(const std::vector<Entry>& entries) {
  std::map<std::string, const Entry*> out;
  for (const auto& e : entries) out.emplace(e.id, &e);
  return out;
}

}  // namespace

BuildResult build(const std::vector<Entry>& entries, const GridConfig& config) {
  if (entries.empty() || entries.size() > 50) {
    throw Error(ErrorCode::kInvalidArgument, "a puzzle needs between 1 and 50 entries");
  }
  if (config.max_width < 2 || config.max_height < 2 || config.max_width > 200 || config.max_height > 200) {
    throw Error(ErrorCode::kInvalidArgument, "grid bounds must be between 2 and 200");
  }
  BuildResult result;
  std::set<std::string> ids;
  std::set<std::string> answers;
  std::vector<const Entry*> usable;
  for (const auto& e : entries) {
    if (!valid_grid_answer(e.answer_grid)) {
      throw Error(ErrorCode::kInvalidArgument, "entry " + e.id + " has an invalid grid answer");
    }
    if (!ids.insert(e.id).second) throw Error(ErrorCode::kInvalidArgument, "duplicate entry id " + e.id);
    if (!answers.insert(e.answer_grid).second) {
      result.unplaced.push_back({e.id, "DuplicateAnswer"});
      continue;
    }
    usable.push_back(&e);
  }
  std::stable_sort(usable.begin(), usable.end(),
                   [](const Entry* a, const Entry* b) { return a->answer_grid.size() > b->answer_grid.size(); });

  Search search(usable, config);
  search.run();
  if (search.best().empty()) throw Error(ErrorCode::kNoPlacement, "no entry fits the grid bounds");

  int min_r = INT32_MAX, min_c = INT32_MAX, max_r = INT32_MIN, max_c = INT32_MIN;
  for (const auto& p : search.best()) {
    const int len = static_cast<int>(usable[p.entry]->answer_grid.size());
    min_r = std::min(min_r, p.row);
    min_c = std::min(min_c, p.col);
    max_r = std::max(max_r, p.row + (len - 1) * dr(p.dir));
    max_c = std::max(max_c, p.col + (len - 1) * dc(p.dir));
  }
  CrosswordLayout& layout = result.layout;
  layout.width = max_c - min_c + 1;
  layout.height = max_r - min_r + 1;
  std::set<std::string> placed_ids;
  for (const auto& p : search.best()) {
    layout.placements.push_back({usable[p.entry]->id, p.row - min_r, p.col - min_c, p.dir});
    placed_ids.insert(usable[p.entry]->id);
  }
  layout.intersections = compute_intersections(layout, index_entries(entries));

  std::vector<UnplacedEntry> unplaced;
  for (const auto& e : entries) {
    if (placed_ids.contains(e.id)) continue;
    auto dup = std::find_if(result.unplaced.begin(), result.unplaced.end(),
                            [&](const UnplacedEntry& u) { return u.entry_id == e.id; });
    unplaced.push_back(dup != result.unplaced.end() ? *dup : UnplacedEntry{e.id, "NoPlacement"});
  }
  result.unplaced = std::move(unplaced);
  result.budget_exhausted = search.exhausted();
  result.nodes = search.nodes();
  return result;
}

LayoutCheck validate_layout(const CrosswordLayout& layout, const std::vector<Entry>& entries) {
  LayoutCheck check;
  auto issue = [&](std::string msg) {
    check.ok = false;
    check.issues.push_back(std::move(msg));
  };
  const auto by_id = index_entries(entries);
  if (layout.placements.empty()) issue("no placements");
  if (layout.width <= 0 || layout.height <= 0) {
    issue("non-positive dimensions");
    return check;
  }

  const auto W = static_cast<std::size_t>(layout.width);
  std::vector<char> grid(W * static_cast<std::size_t>(layout.height), 0);
  std::vector<int> across_owner(grid.size(), -1), down_owner(grid.size(), -1);
  std::set<std::string> seen;
  std::set<std::tuple<int, int, int>> across_words, down_words;  // row, col, length
  for (std::size_t i = 0; i < layout.placements.size(); ++i) {
    const auto& p = layout.placements[i];
    auto it = by_id.find(p.entry_id);
    if (it == by_id.end()) {
      issue("unknown entry " + p.entry_id);
      continue;
    }
    if (!seen.insert(p.entry_id).second) issue("entry " + p.entry_id + " placed twice");
    const std::string& w = it->second->answer_grid;
    const int len = static_cast<int>(w.size());
    const int r1 = p.row + (len - 1) * dr(p.direction);
    const int c1 = p.col + (len - 1) * dc(p.direction);
    if (p.row < 0 || p.col < 0 || r1 >= layout.height || c1 >= layout.width) {
      issue("entry " + p.entry_id + " out of bounds");
      continue;
    }
    (p.direction == Direction::kAcross ? across_words : down_words).insert({p.row, p.col, len});
    for (int k = 0; k < len; ++k) {
      const std::size_t cell = static_cast<std::size_t>(p.row + k * dr(p.direction)) * W +
                               static_cast<std::size_t>(p.col + k * dc(p.direction));
      const char ch = w[static_cast<std::size_t>(k)];
      if (grid[cell] != 0 && grid[cell] != ch) issue("letter conflict at entry " + p.entry_id);
      grid[cell] = ch;
      auto& owner = p.direction == Direction::kAcross ? across_owner : down_owner;
      if (owner[cell] != -1) issue("same-direction overlap between " + layout.placements[owner[cell]].entry_id +
                                   " and " + p.entry_id);
      owner[cell] = static_cast<int>(i);
    }
  }

  // Every maximal run of two or more letters must be exactly one placement.
  auto runs = [&](bool horizontal) {
    std::set<std::tuple<int, int, int>> out;
    const int outer = horizontal ? layout.height : layout.width;
    const int inner = horizontal ? layout.width : layout.height;
    for (int a = 0; a < outer; ++a) {
      int start = -1;
      for (int b = 0; b <= inner; ++b) {
        const bool filled =
            b < inner && grid[horizontal ? static_cast<std::size_t>(a) * W + static_cast<std::size_t>(b)
                                         : static_cast<std::size_t>(b) * W + static_cast<std::size_t>(a)] != 0;
        if (filled && start < 0) start = b;
        if (!filled && start >= 0) {
          if (b - start >= 2) out.insert(horizontal ? std::tuple{a, start, b - start} : std::tuple{start, a, b - start});
          start = -1;
        }
      }
    }
    return out;
  };
  if (runs(true) != across_words) issue("across letter runs do not match the across placements");
  if (runs(false) != down_words) issue("down letter runs do not match the down placements");

  const auto expected = compute_intersections(layout, by_id);
  if (expected != layout.intersections) issue("intersections list does not match the grid");

  if (layout.placements.size() >= 2) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& x : expected) {
      adj[x.entry_a].push_back(x.entry_b);
      adj[x.entry_b].push_back(x.entry_a);
    }
    std::set<std::string> reached{layout.placements.front().entry_id};
    std::vector<std::string> stack{layout.placements.front().entry_id};
    while (!stack.empty()) {
      const std::string id = stack.back();
      stack.pop_back();
      for (const auto& next : adj[id]) {
        if (reached.insert(next).second) stack.push_back(next);
      }
    }
    if (reached.size() != seen.size()) issue("placements are not connected");
  }
  return check;
}

RenderFormat parse_render_format(std::string_view s) {
  if (s == "text" || s == "txt") return RenderFormat::kText;
  if (s == "json") return RenderFormat::kJson;
  if (s == "html") return RenderFormat::kPrintableHtml;
  throw Error(ErrorCode::kInvalidArgument, "unknown format \"" + std::string(s) + "\" (text, json, html)");
}

std::vector<NumberedPlacement> number_placements(const CrosswordLayout& layout, const std::vector<Entry>& entries) {
  const auto by_id = index_entries(entries);
  std::set<std::pair<int, int>> starts;
  for (const auto& p : layout.placements) starts.insert({p.row, p.col});
  std::map<std::pair<int, int>, int> numbers;
  int next = 1;
  for (const auto& s : starts) numbers[s] = next++;
  std::vector<NumberedPlacement> out;
  for (const auto& p : layout.placements) {
    auto it = by_id.find(p.entry_id);
    out.push_back({numbers[{p.row, p.col}], p, it == by_id.end() ? nullptr : it->second});
  }
  std::sort(out.begin(), out.end(), [](const NumberedPlacement& a, const NumberedPlacement& b) {
    return std::tie(a.number, a.placement.direction) < std::tie(b.number, b.placement.direction);
  });
  return out;
}

std::string enumeration(const Entry& e) {
  std::vector<std::string> parts;
  for (const auto& word : text::split_whitespace(e.answer_display)) {
    parts.push_back(std::to_string(normalize_answer(word).size()));
  }
  if (parts.empty()) parts.push_back(std::to_string(e.answer_grid.size()));
  return "(" + text::join(parts, ",") + ")";
}

namespace {

std::vector<std::string> grid_rows(const CrosswordLayout& layout, const std::vector<Entry>& entries) {
  const auto by_id = index_entries(entries);
  std::vector<std::string> rows(static_cast<std::size_t>(layout.height), std::string(static_cast<std::size_t>(layout.width), '#'));
  for (const auto& p : layout.placements) {
    const std::string& w = by_id.at(p.entry_id)->answer_grid;
    for (int k = 0; k < static_cast<int>(w.size()); ++k) {
      rows[static_cast<std::size_t>(p.row + k * dr(p.direction))][static_cast<std::size_t>(p.col + k * dc(p.direction))] =
          w[static_cast<std::size_t>(k)];
    }
  }
  return rows;
}

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_text(const CrosswordLayout& layout, const std::vector<Entry>& entries) {
  std::ostringstream out;
  for (const auto& row : grid_rows(layout, entries)) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << row[i];
    out << '\n';
  }
  const auto numbered = number_placements(layout, entries);
  for (Direction d : {Direction::kAcross, Direction::kDown}) {
    bool header = false;
    for (const auto& n : numbered) {
      if (n.placement.direction != d) continue;
      if (!header) {
        out << '\n' << (d == Direction::kAcross ? "Across" : "Down") << '\n';
        header = true;
      }
      out << n.number << ". " << n.entry->clue << ' ' << enumeration(*n.entry) << '\n';
    }
  }
  return out.str();
}

std::string render_html(const CrosswordLayout& layout, const std::vector<Entry>& entries) {
  const auto rows = grid_rows(layout, entries);
  const auto numbered = number_placements(layout, entries);
  std::map<std::pair<int, int>, int> numbers;
  for (const auto& n : numbered) numbers[{n.placement.row, n.placement.col}] = n.number;

  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html lang=\"it\">\n<head>\n<meta charset=\"utf-8\">\n<title>Cruciverba</title>\n<style>\n"
         "body{font-family:Georgia,serif;margin:2em;color:#000}\n"
         "table.grid{border-collapse:collapse;margin-bottom:1.5em}\n"
         "table.grid td{width:2em;height:2em;border:1px solid #000;position:relative;padding:0}\n"
         "table.grid td.block{background:#000}\n"
         "table.grid td span.n{position:absolute;top:1px;left:2px;font-size:.6em}\n"
         "table.solution td{width:1.2em;height:1.2em;font-size:.8em;text-align:center}\n"
         "section.clues{columns:2}\n"
         "h2{font-size:1.1em;margin:.5em 0}\n"
         "ol{list-style:none;padding-left:0;margin-top:0}\n"
         "@media print{body{margin:1cm}.solution{page-break-before:always}}\n"
         "</style>\n</head>\n<body>\n<table class=\"grid\">\n";
  for (int r = 0; r < layout.height; ++r) {
    out << "<tr>";
    for (int c = 0; c < layout.width; ++c) {
      if (rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] == '#') {
        out << "<td class=\"block\"></td>";
      } else if (auto it = numbers.find({r, c}); it != numbers.end()) {
        out << "<td><span class=\"n\">" << it->second << "</span></td>";
      } else {
        out << "<td></td>";
      }
    }
    out << "</tr>\n";
  }
  out << "</table>\n<section class=\"clues\">\n";
  for (Direction d : {Direction::kAcross, Direction::kDown}) {
    std::ostringstream items;
    for (const auto& n : numbered) {
      if (n.placement.direction != d) continue;
      items << "<li><b>" << n.number << ".</b> " << html_escape(n.entry->clue) << ' ' << enumeration(*n.entry)
            << "</li>\n";
    }
    if (items.str().empty()) continue;
    out << "<h2>" << (d == Direction::kAcross ? "Orizzontali" : "Verticali") << "</h2>\n<ol>\n" << items.str()
        << "</ol>\n";
  }
  out << "</section>\n<section class=\"solution\">\n<h2>Soluzione</h2>\n<table class=\"grid solution\">\n";
  for (const auto& row : rows) {
    out << "<tr>";
    for (char ch : row) {
      if (ch == '#') {
        out << "<td class=\"block\"></td>";
      } else {
        out << "<td>" << ch << "</td>";
      }
    }
    out << "</tr>\n";
  }
  out << "</table>\n</section>\n</body>\n</html>\n";
  return out.str();
}

}  // namespace

json layout_to_json(const CrosswordLayout& layout, const std::vector<Entry>& entries) {
  const auto numbered = number_placements(layout, entries);
  std::map<std::string, int> number_of;
  for (const auto& n : numbered) number_of[n.placement.entry_id] = n.number;
  const auto by_id = index_entries(entries);

  json placements = json::array();
  json used = json::array();
  for (const auto& p : layout.placements) {
    const Entry* e = by_id.at(p.entry_id);
    placements.push_back({{"entry_id", p.entry_id},
                          {"row", p.row},
                          {"col", p.col},
                          {"direction", to_string(p.direction)},
                          {"number", number_of[p.entry_id]},
                          {"length", e->answer_grid.size()}});
    used.push_back({{"id", e->id}, {"answer_display", e->answer_display}, {"answer_grid", e->answer_grid},
                    {"clue", e->clue}});
  }
  json intersections = json::array();
  for (const auto& x : layout.intersections) {
    intersections.push_back({{"entry_a", x.entry_a}, {"entry_b", x.entry_b}, {"row", x.row}, {"col", x.col}});
  }
  json clues{{"across", json::array()}, {"down", json::array()}};
  for (const auto& n : numbered) {
    clues[n.placement.direction == Direction::kAcross ? "across" : "down"].push_back(
        {{"number", n.number}, {"entry_id", n.entry->id}, {"clue", n.entry->clue}, {"enumeration", enumeration(*n.entry)}});
  }
  return json{{"schema", kLayoutSchema},
              {"width", layout.width},
              {"height", layout.height},
              {"grid", grid_rows(layout, entries)},
              {"entries", used},
              {"placements", placements},
              {"intersections", intersections},
              {"clues", clues}};
}

CrosswordLayout layout_from_json(const json& j) {
  try {
    if (j.at("schema").get<std::string>() != kLayoutSchema) {
      throw Error(ErrorCode::kSchemaError, "unsupported layout schema " + j.at("schema").get<std::string>());
    }
    CrosswordLayout layout;
    layout.width = j.at("width").get<int>();
    layout.height = j.at("height").get<int>();
    for (const auto& p : j.at("placements")) {
      const std::string dir = p.at("direction").get<std::string>();
      if (dir != "across" && dir != "down") throw Error(ErrorCode::kSchemaError, "bad direction " + dir);
      layout.placements.push_back({p.at("entry_id").get<std::string>(), p.at("row").get<int>(), p.at("col").get<int>(),
                                   dir == "across" ? Direction::kAcross : Direction::kDown});
    }
    for (const auto& x : j.at("intersections")) {
      layout.intersections.push_back({x.at("entry_a").get<std::string>(), x.at("entry_b").get<std::string>(),
                                      x.at("row").get<int>(), x.at("col").get<int>()});
    }
    return layout;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("layout: ") + e.what());
  }
}

std::vector<Entry> entries_from_layout_json(const json& j) {
  try {
    std::vector<Entry> out;
    for (const auto& e : j.at("entries")) {
      out.push_back({e.at("id").get<std::string>(), e.at("answer_display").get<std::string>(),
                     e.at("answer_grid").get<std::string>(), e.at("clue").get<std::string>()});
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("layout entries: ") + e.what());
  }
}

std::string render(const CrosswordLayout& layout, const std::vector<Entry>& entries, RenderFormat format) {
  const LayoutCheck check = validate_layout(layout, entries);
  if (!check.ok) throw Error(ErrorCode::kInvalidLayout, text::join(check.issues, "; "));
  switch (format) {
    case RenderFormat::kText: return render_text(layout, entries);
    case RenderFormat::kJson: return layout_to_json(layout, entries).dump(2) + "\n";
    case RenderFormat::kPrintableHtml: return render_html(layout, entries);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown render format");
}

}  // namespace cruciverba
