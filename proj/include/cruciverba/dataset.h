#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cruciverba/clue_record.h"

namespace cruciverba {

struct LineError {
  int line = 0;  // 1-based
  std::string message;
};

struct ImportResult {
  std::vector<ClueRecord> records;
  std::vector<LineError> errors;
};

// One ClueRecord per line. Every line is validated; bad lines are reported
// with their line number and skipped. Throws IoError if the file is unreadable.
ImportResult import_jsonl(const std::filesystem::path& path);
std::size_t export_jsonl(const std::vector<ClueRecord>& records, const std::filesystem::path& path);

// Column aliases for rows of the published clue dataset (JSONL export of the
// Hugging Face release). The first alias present in a row wins.
struct PublishedMapping {
  std::vector<std::string> context{"context", "text", "Context", "Text", "input"};
  std::vector<std::string> keyword{"keyword", "answer", "solution", "Keyword", "Answer", "Solution"};
  std::vector<std::string> clue{"clue", "Clue", "output", "definition"};
  std::vector<std::string> style{"type", "clue_type", "style", "Type", "structure"};
  std::vector<std::string> title{"title", "Title"};
  std::vector<std::string> category{"category", "Category", "topic"};
  std::vector<std::string> url{"url", "URL", "link"};
};

// Maps a free-form clue-type label onto the four styles.
ClueStyle style_from_label(std::string_view label);

ImportResult import_published(const std::filesystem::path& path, const PublishedMapping& mapping = {});

// Key used to reject duplicates: sha256 of the normalized context, the
// lowercased keyword, the style and the normalized lowercased clue.
std::string duplicate_key(const ClueRecord& r);

using RecordFilter = std::function<bool(const ClueRecord&)>;

// Append-only JSONL store under a data directory:
//   records.jsonl  - log of {"op":"put","record":{...}} and {"op":"tombstone","id":...}
//   index.json     - sidecar with the id sequence and counts, rewritten atomically
// Updates append a new version of the same id; ids are never reused.
class DatasetStore {
 public:
  explicit DatasetStore(std::filesystem::path dir);

  // Assigns an id when the record has none. Errors: DuplicateRecord,
  // InvariantViolation.
  std::string append(ClueRecord record);
  // Appends a new version of an existing record. Errors: NotFound,
  // DuplicateRecord, InvariantViolation.
  void update(const ClueRecord& record);
  void tombstone(const std::string& id);

  std::optional<ClueRecord> get(const std::string& id) const;
  std::vector<ClueRecord> snapshot(bool include_deleted = false) const;

  std::size_t export_jsonl(const std::filesystem::path& path, const RecordFilter& filter = {},
                           bool include_deleted = false) const;
  // Appends every valid record of the file; per-line failures (schema,
  // invariants, duplicates) are returned rather than thrown.
  ImportResult import_jsonl(const std::filesystem::path& path);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  void load();
  void write_log_line(const nlohmann::json& line);
  void write_index();
  void check_duplicate(const ClueRecord& r) const;

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::vector<std::string> order_;
  std::map<std::string, ClueRecord> records_;
  std::map<std::string, std::string> dup_index_;  // duplicate key -> id (live records only)
  uint64_t next_seq_ = 1;
};

using TokenCounter = std::function<std::size_t(std::string_view)>;

TokenCounter whitespace_token_counter();

struct DatasetStats {
  std::map<std::size_t, std::size_t> context_token_histogram;  // bucket start -> count
  std::map<std::size_t, std::size_t> clue_token_histogram;
  std::map<std::string, std::size_t> category_counts;
  std::size_t min_context_tokens = 0;
  std::size_t max_context_tokens = 0;
  std::size_t min_clue_tokens = 0;
  std::size_t max_clue_tokens = 0;
  std::size_t record_count = 0;
};

nlohmann::json to_json(const DatasetStats& s);

// Throws EmptySet.
DatasetStats compute_stats(const std::vector<ClueRecord>& records, const TokenCounter& counter = whitespace_token_counter(),
                           std::size_t context_bucket = 50, std::size_t clue_bucket = 5);

enum class Split { kTrain, kValidation, kTest };

// 90/5/5 by the first 8 bytes of sha256(id) modulo 100.
Split split_for(const std::string& id);

// Writes manifest.json (fine-tuning hyperparameters and split summary) and
// train/val/test JSONL files in instruction format. Deleted records are
// skipped. Returns the manifest.
nlohmann::json export_training_manifest(const std::vector<ClueRecord>& records, const std::filesystem::path& out_dir);

}  // namespace cruciverba
