#include "cruciverba/dataset.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>

#include "cruciverba/error.h"
#include "cruciverba/text.h"
#include "cruciverba/util.h"

namespace cruciverba {

using nlohmann::json;

namespace {

std::string format_id(std::string_view prefix, uint64_t seq) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06llu", static_cast<unsigned long long>(seq));
  return std::string(prefix) + buf;
}

std::optional<uint64_t> seq_of(const std::string& id) {
  if (id.size() < 2 || id[0] != 'c') return std::nullopt;
  uint64_t v = 0;
  for (std::size_t i = 1; i < id.size(); ++i) {
    if (id[i] < '0' || id[i] > '9') return std::nullopt;
    v = v * 10 + static_cast<uint64_t>(id[i] - '0');
  }
  return v;
}

template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    fn(line_no, line);
  }
}

const json* first_present(const json& row, const std::vector<std::string>& aliases) {
  for (const auto& a : aliases) {
    if (row.contains(a) && !row[a].is_null()) return &row[a];
  }
  return nullptr;
}

std::string string_field(const json& row, const std::vector<std::string>& aliases) {
  const json* v = first_present(row, aliases);
  if (v == nullptr) return {};
  return v->is_string() ? v->get<std::string>() : v->dump();
}

}  // namespace

ImportResult import_jsonl(const std::filesystem::path& path) {
  ImportResult result;
  for_each_line(path, [&](int line_no, const std::string& line) {
    try {
      json j = json::parse(line);
      ClueRecord r = clue_record_from_json(j);
      check_invariants(r);
      result.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      result.errors.push_back({line_no, std::string("SchemaError: ") + e.what()});
    } catch (const Error& e) {
      result.errors.push_back({line_no, e.what()});
    }
  });
  return result;
}

std::size_t export_jsonl(const std::vector<ClueRecord>& records, const std::filesystem::path& path) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  write_file_atomic(path, out);
  return records.size();
}

ClueStyle style_from_label(std::string_view label) {
  const std::string l = text::to_lower(label);
  auto has = [&](std::string_view s) { return l.find(s) != std::string::npos; };
  if (has("copul")) return ClueStyle::kCopularSentence;
  if (has("determin") || has("definite") || has("definit") || l == "dp") return ClueStyle::kDefiniteDeterminerPhrase;
  if (has("bare") || has("noun phrase") || has("nominal") || l == "np") return ClueStyle::kBareNounPhrase;
  return ClueStyle::kUnrestricted;
}

ImportResult import_published(const std::filesystem::path& path, const PublishedMapping& mapping) {
  ImportResult result;
  uint64_t seq = 0;
  for_each_line(path, [&](int line_no, const std::string& line) {
    try {
      const json row = json::parse(line);
      ClueRecord r;
      ++seq;
      r.id = format_id("hf", seq);
      r.context = string_field(row, mapping.context);
      r.keyword = text::trim(string_field(row, mapping.keyword));
      r.clue = text::trim(string_field(row, mapping.clue));
      r.style = style_from_label(string_field(row, mapping.style));
      r.title = string_field(row, mapping.title);
      r.category = string_field(row, mapping.category);
      r.url = string_field(row, mapping.url);
      r.model_id = "gpt-4o";
      r.validation = validate(r.clue.empty() ? " " : r.clue, r.keyword.empty() ? " " : r.keyword, r.style);
      if (r.context.empty() || r.keyword.empty() || r.clue.empty()) {
        throw Error(ErrorCode::kSchemaError, "row lacks context, keyword or clue");
      }
      result.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      result.errors.push_back({line_no, std::string("SchemaError: ") + e.what()});
    } catch (const Error& e) {
      result.errors.push_back({line_no, e.what()});
    }
  });
  return result;
}

std::string duplicate_key(const ClueRecord& r) {
  const std::string context_hash = sha256_hex(text::normalize_whitespace(text::nfc(r.context)));
  return context_hash + "\x1f" + text::to_lower(text::trim(text::nfc(r.keyword))) + "\x1f" +
         std::string(to_string(r.style)) + "\x1f" + text::to_lower(text::normalize_whitespace(text::nfc(r.clue)));
}

DatasetStore::DatasetStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  load();
}

void DatasetStore::load() {
  const auto log = dir_ / "records.jsonl";
  if (std::filesystem::exists(log)) {
    for_each_line(log, [&](int line_no, const std::string& line) {
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        throw Error(ErrorCode::kSchemaError, log.string() + ":" + std::to_string(line_no) + " is not JSON");
      }
      const std::string op = j.value("op", "");
      if (op == "put") {
        ClueRecord r = clue_record_from_json(j.at("record"));
        if (!records_.contains(r.id)) order_.push_back(r.id);
        if (auto s = seq_of(r.id)) next_seq_ = std::max(next_seq_, *s + 1);
        records_[r.id] = std::move(r);
      } else if (op == "tombstone") {
        auto it = records_.find(j.value("id", ""));
        if (it != records_.end()) it->second.deleted = true;
      } else {
        throw Error(ErrorCode::kSchemaError, log.string() + ":" + std::to_string(line_no) + " has unknown op");
      }
    });
  }
  const auto index = dir_ / "index.json";
  if (std::filesystem::exists(index)) {
    json j = json::parse(read_file(index), nullptr, false);
    if (!j.is_discarded()) next_seq_ = std::max(next_seq_, j.value("next_seq", uint64_t{1}));
  }
  for (const auto& [id, r] : records_) {
    if (!r.deleted) dup_index_[duplicate_key(r)] = id;
  }
}

void DatasetStore::write_log_line(const json& line) {
  const auto log = dir_ / "records.jsonl";
  std::ofstream out(log, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + log.string());
  out << line.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + log.string());
}

void DatasetStore::write_index() {
  std::size_t live = 0;
  for (const auto& [_, r] : records_) live += r.deleted ? 0 : 1;
  const json idx{{"version", 1}, {"next_seq", next_seq_}, {"records", records_.size()}, {"live", live}};
  write_file_atomic(dir_ / "index.json", idx.dump(2) + "\n");
}

void DatasetStore::check_duplicate(const ClueRecord& r) const {
  auto it = dup_index_.find(duplicate_key(r));
  if (it != dup_index_.end() && it->second != r.id) {
    throw Error(ErrorCode::kDuplicateRecord, "same context, keyword, style and clue as " + it->second);
  }
}

std::string DatasetStore::append(ClueRecord record) {
  std::lock_guard lock(mutex_);
  check_invariants(record);
  if (record.id.empty()) {
    record.id = format_id("c", next_seq_);
  } else if (records_.contains(record.id)) {
    throw Error(ErrorCode::kDuplicateRecord, "id " + record.id + " already exists");
  }
  check_duplicate(record);
  if (auto s = seq_of(record.id)) next_seq_ = std::max(next_seq_, *s + 1);
  record.deleted = false;
  write_log_line(json{{"op", "put"}, {"record", to_json(record)}});
  dup_index_[duplicate_key(record)] = record.id;
  order_.push_back(record.id);
  const std::string id = record.id;
  records_[id] = std::move(record);
  write_index();
  return id;
}

void DatasetStore::update(const ClueRecord& record) {
  std::lock_guard lock(mutex_);
  auto it = records_.find(record.id);
  if (it == records_.end() || it->second.deleted) throw Error(ErrorCode::kNotFound, "no record " + record.id);
  check_invariants(record);
  check_duplicate(record);
  write_log_line(json{{"op", "put"}, {"record", to_json(record)}});
  dup_index_.erase(duplicate_key(it->second));
  dup_index_[duplicate_key(record)] = record.id;
  it->second = record;
  it->second.deleted = false;
}

void DatasetStore::tombstone(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = records_.find(id);
  if (it == records_.end()) throw Error(ErrorCode::kNotFound, "no record " + id);
  if (it->second.deleted) return;
  write_log_line(json{{"op", "tombstone"}, {"id", id}});
  dup_index_.erase(duplicate_key(it->second));
  it->second.deleted = true;
  write_index();
}

std::optional<ClueRecord> DatasetStore::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<ClueRecord> DatasetStore::snapshot(bool include_deleted) const {
  std::lock_guard lock(mutex_);
  std::vector<ClueRecord> out;
  for (const auto& id : order_) {
    const auto& r = records_.at(id);
    if (include_deleted || !r.deleted) out.push_back(r);
  }
  return out;
}

std::size_t DatasetStore::export_jsonl(const std::filesystem::path& path, const RecordFilter& filter,
                                       bool include_deleted) const {
  std::vector<ClueRecord> selected;
  for (auto& r : snapshot(include_deleted)) {
    if (!filter || filter(r)) selected.push_back(std::move(r));
  }
  return cruciverba::export_jsonl(selected, path);
}

ImportResult DatasetStore::import_jsonl(const std::filesystem::path& path) {
  ImportResult parsed = cruciverba::import_jsonl(path);
  ImportResult result;
  result.errors = std::move(parsed.errors);
  for (auto& r : parsed.records) {
    try {
      append(r);
      result.records.push_back(std::move(r));
    } catch (const Error& e) {
      result.errors.push_back({0, r.id + ": " + e.what()});
    }
  }
  return result;
}

TokenCounter whitespace_token_counter() {
  return [](std::string_view s) { return text::split_whitespace(s).size(); };
}

json to_json(const DatasetStats& s) {
  auto histogram = [](const std::map<std::size_t, std::size_t>& h) {
    json out = json::object();
    for (const auto& [bucket, count] : h) out[std::to_string(bucket)] = count;
    return out;
  };
  return json{{"record_count", s.record_count},
              {"context_tokens", {{"min", s.min_context_tokens}, {"max", s.max_context_tokens}}},
              {"clue_tokens", {{"min", s.min_clue_tokens}, {"max", s.max_clue_tokens}}},
              {"context_token_histogram", histogram(s.context_token_histogram)},
              {"clue_token_histogram", histogram(s.clue_token_histogram)},
              {"category_counts", s.category_counts}};
}

DatasetStats compute_stats(const std::vector<ClueRecord>& records, const TokenCounter& counter,
                           std::size_t context_bucket, std::size_t clue_bucket) {
  if (records.empty()) throw Error(ErrorCode::kEmptySet, "no records");
  if (context_bucket == 0 || clue_bucket == 0) throw Error(ErrorCode::kInvalidArgument, "bucket width must be positive");
  DatasetStats s;
  s.min_context_tokens = s.min_clue_tokens = std::numeric_limits<std::size_t>::max();
  for (const auto& r : records) {
    const std::size_t ctx = counter(r.context);
    const std::size_t clue = counter(r.clue);
    ++s.context_token_histogram[ctx / context_bucket * context_bucket];
    ++s.clue_token_histogram[clue / clue_bucket * clue_bucket];
    ++s.category_counts[r.category];
    s.min_context_tokens = std::min(s.min_context_tokens, ctx);
    s.max_context_tokens = std::max(s.max_context_tokens, ctx);
    s.min_clue_tokens = std::min(s.min_clue_tokens, clue);
    s.max_clue_tokens = std::max(s.max_clue_tokens, clue);
  }
  s.record_count = records.size();
  return s;
}

Split split_for(const std::string& id) {
  const uint64_t bucket = sha256_prefix64(id) % 100;
  if (bucket < 90) return Split::kTrain;
  if (bucket < 95) return Split::kValidation;
  return Split::kTest;
}

json export_training_manifest(const std::vector<ClueRecord>& records, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::string files[3];
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& r : records) {
    if (r.deleted) continue;
    const auto split = static_cast<std::size_t>(split_for(r.id));
    const json row{{"id", r.id},
                   {"instruction", "Scrivi una definizione da cruciverba per la parola chiave «" + r.keyword +
                                       "» basandoti sul testo. " + std::string(style_descriptor(r.style))},
                   {"input", r.context},
                   {"output", r.clue},
                   {"keyword", r.keyword},
                   {"style", to_string(r.style)}};
    files[split] += row.dump() + "\n";
    ++counts[split];
  }
  static constexpr const char* kNames[3] = {"train.jsonl", "val.jsonl", "test.jsonl"};
  json splits = json::object();
  static constexpr const char* kKeys[3] = {"train", "val", "test"};
  for (std::size_t i = 0; i < 3; ++i) {
    write_file_atomic(out_dir / kNames[i], files[i]);
    splits[kKeys[i]] = json{{"file", kNames[i]}, {"count", counts[i]}};
  }
  const json manifest{
      {"format", "cruciverba.training-manifest/v1"},
      {"method", "lora"},
      {"lora_r", 16},
      {"lora_alpha", 32},
      {"epochs", 3},
      {"batch", 64},
      {"lr", 3e-4},
      {"checkpoint_selection", "min_validation_loss"},
      {"base_models", {"mistralai/Mistral-7B-Instruct-v0.3", "meta-llama/Meta-Llama-3-8B-Instruct"}},
      {"inference", {{"temperature", 0.1}, {"top_p", 0.95}, {"top_k", 50}}},
      {"split_rule", "sha256(id) first 8 bytes mod 100: <90 train, <95 val, else test"},
      {"splits", splits}};
  write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace cruciverba
