#include "cruciverba/rouge.h"

#include <algorithm>
#include <cstdio>
#include <map>

#include "cruciverba/error.h"
#include "cruciverba/text.h"

namespace cruciverba {

TokenList tokenize(std::string_view input) {
  TokenList out;
  std::u32string current;
  for (char32_t c : text::decode(text::to_lower(text::nfc(input)))) {
    if (text::is_letter(c) || text::is_digit(c) || (text::is_mark(c) && !current.empty())) {
      current.push_back(c);
    } else if (!current.empty()) {
      out.push_back(text::encode(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(text::encode(current));
  return out;
}

RougeScore make_score(double precision, double recall) {
  RougeScore s{precision, recall, 0.0};
  if (precision + recall > 0.0) s.f1 = 2.0 * precision * recall / (precision + recall);
  return s;
}

RougeScore rouge_n(const TokenList& candidate, const TokenList& reference, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be at least 1");
  const auto un = static_cast<std::size_t>(n);
  if (candidate.size() < un || reference.size() < un) return {};
  auto grams = [un](const TokenList& tokens) {
    std::map<std::vector<std::string>, int> counts;
    for (std::size_t i = 0; i + un <= tokens.size(); ++i) {
      ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                        tokens.begin() + static_cast<std::ptrdiff_t>(i + un))];
    }
    return counts;
  };
  const auto cand = grams(candidate);
  const auto ref = grams(reference);
  long overlap = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  const double cand_total = static_cast<double>(candidate.size() - un + 1);
  const double ref_total = static_cast<double>(reference.size() - un + 1);
  return make_score(static_cast<double>(overlap) / cand_total, static_cast<double>(overlap) / ref_total);
}

std::size_t lcs_length(const TokenList& a, const TokenList& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(const TokenList& candidate, const TokenList& reference) {
  if (candidate.empty() || reference.empty()) return {};
  const auto l = static_cast<double>(lcs_length(candidate, reference));
  return make_score(l / static_cast<double>(candidate.size()), l / static_cast<double>(reference.size()));
}

nlohmann::json to_json(const CorpusReport& r) {
  return nlohmann::json{{"mean_rouge1", r.mean_rouge1},
                        {"mean_rouge2", r.mean_rouge2},
                        {"mean_rougeL", r.mean_rougeL},
                        {"pair_count", r.pair_count}};
}

RougeTriple score_pair(std::string_view candidate, std::string_view reference) {
  const TokenList c = tokenize(candidate);
  const TokenList r = tokenize(reference);
  return RougeTriple{rouge_n(c, r, 1), rouge_n(c, r, 2), rouge_l(c, r)};
}

namespace {

CorpusReport average(const std::vector<RougeTriple>& scores) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyCorpus, "no pairs to score");
  CorpusReport r;
  for (const auto& s : scores) {
    r.mean_rouge1 += s.rouge1.f1;
    r.mean_rouge2 += s.rouge2.f1;
    r.mean_rougeL += s.rougeL.f1;
  }
  const auto n = static_cast<double>(scores.size());
  r.mean_rouge1 /= n;
  r.mean_rouge2 /= n;
  r.mean_rougeL /= n;
  r.pair_count = scores.size();
  return r;
}

std::map<std::string, std::string> index_by_key(const std::vector<KeyedClue>& set, const char* name) {
  std::map<std::string, std::string> out;
  for (const auto& kc : set) {
    if (!out.emplace(kc.key, kc.clue).second) {
      throw Error(ErrorCode::kKeyMismatch, std::string("duplicate key '") + kc.key + "' in " + name);
    }
  }
  return out;
}

}  // namespace

CorpusReport score_corpus(const std::vector<CluePair>& pairs) {
  std::vector<RougeTriple> scores;
  scores.reserve(pairs.size());
  for (const auto& p : pairs) scores.push_back(score_pair(p.clue, p.context));
  return average(scores);
}

CorpusReport compare_cluesets(const std::vector<KeyedClue>& set_a, const std::vector<KeyedClue>& set_b) {
  const auto a = index_by_key(set_a, "set_a");
  const auto b = index_by_key(set_b, "set_b");
  for (const auto& [key, _] : a) {
    if (!b.contains(key)) throw Error(ErrorCode::kKeyMismatch, "key '" + key + "' missing from set_b");
  }
  for (const auto& [key, _] : b) {
    if (!a.contains(key)) throw Error(ErrorCode::kKeyMismatch, "key '" + key + "' missing from set_a");
  }
  std::vector<RougeTriple> scores;
  for (const auto& [key, clue] : a) scores.push_back(score_pair(clue, b.at(key)));
  return average(scores);
}

std::string format_report_header() {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-24s %8s %8s %8s %7s", "comparison", "ROUGE-1", "ROUGE-2", "ROUGE-L", "pairs");
  return buf;
}

std::string format_report_row(std::string_view label, const CorpusReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-24.24s %8.3f %8.3f %8.3f %7zu", std::string(label).c_str(), r.mean_rouge1,
                r.mean_rouge2, r.mean_rougeL, r.pair_count);
  return buf;
}

}  // namespace cruciverba
