#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace cruciverba {

using TokenList = std::vector<std::string>;

// NFC, lowercase, split on anything that is not a letter, digit or combining
// mark. Accents are kept.
TokenList tokenize(std::string_view text);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Harmonic mean (beta = 1); 0 when precision + recall is 0.
RougeScore make_score(double precision, double recall);

// Clipped n-gram overlap. Empty n-gram sets give zeros.
RougeScore rouge_n(const TokenList& candidate, const TokenList& reference, int n);

std::size_t lcs_length(const TokenList& a, const TokenList& b);

RougeScore rouge_l(const TokenList& candidate, const TokenList& reference);

struct CorpusReport {
  double mean_rouge1 = 0.0;
  double mean_rouge2 = 0.0;
  double mean_rougeL = 0.0;
  std::size_t pair_count = 0;
};

nlohmann::json to_json(const CorpusReport& r);

struct RougeTriple {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;
};

RougeTriple score_pair(std::string_view candidate, std::string_view reference);

struct CluePair {
  std::string clue;     // candidate
  std::string context;  // reference
};

// Arithmetic means of per-pair F1. Throws EmptyCorpus.
CorpusReport score_corpus(const std::vector<CluePair>& pairs);

struct KeyedClue {
  std::string key;  // context id
  std::string clue;
};

// set_a holds candidates and set_b references; both must contain the same
// keys, each exactly once. Throws KeyMismatch or EmptyCorpus.
CorpusReport compare_cluesets(const std::vector<KeyedClue>& set_a, const std::vector<KeyedClue>& set_b);

// Fixed-width table row: label, R-1, R-2, R-L, pairs.
std::string format_report_row(std::string_view label, const CorpusReport& r);
std::string format_report_header();

}  // namespace cruciverba
