#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "estr/execution.hpp"

namespace estr::eval {

inline constexpr std::size_t kMaxOrder = 4;

// CJK ideographs as single tokens, ASCII letter runs lowercased, digits one
// token each; everything else is dropped. Invalid UTF-8 bytes are skipped.
std::vector<std::string> segment(std::string_view text);

// Clipped n-gram match counts and totals for one pair (or pooled).
struct NgramCounts {
  std::array<std::uint64_t, kMaxOrder> matches{};
  std::array<std::uint64_t, kMaxOrder> totals{};
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;

  NgramCounts& operator+=(const NgramCounts& o);
};

NgramCounts count_ngrams(const std::vector<std::string>& hyp, const std::vector<std::string>& ref);

struct BleuReport {
  std::array<double, kMaxOrder> bleu{};        // BLEU-1..4
  std::array<double, kMaxOrder> precisions{};  // clipped modified precisions
  double brevity_penalty = 1.0;
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;
};

// Unsmoothed BLEU from counts. A zero precision zeroes that order and all
// higher ones. An empty hypothesis scores 0 everywhere with BP reported as 1.
BleuReport bleu_from_counts(const NgramCounts& counts);

BleuReport bleu(std::string_view hyp, std::string_view ref);

using TextPair = std::pair<std::string, std::string>;  // (hypothesis, reference)

// Pools counts over all pairs, then applies the formulas once. The parallel
// path reduces in pair order and is bit-identical.
BleuReport corpus_bleu(const std::vector<TextPair>& pairs, Execution exec = Execution::serial);

// Mean of per-pair sentence BLEU, for comparison with per-sample averaging.
std::array<double, kMaxOrder> mean_sentence_bleu(const std::vector<TextPair>& pairs);

// Lowercased ASCII letters and digits only.
std::string normalize_word(std::string_view text);

double word_accuracy(const std::vector<TextPair>& pairs);

struct SplitAssignment {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

struct SplitSizes {
  std::size_t train = 0, val = 0, test = 0;
};

// train = floor(0.7 n), val = round-half-up(0.1 n), test = remainder.
SplitSizes split_sizes(std::size_t n);

// Deterministic Fisher-Yates shuffle by seed, then sliced by split_sizes.
SplitAssignment split_dataset(const std::vector<std::string>& ids, std::uint64_t seed);

}  // namespace estr::eval
