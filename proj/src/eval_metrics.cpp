#include "estr/eval_metrics.hpp"

#include <cmath>
#include <map>
#include <random>
#include <unordered_set>

#include "estr/error.hpp"
#include "estr/utf8.hpp"

namespace estr::eval {

std::vector<std::string> segment(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  const auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  for (const auto& cp : utf8::decode_lenient(text)) {
    if (utf8::is_ascii_letter(cp.value)) {
      word.push_back(static_cast<char>(cp.value >= 'A' && cp.value <= 'Z' ? cp.value - 'A' + 'a' : cp.value));
      continue;
    }
    flush();
    if (utf8::is_ascii_digit(cp.value)) {
      out.emplace_back(1, static_cast<char>(cp.value));
    } else if (utf8::is_cjk_ideograph(cp.value)) {
      out.push_back(std::string(text.substr(cp.offset, cp.length)));
    }
  }
  flush();
  return out;
}

NgramCounts& NgramCounts::operator+=(const NgramCounts& o) {
  for (std::size_t n = 0; n < kMaxOrder; ++n) {
    matches[n] += o.matches[n];
    totals[n] += o.totals[n];
  }
  hyp_len += o.hyp_len;
  ref_len += o.ref_len;
  return *this;
}

NgramCounts count_ngrams(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
  NgramCounts c;
  c.hyp_len = hyp.size();
  c.ref_len = ref.size();
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    if (hyp.size() < n) break;
    std::map<std::vector<std::string>, std::int64_t> ref_counts;
    for (std::size_t i = 0; i + n <= ref.size(); ++i) {
      ++ref_counts[std::vector<std::string>(ref.begin() + i, ref.begin() + i + n)];
    }
    std::map<std::vector<std::string>, std::int64_t> hyp_counts;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
      ++hyp_counts[std::vector<std::string>(hyp.begin() + i, hyp.begin() + i + n)];
    }
    std::uint64_t matched = 0;
    for (const auto& [gram, count] : hyp_counts) {
      const auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += static_cast<std::uint64_t>(std::min(count, it->second));
    }
    c.matches[n - 1] = matched;
    c.totals[n - 1] = hyp.size() - n + 1;
  }
  return c;
}

BleuReport bleu_from_counts(const NgramCounts& c) {
  BleuReport r;
  r.hyp_len = c.hyp_len;
  r.ref_len = c.ref_len;
  if (c.hyp_len == 0) return r;
  if (c.hyp_len < c.ref_len) {
    r.brevity_penalty = std::exp(1.0 - static_cast<double>(c.ref_len) / static_cast<double>(c.hyp_len));
  }
  double log_sum = 0.0;
  bool alive = true;
  for (std::size_t n = 0; n < kMaxOrder; ++n) {
    r.precisions[n] = c.totals[n] == 0 ? 0.0 : static_cast<double>(c.matches[n]) / static_cast<double>(c.totals[n]);
    if (r.precisions[n] <= 0.0) alive = false;
    if (!alive) continue;
    log_sum += std::log(r.precisions[n]);
    r.bleu[n] = r.brevity_penalty * std::exp(log_sum / static_cast<double>(n + 1));
  }
  return r;
}

BleuReport bleu(std::string_view hyp, std::string_view ref) {
  return bleu_from_counts(count_ngrams(segment(hyp), segment(ref)));
}

BleuReport corpus_bleu(const std::vector<TextPair>& pairs, Execution exec) {
  if (pairs.empty()) throw Error("corpus_bleu: no pairs");
  std::vector<NgramCounts> per(pairs.size());
  const auto one = [&](std::int64_t i) { per[i] = count_ngrams(segment(pairs[i].first), segment(pairs[i].second)); };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(pairs.size()); ++i) one(i);
  } else {
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(pairs.size()); ++i) one(i);
  }
  NgramCounts pooled;
  for (const auto& c : per) pooled += c;
  return bleu_from_counts(pooled);
}

std::array<double, kMaxOrder> mean_sentence_bleu(const std::vector<TextPair>& pairs) {
  if (pairs.empty()) throw Error("mean_sentence_bleu: no pairs");
  std::array<double, kMaxOrder> sum{};
  for (const auto& [hyp, ref] : pairs) {
    const BleuReport r = bleu(hyp, ref);
    for (std::size_t n = 0; n < kMaxOrder; ++n) sum[n] += r.bleu[n];
  }
  for (double& s : sum) s /= static_cast<double>(pairs.size());
  return sum;
}

std::string normalize_word(std::string_view text) {
  std::string out;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (utf8::is_ascii_digit(c)) {
      out.push_back(ch);
    } else if (utf8::is_ascii_letter(c)) {
      out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    }
  }
  return out;
}

double word_accuracy(const std::vector<TextPair>& pairs) {
  if (pairs.empty()) throw Error("word_accuracy: no pairs");
  std::size_t hits = 0;
  for (const auto& [hyp, gt] : pairs) hits += normalize_word(hyp) == normalize_word(gt) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

SplitSizes split_sizes(std::size_t n) {
  SplitSizes s;
  s.train = n * 7 / 10;
  s.val = (n + 5) / 10;
  s.test = n - s.train - s.val;
  return s;
}

SplitAssignment split_dataset(const std::vector<std::string>& ids, std::uint64_t seed) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw Error("split_dataset: duplicate id '" + id + "'");
  }
  std::vector<std::string> order = ids;
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    // unbiased draw in [0, i)
    const std::uint64_t bound = i;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r = rng();
    while (r >= limit) r = rng();
    std::swap(order[i - 1], order[r % bound]);
  }
  const SplitSizes sz = split_sizes(order.size());
  SplitAssignment out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sz.train));
  out.val.assign(order.begin() + static_cast<std::ptrdiff_t>(sz.train),
                 order.begin() + static_cast<std::ptrdiff_t>(sz.train + sz.val));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(sz.train + sz.val), order.end());
  return out;
}

}  // namespace estr::eval
