#pragma once

// Independent reference computations used only by tests. None of these call
// into the code paths they check.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "estr/event_core.hpp"
#include "estr/event_simulator.hpp"
#include "estr/utf8.hpp"

namespace oracle {

inline estr::EventStream random_stream(std::mt19937_64& rng, std::size_t max_events = 200) {
  estr::EventStream s;
  s.width = static_cast<std::uint16_t>(1 + rng() % 64);
  s.height = static_cast<std::uint16_t>(1 + rng() % 48);
  const std::size_t n = rng() % (max_events + 1);
  std::uint64_t t = rng() % 1000;
  for (std::size_t i = 0; i < n; ++i) {
    t += rng() % 3 == 0 ? 0 : rng() % 5000;
    s.events.push_back({static_cast<std::uint16_t>(rng() % s.width), static_cast<std::uint16_t>(rng() % s.height), t,
                        static_cast<std::int8_t>(rng() % 2 ? 1 : -1)});
  }
  s.source_id = "random";
  return s;
}

// Window of t by linear scan over explicitly computed boundaries:
// window i is [t_min + ceil(i*span/T), t_min + ceil((i+1)*span/T)).
// A zero span puts everything in window 0.
inline std::size_t window_by_scan(std::uint64_t t, std::uint64_t t_min, std::uint64_t t_max, std::size_t T) {
  if (t_max == t_min) return 0;
  const long double span = static_cast<long double>(t_max - t_min);
  std::size_t w = 0;
  for (std::size_t i = 0; i < T; ++i) {
    const auto start = t_min + static_cast<std::uint64_t>(std::ceil(static_cast<long double>(i) * span / T));
    if (t >= start) w = i;
  }
  return w;
}

// Clipped n-gram matches by greedy pairing of hypothesis positions with
// unused reference positions.
inline std::uint64_t greedy_matches(const std::vector<std::string>& hyp, const std::vector<std::string>& ref,
                                    std::size_t n) {
  if (hyp.size() < n || ref.size() < n) return 0;
  std::vector<bool> used(ref.size() - n + 1, false);
  std::uint64_t m = 0;
  for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
    for (std::size_t j = 0; j + n <= ref.size(); ++j) {
      if (used[j]) continue;
      if (std::equal(hyp.begin() + i, hyp.begin() + i + n, ref.begin() + j)) {
        used[j] = true;
        ++m;
        break;
      }
    }
  }
  return m;
}

struct PooledBleu {
  double bleu[4] = {0, 0, 0, 0};
  double bp = 1.0;
};

inline PooledBleu bleu_of(const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& pairs) {
  std::uint64_t match[4] = {0, 0, 0, 0}, total[4] = {0, 0, 0, 0}, hl = 0, rl = 0;
  for (const auto& [h, r] : pairs) {
    hl += h.size();
    rl += r.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      match[n - 1] += greedy_matches(h, r, n);
      total[n - 1] += h.size() >= n ? h.size() - n + 1 : 0;
    }
  }
  PooledBleu out;
  if (hl == 0) return out;
  out.bp = hl < rl ? std::exp(1.0 - double(rl) / double(hl)) : 1.0;
  double prod = 1.0;
  for (std::size_t n = 0; n < 4; ++n) {
    const double p = total[n] ? double(match[n]) / double(total[n]) : 0.0;
    if (p == 0.0) break;
    prod *= p;
    out.bleu[n] = out.bp * std::pow(prod, 1.0 / double(n + 1));
  }
  return out;
}

// Per-pixel scalar contrast-threshold simulator. Crossings are counted one
// at a time; the output is ordered by (t, frame pair, row, column, crossing).
inline std::vector<estr::EventPoint> simulate_scalar(const estr::IntensitySequence& seq, double C, double eps) {
  struct Tagged {
    std::uint64_t t;
    std::size_t pair, y, x, j;
    std::int8_t p;
  };
  std::vector<Tagged> all;
  for (std::size_t y = 0; y < seq.height; ++y) {
    for (std::size_t x = 0; x < seq.width; ++x) {
      const double base = std::log(seq.at(0, x, y) + eps);
      long long steps = 0;
      for (std::size_t k = 0; k + 1 < seq.frames.size(); ++k) {
        const double prev = std::log(seq.at(k, x, y) + eps) - base;
        const double next = std::log(seq.at(k + 1, x, y) + eps) - base;
        const double diff = next - static_cast<double>(steps) * C;
        const int sign = diff > 0 ? 1 : -1;
        const double ratio = std::abs(diff) / C;
        long long j = 0;
        while (static_cast<double>(j + 1) <= ratio + estr::kCrossingSlack) {
          ++j;
          const double lag = sign > 0 ? prev - static_cast<double>(steps) * C : static_cast<double>(steps) * C - prev;
          const double travel = std::abs(next - prev);
          double frac = travel > 0 ? (static_cast<double>(j) * C - lag) / travel : 1.0;
          frac = std::min(1.0, std::max(0.0, frac));
          const std::uint64_t t0 = seq.timestamps[k], t1 = seq.timestamps[k + 1];
          const std::uint64_t t =
              t0 + std::min<std::uint64_t>(t1 - t0, static_cast<std::uint64_t>(std::floor(frac * double(t1 - t0))));
          all.push_back({t, k, y, x, static_cast<std::size_t>(j), static_cast<std::int8_t>(sign)});
        }
        steps += sign * j;
      }
    }
  }
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) {
    return std::tie(a.t, a.pair, a.y, a.x, a.j) < std::tie(b.t, b.pair, b.y, b.x, b.j);
  });
  std::vector<estr::EventPoint> out;
  for (const auto& e : all) out.push_back({static_cast<std::uint16_t>(e.x), static_cast<std::uint16_t>(e.y), e.t, e.p});
  return out;
}

// Random piecewise-constant sequence, at most 16x16x5.
inline estr::IntensitySequence random_sequence(std::mt19937_64& rng) {
  estr::IntensitySequence seq;
  seq.width = static_cast<std::uint16_t>(1 + rng() % 16);
  seq.height = static_cast<std::uint16_t>(1 + rng() % 16);
  const std::size_t frames = 1 + rng() % 5;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uint64_t t = rng() % 100;
  for (std::size_t k = 0; k < frames; ++k) {
    std::vector<double> f(static_cast<std::size_t>(seq.width) * seq.height);
    for (double& v : f) v = u(rng);
    seq.frames.push_back(std::move(f));
    seq.timestamps.push_back(t);
    t += 1 + rng() % 10000;
  }
  return seq;
}

// Top-K by full sort of independently computed cosines, ties by index.
struct TopK {
  std::vector<std::size_t> indices;
  std::vector<double> scores;
};

inline TopK topk_full_sort(const double* q, const std::vector<double>& patterns, std::size_t dim, std::size_t k) {
  const std::size_t m = patterns.size() / dim;
  std::vector<std::pair<double, std::size_t>> all;
  double qq = 0;
  for (std::size_t d = 0; d < dim; ++d) qq += q[d] * q[d];
  for (std::size_t j = 0; j < m; ++j) {
    double pp = 0, dot = 0;
    for (std::size_t d = 0; d < dim; ++d) {
      pp += patterns[j * dim + d] * patterns[j * dim + d];
      dot += q[d] * patterns[j * dim + d];
    }
    const double c = (std::sqrt(qq) < 1e-12 || std::sqrt(pp) < 1e-12) ? 0.0 : dot / (std::sqrt(qq) * std::sqrt(pp));
    all.push_back({std::max(-1.0, std::min(1.0, c)), j});
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  TopK out;
  for (std::size_t i = 0; i < k; ++i) {
    out.indices.push_back(all[i].second);
    out.scores.push_back(all[i].first);
  }
  return out;
}

// Content units as a plain scan: each CJK ideograph alone, lowercased ASCII
// letter runs, everything else skipped.
inline std::vector<std::string> content_units(const std::string& text) {
  std::vector<std::string> out;
  std::string word;
  for (const auto& unit : estr::utf8::decode(text)) {
    const char32_t cp = unit.value;
    if (cp < 128 && std::isalpha(static_cast<int>(cp))) {
      word += static_cast<char>(std::tolower(static_cast<int>(cp)));
      continue;
    }
    if (!word.empty()) out.push_back(word), word.clear();
    if (estr::utf8::is_cjk_ideograph(cp)) out.push_back(estr::utf8::encode(cp));
  }
  if (!word.empty()) out.push_back(word);
  return out;
}

// Add-one bigram model counted directly from sentences; unknown units share
// one bucket, V = distinct units + end + unknown.
struct BigramCounts {
  std::map<std::pair<std::string, std::string>, double> pair;
  std::map<std::string, double> hist;
  std::map<std::string, bool> known;

  explicit BigramCounts(const std::vector<std::string>& sentences) {
    for (const auto& s : sentences) {
      std::string prev = "<s>";
      auto units = content_units(s);
      units.push_back("</s>");
      for (const auto& u : units) {
        pair[{prev, u}] += 1;
        hist[prev] += 1;
        if (u != "</s>") known[u] = true;
        prev = u;
      }
    }
  }
  std::string map(const std::string& u) const { return known.count(u) ? u : "<unk>"; }
  double logp(std::vector<std::string> units) const {
    const double V = double(known.size()) + 2.0;
    double total = 0;
    std::string prev = "<s>";
    units.push_back("</s>");
    for (const auto& raw : units) {
      const std::string u = raw == "</s>" ? raw : map(raw);
      const auto it = pair.find({prev, u});
      const auto ht = hist.find(prev);
      total += std::log(((it == pair.end() ? 0.0 : it->second) + 1.0) / ((ht == hist.end() ? 0.0 : ht->second) + V));
      prev = u;
    }
    return total;
  }
};

}  // namespace oracle
