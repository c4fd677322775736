#include "estr/memory_kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>

#include "estr/error.hpp"

namespace estr::memory {
namespace {

double norm(const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(std::string("memory bank: non-finite value in ") + what);
  }
}

void select_row(const double* query, const MemoryBank& bank, const std::vector<double>& pattern_norms,
                std::size_t k, std::size_t* idx_out, double* score_out, double* weight_out,
                std::vector<std::pair<double, std::size_t>>& scratch) {
  const std::size_t m = bank.pattern_count();
  const double qn = norm(query, kPatternDim);
  scratch.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    if (qn >= kZeroNorm && pattern_norms[j] >= kZeroNorm) {
      const double* p = bank.pattern(j);
      double dot = 0.0;
      for (std::size_t d = 0; d < kPatternDim; ++d) dot += query[d] * p[d];
      s = std::clamp(dot / (qn * pattern_norms[j]), -1.0, 1.0);
    }
    scratch[j] = {s, j};
  }
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), scratch.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  const double top = scratch[0].first;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    idx_out[i] = scratch[i].second;
    score_out[i] = scratch[i].first;
    weight_out[i] = std::exp(scratch[i].first - top);
    total += weight_out[i];
  }
  for (std::size_t i = 0; i < k; ++i) weight_out[i] /= total;
}

void check_k(std::size_t k, const MemoryBank& bank) {
  if (k == 0) throw Error("retrieve: K must be at least 1");
  if (k > bank.pattern_count()) {
    throw Error("retrieve: K = " + std::to_string(k) + " exceeds pattern count " +
                std::to_string(bank.pattern_count()));
  }
}

template <typename Fn>
void for_rows(std::size_t rows, Execution exec, Fn&& fn) {
  if (exec == Execution::parallel) {
#pragma omp parallel
    {
      std::vector<std::pair<double, std::size_t>> scratch;
#pragma omp for schedule(static)
      for (std::int64_t r = 0; r < static_cast<std::int64_t>(rows); ++r) fn(static_cast<std::size_t>(r), scratch);
    }
  } else {
    std::vector<std::pair<double, std::size_t>> scratch;
    for (std::size_t r = 0; r < rows; ++r) fn(r, scratch);
  }
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

}  // namespace

void Linear::apply(const double* x, double* y) const {
  for (std::size_t o = 0; o < out; ++o) {
    const double* w = weight.data() + o * in;
    double s = bias[o];
    for (std::size_t i = 0; i < in; ++i) s += w[i] * x[i];
    y[o] = s;
  }
}

void validate(const MemoryBank& bank) {
  if (bank.patterns.empty() || bank.patterns.size() % kPatternDim != 0) {
    throw Error("memory bank: patterns must be M x 128 with M >= 1");
  }
  const std::size_t d = bank.down.in;
  if (d == 0) throw Error("memory bank: feature dimension must be at least 1");
  if (bank.down.out != kPatternDim || bank.down.weight.size() != kPatternDim * d ||
      bank.down.bias.size() != kPatternDim) {
    throw Error("memory bank: down projection must map D -> 128");
  }
  if (bank.up.in != kPatternDim || bank.up.out != d || bank.up.weight.size() != d * kPatternDim ||
      bank.up.bias.size() != d) {
    throw Error("memory bank: up projection must map 128 -> D");
  }
  check_finite(bank.patterns, "patterns");
  check_finite(bank.down.weight, "down weight");
  check_finite(bank.down.bias, "down bias");
  check_finite(bank.up.weight, "up weight");
  check_finite(bank.up.bias, "up bias");
}

void validate(const FeatureBatch& features) {
  if (features.batch == 0 || features.length == 0 || features.dim == 0) {
    throw Error("feature batch dimensions must be at least 1");
  }
  if (features.data.size() != features.batch * features.length * features.dim) {
    throw Error("feature batch data size does not match its shape");
  }
  for (double x : features.data) {
    if (!std::isfinite(x)) throw Error("feature batch contains a non-finite value");
  }
}

MemoryBank init_bank(std::size_t feature_dim, std::size_t pattern_count, std::uint64_t seed) {
  if (feature_dim == 0 || pattern_count == 0) throw Error("init_bank: D and M must be at least 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto fill = [&](std::vector<double>& v, std::size_t n, double scale) {
    v.resize(n);
    for (double& x : v) x = normal(rng) * scale;
  };

  MemoryBank bank;
  fill(bank.patterns, pattern_count * kPatternDim, 1.0 / std::sqrt(double(kPatternDim)));
  bank.down = {feature_dim, kPatternDim, {}, std::vector<double>(kPatternDim, 0.0)};
  fill(bank.down.weight, kPatternDim * feature_dim, 1.0 / std::sqrt(double(feature_dim)));
  bank.up = {kPatternDim, feature_dim, {}, std::vector<double>(feature_dim, 0.0)};
  fill(bank.up.weight, feature_dim * kPatternDim, 1.0 / std::sqrt(double(kPatternDim)));
  return bank;
}

double cosine(const double* u, const double* v, std::size_t n) {
  const double nu = norm(u, n);
  const double nv = norm(v, n);
  if (nu < kZeroNorm || nv < kZeroNorm) return 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) dot += u[i] * v[i];
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

RetrievalResult retrieve_projected(const std::vector<double>& queries, const MemoryBank& bank, std::size_t k,
                                   Execution exec) {
  validate(bank);
  check_k(k, bank);
  if (queries.size() % kPatternDim != 0) throw Error("retrieve: queries must be rows x 128");
  RetrievalResult res;
  res.rows = queries.size() / kPatternDim;
  res.k = k;
  res.indices.resize(res.rows * k);
  res.scores.resize(res.rows * k);
  res.weights.resize(res.rows * k);

  std::vector<double> pattern_norms(bank.pattern_count());
  for (std::size_t j = 0; j < pattern_norms.size(); ++j) pattern_norms[j] = norm(bank.pattern(j), kPatternDim);

  for_rows(res.rows, exec, [&](std::size_t r, auto& scratch) {
    select_row(queries.data() + r * kPatternDim, bank, pattern_norms, k, res.indices.data() + r * k,
               res.scores.data() + r * k, res.weights.data() + r * k, scratch);
  });
  return res;
}

RetrievalResult retrieve(const FeatureBatch& features, const MemoryBank& bank, std::size_t k, Execution exec) {
  validate(features);
  if (features.dim != bank.feature_dim()) {
    throw Error("retrieve: feature dimension " + std::to_string(features.dim) + " does not match bank " +
                std::to_string(bank.feature_dim()));
  }
  check_k(k, bank);
  std::vector<double> queries(features.rows() * kPatternDim);
  for (std::size_t r = 0; r < features.rows(); ++r) bank.down.apply(features.row(r), queries.data() + r * kPatternDim);
  return retrieve_projected(queries, bank, k, exec);
}

FeatureBatch enhance(const FeatureBatch& features, const MemoryBank& bank, std::size_t k, Execution exec) {
  const RetrievalResult sel = retrieve(features, bank, k, exec);
  FeatureBatch out = features;
  const std::size_t d = features.dim;
  for_rows(features.rows(), exec, [&](std::size_t r, auto&) {
    double mixed[kPatternDim] = {};
    for (std::size_t i = 0; i < k; ++i) {
      const double w = sel.weights[r * k + i];
      const double* p = bank.pattern(sel.indices[r * k + i]);
      for (std::size_t c = 0; c < kPatternDim; ++c) mixed[c] += w * p[c];
    }
    std::vector<double> lifted(d);
    bank.up.apply(mixed, lifted.data());
    double* y = out.row(r);
    for (std::size_t c = 0; c < d; ++c) y[c] += lifted[c];
  });
  return out;
}

std::vector<std::uint8_t> serialize_bank(const MemoryBank& bank) {
  validate(bank);
  const std::size_t d = bank.feature_dim();
  const std::size_t m = bank.pattern_count();
  if (d > 0xFFFF || m > 0xFFFF) throw Error("memory bank: D and M must fit in 16 bits");
  std::vector<std::uint8_t> out = {'M', 'B', 'K', '1', static_cast<std::uint8_t>(d), static_cast<std::uint8_t>(d >> 8),
                                   static_cast<std::uint8_t>(m), static_cast<std::uint8_t>(m >> 8)};
  for (const auto* v : {&bank.patterns, &bank.down.weight, &bank.down.bias, &bank.up.weight, &bank.up.bias}) {
    for (double x : *v) put_f64(out, x);
  }
  return out;
}

MemoryBank deserialize_bank(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), "MBK1", 4) != 0) throw Error("memory bank: bad magic");
  const std::size_t d = bytes[4] | (bytes[5] << 8);
  const std::size_t m = bytes[6] | (bytes[7] << 8);
  const std::size_t values = m * kPatternDim + 2 * kPatternDim * d + kPatternDim + d;
  if (bytes.size() != 8 + 8 * values) throw Error("memory bank: size does not match header");
  std::size_t pos = 8;
  const auto take = [&](std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (double& x : v) {
      std::uint64_t bits = 0;
      for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[pos + i];
      x = std::bit_cast<double>(bits);
      pos += 8;
    }
  };
  MemoryBank bank;
  bank.down = {d, kPatternDim, {}, {}};
  bank.up = {kPatternDim, d, {}, {}};
  take(bank.patterns, m * kPatternDim);
  take(bank.down.weight, kPatternDim * d);
  take(bank.down.bias, kPatternDim);
  take(bank.up.weight, d * kPatternDim);
  take(bank.up.bias, d);
  validate(bank);
  return bank;
}

void save_bank(const std::string& path, const MemoryBank& bank) {
  const auto bytes = serialize_bank(bank);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

MemoryBank load_bank(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return deserialize_bank({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

}  // namespace estr::memory
