#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "estr/execution.hpp"

namespace estr::memory {

inline constexpr std::size_t kPatternDim = 128;
inline constexpr std::size_t kDefaultPatternCount = 256;
inline constexpr std::size_t kDefaultTopK = 64;
// Norms below this are treated as zero and give cosine 0.
inline constexpr double kZeroNorm = 1e-12;

// B x L x D, row-major.
struct FeatureBatch {
  std::size_t batch = 0;
  std::size_t length = 0;
  std::size_t dim = 0;
  std::vector<double> data;

  FeatureBatch() = default;
  FeatureBatch(std::size_t b, std::size_t l, std::size_t d, double fill = 0.0)
      : batch(b), length(l), dim(d), data(b * l * d, fill) {}

  std::size_t rows() const { return batch * length; }
  const double* row(std::size_t r) const { return data.data() + r * dim; }
  double* row(std::size_t r) { return data.data() + r * dim; }
};

// y = W x + b with W stored out x in, row-major.
struct Linear {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  void apply(const double* x, double* y) const;
};

struct MemoryBank {
  std::vector<double> patterns;  // M x 128, row-major
  Linear down;                   // D -> 128
  Linear up;                     // 128 -> D

  std::size_t feature_dim() const { return down.in; }
  std::size_t pattern_count() const { return patterns.size() / kPatternDim; }
  const double* pattern(std::size_t m) const { return patterns.data() + m * kPatternDim; }
};

// Throws estr::Error when shapes disagree or a parameter is not finite.
void validate(const MemoryBank& bank);
void validate(const FeatureBatch& features);

// Patterns ~ N(0,1)/sqrt(128); projection weights ~ N(0,1)/sqrt(fan_in);
// zero biases. Deterministic for a fixed seed.
MemoryBank init_bank(std::size_t feature_dim, std::size_t pattern_count, std::uint64_t seed);

// Cosine similarity, 0 when either norm is below kZeroNorm; clamped to [-1, 1].
double cosine(const double* u, const double* v, std::size_t n);

struct RetrievalResult {
  std::size_t rows = 0;  // B * L
  std::size_t k = 0;
  std::vector<std::size_t> indices;  // rows x K
  std::vector<double> scores;        // non-increasing along K
  std::vector<double> weights;       // softmax of scores along K
};

// Top-K patterns per row of already projected queries (rows x 128).
RetrievalResult retrieve_projected(const std::vector<double>& queries, const MemoryBank& bank, std::size_t k,
                                   Execution exec = Execution::serial);

RetrievalResult retrieve(const FeatureBatch& features, const MemoryBank& bank, std::size_t k,
                         Execution exec = Execution::serial);

// features + up(sum_i w_i * pattern[idx_i]), same shape as the input.
FeatureBatch enhance(const FeatureBatch& features, const MemoryBank& bank, std::size_t k,
                     Execution exec = Execution::serial);

// Layout: "MBK1", D u16, M u16, then little-endian f64 values: patterns,
// down weight, down bias, up weight, up bias (matrices row-major).
std::vector<std::uint8_t> serialize_bank(const MemoryBank& bank);
MemoryBank deserialize_bank(const std::vector<std::uint8_t>& bytes);
void save_bank(const std::string& path, const MemoryBank& bank);
MemoryBank load_bank(const std::string& path);

}  // namespace estr::memory
