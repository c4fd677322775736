#pragma once

#include <array>
#include <string>
#include <vector>

#include "estr/context_scorer.hpp"
#include "estr/eval_metrics.hpp"
#include "estr/glyph_database.hpp"
#include "estr/memory_kernel.hpp"
#include "estr/pixmap.hpp"
#include "estr/pipeline/config.hpp"
#include "estr/pipeline/records.hpp"

namespace estr::pipeline {

// Representative-frame features: a 4x4 grid of cells (L = 16), each cell
// described by the positive and negative pixel fractions of its 4x4
// sub-cells (D = 32).
inline constexpr std::size_t kProxyLength = 16;
inline constexpr std::size_t kProxyDim = 32;

memory::FeatureBatch frame_feature_proxy(const Image& frame);

struct ArmResult {
  std::string name;  // baseline, gecm, mm, gecm_mm
  bool gecm = false;
  bool mm = false;
  std::vector<TextRecord> predictions;
  eval::BleuReport bleu;
  std::array<double, eval::kMaxOrder> delta{};  // vs baseline
};

struct MemoryStageSummary {
  std::size_t records = 0;
  std::size_t batch = 1, length = kProxyLength, dim = kProxyDim;
  std::size_t k = 0;
  std::size_t patterns = 0;
  bool shape_preserved = true;
  double mean_residual_norm = 0.0;
};

struct BenchReport {
  BenchConfig config;
  std::vector<ArmResult> arms;
  MemoryStageSummary memory;
  std::size_t replacements = 0;  // total tokens changed by correction
};

// Four arms: baseline stub predictions, +GECM (local bigram correction),
// +MM (memory kernel over stacked-frame proxies; predictions unchanged) and
// both. Corpus BLEU per arm, deltas against the baseline. Deterministic for
// a fixed config; records are processed in parallel and assembled in order.
BenchReport bench(const DatasetManifest& manifest, const BenchConfig& config, const GlyphDatabase& db,
                  const ContextScorer& scorer);

// Fixed-key JSON rendering; byte-identical for identical reports.
std::string bench_report_json(const BenchReport& report);

}  // namespace estr::pipeline
