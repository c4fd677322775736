#include "estr/pipeline/bench.hpp"

#include <cmath>

#include <json.hpp>

#include "estr/corrector.hpp"
#include "estr/error.hpp"
#include "estr/frame_stacker.hpp"
#include "estr/pipeline/stub_recognizer.hpp"

namespace estr::pipeline {

memory::FeatureBatch frame_feature_proxy(const Image& frame) {
  constexpr std::size_t kGrid = 4;
  constexpr std::size_t kSub = 4;
  constexpr std::size_t kCells = kGrid * kSub;  // sub-cells per axis
  std::array<double, kCells * kCells> pos{}, neg{}, area{};
  for (std::uint32_t y = 0; y < frame.height; ++y) {
    const std::size_t sy = static_cast<std::size_t>(y) * kCells / frame.height;
    for (std::uint32_t x = 0; x < frame.width; ++x) {
      const std::size_t sx = static_cast<std::size_t>(x) * kCells / frame.width;
      const std::size_t s = sy * kCells + sx;
      const Rgb c = frame.at(x, y);
      area[s] += 1;
      if (c == kPositiveColor) pos[s] += 1;
      if (c == kNegativeColor) neg[s] += 1;
    }
  }
  memory::FeatureBatch f(1, kProxyLength, kProxyDim);
  for (std::size_t cy = 0; cy < kGrid; ++cy) {
    for (std::size_t cx = 0; cx < kGrid; ++cx) {
      double* row = f.row(cy * kGrid + cx);
      for (std::size_t j = 0; j < kSub * kSub; ++j) {
        const std::size_t s = (cy * kSub + j / kSub) * kCells + cx * kSub + j % kSub;
        row[2 * j] = area[s] > 0 ? pos[s] / area[s] : 0.0;
        row[2 * j + 1] = area[s] > 0 ? neg[s] / area[s] : 0.0;
      }
    }
  }
  return f;
}

namespace {

eval::BleuReport score_arm(const std::vector<TextRecord>& preds, const DatasetManifest& manifest) {
  std::vector<eval::TextPair> pairs;
  pairs.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) pairs.emplace_back(preds[i].text, manifest.records[i].label);
  return eval::corpus_bleu(pairs);
}

}  // namespace

BenchReport bench(const DatasetManifest& manifest, const BenchConfig& config, const GlyphDatabase& db,
                  const ContextScorer& scorer) {
  validate(config);
  if (manifest.records.empty()) throw Error("bench: manifest has no records");
  BenchReport report;
  report.config = config;

  BackendSpec stub;
  stub.kind = BackendKind::oracle_with_noise;
  stub.noise_rate = config.noise_rate;
  stub.seed = config.seed;
  const std::vector<TextRecord> baseline = run_stub_recognizer(manifest, stub, db);

  const auto n = static_cast<std::int64_t>(baseline.size());
  std::vector<TextRecord> corrected(baseline.size());
  std::vector<std::size_t> changed(baseline.size(), 0);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) {
    const CorrectionReport r = correct(baseline[i].text, db, scorer, config.margin);
    corrected[i] = {baseline[i].id, r.corrected};
    changed[i] = r.replacements();
  }
  for (std::size_t c : changed) report.replacements += c;

  const memory::MemoryBank bank = memory::init_bank(kProxyDim, config.memory_patterns, config.seed);
  std::vector<double> residual(baseline.size(), 0.0);
  std::vector<char> same_shape(baseline.size(), 1);
  std::vector<std::string> failures(baseline.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      const EventStream stream = read_events_file(manifest.records[i].events).stream;
      const FrameStack frames = stack(stream, config.t_count);
      const memory::FeatureBatch features = frame_feature_proxy(representative_frame(frames));
      const memory::FeatureBatch enhanced = memory::enhance(features, bank, config.k);
      same_shape[i] = enhanced.batch == features.batch && enhanced.length == features.length &&
                      enhanced.dim == features.dim;
      double sq = 0.0;
      for (std::size_t j = 0; j < features.data.size(); ++j) {
        const double d = enhanced.data[j] - features.data[j];
        sq += d * d;
      }
      residual[i] = std::sqrt(sq);
    } catch (const std::exception& e) {
      failures[i] = manifest.records[i].id + ": " + e.what();
    }
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw Error("bench memory stage: " + f);
  }
  report.memory.records = baseline.size();
  report.memory.k = config.k;
  report.memory.patterns = config.memory_patterns;
  double total = 0.0;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    total += residual[i];
    report.memory.shape_preserved = report.memory.shape_preserved && same_shape[i];
  }
  report.memory.mean_residual_norm = total / static_cast<double>(baseline.size());

  report.arms = {{"baseline", false, false, baseline, {}, {}},
                 {"gecm", true, false, corrected, {}, {}},
                 {"mm", false, true, baseline, {}, {}},
                 {"gecm_mm", true, true, corrected, {}, {}}};
  for (auto& arm : report.arms) arm.bleu = score_arm(arm.predictions, manifest);
  for (auto& arm : report.arms) {
    for (std::size_t k = 0; k < eval::kMaxOrder; ++k) arm.delta[k] = arm.bleu.bleu[k] - report.arms[0].bleu.bleu[k];
  }
  return report;
}

std::string bench_report_json(const BenchReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  const BenchConfig& c = report.config;
  j["config"] = {{"t_count", c.t_count}, {"k", c.k},         {"template", c.prompt_template},
                 {"max_candidates", c.max_candidates},       {"margin", c.margin},
                 {"seed", c.seed},       {"noise_rate", c.noise_rate}, {"memory_patterns", c.memory_patterns}};
  j["aggregation"] = "corpus";
  j["arms"] = ordered_json::array();
  for (const auto& arm : report.arms) {
    ordered_json a;
    a["name"] = arm.name;
    a["gecm"] = arm.gecm;
    a["mm"] = arm.mm;
    a["bleu"] = arm.bleu.bleu;
    a["delta"] = arm.delta;
    a["brevity_penalty"] = arm.bleu.brevity_penalty;
    j["arms"].push_back(a);
  }
  j["replacements"] = report.replacements;
  j["memory_stage"] = {{"records", report.memory.records},
                       {"shape", {report.memory.batch, report.memory.length, report.memory.dim}},
                       {"k", report.memory.k},
                       {"patterns", report.memory.patterns},
                       {"shape_preserved", report.memory.shape_preserved},
                       {"mean_residual_norm", report.memory.mean_residual_norm},
                       {"metric_effect", "none (smoke stage)"}};
  return j.dump(2) + "\n";
}

}  // namespace estr::pipeline
