#include "estr/pipeline/stub_recognizer.hpp"

#include <random>

#include "estr/error.hpp"

namespace estr::pipeline {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

NoisyText inject_noise(std::string_view text, const GlyphDatabase& db, double rate, std::uint64_t seed,
                       std::string_view id) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw Error("noise rate must lie in [0, 1]");
  std::mt19937_64 rng(splitmix(seed ^ splitmix(fnv1a(id))));
  NoisyText out;
  TokenizedText tokens = tokenize(text);
  for (std::size_t i = 0; i < tokens.tokens.size(); ++i) {
    Token& tok = tokens.tokens[i];
    if (!is_content(tok)) continue;
    const auto& cands = db.candidates(tok.surface);
    if (cands.empty()) continue;
    ++out.eligible;
    // Always draw both values so the stream stays aligned across rates.
    const double u = unit(rng);
    const auto pick = static_cast<std::size_t>(unit(rng) * static_cast<double>(cands.size()));
    if (u < rate) {
      tok.surface = cands[std::min(pick, cands.size() - 1)];
      out.substituted.push_back(i);
    }
  }
  out.text = tokens.reconstruct();
  return out;
}

std::vector<TextRecord> run_stub_recognizer(const DatasetManifest& manifest, const BackendSpec& backend,
                                            const GlyphDatabase& db) {
  validate(backend);
  if (backend.kind != BackendKind::oracle_with_noise) throw Error("stub recognizer requires oracle_with_noise");
  std::vector<TextRecord> out;
  out.reserve(manifest.records.size());
  for (const auto& r : manifest.records) {
    out.push_back({r.id, inject_noise(r.label, db, backend.noise_rate, backend.seed, r.id).text});
  }
  return out;
}

}  // namespace estr::pipeline
