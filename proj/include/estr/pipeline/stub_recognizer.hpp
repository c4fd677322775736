#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "estr/glyph_database.hpp"
#include "estr/pipeline/backend.hpp"
#include "estr/pipeline/records.hpp"

namespace estr::pipeline {

struct NoisyText {
  std::string text;
  std::vector<std::size_t> substituted;  // token positions that were replaced
  std::size_t eligible = 0;              // tokens that had candidates
};

// Independently per eligible token, with probability rate, swaps in a
// uniformly chosen candidate. Each record draws from its own stream keyed by
// (seed, id), so results do not depend on record order.
NoisyText inject_noise(std::string_view text, const GlyphDatabase& db, double rate, std::uint64_t seed,
                       std::string_view id);

// Stand-in recognizer: ground-truth labels corrupted by inject_noise.
std::vector<TextRecord> run_stub_recognizer(const DatasetManifest& manifest, const BackendSpec& backend,
                                            const GlyphDatabase& db);

}  // namespace estr::pipeline
