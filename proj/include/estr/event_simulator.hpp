#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "estr/event_core.hpp"
#include "estr/execution.hpp"
#include "estr/pixmap.hpp"

namespace estr {

// Row-major single-channel frames with values in [0, 1].
struct IntensitySequence {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::vector<std::vector<double>> frames;
  std::vector<std::uint64_t> timestamps;  // microseconds, strictly increasing

  double at(std::size_t frame, std::uint32_t x, std::uint32_t y) const {
    return frames[frame][static_cast<std::size_t>(y) * width + x];
  }
};

struct SimulatorConfig {
  double contrast_threshold = 0.2;
  double log_eps = 1e-3;
};

// Slack applied when counting threshold crossings, so a log step of exactly
// m*C survives the rounding of log().
inline constexpr double kCrossingSlack = 1e-9;

void validate(const IntensitySequence& seq);
void validate(const SimulatorConfig& cfg);

// Contrast-threshold event synthesis. Each pixel keeps a reference
// log-intensity; every full threshold step between consecutive frames emits
// one event, timestamped by linear interpolation of the crossing, and the
// reference advances by the emitted multiple of C. Output is sorted by t
// (ties keep frame-pair, row, column, crossing order).
EventStream simulate(const IntensitySequence& seq, const SimulatorConfig& cfg = {},
                     Execution exec = Execution::serial);

enum class Motion { horizontal_shift };

inline constexpr double kTextBackground = 0.2;
inline constexpr double kTextInk = 0.8;
inline constexpr std::uint64_t kFramePeriodUs = 1000;

// Renders text with a built-in 5x7 font (hollow box for non-ASCII) and moves
// it 1 px right per frame on a uniform background.
IntensitySequence render_text_sequence(const std::string& text, Motion motion, std::size_t n_frames);

// Builds a sequence from 8-bit frames, scaling to [0, 1].
IntensitySequence sequence_from_images(const std::vector<GrayImage>& frames, std::uint64_t frame_period_us);

}  // namespace estr
