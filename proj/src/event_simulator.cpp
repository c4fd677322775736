#include "estr/event_simulator.hpp"

#include <algorithm>
#include <cmath>

#include "bitmap_font.hpp"
#include "estr/error.hpp"
#include "estr/utf8.hpp"

namespace estr {
namespace {

// Emits the events of one pixel between frames k and k+1. Levels are
// relative to the pixel's first-frame log-intensity; the reference sits at
// steps * c, so mirrored inputs give exactly mirrored arithmetic.
void step_pixel(std::int64_t& steps, double prev_level, double next_level, std::uint64_t t0, std::uint64_t t1,
                double c, std::uint16_t x, std::uint16_t y, std::vector<EventPoint>& out) {
  const double diff = next_level - static_cast<double>(steps) * c;
  const auto crossings = static_cast<std::int64_t>(std::floor(std::abs(diff) / c + kCrossingSlack));
  if (crossings == 0) return;
  const int sign = diff > 0 ? 1 : -1;
  const double travel = std::abs(next_level - prev_level);
  // progress already made from the reference toward the first crossing
  const double lag = sign > 0 ? prev_level - static_cast<double>(steps) * c
                              : static_cast<double>(steps) * c - prev_level;
  const double dt = static_cast<double>(t1 - t0);
  for (std::int64_t j = 1; j <= crossings; ++j) {
    double frac = travel > 0 ? (static_cast<double>(j) * c - lag) / travel : 1.0;
    frac = std::clamp(frac, 0.0, 1.0);
    const auto t = t0 + std::min(t1 - t0, static_cast<std::uint64_t>(std::floor(frac * dt)));
    out.push_back({x, y, t, static_cast<std::int8_t>(sign)});
  }
  steps += sign * crossings;
}

}  // namespace

void validate(const IntensitySequence& seq) {
  if (seq.frames.empty()) throw Error("intensity sequence needs at least one frame");
  if (seq.timestamps.size() != seq.frames.size()) throw Error("one timestamp per frame required");
  const std::size_t n = static_cast<std::size_t>(seq.width) * seq.height;
  for (std::size_t k = 0; k < seq.frames.size(); ++k) {
    if (seq.frames[k].size() != n) throw Error("frame " + std::to_string(k) + " geometry mismatch");
    if (k > 0 && seq.timestamps[k] <= seq.timestamps[k - 1]) throw Error("timestamps must strictly increase");
  }
}

void validate(const SimulatorConfig& cfg) {
  if (!(cfg.contrast_threshold > 0)) throw Error("contrast threshold must be positive");
  if (!(cfg.log_eps > 0)) throw Error("log epsilon must be positive");
}

EventStream simulate(const IntensitySequence& seq, const SimulatorConfig& cfg, Execution exec) {
  validate(seq);
  validate(cfg);
  EventStream out;
  out.width = seq.width;
  out.height = seq.height;
  out.source_id = "simulated";

  const std::size_t n = static_cast<std::size_t>(seq.width) * seq.height;
  const auto level = [&](std::size_t k, std::size_t i) { return std::log(seq.frames[k][i] + cfg.log_eps); };
  std::vector<double> base(n);
  for (std::size_t i = 0; i < n; ++i) base[i] = level(0, i);
  std::vector<std::int64_t> steps(n, 0);

  std::vector<std::vector<EventPoint>> rows(seq.height);
  for (std::size_t k = 0; k + 1 < seq.frames.size(); ++k) {
    const std::uint64_t t0 = seq.timestamps[k];
    const std::uint64_t t1 = seq.timestamps[k + 1];
    const auto run_row = [&](std::int64_t y) {
      auto& row = rows[y];
      row.clear();
      for (std::uint16_t x = 0; x < seq.width; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * seq.width + x;
        step_pixel(steps[i], level(k, i) - base[i], level(k + 1, i) - base[i], t0, t1, cfg.contrast_threshold, x,
                   static_cast<std::uint16_t>(y), row);
      }
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
      for (std::int64_t y = 0; y < seq.height; ++y) run_row(y);
    } else {
      for (std::int64_t y = 0; y < seq.height; ++y) run_row(y);
    }
    const std::size_t first = out.events.size();
    for (const auto& row : rows) out.events.insert(out.events.end(), row.begin(), row.end());
    std::stable_sort(out.events.begin() + static_cast<std::ptrdiff_t>(first), out.events.end(),
                     [](const EventPoint& a, const EventPoint& b) { return a.t < b.t; });
  }
  return out;
}

IntensitySequence render_text_sequence(const std::string& text, Motion motion, std::size_t n_frames) {
  if (text.empty()) throw Error("render_text_sequence: text must be non-empty");
  if (n_frames < 2) throw Error("render_text_sequence: need at least 2 frames");
  (void)motion;  // horizontal_shift is the only motion

  const auto cps = utf8::decode(text);
  constexpr int kMargin = 2;
  constexpr int kAdvance = font::kGlyphWidth + 1;
  const std::size_t width = 2 * kMargin + kAdvance * cps.size() + (n_frames - 1);
  const std::size_t height = 2 * kMargin + font::kGlyphHeight;
  if (width > 0xFFFF) throw Error("render_text_sequence: text too long");

  IntensitySequence seq;
  seq.width = static_cast<std::uint16_t>(width);
  seq.height = static_cast<std::uint16_t>(height);
  for (std::size_t k = 0; k < n_frames; ++k) {
    std::vector<double> frame(width * height, kTextBackground);
    for (std::size_t g = 0; g < cps.size(); ++g) {
      const std::size_t left = kMargin + kAdvance * g + k;
      for (int row = 0; row < font::kGlyphHeight; ++row) {
        for (int col = 0; col < font::kGlyphWidth; ++col) {
          if (font::pixel(cps[g].value, col, row)) frame[(kMargin + row) * width + left + col] = kTextInk;
        }
      }
    }
    seq.frames.push_back(std::move(frame));
    seq.timestamps.push_back(k * kFramePeriodUs);
  }
  return seq;
}

IntensitySequence sequence_from_images(const std::vector<GrayImage>& frames, std::uint64_t frame_period_us) {
  if (frames.empty()) throw Error("no input frames");
  if (frame_period_us == 0) throw Error("frame period must be positive");
  IntensitySequence seq;
  if (frames[0].width > 0xFFFF || frames[0].height > 0xFFFF) throw Error("frame too large for event geometry");
  seq.width = static_cast<std::uint16_t>(frames[0].width);
  seq.height = static_cast<std::uint16_t>(frames[0].height);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (frames[k].width != seq.width || frames[k].height != seq.height) {
      throw Error("frame " + std::to_string(k) + " geometry mismatch");
    }
    std::vector<double> f(frames[k].pixels.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = frames[k].pixels[i] / 255.0;
    seq.frames.push_back(std::move(f));
    seq.timestamps.push_back(k * frame_period_us);
  }
  return seq;
}

}  // namespace estr
