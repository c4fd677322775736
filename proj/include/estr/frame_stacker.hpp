#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "estr/event_core.hpp"
#include "estr/execution.hpp"
#include "estr/pixmap.hpp"

namespace estr {

inline constexpr Rgb kBackground{255, 255, 255};
inline constexpr Rgb kPositiveColor{255, 0, 0};
inline constexpr Rgb kNegativeColor{0, 0, 255};

// Frames produced per recording before the first one is kept.
inline constexpr std::uint32_t kDefaultFrameCount = 19;

// [begin, end) in microseconds; the last window of a stack is closed on the right.
struct TimeWindow {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct FrameStack {
  std::vector<Image> frames;
  std::vector<TimeWindow> window_bounds;

  std::size_t t_count() const { return frames.size(); }
  friend bool operator==(const FrameStack&, const FrameStack&) = default;
};

// Window index of timestamp t for t_count equal-duration windows over
// [t_min, t_max]. Window i starts at t_min + ceil(i * span / t_count). A
// zero span maps every timestamp to window 0.
std::uint32_t window_index(std::uint64_t t, std::uint64_t t_min, std::uint64_t t_max, std::uint32_t t_count);

// Colors each pixel by the polarity of its latest event inside each window.
// The parallel path splits work across windows and is bit-identical.
FrameStack stack(const EventStream& stream, std::uint32_t t_count, Execution exec = Execution::serial);

const Image& representative_frame(const FrameStack& stack);

void export_frame(const Image& image, const std::string& path);

}  // namespace estr
