#include "estr/frame_stacker.hpp"

#include <algorithm>

#include "estr/error.hpp"

namespace estr {
namespace {

using u128 = unsigned __int128;

std::uint64_t window_start(std::uint32_t i, std::uint64_t t_min, std::uint64_t span, std::uint32_t t_count) {
  const u128 num = static_cast<u128>(i) * span;
  return t_min + static_cast<std::uint64_t>((num + t_count - 1) / t_count);
}

void paint_range(Image& frame, const EventPoint* first, const EventPoint* last) {
  std::uint8_t* px = frame.rgb.data();
  const std::size_t w = frame.width;
  for (const EventPoint* e = first; e != last; ++e) {
    std::uint8_t* p = px + (static_cast<std::size_t>(e->y) * w + e->x) * 3;
    const Rgb c = e->p > 0 ? kPositiveColor : kNegativeColor;
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }
}

}  // namespace

std::uint32_t window_index(std::uint64_t t, std::uint64_t t_min, std::uint64_t t_max, std::uint32_t t_count) {
  const std::uint64_t span = t_max - t_min;
  if (span == 0) return 0;
  const u128 idx = static_cast<u128>(t - t_min) * t_count / span;
  return static_cast<std::uint32_t>(std::min<u128>(idx, t_count - 1));
}

FrameStack stack(const EventStream& stream, std::uint32_t t_count, Execution exec) {
  if (t_count == 0) throw Error("stack: t_count must be at least 1");
  FrameStack out;
  out.frames.resize(t_count);
  out.window_bounds.resize(t_count);

  if (stream.events.empty()) {
    for (auto& f : out.frames) f = Image(stream.width, stream.height, kBackground);
    return out;
  }

  const std::uint64_t t_min = stream.events.front().t;
  const std::uint64_t t_max = stream.events.back().t;
  const std::uint64_t span = t_max - t_min;
  for (std::uint32_t i = 0; i < t_count; ++i) {
    out.window_bounds[i] = {window_start(i, t_min, span, t_count),
                            i + 1 == t_count ? t_max : window_start(i + 1, t_min, span, t_count)};
  }

  // Events are sorted, so each window owns a contiguous slice.
  const EventPoint* base = stream.events.data();
  const EventPoint* end = base + stream.events.size();
  std::vector<const EventPoint*> cuts(t_count + 1);
  cuts[0] = base;
  cuts[t_count] = end;
  if (span > 0) {
    for (std::uint32_t i = 1; i < t_count; ++i) {
      const std::uint64_t start = out.window_bounds[i].begin;
      cuts[i] = std::lower_bound(cuts[i - 1], end, start,
                                 [](const EventPoint& e, std::uint64_t t) { return e.t < t; });
    }
  } else {
    for (std::uint32_t i = 1; i < t_count; ++i) cuts[i] = end;
  }

  const auto build = [&](std::int64_t i) {
    out.frames[i] = Image(stream.width, stream.height, kBackground);
    paint_range(out.frames[i], cuts[i], cuts[i + 1]);
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(t_count); ++i) build(i);
  } else {
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(t_count); ++i) build(i);
  }
  return out;
}

const Image& representative_frame(const FrameStack& stack) {
  if (stack.frames.empty()) throw Error("representative_frame: empty stack");
  return stack.frames.front();
}

void export_frame(const Image& image, const std::string& path) { write_ppm(path, image); }

}  // namespace estr
