#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace estr {

// One sensor event. Timestamps are microseconds.
struct EventPoint {
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::uint64_t t = 0;
  std::int8_t p = 1;  // +1 or -1

  friend bool operator==(const EventPoint&, const EventPoint&) = default;
};

// Events sorted non-decreasing by t, every point inside width x height.
struct EventStream {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::vector<EventPoint> events;
  std::string source_id;

  friend bool operator==(const EventStream&, const EventStream&) = default;
};

enum class EventFormat { csv, evs1 };

// Picks the format from a file extension (".csv" is csv, anything else evs1).
EventFormat format_from_path(std::string_view path);

struct ParseDiagnostics {
  bool resorted = false;  // input arrived unsorted and was stable-sorted by t
};

struct ParsedEvents {
  EventStream stream;
  ParseDiagnostics diagnostics;
};

inline constexpr std::size_t kEvs1HeaderSize = 16;
inline constexpr std::size_t kEvs1RecordSize = 16;

// Parses csv or evs1 bytes. For evs1 the header geometry is authoritative;
// a nonzero width/height argument must agree with it. For csv width/height
// are required. Throws estr::Error naming the offending 1-based record.
ParsedEvents parse_events(std::span<const std::uint8_t> bytes, EventFormat format,
                          std::uint16_t width, std::uint16_t height);
ParsedEvents parse_events(std::string_view bytes, EventFormat format, std::uint16_t width,
                          std::uint16_t height);

std::vector<std::uint8_t> serialize_events(const EventStream& stream, EventFormat format);

// Throws estr::Error if any EventStream invariant is violated.
void validate(const EventStream& stream);

ParsedEvents read_events_file(const std::string& path, std::uint16_t width = 0,
                              std::uint16_t height = 0);
void write_events_file(const std::string& path, const EventStream& stream);

inline constexpr int kStatsGridCols = 16;
inline constexpr int kStatsGridRows = 9;

struct StreamStats {
  std::uint64_t n_events = 0;
  std::uint64_t n_positive = 0;
  std::uint64_t n_negative = 0;
  std::uint64_t duration_us = 0;
  double events_per_second = 0.0;
  // Row-major 9 x 16 grid of event counts over the sensor.
  std::array<std::uint64_t, kStatsGridCols * kStatsGridRows> spatial_histogram{};
};

StreamStats compute_stats(const EventStream& stream);

}  // namespace estr
