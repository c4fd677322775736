#include "estr/event_core.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>

#include "estr/error.hpp"

namespace estr {
namespace {

constexpr char kEvs1Magic[4] = {'E', 'V', 'S', '1'};

std::uint16_t load_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint64_t load_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void store_u16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

void store_u64(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::string at_record(std::size_t index) { return " at record " + std::to_string(index); }

void check_point(const EventPoint& e, std::uint16_t width, std::uint16_t height, std::size_t record) {
  if (e.x >= width || e.y >= height) throw Error("coordinate out of range" + at_record(record));
  if (e.p != 1 && e.p != -1) throw Error("invalid polarity" + at_record(record));
}

ParseDiagnostics repair_order(EventStream& stream) {
  ParseDiagnostics diag;
  auto by_time = [](const EventPoint& a, const EventPoint& b) { return a.t < b.t; };
  if (!std::is_sorted(stream.events.begin(), stream.events.end(), by_time)) {
    std::stable_sort(stream.events.begin(), stream.events.end(), by_time);
    diag.resorted = true;
  }
  return diag;
}

ParsedEvents parse_evs1(std::span<const std::uint8_t> bytes, std::uint16_t width,
                        std::uint16_t height) {
  if (bytes.size() < kEvs1HeaderSize) throw Error("evs1: truncated header");
  if (std::memcmp(bytes.data(), kEvs1Magic, 4) != 0) throw Error("evs1: bad magic");
  ParsedEvents out;
  EventStream& s = out.stream;
  s.width = load_u16(bytes.data() + 4);
  s.height = load_u16(bytes.data() + 6);
  const std::uint64_t count = load_u64(bytes.data() + 8);
  if ((width != 0 && width != s.width) || (height != 0 && height != s.height)) {
    throw Error("evs1: header geometry " + std::to_string(s.width) + "x" + std::to_string(s.height) +
                " disagrees with requested " + std::to_string(width) + "x" + std::to_string(height));
  }
  const std::size_t payload = bytes.size() - kEvs1HeaderSize;
  if (count > payload / kEvs1RecordSize) {
    throw Error("evs1: truncated record" + at_record(payload / kEvs1RecordSize + 1));
  }
  if (payload != count * kEvs1RecordSize) throw Error("evs1: trailing bytes after declared count");

  s.events.resize(count);
  const std::uint8_t* rec = bytes.data() + kEvs1HeaderSize;
  for (std::size_t i = 0; i < count; ++i, rec += kEvs1RecordSize) {
    EventPoint& e = s.events[i];
    e.x = load_u16(rec);
    e.y = load_u16(rec + 2);
    e.t = load_u64(rec + 4);
    e.p = static_cast<std::int8_t>(rec[12]);
    if (rec[13] != 0 || rec[14] != 0 || rec[15] != 0) throw Error("evs1: nonzero padding" + at_record(i + 1));
    check_point(e, s.width, s.height, i + 1);
  }
  out.diagnostics = repair_order(s);
  return out;
}

template <typename T>
bool parse_field(std::string_view field, T& value) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc{} && ptr == field.data() + field.size() && !field.empty();
}

ParsedEvents parse_csv(std::string_view text, std::uint16_t width, std::uint16_t height) {
  if (width == 0 || height == 0) throw Error("csv: sensor width and height are required");
  ParsedEvents out;
  EventStream& s = out.stream;
  s.width = width;
  s.height = height;

  std::size_t record = 0;
  bool first_line = true;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (first_line) {
      first_line = false;
      if (line == "x,y,t,p") continue;
    }
    ++record;

    std::string_view fields[4];
    std::size_t n = 0;
    std::size_t start = 0;
    while (n < 4) {
      const std::size_t comma = line.find(',', start);
      fields[n++] = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
      if (n == 4) throw Error("csv: expected 4 fields" + at_record(record));
    }
    if (n != 4) throw Error("csv: expected 4 fields" + at_record(record));

    std::uint64_t x = 0, y = 0, t = 0;
    int p = 0;
    if (!parse_field(fields[0], x) || !parse_field(fields[1], y) || !parse_field(fields[2], t) ||
        !parse_field(fields[3], p)) {
      throw Error("csv: malformed field" + at_record(record));
    }
    if (p != 1 && p != -1) throw Error("invalid polarity" + at_record(record));
    if (x >= width || y >= height) throw Error("coordinate out of range" + at_record(record));
    s.events.push_back({static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), t,
                        static_cast<std::int8_t>(p)});
  }
  out.diagnostics = repair_order(s);
  return out;
}

}  // namespace

EventFormat format_from_path(std::string_view path) {
  const auto dot = path.rfind('.');
  if (dot != std::string_view::npos && path.substr(dot) == ".csv") return EventFormat::csv;
  return EventFormat::evs1;
}

ParsedEvents parse_events(std::span<const std::uint8_t> bytes, EventFormat format,
                          std::uint16_t width, std::uint16_t height) {
  if (format == EventFormat::evs1) return parse_evs1(bytes, width, height);
  return parse_csv({reinterpret_cast<const char*>(bytes.data()), bytes.size()}, width, height);
}

ParsedEvents parse_events(std::string_view bytes, EventFormat format, std::uint16_t width,
                          std::uint16_t height) {
  return parse_events(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()), format,
                      width, height);
}

std::vector<std::uint8_t> serialize_events(const EventStream& stream, EventFormat format) {
  std::vector<std::uint8_t> out;
  if (format == EventFormat::evs1) {
    out.assign(kEvs1HeaderSize + stream.events.size() * kEvs1RecordSize, 0);
    std::memcpy(out.data(), kEvs1Magic, 4);
    store_u16(out.data() + 4, stream.width);
    store_u16(out.data() + 6, stream.height);
    store_u64(out.data() + 8, stream.events.size());
    std::uint8_t* rec = out.data() + kEvs1HeaderSize;
    for (const EventPoint& e : stream.events) {
      store_u16(rec, e.x);
      store_u16(rec + 2, e.y);
      store_u64(rec + 4, e.t);
      rec[12] = static_cast<std::uint8_t>(e.p);
      rec += kEvs1RecordSize;
    }
    return out;
  }

  std::string text = "x,y,t,p\n";
  text.reserve(text.size() + stream.events.size() * 24);
  for (const EventPoint& e : stream.events) {
    text += std::to_string(e.x);
    text += ',';
    text += std::to_string(e.y);
    text += ',';
    text += std::to_string(e.t);
    text += ',';
    text += e.p > 0 ? "1\n" : "-1\n";
  }
  out.assign(text.begin(), text.end());
  return out;
}

void validate(const EventStream& stream) {
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    check_point(stream.events[i], stream.width, stream.height, i + 1);
    if (i > 0 && stream.events[i].t < stream.events[i - 1].t) throw Error("events not sorted" + at_record(i + 1));
  }
}

ParsedEvents read_events_file(const std::string& path, std::uint16_t width, std::uint16_t height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ParsedEvents parsed = parse_events(bytes, format_from_path(path), width, height);
  parsed.stream.source_id = path;
  return parsed;
}

void write_events_file(const std::string& path, const EventStream& stream) {
  const auto bytes = serialize_events(stream, format_from_path(path));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path);
}

StreamStats compute_stats(const EventStream& stream) {
  StreamStats st;
  st.n_events = stream.events.size();
  if (stream.events.empty()) return st;
  for (const EventPoint& e : stream.events) {
    (e.p > 0 ? st.n_positive : st.n_negative) += 1;
    const std::size_t col = static_cast<std::size_t>(e.x) * kStatsGridCols / stream.width;
    const std::size_t row = static_cast<std::size_t>(e.y) * kStatsGridRows / stream.height;
    st.spatial_histogram[row * kStatsGridCols + col] += 1;
  }
  st.duration_us = stream.events.back().t - stream.events.front().t;
  if (st.duration_us > 0) {
    st.events_per_second = static_cast<double>(st.n_events) / (static_cast<double>(st.duration_us) / 1e6);
  }
  return st;
}

}  // namespace estr
