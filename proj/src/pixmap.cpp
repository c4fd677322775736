#include "estr/pixmap.hpp"

#include <cctype>
#include <fstream>
#include <iterator>

#include "estr/error.hpp"

namespace estr {
namespace {

struct PixmapHeader {
  char kind = 0;  // '5' or '6'
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::size_t data_offset = 0;
};

PixmapHeader parse_header(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error("pixmap: expected P5 or P6 magic");
  }
  PixmapHeader h;
  h.kind = static_cast<char>(bytes[1]);
  std::size_t pos = 2;
  std::uint64_t values[3] = {0, 0, 0};
  for (auto& value : values) {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw Error("pixmap: malformed header");
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 0xFFFFFFFFu) throw Error("pixmap: header value too large");
      ++pos;
    }
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw Error("pixmap: malformed header");
  ++pos;
  if (values[2] != 255) throw Error("pixmap: only maxval 255 is supported");
  h.width = static_cast<std::uint32_t>(values[0]);
  h.height = static_cast<std::uint32_t>(values[1]);
  h.data_offset = pos;
  const std::size_t channels = h.kind == '6' ? 3 : 1;
  if (bytes.size() - pos != static_cast<std::size_t>(h.width) * h.height * channels) {
    throw Error("pixmap: payload size does not match header");
  }
  return h;
}

std::vector<std::uint8_t> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path);
}

std::vector<std::uint8_t> with_header(char kind, std::uint32_t w, std::uint32_t h,
                                      const std::vector<std::uint8_t>& payload) {
  const std::string header =
      std::string("P") + kind + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

}  // namespace

Image::Image(std::uint32_t w, std::uint32_t h, Rgb fill) : width(w), height(h) {
  rgb.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < rgb.size(); i += 3) {
    rgb[i] = fill.r;
    rgb[i + 1] = fill.g;
    rgb[i + 2] = fill.b;
  }
}

std::vector<std::uint8_t> encode_ppm(const Image& image) {
  return with_header('6', image.width, image.height, image.rgb);
}

void write_ppm(const std::string& path, const Image& image) { dump(path, encode_ppm(image)); }

Image decode_ppm(const std::vector<std::uint8_t>& bytes) {
  const PixmapHeader h = parse_header(bytes);
  if (h.kind != '6') throw Error("pixmap: expected P6");
  Image img;
  img.width = h.width;
  img.height = h.height;
  img.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(h.data_offset), bytes.end());
  return img;
}

Image read_ppm(const std::string& path) { return decode_ppm(slurp(path)); }

GrayImage decode_gray_pixmap(const std::vector<std::uint8_t>& bytes) {
  const PixmapHeader h = parse_header(bytes);
  GrayImage img;
  img.width = h.width;
  img.height = h.height;
  const auto* data = bytes.data() + h.data_offset;
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  img.pixels.resize(n);
  if (h.kind == '5') {
    std::copy(data, data + n, img.pixels.begin());
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned sum = data[3 * i] + data[3 * i + 1] + data[3 * i + 2];
      img.pixels[i] = static_cast<std::uint8_t>(sum / 3);
    }
  }
  return img;
}

GrayImage read_gray_pixmap(const std::string& path) { return decode_gray_pixmap(slurp(path)); }

void write_pgm(const std::string& path, const GrayImage& image) {
  dump(path, with_header('5', image.width, image.height, image.pixels));
}

}  // namespace estr
