#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace estr {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Row-major interleaved RGB image.
struct Image {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(std::uint32_t w, std::uint32_t h, Rgb fill = {255, 255, 255});

  Rgb at(std::uint32_t x, std::uint32_t y) const {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
  void set(std::uint32_t x, std::uint32_t y, Rgb c) {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = c.r;
    rgb[i + 1] = c.g;
    rgb[i + 2] = c.b;
  }

  friend bool operator==(const Image&, const Image&) = default;
};

// Row-major single-channel 8-bit image.
struct GrayImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;
};

// Binary P6 with maxval 255.
std::vector<std::uint8_t> encode_ppm(const Image& image);
void write_ppm(const std::string& path, const Image& image);
Image read_ppm(const std::string& path);
Image decode_ppm(const std::vector<std::uint8_t>& bytes);

// Reads P5 directly, or P6 converted to luma as (r+g+b)/3 with integer
// division. Only maxval 255 is accepted.
GrayImage read_gray_pixmap(const std::string& path);
GrayImage decode_gray_pixmap(const std::vector<std::uint8_t>& bytes);
void write_pgm(const std::string& path, const GrayImage& image);

}  // namespace estr
