#pragma once

#include <cstdint>

namespace estr::font {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

// True if the glyph for cp has ink at (col, row).
bool pixel(char32_t cp, int col, int row);

}  // namespace estr::font
