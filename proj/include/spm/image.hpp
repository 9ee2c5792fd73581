#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace spm {

/// Unsupported or malformed file header.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File recognized but its pixel data could not be decoded.
struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Row-major 8-bit grayscale image.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t at(int x, int y) const { return data[std::size_t(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return data[std::size_t(y) * width + x]; }

  // Replicate-border read: out-of-range coordinates clamp to the nearest pixel.
  std::uint8_t at_clamped(int x, int y) const {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return at(x, y);
  }

  bool empty() const { return width <= 0 || height <= 0; }
};

/// ITU-R BT.601 luma, round half up.
std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Loads a PGM (P2/P5) or PNG file as grayscale. Color PNG input is
/// converted with luma_bt601; already-gray input passes through unchanged.
GrayImage load_gray(const std::filesystem::path& path);

GrayImage load_pgm(const std::filesystem::path& path);
GrayImage load_png_gray(const std::filesystem::path& path);

void save_pgm(const GrayImage& img, const std::filesystem::path& path);

}  // namespace spm
