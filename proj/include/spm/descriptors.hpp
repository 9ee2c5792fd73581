#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "spm/image.hpp"

namespace spm {

/// Plain 8-neighbor, radius-1 LBP (the original 3x3 operator, 256 codes).
struct LbpConfig {
  int neighbors = 8;
  int radius = 1;
};

/// Three-patch LBP parameters. With ring_patches = 8 the code range is
/// [0,255], matching a 256-channel histogram.
struct TplbpConfig {
  int ring_patches = 8;   // patches distributed on the ring
  int patch_size = 3;     // side length of each square patch, odd
  int pair_offset = 2;    // how far apart the compared ring patches sit
  int ring_radius = 2;    // distance from center pixel to ring patch centers
  double tau = 0.01;      // similarity threshold, slightly above zero

  void validate() const;
};

/// Per-pixel descriptor codes; same dimensions as the source image.
struct CodeImage {
  int width = 0;
  int height = 0;
  int channels = 0;  // number of possible code values
  std::vector<std::uint16_t> codes;

  std::uint16_t at(int x, int y) const { return codes[std::size_t(y) * width + x]; }
};

/// Stability threshold applied to patch-distance differences: 1 iff x >= tau.
inline bool tplbp_threshold(double x, double tau) { return x >= tau; }

CodeImage lbp_code_image(const GrayImage& img, const LbpConfig& cfg = {});
CodeImage tplbp_code_image(const GrayImage& img, const TplbpConfig& cfg = {});

/// Sum of squared differences over [0,1]-scaled intensities.
double patch_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// Code image as plain PGM for inspection; requires channels <= 256.
GrayImage code_image_to_gray(const CodeImage& code);

}  // namespace spm
