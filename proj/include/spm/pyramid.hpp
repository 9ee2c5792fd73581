#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "spm/descriptors.hpp"

namespace spm {

struct PyramidConfig {
  int levels = 2;      // max level L; grids are 2^l x 2^l for l = 0..L
  int channels = 256;  // histogram bins per grid
  bool normalize = true;

  bool operator==(const PyramidConfig&) const = default;

  /// channels * sum_{l=0..L} 4^l
  std::size_t vector_length() const;
};

/// 1/2^L for level 0, 1/2^(L-l+1) above.
double level_weight(int level, int max_level);

struct Rect {
  int x0, y0, x1, y1;  // half-open [x0,x1) x [y0,y1)
};

/// The 4^l cells of the level-l grid, floor-boundary tiled so they partition
/// the image exactly. Row-major cell order.
std::vector<Rect> grid_bounds(int width, int height, int level);

/// Flat pyramid vector ordered (level asc, cell row-major, channel asc).
/// `weighted` says whether level weights have been multiplied in.
struct PyramidHistogram {
  PyramidConfig config;
  bool weighted = true;
  std::vector<double> values;
};

/// Per-level cell histograms, optionally L1-normalized by total pixel count,
/// scaled by level weights, concatenated. Requires both image dimensions
/// >= 2^L.
PyramidHistogram build_pyramid(const CodeImage& code, const PyramidConfig& cfg);

PyramidHistogram apply_weights(const PyramidHistogram& h);
PyramidHistogram remove_weights(const PyramidHistogram& h);

// "SPMH" file: magic, u16 version, u32 L, u32 M, u8 normalize, u8 weighted,
// then float64 little-endian values.
void save_spmh(const PyramidHistogram& h, const std::filesystem::path& path);
PyramidHistogram load_spmh(const std::filesystem::path& path);

void save_pyramid_csv(const PyramidHistogram& h, const std::filesystem::path& path);

}  // namespace spm
