#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spm/pyramid.hpp"

namespace spm {

enum class DescriptorTag { lbp, tplbp, combined };

std::string to_string(DescriptorTag tag);
DescriptorTag descriptor_tag_from_string(const std::string& s);

struct CombineConfig {
  double lambda = 0.3;  // weight on the LBP kernel; 1-lambda goes to TPLBP
};

/// sum_m min(a[m], b[m])
double intersection(std::span<const double> a, std::span<const double> b);

/// Pyramid match kernel as one intersection over the weighted concatenation.
double spm_kernel(const PyramidHistogram& a, const PyramidHistogram& b);

/// Same kernel via the explicit per-level, per-cell weighted sum of
/// intersections. Kept as an independent route for cross-checking.
double spm_kernel_direct(const PyramidHistogram& a, const PyramidHistogram& b);

double combined_kernel(double k_lbp, double k_tplbp, const CombineConfig& cfg);

/// Kernel values between two image sets (rows x cols). Square matrices are
/// symmetric with each unordered pair computed once.
struct GramMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major
  std::vector<int> labels;     // class-id per row (-1 when unknown)
  DescriptorTag tag = DescriptorTag::lbp;
  double lambda = -1.0;  // set only for combined matrices

  double at(int i, int j) const { return values[std::size_t(i) * cols + j]; }
  bool square() const { return rows == cols; }
};

/// Symmetric train Gram. For DescriptorTag::combined pass both pyramid sets
/// and a CombineConfig; otherwise only `primary` is used.
GramMatrix gram_square(std::span<const PyramidHistogram> primary,
                       std::span<const PyramidHistogram> secondary,
                       std::span<const int> labels, DescriptorTag tag,
                       std::optional<CombineConfig> combine, int workers);

/// Rectangular rows x cols Gram (typically test x train).
GramMatrix gram_rect(std::span<const PyramidHistogram> row_primary,
                     std::span<const PyramidHistogram> row_secondary,
                     std::span<const PyramidHistogram> col_primary,
                     std::span<const PyramidHistogram> col_secondary,
                     std::span<const int> row_labels, DescriptorTag tag,
                     std::optional<CombineConfig> combine, int workers);

// "SPMK" file: magic, u16 version, u32 rows, u32 cols, u8 tag, f64 lambda,
// i32 labels[rows], then float64 little-endian row-major values.
void save_spmk(const GramMatrix& g, const std::filesystem::path& path);
GramMatrix load_spmk(const std::filesystem::path& path);

void save_gram_csv(const GramMatrix& g, const std::filesystem::path& path);

}  // namespace spm
