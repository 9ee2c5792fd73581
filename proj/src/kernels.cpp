#include "spm/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "spm/parallel.hpp"

namespace spm {

std::string to_string(DescriptorTag tag) {
  switch (tag) {
    case DescriptorTag::lbp: return "lbp";
    case DescriptorTag::tplbp: return "tplbp";
    case DescriptorTag::combined: return "combined";
  }
  throw std::logic_error("bad DescriptorTag");
}

DescriptorTag descriptor_tag_from_string(const std::string& s) {
  if (s == "lbp") return DescriptorTag::lbp;
  if (s == "tplbp") return DescriptorTag::tplbp;
  if (s == "combined") return DescriptorTag::combined;
  throw std::invalid_argument("unknown descriptor '" + s + "'");
}

double intersection(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("intersection: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::min(a[i], b[i]);
  return sum;
}

double spm_kernel(const PyramidHistogram& a, const PyramidHistogram& b) {
  if (a.config != b.config || a.weighted != b.weighted)
    throw std::invalid_argument("spm_kernel: pyramid configs differ");
  if (!a.weighted) throw std::invalid_argument("spm_kernel: expects weighted pyramids");
  return intersection(a.values, b.values);
}

double spm_kernel_direct(const PyramidHistogram& a, const PyramidHistogram& b) {
  if (a.config != b.config) throw std::invalid_argument("spm_kernel_direct: pyramid configs differ");
  const PyramidHistogram ua = remove_weights(a);
  const PyramidHistogram ub = remove_weights(b);
  const int channels = a.config.channels;
  double total = 0.0;
  std::size_t offset = 0;
  for (int l = 0; l <= a.config.levels; ++l) {
    const double w = level_weight(l, a.config.levels);
    const int cells = 1 << (2 * l);
    for (int j = 0; j < cells; ++j) {
      double cell_sum = 0.0;
      for (int m = 0; m < channels; ++m)
        cell_sum += std::min(ua.values[offset + std::size_t(m)], ub.values[offset + std::size_t(m)]);
      total += w * cell_sum;
      offset += std::size_t(channels);
    }
  }
  return total;
}

double combined_kernel(double k_lbp, double k_tplbp, const CombineConfig& cfg) {
  if (cfg.lambda < 0.0 || cfg.lambda > 1.0) throw std::invalid_argument("lambda must be in [0,1]");
  return cfg.lambda * k_lbp + (1.0 - cfg.lambda) * k_tplbp;
}

namespace {

void check_sets(std::span<const PyramidHistogram> primary,
                std::span<const PyramidHistogram> secondary, DescriptorTag tag,
                const std::optional<CombineConfig>& combine) {
  if (primary.empty()) throw std::invalid_argument("gram: empty pyramid set");
  for (const auto& p : primary)
    if (p.config != primary.front().config) throw std::invalid_argument("gram: mixed pyramid configs");
  if (tag == DescriptorTag::combined) {
    if (!combine) throw std::invalid_argument("gram: combined tag requires a CombineConfig");
    if (secondary.size() != primary.size())
      throw std::invalid_argument("gram: combined tag requires parallel LBP/TPLBP pyramid sets");
    for (const auto& p : secondary)
      if (p.config != secondary.front().config) throw std::invalid_argument("gram: mixed pyramid configs");
  }
}

double pair_kernel(std::span<const PyramidHistogram> ap, std::span<const PyramidHistogram> as,
                   std::span<const PyramidHistogram> bp, std::span<const PyramidHistogram> bs,
                   std::size_t i, std::size_t j, DescriptorTag tag,
                   const std::optional<CombineConfig>& combine) {
  if (tag != DescriptorTag::combined) return spm_kernel(ap[i], bp[j]);
  return combined_kernel(spm_kernel(ap[i], bp[j]), spm_kernel(as[i], bs[j]), *combine);
}

}  // namespace

GramMatrix gram_square(std::span<const PyramidHistogram> primary,
                       std::span<const PyramidHistogram> secondary,
                       std::span<const int> labels, DescriptorTag tag,
                       std::optional<CombineConfig> combine, int workers) {
  check_sets(primary, secondary, tag, combine);
  const std::size_t n = primary.size();
  if (!labels.empty() && labels.size() != n) throw std::invalid_argument("gram: label count mismatch");

  GramMatrix g;
  g.rows = g.cols = int(n);
  g.tag = tag;
  if (combine && tag == DescriptorTag::combined) g.lambda = combine->lambda;
  g.labels.assign(labels.begin(), labels.end());
  if (g.labels.empty()) g.labels.assign(n, -1);
  g.values.resize(n * n);

  // Upper triangle (diagonal included), row i owns row i of the triangle.
  parallel_for(n, workers, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      const double k = pair_kernel(primary, secondary, primary, secondary, i, j, tag, combine);
      g.values[i * n + j] = k;
      g.values[j * n + i] = k;
    }
  });
  return g;
}

GramMatrix gram_rect(std::span<const PyramidHistogram> row_primary,
                     std::span<const PyramidHistogram> row_secondary,
                     std::span<const PyramidHistogram> col_primary,
                     std::span<const PyramidHistogram> col_secondary,
                     std::span<const int> row_labels, DescriptorTag tag,
                     std::optional<CombineConfig> combine, int workers) {
  check_sets(row_primary, row_secondary, tag, combine);
  check_sets(col_primary, col_secondary, tag, combine);
  if (row_primary.front().config != col_primary.front().config)
    throw std::invalid_argument("gram: row/col pyramid configs differ");
  const std::size_t rows = row_primary.size(), cols = col_primary.size();
  if (!row_labels.empty() && row_labels.size() != rows)
    throw std::invalid_argument("gram: label count mismatch");

  GramMatrix g;
  g.rows = int(rows);
  g.cols = int(cols);
  g.tag = tag;
  if (combine && tag == DescriptorTag::combined) g.lambda = combine->lambda;
  g.labels.assign(row_labels.begin(), row_labels.end());
  if (g.labels.empty()) g.labels.assign(rows, -1);
  g.values.resize(rows * cols);

  parallel_for(rows, workers, [&](std::size_t i) {
    for (std::size_t j = 0; j < cols; ++j)
      g.values[i * cols + j] =
          pair_kernel(row_primary, row_secondary, col_primary, col_secondary, i, j, tag, combine);
  });
  return g;
}

namespace {
constexpr char kSpmkMagic[4] = {'S', 'P', 'M', 'K'};
constexpr std::uint16_t kSpmkVersion = 1;
}  // namespace

void save_spmk(const GramMatrix& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kSpmkMagic, 4);
  const std::uint16_t version = kSpmkVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  const std::uint32_t rows = std::uint32_t(g.rows), cols = std::uint32_t(g.cols);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  const std::uint8_t tag = std::uint8_t(g.tag);
  out.write(reinterpret_cast<const char*>(&tag), sizeof tag);
  out.write(reinterpret_cast<const char*>(&g.lambda), sizeof g.lambda);
  out.write(reinterpret_cast<const char*>(g.labels.data()),
            std::streamsize(g.labels.size() * sizeof(std::int32_t)));
  out.write(reinterpret_cast<const char*>(g.values.data()),
            std::streamsize(g.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

GramMatrix load_spmk(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kSpmkMagic, 4) != 0)
    throw FormatError("not an SPMK file: " + path.string());
  std::uint16_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (!in || version != kSpmkVersion) throw FormatError("unsupported SPMK version: " + path.string());

  GramMatrix g;
  std::uint32_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  std::uint8_t tag = 0;
  in.read(reinterpret_cast<char*>(&tag), sizeof tag);
  in.read(reinterpret_cast<char*>(&g.lambda), sizeof g.lambda);
  if (!in || tag > 2) throw DecodeError("SPMK: bad header: " + path.string());
  g.rows = int(rows);
  g.cols = int(cols);
  g.tag = DescriptorTag(tag);
  g.labels.resize(rows);
  in.read(reinterpret_cast<char*>(g.labels.data()), std::streamsize(rows * sizeof(std::int32_t)));
  g.values.resize(std::size_t(rows) * cols);
  in.read(reinterpret_cast<char*>(g.values.data()),
          std::streamsize(g.values.size() * sizeof(double)));
  if (!in) throw DecodeError("SPMK: truncated file: " + path.string());
  return g;
}

void save_gram_csv(const GramMatrix& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  for (int i = 0; i < g.rows; ++i) {
    for (int j = 0; j < g.cols; ++j) out << (j ? "," : "") << g.at(i, j);
    out << '\n';
  }
}

}  // namespace spm
