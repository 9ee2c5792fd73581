#include "spm/pyramid.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace spm {

static_assert(std::endian::native == std::endian::little,
              "SPMH/SPMK serialization assumes a little-endian host");

std::size_t PyramidConfig::vector_length() const {
  std::size_t cells = 0;
  for (int l = 0; l <= levels; ++l) cells += std::size_t(1) << (2 * l);
  return cells * std::size_t(channels);
}

double level_weight(int level, int max_level) {
  if (level < 0 || level > max_level) throw std::invalid_argument("level_weight: level out of range");
  if (level == 0) return 1.0 / double(std::size_t(1) << max_level);
  return 1.0 / double(std::size_t(1) << (max_level - level + 1));
}

std::vector<Rect> grid_bounds(int width, int height, int level) {
  if (width < 1 || height < 1 || level < 0) throw std::invalid_argument("grid_bounds: bad arguments");
  const int n = 1 << level;
  if (width < n || height < n)
    throw std::invalid_argument("grid_bounds: image too small for level " + std::to_string(level));
  std::vector<Rect> cells;
  cells.reserve(std::size_t(n) * n);
  for (int gy = 0; gy < n; ++gy) {
    const int y0 = int(std::int64_t(gy) * height / n);
    const int y1 = int(std::int64_t(gy + 1) * height / n);
    for (int gx = 0; gx < n; ++gx) {
      const int x0 = int(std::int64_t(gx) * width / n);
      const int x1 = int(std::int64_t(gx + 1) * width / n);
      cells.push_back({x0, y0, x1, y1});
    }
  }
  return cells;
}

PyramidHistogram build_pyramid(const CodeImage& code, const PyramidConfig& cfg) {
  if (code.channels != cfg.channels)
    throw std::invalid_argument("build_pyramid: code image channels do not match config");

  PyramidHistogram h;
  h.config = cfg;
  h.weighted = true;
  h.values.assign(cfg.vector_length(), 0.0);

  const double norm = cfg.normalize ? 1.0 / (double(code.width) * code.height) : 1.0;
  std::size_t offset = 0;
  for (int l = 0; l <= cfg.levels; ++l) {
    const double w = level_weight(l, cfg.levels);
    const auto cells = grid_bounds(code.width, code.height, l);
    for (const auto& cell : cells) {
      double* block = h.values.data() + offset;
      for (int y = cell.y0; y < cell.y1; ++y)
        for (int x = cell.x0; x < cell.x1; ++x) block[code.at(x, y)] += 1.0;
      for (int m = 0; m < cfg.channels; ++m) block[m] *= norm * w;
      offset += std::size_t(cfg.channels);
    }
  }
  return h;
}

namespace {

PyramidHistogram rescale_levels(const PyramidHistogram& h, bool to_weighted) {
  PyramidHistogram out = h;
  out.weighted = to_weighted;
  std::size_t offset = 0;
  for (int l = 0; l <= h.config.levels; ++l) {
    const double w = level_weight(l, h.config.levels);
    const double scale = to_weighted ? w : 1.0 / w;
    const std::size_t len = (std::size_t(1) << (2 * l)) * std::size_t(h.config.channels);
    for (std::size_t i = 0; i < len; ++i) out.values[offset + i] = h.values[offset + i] * scale;
    offset += len;
  }
  return out;
}

constexpr char kSpmhMagic[4] = {'S', 'P', 'M', 'H'};
constexpr std::uint16_t kSpmhVersion = 1;

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DecodeError("SPMH/SPMK: truncated file");
  return v;
}

}  // namespace

PyramidHistogram apply_weights(const PyramidHistogram& h) {
  if (h.weighted) return h;
  return rescale_levels(h, true);
}

PyramidHistogram remove_weights(const PyramidHistogram& h) {
  if (!h.weighted) return h;
  return rescale_levels(h, false);
}

void save_spmh(const PyramidHistogram& h, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kSpmhMagic, 4);
  write_raw(out, kSpmhVersion);
  write_raw(out, std::uint32_t(h.config.levels));
  write_raw(out, std::uint32_t(h.config.channels));
  write_raw(out, std::uint8_t(h.config.normalize ? 1 : 0));
  write_raw(out, std::uint8_t(h.weighted ? 1 : 0));
  out.write(reinterpret_cast<const char*>(h.values.data()),
            std::streamsize(h.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

PyramidHistogram load_spmh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kSpmhMagic, 4) != 0)
    throw FormatError("not an SPMH file: " + path.string());
  if (read_raw<std::uint16_t>(in) != kSpmhVersion)
    throw FormatError("unsupported SPMH version: " + path.string());

  PyramidHistogram h;
  h.config.levels = int(read_raw<std::uint32_t>(in));
  h.config.channels = int(read_raw<std::uint32_t>(in));
  h.config.normalize = read_raw<std::uint8_t>(in) != 0;
  h.weighted = read_raw<std::uint8_t>(in) != 0;
  h.values.resize(h.config.vector_length());
  in.read(reinterpret_cast<char*>(h.values.data()),
          std::streamsize(h.values.size() * sizeof(double)));
  if (!in) throw DecodeError("SPMH: truncated values: " + path.string());
  return h;
}

void save_pyramid_csv(const PyramidHistogram& h, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "level,cell,channel,value\n";
  out.precision(17);
  std::size_t offset = 0;
  for (int l = 0; l <= h.config.levels; ++l) {
    const int cells = 1 << (2 * l);
    for (int j = 0; j < cells; ++j)
      for (int m = 0; m < h.config.channels; ++m)
        out << l << ',' << j << ',' << m << ',' << h.values[offset++] << '\n';
  }
}

}  // namespace spm
