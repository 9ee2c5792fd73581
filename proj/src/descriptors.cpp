#include "spm/descriptors.hpp"

#include <cmath>
#include <numbers>

namespace spm {

void TplbpConfig::validate() const {
  if (ring_patches < 2 || ring_patches > 16) throw std::invalid_argument("ring_patches must be in [2,16]");
  if (patch_size < 1 || patch_size % 2 == 0) throw std::invalid_argument("patch_size must be odd and >= 1");
  if (pair_offset < 1 || pair_offset >= ring_patches)
    throw std::invalid_argument("pair_offset must be in [1, ring_patches)");
  if (ring_radius < 1) throw std::invalid_argument("ring_radius must be >= 1");
  if (tau <= 0.0) throw std::invalid_argument("tau must be > 0");
}

CodeImage lbp_code_image(const GrayImage& img, const LbpConfig& cfg) {
  if (img.empty()) throw std::invalid_argument("lbp_code_image: empty image");
  if (cfg.neighbors != 8 || cfg.radius != 1)
    throw std::invalid_argument("lbp_code_image: only the 8-neighbor radius-1 operator is supported");

  // Clockwise from top-left; bit i carries weight 2^i.
  static constexpr int kDx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
  static constexpr int kDy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};

  CodeImage out;
  out.width = img.width;
  out.height = img.height;
  out.channels = 256;
  out.codes.resize(img.data.size());
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const std::uint8_t center = img.at(x, y);
      unsigned code = 0;
      for (int i = 0; i < 8; ++i)
        if (img.at_clamped(x + kDx[i], y + kDy[i]) >= center) code |= 1u << i;
      out.codes[std::size_t(y) * img.width + x] = std::uint16_t(code);
    }
  }
  return out;
}

double patch_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("patch_distance: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = (double(a[i]) - double(b[i])) / 255.0;
    sum += d * d;
  }
  return sum;
}

namespace {

void gather_patch(const GrayImage& img, int cx, int cy, int half, std::uint8_t* out) {
  for (int dy = -half; dy <= half; ++dy)
    for (int dx = -half; dx <= half; ++dx) *out++ = img.at_clamped(cx + dx, cy + dy);
}

}  // namespace

CodeImage tplbp_code_image(const GrayImage& img, const TplbpConfig& cfg) {
  if (img.empty()) throw std::invalid_argument("tplbp_code_image: empty image");
  cfg.validate();

  const int s = cfg.ring_patches;
  const int half = cfg.patch_size / 2;
  const std::size_t patch_len = std::size_t(cfg.patch_size) * cfg.patch_size;

  // Ring patch center offsets, rounded once to the pixel grid.
  std::vector<int> ox(s), oy(s);
  for (int i = 0; i < s; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / s;
    ox[i] = int(std::lround(cfg.ring_radius * std::cos(angle)));
    oy[i] = int(std::lround(-cfg.ring_radius * std::sin(angle)));
  }

  CodeImage out;
  out.width = img.width;
  out.height = img.height;
  out.channels = 1 << s;
  out.codes.resize(img.data.size());

  std::vector<std::uint8_t> central(patch_len);
  std::vector<std::uint8_t> ring(patch_len);
  std::vector<double> dist(std::size_t(s), 0.0);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      gather_patch(img, x, y, half, central.data());
      for (int i = 0; i < s; ++i) {
        gather_patch(img, x + ox[i], y + oy[i], half, ring.data());
        dist[std::size_t(i)] = patch_distance(ring, central);
      }
      unsigned code = 0;
      for (int i = 0; i < s; ++i)
        if (tplbp_threshold(dist[std::size_t(i)] - dist[std::size_t((i + cfg.pair_offset) % s)],
                            cfg.tau))
          code |= 1u << i;
      out.codes[std::size_t(y) * img.width + x] = std::uint16_t(code);
    }
  }
  return out;
}

GrayImage code_image_to_gray(const CodeImage& code) {
  if (code.channels > 256) throw std::invalid_argument("code_image_to_gray: more than 256 channels");
  GrayImage img;
  img.width = code.width;
  img.height = code.height;
  img.data.resize(code.codes.size());
  for (std::size_t i = 0; i < code.codes.size(); ++i) img.data[i] = std::uint8_t(code.codes[i]);
  return img;
}

}  // namespace spm
