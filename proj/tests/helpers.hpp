// Shared test fixtures: RNG-backed image generators, literal direct-formula
// descriptor oracles (kept independent of the library code paths), and a
// synthetic two-class texture dataset writer.
#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

#include "spm/dataset.hpp"
#include "spm/descriptors.hpp"
#include "spm/image.hpp"
#include "spm/rng.hpp"

namespace testutil {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("spm_test_" + tag + "_" + std::to_string(counter_++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

inline spm::GrayImage random_image(int w, int h, std::uint64_t seed) {
  spm::GrayImage img;
  img.width = w;
  img.height = h;
  img.data.resize(std::size_t(w) * h);
  spm::SplitMix64 rng(seed);
  for (auto& p : img.data) p = std::uint8_t(rng.next_below(256));
  return img;
}

// --- direct oracles ------------------------------------------------------
// These transcribe the operator definitions pixel by pixel with no shared
// state and no precomputation, so the optimized library paths can be checked
// bit for bit against them.

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

inline std::uint8_t sample(const spm::GrayImage& img, int x, int y) {
  return img.data[std::size_t(clampi(y, 0, img.height - 1)) * img.width +
                  std::size_t(clampi(x, 0, img.width - 1))];
}

inline spm::CodeImage lbp_oracle(const spm::GrayImage& img) {
  spm::CodeImage out;
  out.width = img.width;
  out.height = img.height;
  out.channels = 256;
  out.codes.resize(img.data.size());
  const int dx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
  const int dy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      int code = 0;
      for (int i = 0; i < 8; ++i) {
        const int neighbor = sample(img, x + dx[i], y + dy[i]);
        const int center = sample(img, x, y);
        if (neighbor >= center) code += 1 << i;
      }
      out.codes[std::size_t(y) * img.width + x] = std::uint16_t(code);
    }
  return out;
}

inline double ssd_patches(const spm::GrayImage& img, int ax, int ay, int bx, int by, int w) {
  const int half = w / 2;
  double sum = 0.0;
  for (int dy = -half; dy <= half; ++dy)
    for (int dx = -half; dx <= half; ++dx) {
      const double d =
          (double(sample(img, ax + dx, ay + dy)) - double(sample(img, bx + dx, by + dy))) / 255.0;
      sum += d * d;
    }
  return sum;
}

inline spm::CodeImage tplbp_oracle(const spm::GrayImage& img, const spm::TplbpConfig& cfg) {
  spm::CodeImage out;
  out.width = img.width;
  out.height = img.height;
  out.channels = 1 << cfg.ring_patches;
  out.codes.resize(img.data.size());
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      int code = 0;
      for (int i = 0; i < cfg.ring_patches; ++i) {
        const auto center_of = [&](int idx) {
          const double angle = 2.0 * std::numbers::pi * idx / cfg.ring_patches;
          const int cx = x + int(std::lround(cfg.ring_radius * std::cos(angle)));
          const int cy = y + int(std::lround(-cfg.ring_radius * std::sin(angle)));
          return std::pair<int, int>(cx, cy);
        };
        const auto [ax, ay] = center_of(i);
        const auto [bx, by] = center_of((i + cfg.pair_offset) % cfg.ring_patches);
        const double da = ssd_patches(img, ax, ay, x, y, cfg.patch_size);
        const double db = ssd_patches(img, bx, by, x, y, cfg.patch_size);
        if (da - db >= cfg.tau) code += 1 << i;
      }
      out.codes[std::size_t(y) * img.width + x] = std::uint16_t(code);
    }
  return out;
}

// --- synthetic dataset ----------------------------------------------------

inline spm::GrayImage checkerboard_image(int w, int h, std::uint64_t seed) {
  spm::SplitMix64 rng(seed);
  const int cell = 3 + int(rng.next_below(4));
  const int phase_x = int(rng.next_below(std::uint64_t(cell)));
  const int phase_y = int(rng.next_below(std::uint64_t(cell)));
  const int lo = 20 + int(rng.next_below(40));
  const int hi = 180 + int(rng.next_below(60));
  spm::GrayImage img;
  img.width = w;
  img.height = h;
  img.data.resize(std::size_t(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const bool on = (((x + phase_x) / cell) + ((y + phase_y) / cell)) % 2 == 0;
      img.at(x, y) = std::uint8_t(clampi(on ? hi : lo, 0, 255));
    }
  return img;
}

/// Two visually distinct texture classes: checkerboards and uniform noise.
inline std::filesystem::path write_texture_dataset(const std::filesystem::path& root,
                                                   int per_class, int size = 64,
                                                   std::uint64_t seed = 7) {
  namespace fs = std::filesystem;
  fs::create_directories(root / "checker");
  fs::create_directories(root / "noise");
  for (int i = 0; i < per_class; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "img_%03d.pgm", i);
    spm::save_pgm(checkerboard_image(size, size, seed + std::uint64_t(i)), root / "checker" / name);
    spm::save_pgm(random_image(size, size, seed + 1000 + std::uint64_t(i)), root / "noise" / name);
  }
  return root;
}

}  // namespace testutil
