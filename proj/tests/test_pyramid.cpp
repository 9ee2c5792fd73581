#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "spm/pyramid.hpp"

using namespace spm;

namespace {

CodeImage random_codes(int w, int h, int channels, std::uint64_t seed) {
  CodeImage code;
  code.width = w;
  code.height = h;
  code.channels = channels;
  code.codes.resize(std::size_t(w) * h);
  SplitMix64 rng(seed);
  for (auto& c : code.codes) c = std::uint16_t(rng.next_below(std::uint64_t(channels)));
  return code;
}

}  // namespace

TEST_CASE("level weights") {
  CHECK(level_weight(0, 2) == 0.25);
  CHECK(level_weight(1, 2) == 0.25);
  CHECK(level_weight(2, 2) == 0.5);
  CHECK(level_weight(0, 0) == 1.0);
  CHECK(level_weight(3, 3) == 0.5);
  for (int max_level = 0; max_level <= 3; ++max_level)
    for (int l = 0; l <= max_level; ++l) {
      const double expected =
          l == 0 ? 1.0 / double(1 << max_level) : 1.0 / double(1 << (max_level - l + 1));
      CHECK(level_weight(l, max_level) == expected);
    }
  CHECK_THROWS(level_weight(3, 2));
  CHECK_THROWS(level_weight(-1, 2));
}

TEST_CASE("grid bounds tile exactly") {
  const auto even = grid_bounds(4, 4, 1);
  CHECK(even.size() == 4);
  CHECK(even[0].x0 == 0);
  CHECK(even[0].x1 == 2);
  CHECK(even[1].x0 == 2);
  CHECK(even[1].x1 == 4);

  const auto odd = grid_bounds(5, 5, 1);
  CHECK(odd[0].x1 == 2);  // floor(5/2)
  CHECK(odd[1].x0 == 2);
  CHECK(odd[1].x1 == 5);

  const auto whole = grid_bounds(13, 9, 0);
  CHECK(whole.size() == 1);
  CHECK(whole[0].x1 == 13);
  CHECK(whole[0].y1 == 9);

  CHECK_THROWS(grid_bounds(3, 8, 2));  // 3 < 2^2

  // every pixel covered exactly once, all levels
  for (int level = 0; level <= 3; ++level) {
    const int w = 19, h = 11;
    if (w < (1 << level) || h < (1 << level)) continue;
    std::vector<int> cover(std::size_t(w) * h, 0);
    for (const auto& cell : grid_bounds(w, h, level))
      for (int y = cell.y0; y < cell.y1; ++y)
        for (int x = cell.x0; x < cell.x1; ++x) ++cover[std::size_t(y) * w + x];
    for (int c : cover) CHECK(c == 1);
  }
}

TEST_CASE("build_pyramid hand-counted example") {
  CodeImage code;
  code.width = code.height = 4;
  code.channels = 8;
  code.codes.assign(16, 5);
  const PyramidConfig cfg{.levels = 1, .channels = 8, .normalize = true};
  const PyramidHistogram h = build_pyramid(code, cfg);
  REQUIRE(h.values.size() == 8 * 5);
  CHECK(h.weighted);

  // level 0: normalized mass 1.0 at channel 5, weight 1/2
  CHECK(h.values[5] == doctest::Approx(0.5));
  const PyramidHistogram u = remove_weights(h);
  CHECK(u.values[5] == doctest::Approx(1.0));
  // each level-1 cell: 4 of 16 pixels at channel 5
  for (int cell = 0; cell < 4; ++cell) CHECK(u.values[std::size_t(8 * (1 + cell) + 5)] == doctest::Approx(0.25));
}

TEST_CASE("vector length for the L=2, M=256 configuration") {
  CHECK(PyramidConfig{.levels = 2, .channels = 256}.vector_length() == 5376);
  const auto code = random_codes(8, 8, 256, 1);
  CHECK(build_pyramid(code, {.levels = 2, .channels = 256, .normalize = true}).values.size() == 5376);
}

TEST_CASE("unnormalized level-0 sums to the pixel count") {
  const auto code = random_codes(10, 7, 16, 2);
  const auto h = remove_weights(build_pyramid(code, {.levels = 1, .channels = 16, .normalize = false}));
  const double level0 = std::accumulate(h.values.begin(), h.values.begin() + 16, 0.0);
  CHECK(level0 == 70.0);
}

TEST_CASE("children histograms aggregate exactly to their parent") {
  const auto code = random_codes(13, 9, 32, 3);
  const PyramidConfig cfg{.levels = 2, .channels = 32, .normalize = false};
  const auto h = remove_weights(build_pyramid(code, cfg));
  const int m = cfg.channels;

  // level l parent cell (row-major index j) has children (2r, 2r+1) x (2c, 2c+1) at l+1
  std::size_t level_offset = 0;
  for (int l = 0; l < cfg.levels; ++l) {
    const int n = 1 << l;
    const std::size_t child_offset = level_offset + std::size_t(n) * n * std::size_t(m);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        for (int ch = 0; ch < m; ++ch) {
          const double parent = h.values[level_offset + (std::size_t(r) * n + c) * std::size_t(m) + std::size_t(ch)];
          double kids = 0.0;
          for (int dr = 0; dr < 2; ++dr)
            for (int dc = 0; dc < 2; ++dc)
              kids += h.values[child_offset +
                               (std::size_t(2 * r + dr) * (2 * n) + std::size_t(2 * c + dc)) * std::size_t(m) +
                               std::size_t(ch)];
          CHECK(parent == kids);  // exact integer counts
        }
    level_offset = child_offset;
  }
}

TEST_CASE("permuting pixels inside one finest-level cell changes nothing") {
  const PyramidConfig cfg{.levels = 2, .channels = 16, .normalize = true};
  auto code = random_codes(16, 16, 16, 4);
  const auto before = build_pyramid(code, cfg);

  // shuffle within the top-left level-2 cell (4x4)
  const auto cell = grid_bounds(16, 16, 2)[0];
  std::vector<std::uint16_t> vals;
  for (int y = cell.y0; y < cell.y1; ++y)
    for (int x = cell.x0; x < cell.x1; ++x) vals.push_back(code.at(x, y));
  std::rotate(vals.begin(), vals.begin() + 5, vals.end());
  std::size_t k = 0;
  for (int y = cell.y0; y < cell.y1; ++y)
    for (int x = cell.x0; x < cell.x1; ++x) code.codes[std::size_t(y) * 16 + x] = vals[k++];

  CHECK(build_pyramid(code, cfg).values == before.values);
}

TEST_CASE("weighting is invertible") {
  const auto code = random_codes(12, 12, 8, 5);
  const auto h = build_pyramid(code, {.levels = 2, .channels = 8, .normalize = true});
  const auto u = remove_weights(h);
  CHECK_FALSE(u.weighted);
  const auto back = apply_weights(u);
  for (std::size_t i = 0; i < h.values.size(); ++i)
    CHECK(back.values[i] == doctest::Approx(h.values[i]).epsilon(1e-15));
  // each normalized level sums to 1 in the unweighted view
  std::size_t offset = 0;
  for (int l = 0; l <= 2; ++l) {
    const std::size_t len = (std::size_t(1) << (2 * l)) * 8;
    const double s = std::accumulate(u.values.begin() + long(offset), u.values.begin() + long(offset + len), 0.0);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    offset += len;
  }
}

TEST_CASE("SPMH round trip is bitwise") {
  testutil::TempDir dir("spmh");
  const auto code = random_codes(9, 9, 64, 6);
  const auto h = build_pyramid(code, {.levels = 1, .channels = 64, .normalize = true});
  save_spmh(h, dir.path() / "p.spmh");
  const auto back = load_spmh(dir.path() / "p.spmh");
  CHECK(back.config == h.config);
  CHECK(back.weighted == h.weighted);
  CHECK(back.values == h.values);
  CHECK_THROWS(load_spmh(dir.path() / "missing.spmh"));
}

TEST_CASE("channel mismatch is rejected") {
  const auto code = random_codes(8, 8, 16, 7);
  CHECK_THROWS(build_pyramid(code, {.levels = 1, .channels = 256, .normalize = true}));
}
