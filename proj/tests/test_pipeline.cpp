#include "doctest.h"
#include "helpers.hpp"
#include "spm/evaluate.hpp"

using namespace spm;

namespace {

PipelineConfig small_config(const std::string& root) {
  PipelineConfig cfg;
  cfg.dataset_root = root;
  cfg.split = {.train_per_class = 5, .seed = 21, .repetitions = 2};
  cfg.workers = 2;
  return cfg;
}

}  // namespace

TEST_CASE("evaluate separates synthetic textures and reports consistently") {
  testutil::TempDir dir("eval");
  testutil::write_texture_dataset(dir.path(), 10, 64);
  const auto index = scan_dataset(dir.path());
  const auto cfg = small_config(dir.path().string());
  const EvalReport report = evaluate(index, cfg);

  CHECK(report.classes == std::vector<std::string>{"checker", "noise"});
  REQUIRE(report.accuracies.size() == 2);
  CHECK(report.mean_accuracy >= 95.0);

  // confusion rows sum to 100 +- 0.01
  for (std::size_t r = 0; r < 2; ++r) {
    const double row = report.confusion[2 * r] + report.confusion[2 * r + 1];
    CHECK(row == doctest::Approx(100.0).epsilon(1e-4));
  }
  CHECK(report.timings.extract_per_image_s > 0.0);
}

TEST_CASE("single repetition has zero std") {
  testutil::TempDir dir("eval1");
  testutil::write_texture_dataset(dir.path(), 6, 32);
  auto cfg = small_config(dir.path().string());
  cfg.split.repetitions = 1;
  cfg.split.train_per_class = 3;
  const EvalReport report = evaluate(scan_dataset(dir.path()), cfg);
  CHECK(report.std_accuracy == 0.0);
  CHECK(report.accuracies.size() == 1);
}

TEST_CASE("reports with the same seed are byte-identical without timings") {
  testutil::TempDir dir("eval_det");
  testutil::write_texture_dataset(dir.path(), 8, 32);
  const auto index = scan_dataset(dir.path());
  const auto cfg = small_config(dir.path().string());

  const std::string a = report_json(evaluate(index, cfg), /*include_timings=*/false).dump();
  const std::string b = report_json(evaluate(index, cfg), /*include_timings=*/false).dump();
  CHECK(a == b);

  auto other = cfg;
  other.split.seed = 22;
  const std::string c = report_json(evaluate(index, other), false).dump();
  CHECK(a != c);
}

TEST_CASE("lbp-only and tplbp-only pipelines run end to end") {
  testutil::TempDir dir("eval_single");
  testutil::write_texture_dataset(dir.path(), 8, 64);
  const auto index = scan_dataset(dir.path());
  for (DescriptorTag tag : {DescriptorTag::lbp, DescriptorTag::tplbp}) {
    auto cfg = small_config(dir.path().string());
    cfg.descriptor = tag;
    cfg.split.repetitions = 2;
    cfg.split.train_per_class = 4;
    const EvalReport report = evaluate(index, cfg);
    CHECK(report.mean_accuracy >= 90.0);
  }
}

TEST_CASE("report json carries the resolved config and rng identity") {
  PipelineConfig cfg;
  const auto j = pipeline_config_json(cfg);
  CHECK(j["split"]["rng"] == kSplitRngId);
  CHECK(j["pyramid"]["levels"] == 2);
  CHECK(j["pyramid"]["channels"] == 256);
  CHECK(j["lambda"] == 0.3);
  CHECK(j["split"]["repetitions"] == 10);
}

TEST_CASE("format_mean_std matches the table style") {
  CHECK(format_mean_std(82.684, 0.251) == "82.68 ± 0.25");
  CHECK(format_mean_std(100.0, 0.0) == "100.00 ± 0.00");
}

TEST_CASE("bench orders lbp < tplbp < combined") {
  std::vector<GrayImage> images;
  for (int i = 0; i < 12; ++i) images.push_back(testutil::random_image(240, 200, std::uint64_t(i)));
  PipelineConfig cfg;
  const auto rows = bench_descriptors(
      images, {DescriptorTag::lbp, DescriptorTag::tplbp, DescriptorTag::combined}, cfg);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].images_timed == 10);
  CHECK(rows[0].mean_seconds_per_image < rows[1].mean_seconds_per_image);
  // ordering is checked on per-image minima, which scheduler spikes cannot invert
  CHECK(rows[0].min_seconds_per_image < rows[1].min_seconds_per_image);
  CHECK(rows[1].min_seconds_per_image < rows[2].min_seconds_per_image);
  CHECK(rows[0].min_seconds_per_image <= rows[0].mean_seconds_per_image);
  CHECK(bench_csv(rows).find("lbp") != std::string::npos);

  CHECK_THROWS(bench_descriptors({}, {DescriptorTag::lbp}, cfg));
}
