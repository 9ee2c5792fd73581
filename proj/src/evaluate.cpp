#include "spm/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "spm/parallel.hpp"
#include "spm/rng.hpp"

namespace spm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

PyramidHistogram extract_one(const GrayImage& img, DescriptorTag which, const PipelineConfig& cfg) {
  const CodeImage code = which == DescriptorTag::lbp ? lbp_code_image(img, cfg.lbp)
                                                     : tplbp_code_image(img, cfg.tplbp);
  return build_pyramid(code, cfg.pyramid);
}

GramMatrix slice_square(const GramMatrix& full, const std::vector<int>& ids,
                        const std::vector<int>& labels) {
  GramMatrix g;
  g.rows = g.cols = int(ids.size());
  g.tag = full.tag;
  g.lambda = full.lambda;
  g.labels = labels;
  g.values.resize(ids.size() * ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = 0; j < ids.size(); ++j)
      g.values[i * ids.size() + j] = full.at(ids[i], ids[j]);
  return g;
}

GramMatrix slice_rect(const GramMatrix& full, const std::vector<int>& row_ids,
                      const std::vector<int>& col_ids, const std::vector<int>& row_labels) {
  GramMatrix g;
  g.rows = int(row_ids.size());
  g.cols = int(col_ids.size());
  g.tag = full.tag;
  g.lambda = full.lambda;
  g.labels = row_labels;
  g.values.resize(row_ids.size() * col_ids.size());
  for (std::size_t i = 0; i < row_ids.size(); ++i)
    for (std::size_t j = 0; j < col_ids.size(); ++j)
      g.values[i * col_ids.size() + j] = full.at(row_ids[i], col_ids[j]);
  return g;
}

}  // namespace

EvalReport evaluate(const DatasetIndex& index, const PipelineConfig& cfg) {
  const auto t_total = Clock::now();
  const std::size_t n = index.samples.size();
  const std::size_t num_classes = index.class_count();
  const bool need_lbp = cfg.descriptor != DescriptorTag::tplbp;
  const bool need_tplbp = cfg.descriptor != DescriptorTag::lbp;

  EvalReport report;
  report.config = cfg;
  report.classes = index.classes;

  auto t0 = Clock::now();
  std::vector<GrayImage> images(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) { images[i] = load_gray(index.samples[i].path); });
  report.timings.load_s = seconds_since(t0);

  t0 = Clock::now();
  std::vector<PyramidHistogram> lbp_pyramids(need_lbp ? n : 0);
  std::vector<PyramidHistogram> tplbp_pyramids(need_tplbp ? n : 0);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    if (need_lbp) lbp_pyramids[i] = extract_one(images[i], DescriptorTag::lbp, cfg);
    if (need_tplbp) tplbp_pyramids[i] = extract_one(images[i], DescriptorTag::tplbp, cfg);
  });
  report.timings.extract_s = seconds_since(t0);
  report.timings.extract_per_image_s = report.timings.extract_s / double(n);
  images.clear();
  images.shrink_to_fit();

  // One full Gram over all samples; every repetition is a slice of it.
  t0 = Clock::now();
  std::vector<int> all_labels(n);
  for (std::size_t i = 0; i < n; ++i) all_labels[i] = index.samples[i].class_id;
  std::optional<CombineConfig> combine;
  if (cfg.descriptor == DescriptorTag::combined) combine = cfg.combine;
  const auto& primary = need_lbp ? lbp_pyramids : tplbp_pyramids;
  const GramMatrix full = gram_square(primary, tplbp_pyramids, all_labels, cfg.descriptor,
                                      combine, cfg.workers);
  report.timings.gram_s = seconds_since(t0);

  std::vector<double> confusion_sum(num_classes * num_classes, 0.0);
  for (int rep = 0; rep < cfg.split.repetitions; ++rep) {
    Split split = make_split(index, cfg.split, rep);
    if (rep == 0) report.warnings = split.warnings;

    std::vector<int> train_labels(split.train.size()), test_labels(split.test.size());
    for (std::size_t i = 0; i < split.train.size(); ++i)
      train_labels[i] = all_labels[std::size_t(split.train[i])];
    for (std::size_t i = 0; i < split.test.size(); ++i)
      test_labels[i] = all_labels[std::size_t(split.test[i])];

    t0 = Clock::now();
    const GramMatrix train_gram = slice_square(full, split.train, train_labels);
    const SvmModel model = train(train_gram, cfg.svm, cfg.workers);
    report.timings.train_s += seconds_since(t0);

    t0 = Clock::now();
    const GramMatrix test_gram = slice_rect(full, split.test, split.train, test_labels);
    const std::vector<int> predicted = decide(model, test_gram);
    report.timings.predict_s += seconds_since(t0);

    std::size_t correct = 0;
    std::vector<double> counts(num_classes * num_classes, 0.0);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      if (predicted[i] == test_labels[i]) ++correct;
      counts[std::size_t(test_labels[i]) * num_classes + std::size_t(predicted[i])] += 1.0;
    }
    report.accuracies.push_back(100.0 * double(correct) / double(predicted.size()));
    for (std::size_t r = 0; r < num_classes; ++r) {
      double row_total = 0.0;
      for (std::size_t c = 0; c < num_classes; ++c) row_total += counts[r * num_classes + c];
      if (row_total > 0)
        for (std::size_t c = 0; c < num_classes; ++c)
          confusion_sum[r * num_classes + c] += 100.0 * counts[r * num_classes + c] / row_total;
    }
  }

  const double reps = double(cfg.split.repetitions);
  double mean = 0.0;
  for (double a : report.accuracies) mean += a;
  mean /= reps;
  double var = 0.0;
  for (double a : report.accuracies) var += (a - mean) * (a - mean);
  report.mean_accuracy = mean;
  report.std_accuracy = std::sqrt(var / reps);
  report.confusion.resize(confusion_sum.size());
  for (std::size_t i = 0; i < confusion_sum.size(); ++i)
    report.confusion[i] = confusion_sum[i] / reps;

  report.timings.total_s = seconds_since(t_total);
  return report;
}

nlohmann::ordered_json pipeline_config_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["descriptor"] = to_string(cfg.descriptor);
  j["lbp"] = {{"neighbors", cfg.lbp.neighbors}, {"radius", cfg.lbp.radius}};
  j["tplbp"] = {{"ring_patches", cfg.tplbp.ring_patches},
                {"patch_size", cfg.tplbp.patch_size},
                {"pair_offset", cfg.tplbp.pair_offset},
                {"ring_radius", cfg.tplbp.ring_radius},
                {"tau", cfg.tplbp.tau}};
  j["pyramid"] = {{"levels", cfg.pyramid.levels},
                  {"channels", cfg.pyramid.channels},
                  {"normalize", cfg.pyramid.normalize}};
  j["lambda"] = cfg.combine.lambda;
  j["svm"] = {{"c", cfg.svm.c}, {"tolerance", cfg.svm.tolerance}, {"max_passes", cfg.svm.max_passes}};
  j["split"] = {{"train_per_class", cfg.split.train_per_class},
                {"seed", cfg.split.seed},
                {"repetitions", cfg.split.repetitions},
                {"rng", kSplitRngId}};
  j["std_convention"] = "population";
  j["dataset_root"] = cfg.dataset_root;
  j["workers"] = cfg.workers;
  return j;
}

nlohmann::ordered_json report_json(const EvalReport& report, bool include_timings) {
  nlohmann::ordered_json j;
  j["config"] = pipeline_config_json(report.config);
  j["classes"] = report.classes;
  j["accuracies_percent"] = report.accuracies;
  j["mean_accuracy_percent"] = report.mean_accuracy;
  j["std_accuracy_percent"] = report.std_accuracy;
  j["summary"] = format_mean_std(report.mean_accuracy, report.std_accuracy);
  auto confusion = nlohmann::ordered_json::array();
  const std::size_t c = report.classes.size();
  for (std::size_t r = 0; r < c; ++r)
    confusion.push_back(std::vector<double>(report.confusion.begin() + long(r * c),
                                            report.confusion.begin() + long((r + 1) * c)));
  j["confusion_percent"] = std::move(confusion);
  j["warnings"] = report.warnings;
  if (include_timings) {
    j["timings_seconds"] = {{"load", report.timings.load_s},
                            {"extract", report.timings.extract_s},
                            {"extract_per_image", report.timings.extract_per_image_s},
                            {"gram", report.timings.gram_s},
                            {"train", report.timings.train_s},
                            {"predict", report.timings.predict_s},
                            {"total", report.timings.total_s}};
  }
  // Reference values from a published SIFT+SPM baseline, transcribed for
  // side-by-side comparison; never measured by this tool.
  j["published_baselines"] = {
      {"note", "transcribed reference values (SIFT+SPM), not measured"},
      {"scene15", {{"seconds_per_image", 1.28}, {"classification_rate", "81.38 ± 0.24"}}},
      {"caltech101", {{"classification_rate", "64.06 ± 0.50"}}}};
  return j;
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "descriptor,repetitions,mean_accuracy_percent,std_accuracy_percent,summary,"
         "extract_per_image_s\n";
  out << to_string(report.config.descriptor) << ',' << report.config.split.repetitions << ','
      << report.mean_accuracy << ',' << report.std_accuracy << ",\""
      << format_mean_std(report.mean_accuracy, report.std_accuracy) << "\","
      << report.timings.extract_per_image_s << '\n';
  return out.str();
}

std::string format_mean_std(double mean, double std) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f ± %.2f", mean, std);
  return buf;
}

std::vector<BenchRow> bench_descriptors(const std::vector<GrayImage>& images,
                                        const std::vector<DescriptorTag>& descriptors,
                                        const PipelineConfig& cfg, int warmup) {
  if (images.empty()) throw std::invalid_argument("bench_descriptors: empty image set");
  // Stabilize caches and clock ramp-up before anything is timed.
  extract_one(images.front(), DescriptorTag::lbp, cfg);
  extract_one(images.front(), DescriptorTag::tplbp, cfg);

  // Descriptors are timed back-to-back on each image so that load transients
  // hit every descriptor equally instead of skewing whole rows.
  std::vector<double> totals(descriptors.size(), 0.0);
  std::vector<double> mins(descriptors.size(), std::numeric_limits<double>::infinity());
  int timed = 0;
  volatile double sink = 0.0;  // keep the extraction from being optimized out
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t d = 0; d < descriptors.size(); ++d) {
      const DescriptorTag tag = descriptors[d];
      const auto t0 = Clock::now();
      if (tag != DescriptorTag::tplbp) sink = extract_one(images[i], DescriptorTag::lbp, cfg).values[0];
      if (tag != DescriptorTag::lbp) sink = extract_one(images[i], DescriptorTag::tplbp, cfg).values[0];
      const double dt = seconds_since(t0);
      if (int(i) >= warmup) {
        totals[d] += dt;
        mins[d] = std::min(mins[d], dt);
      }
    }
    if (int(i) >= warmup) ++timed;
  }
  (void)sink;
  if (timed == 0) throw std::invalid_argument("bench_descriptors: nothing left after warmup");

  std::vector<BenchRow> rows;
  for (std::size_t d = 0; d < descriptors.size(); ++d) {
    BenchRow row;
    row.descriptor = descriptors[d];
    row.images_timed = timed;
    row.mean_seconds_per_image = totals[d] / timed;
    row.min_seconds_per_image = mins[d];
    rows.push_back(row);
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "descriptor,images_timed,mean_seconds_per_image,min_seconds_per_image\n";
  for (const auto& r : rows)
    out << to_string(r.descriptor) << ',' << r.images_timed << ',' << r.mean_seconds_per_image
        << ',' << r.min_seconds_per_image << '\n';
  return out.str();
}

}  // namespace spm
