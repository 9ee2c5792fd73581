#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "spm/dataset.hpp"
#include "spm/kernels.hpp"
#include "spm/svm.hpp"

namespace spm {

struct PipelineConfig {
  DescriptorTag descriptor = DescriptorTag::combined;
  LbpConfig lbp;
  TplbpConfig tplbp;
  PyramidConfig pyramid;
  CombineConfig combine;
  SvmConfig svm;
  SplitSpec split;
  std::string dataset_root;
  int workers = 0;  // 0 = hardware concurrency
};

struct StageTimings {
  double load_s = 0.0;
  double extract_s = 0.0;
  double extract_per_image_s = 0.0;
  double gram_s = 0.0;
  double train_s = 0.0;
  double predict_s = 0.0;
  double total_s = 0.0;
};

struct EvalReport {
  std::vector<std::string> classes;
  std::vector<double> accuracies;            // per repetition, %
  double mean_accuracy = 0.0;                // %
  double std_accuracy = 0.0;                 // population std over repetitions, %
  std::vector<double> confusion;             // C x C row-normalized %, averaged over reps
  std::vector<std::string> warnings;
  StageTimings timings;
  PipelineConfig config;
};

/// Full repeated-split protocol: extract pyramids for every sample once,
/// then per repetition split / slice the Gram / train / predict.
EvalReport evaluate(const DatasetIndex& index, const PipelineConfig& cfg);

/// Resolved-config echo shared by every output artifact.
nlohmann::ordered_json pipeline_config_json(const PipelineConfig& cfg);

/// Report serialization; timing fields can be omitted so two runs with the
/// same seed compare byte-for-byte.
nlohmann::ordered_json report_json(const EvalReport& report, bool include_timings = true);
std::string report_csv(const EvalReport& report);

/// "XX.XX ± Y.YY"
std::string format_mean_std(double mean, double std);

struct BenchRow {
  DescriptorTag descriptor;
  int images_timed = 0;
  double mean_seconds_per_image = 0.0;
  // Fastest per-image sample; insensitive to scheduler spikes, so it is the
  // right statistic for cost-ordering comparisons between descriptors.
  double min_seconds_per_image = 0.0;
};

/// Per-image wall-clock cost of descriptor + pyramid (image decode excluded,
/// first `warmup` images excluded). Single-threaded per image.
std::vector<BenchRow> bench_descriptors(const std::vector<GrayImage>& images,
                                        const std::vector<DescriptorTag>& descriptors,
                                        const PipelineConfig& cfg, int warmup = 2);

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace spm
