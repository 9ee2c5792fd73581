#pragma once

#include <filesystem>
#include <vector>

#include "spm/kernels.hpp"

namespace spm {

struct SvmConfig {
  double c = 10.0;          // box constraint
  double tolerance = 1e-3;  // SMO stopping tolerance on the KKT gap
  long max_passes = 10'000'000;
};

/// One one-vs-rest binary machine: sparse alpha_i * y_i over training points.
struct BinarySvm {
  std::vector<int> support_indices;  // into the training set, ascending
  std::vector<double> coefficients;  // alpha_i * y_i at each support index
  double bias = 0.0;
};

struct SvmModel {
  std::vector<BinarySvm> machines;  // one per class-id
  std::vector<int> train_labels;
  int num_classes = 0;
  SvmConfig config;
};

/// Trains one binary SVM per class on the precomputed train Gram by SMO with
/// maximal-violating-pair selection. Deterministic. Subproblems run in
/// parallel across `workers` threads.
SvmModel train(const GramMatrix& gram, const SvmConfig& cfg, int workers = 1);

/// Decision value of one machine on a kernel row against the training set.
double decision_value(const BinarySvm& m, std::span<const double> kernel_row);

/// One-vs-rest argmax prediction; ties break toward the lowest class-id.
/// test_gram rows are test points, columns align with training indices.
std::vector<int> decide(const SvmModel& model, const GramMatrix& test_gram);

// "SPMM" file: config, labels, then per-class support index/coefficient lists.
void save_spmm(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_spmm(const std::filesystem::path& path);

}  // namespace spm
