#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace spm {

struct IngestionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Class-per-directory dataset listing. Classes and samples are sorted so the
/// index is independent of filesystem enumeration order.
struct DatasetIndex {
  struct Sample {
    std::string path;
    int class_id = 0;
  };

  std::string root;
  std::vector<std::string> classes;
  std::vector<Sample> samples;

  std::size_t class_count() const { return classes.size(); }
};

struct SplitSpec {
  int train_per_class = 100;
  std::uint64_t seed = 0;
  int repetitions = 10;
};

struct Split {
  std::vector<int> train;  // sample indices into DatasetIndex::samples
  std::vector<int> test;
  std::vector<std::string> warnings;  // clamped classes, if any
};

/// Scans `<root>/<class>/<image files>` (.pgm/.png). Classes lexicographic,
/// samples path-sorted within class.
DatasetIndex scan_dataset(const std::filesystem::path& root);

/// Samples train_per_class per class without replacement; remainder is test.
/// Deterministic in (spec.seed, repetition, class). A class with fewer than
/// train_per_class + 1 samples is clamped to size-1 train / 1 test with a
/// warning.
Split make_split(const DatasetIndex& index, const SplitSpec& spec, int repetition);

std::string dataset_index_json(const DatasetIndex& index);

}  // namespace spm
