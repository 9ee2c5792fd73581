#include <algorithm>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "spm/dataset.hpp"

using namespace spm;
using testutil::TempDir;

namespace {

void touch_images(const std::filesystem::path& dir, int count) {
  std::filesystem::create_directories(dir);
  for (int i = 0; i < count; ++i)
    save_pgm(testutil::random_image(4, 4, std::uint64_t(i)),
             dir / ("f" + std::to_string(i) + ".pgm"));
}

// Index with synthetic paths only; make_split never touches the filesystem.
DatasetIndex fake_index(const std::vector<int>& class_sizes) {
  DatasetIndex index;
  for (std::size_t c = 0; c < class_sizes.size(); ++c) {
    index.classes.push_back("class" + std::to_string(c));
    for (int i = 0; i < class_sizes[c]; ++i)
      index.samples.push_back({"class" + std::to_string(c) + "/" + std::to_string(i), int(c)});
  }
  return index;
}

}  // namespace

TEST_CASE("scan_dataset orders classes and samples deterministically") {
  TempDir dir("scan");
  touch_images(dir.path() / "forest", 3);
  touch_images(dir.path() / "coast", 2);

  const DatasetIndex index = scan_dataset(dir.path());
  CHECK(index.classes == std::vector<std::string>{"coast", "forest"});
  CHECK(index.samples.size() == 5);
  CHECK(index.samples[0].class_id == 0);
  CHECK(index.samples[4].class_id == 1);
  CHECK(std::is_sorted(index.samples.begin(), index.samples.end(),
                       [](const auto& a, const auto& b) { return a.path < b.path; }));

  const DatasetIndex again = scan_dataset(dir.path());
  CHECK(dataset_index_json(index) == dataset_index_json(again));
}

TEST_CASE("scan_dataset errors") {
  TempDir dir("scan_err");
  CHECK_THROWS_WITH_AS(scan_dataset(dir.path()), doctest::Contains("no classes"), IngestionError);

  std::filesystem::create_directories(dir.path() / "emptyclass");
  CHECK_THROWS_WITH_AS(scan_dataset(dir.path()), doctest::Contains("emptyclass"), IngestionError);
}

TEST_CASE("make_split partitions each class") {
  const auto index = fake_index({5, 8});
  const SplitSpec spec{.train_per_class = 3, .seed = 11, .repetitions = 4};
  const Split split = make_split(index, spec, 0);
  CHECK(split.train.size() == 6);
  CHECK(split.test.size() == 7);
  CHECK(split.warnings.empty());

  std::set<int> train(split.train.begin(), split.train.end());
  std::set<int> test(split.test.begin(), split.test.end());
  for (int id : train) CHECK(test.count(id) == 0);
  std::set<int> all = train;
  all.insert(test.begin(), test.end());
  CHECK(all.size() == index.samples.size());

  // per-class counts
  for (int cls = 0; cls < 2; ++cls) {
    const auto in_class = [&](int id) { return index.samples[std::size_t(id)].class_id == cls; };
    CHECK(std::count_if(split.train.begin(), split.train.end(), in_class) == 3);
  }
}

TEST_CASE("make_split is deterministic and repetition-sensitive") {
  const auto index = fake_index({10, 10});
  const SplitSpec spec{.train_per_class = 5, .seed = 99, .repetitions = 3};
  const Split a = make_split(index, spec, 1);
  const Split b = make_split(index, spec, 1);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);

  const Split other_rep = make_split(index, spec, 2);
  CHECK(a.train != other_rep.train);

  SplitSpec other_seed = spec;
  other_seed.seed = 100;
  CHECK(make_split(index, other_seed, 1).train != a.train);
}

TEST_CASE("undersized class clamps to size-1 train with a warning") {
  const auto index = fake_index({3, 20});
  const SplitSpec spec{.train_per_class = 10, .seed = 0, .repetitions = 1};
  const Split split = make_split(index, spec, 0);
  CHECK(split.warnings.size() == 1);
  CHECK(split.warnings[0].find("class0") != std::string::npos);
  const auto in_class0 = [&](int id) { return index.samples[std::size_t(id)].class_id == 0; };
  CHECK(std::count_if(split.train.begin(), split.train.end(), in_class0) == 2);
  CHECK(std::count_if(split.test.begin(), split.test.end(), in_class0) == 1);
}

TEST_CASE("scene-15 style protocol arithmetic: 100 per class over 15 classes") {
  std::vector<int> sizes;
  for (int c = 0; c < 15; ++c) sizes.push_back(210 + (c * 13) % 201);
  const auto index = fake_index(sizes);
  const SplitSpec spec{.train_per_class = 100, .seed = 5, .repetitions = 10};
  const Split split = make_split(index, spec, 9);
  CHECK(split.train.size() == 1500);
  CHECK(split.train.size() + split.test.size() == index.samples.size());
}
