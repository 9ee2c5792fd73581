#include "spm/dataset.hpp"

#include <algorithm>
#include <cctype>

#include "json.hpp"
#include "spm/rng.hpp"

namespace fs = std::filesystem;

namespace spm {

namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".pgm" || ext == ".png";
}

}  // namespace

DatasetIndex scan_dataset(const fs::path& root) {
  if (!fs::is_directory(root)) throw IngestionError("dataset root is not a directory: " + root.string());

  std::vector<std::string> classes;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) classes.push_back(e.path().filename().string());
  std::sort(classes.begin(), classes.end());
  if (classes.empty()) throw IngestionError("no classes found under " + root.string());

  DatasetIndex index;
  index.root = root.string();
  index.classes = classes;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<std::string> paths;
    for (const auto& e : fs::directory_iterator(root / classes[c]))
      if (e.is_regular_file() && is_image_file(e.path())) paths.push_back(e.path().string());
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw IngestionError("class '" + classes[c] + "' has no image files");
    for (auto& p : paths) index.samples.push_back({std::move(p), int(c)});
  }
  return index;
}

Split make_split(const DatasetIndex& index, const SplitSpec& spec, int repetition) {
  if (spec.train_per_class < 1) throw std::invalid_argument("train_per_class must be >= 1");
  if (repetition < 0 || repetition >= spec.repetitions)
    throw std::invalid_argument("repetition out of range");

  Split split;
  for (std::size_t c = 0; c < index.classes.size(); ++c) {
    std::vector<int> members;
    for (std::size_t i = 0; i < index.samples.size(); ++i)
      if (index.samples[i].class_id == int(c)) members.push_back(int(i));

    int take = spec.train_per_class;
    if (int(members.size()) <= take) {
      take = int(members.size()) - 1;
      split.warnings.push_back("class '" + index.classes[c] + "' has only " +
                               std::to_string(members.size()) +
                               " samples; clamped to " + std::to_string(take) + " train / 1 test");
    }

    // Fisher-Yates on the class members, stream keyed by (seed, rep, class).
    SplitMix64 rng(mix_seed(spec.seed, std::uint64_t(repetition), std::uint64_t(c)));
    for (std::size_t i = members.size() - 1; i > 0; --i)
      std::swap(members[i], members[rng.next_below(i + 1)]);

    std::vector<int> train(members.begin(), members.begin() + take);
    std::vector<int> test(members.begin() + take, members.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    split.train.insert(split.train.end(), train.begin(), train.end());
    split.test.insert(split.test.end(), test.begin(), test.end());
  }
  return split;
}

std::string dataset_index_json(const DatasetIndex& index) {
  nlohmann::ordered_json j;
  j["root"] = index.root;
  j["classes"] = index.classes;
  auto samples = nlohmann::ordered_json::array();
  for (const auto& s : index.samples) samples.push_back({{"path", s.path}, {"class_id", s.class_id}});
  j["samples"] = std::move(samples);
  return j.dump(2);
}

}  // namespace spm
