// Command-line front end: extract, gram, train, eval, experiment, bench.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "spm/evaluate.hpp"
#include "spm/parallel.hpp"
#include "spm/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Config files are JSON objects with flat dotted keys mirroring the CLI
// flags, e.g. {"levels": 2, "svm.c": 10}. Applied after parsing so that
// command-line flags always win over file values.
void apply_config_file(CLI::App& cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  const auto j = nlohmann::json::parse(in);
  if (!j.is_object()) throw std::runtime_error("config file must be a JSON object: " + path);
  for (const auto& [key, value] : j.items()) {
    CLI::Option* op = cmd.get_option_no_throw("--" + key);
    if (op == nullptr) throw std::runtime_error("unknown config key '" + key + "' in " + path);
    if (op->count() > 0) continue;
    std::string text;
    if (value.is_string())
      text = value.get<std::string>();
    else if (value.is_boolean())
      text = value.get<bool>() ? "true" : "false";
    else
      text = value.dump();
    if (op->get_expected_min() == 0) text = op->get_flag_value(key, text);
    op->add_result(text);
    op->run_callback();
  }
}

struct CommonFlags {
  std::string descriptor = "combined";
  spm::PipelineConfig cfg;
};

void add_descriptor_flags(CLI::App& cmd, CommonFlags& f) {
  cmd.add_option("--descriptor", f.descriptor, "lbp | tplbp | combined")
      ->check(CLI::IsMember({"lbp", "tplbp", "combined"}))
      ->capture_default_str();
  cmd.add_option("--levels", f.cfg.pyramid.levels, "max pyramid level L")->capture_default_str();
  cmd.add_option("--channels", f.cfg.pyramid.channels, "histogram channels M")->capture_default_str();
  cmd.add_flag("!--no-normalize", f.cfg.pyramid.normalize, "disable per-image L1 normalization");
  cmd.add_option("--tplbp.s", f.cfg.tplbp.ring_patches, "TPLBP ring patch count")->capture_default_str();
  cmd.add_option("--tplbp.w", f.cfg.tplbp.patch_size, "TPLBP patch side length")->capture_default_str();
  cmd.add_option("--tplbp.alpha", f.cfg.tplbp.pair_offset, "TPLBP patch-pair offset")->capture_default_str();
  cmd.add_option("--tplbp.r", f.cfg.tplbp.ring_radius, "TPLBP ring radius")->capture_default_str();
  cmd.add_option("--tplbp.tau", f.cfg.tplbp.tau, "TPLBP threshold")->capture_default_str();
}

void finish_flags(CommonFlags& f) {
  f.cfg.descriptor = spm::descriptor_tag_from_string(f.descriptor);
  f.cfg.tplbp.validate();
  if (f.cfg.descriptor != spm::DescriptorTag::lbp &&
      f.cfg.pyramid.channels != (1 << f.cfg.tplbp.ring_patches))
    throw CLI::ValidationError("--channels must equal 2^tplbp.s for TPLBP descriptors");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// ---- extract ----------------------------------------------------------

int run_extract(const CommonFlags& f, const std::string& dataset_root,
                const std::vector<std::string>& image_paths, const std::string& out_dir) {
  const auto& cfg = f.cfg;
  fs::create_directories(out_dir);

  struct Entry {
    std::string image;
    int class_id;
  };
  std::vector<Entry> entries;
  if (!dataset_root.empty()) {
    const auto index = spm::scan_dataset(dataset_root);
    for (const auto& s : index.samples) entries.push_back({s.path, s.class_id});
  } else {
    for (const auto& p : image_paths) entries.push_back({p, -1});
  }
  if (entries.empty()) throw std::runtime_error("no input images (pass --dataset or image paths)");

  ordered_json manifest;
  manifest["config"] = spm::pipeline_config_json(cfg);
  auto list = ordered_json::array();
  int failures = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    ordered_json item;
    item["image"] = entries[i].image;
    item["class_id"] = entries[i].class_id;
    try {
      const spm::GrayImage img = spm::load_gray(entries[i].image);
      const std::string stem = "img_" + std::to_string(i);
      if (cfg.descriptor != spm::DescriptorTag::tplbp) {
        const auto p = spm::build_pyramid(spm::lbp_code_image(img, cfg.lbp), cfg.pyramid);
        const fs::path out = fs::path(out_dir) / (stem + ".lbp.spmh");
        spm::save_spmh(p, out);
        item["lbp"] = out.string();
      }
      if (cfg.descriptor != spm::DescriptorTag::lbp) {
        const auto p = spm::build_pyramid(spm::tplbp_code_image(img, cfg.tplbp), cfg.pyramid);
        const fs::path out = fs::path(out_dir) / (stem + ".tplbp.spmh");
        spm::save_spmh(p, out);
        item["tplbp"] = out.string();
      }
    } catch (const std::exception& e) {
      std::cerr << "extract: " << entries[i].image << ": " << e.what() << "\n";
      item["error"] = e.what();
      ++failures;
    }
    list.push_back(std::move(item));
  }
  manifest["entries"] = std::move(list);
  write_text(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << (fs::path(out_dir) / "manifest.json").string() << " ("
            << entries.size() - std::size_t(failures) << "/" << entries.size() << " images)\n";
  return failures == 0 ? 0 : 1;
}

// ---- gram --------------------------------------------------------------

struct ManifestData {
  spm::DescriptorTag descriptor;
  std::vector<spm::PyramidHistogram> lbp, tplbp;
  std::vector<int> labels;
};

ManifestData load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto j = nlohmann::json::parse(in);
  ManifestData data;
  data.descriptor = spm::descriptor_tag_from_string(j.at("config").at("descriptor"));
  for (const auto& e : j.at("entries")) {
    if (e.contains("error")) throw std::runtime_error("manifest contains a failed entry: " + path.string());
    data.labels.push_back(e.at("class_id").get<int>());
    if (e.contains("lbp")) data.lbp.push_back(spm::load_spmh(e.at("lbp").get<std::string>()));
    if (e.contains("tplbp")) data.tplbp.push_back(spm::load_spmh(e.at("tplbp").get<std::string>()));
  }
  return data;
}

int run_gram(const std::string& rows_path, const std::string& cols_path, double lambda,
             int workers, const std::string& out, bool csv) {
  const ManifestData rows = load_manifest(rows_path);
  std::optional<spm::CombineConfig> combine;
  if (rows.descriptor == spm::DescriptorTag::combined) combine = spm::CombineConfig{lambda};

  spm::GramMatrix g;
  if (cols_path.empty()) {
    const auto& primary = rows.descriptor == spm::DescriptorTag::tplbp ? rows.tplbp : rows.lbp;
    g = spm::gram_square(primary, rows.tplbp, rows.labels, rows.descriptor, combine, workers);
  } else {
    const ManifestData cols = load_manifest(cols_path);
    if (cols.descriptor != rows.descriptor)
      throw std::runtime_error("gram: row and column manifests use different descriptors");
    const auto& rp = rows.descriptor == spm::DescriptorTag::tplbp ? rows.tplbp : rows.lbp;
    const auto& cp = rows.descriptor == spm::DescriptorTag::tplbp ? cols.tplbp : cols.lbp;
    g = spm::gram_rect(rp, rows.tplbp, cp, cols.tplbp, rows.labels, rows.descriptor, combine,
                       workers);
  }
  spm::save_spmk(g, out);
  if (csv) spm::save_gram_csv(g, out + ".csv");

  double lo = g.values.front(), hi = g.values.front();
  for (double v : g.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool symmetric = g.square();
  if (g.square())
    for (int i = 0; i < g.rows && symmetric; ++i)
      for (int j = i + 1; j < g.cols; ++j)
        if (g.at(i, j) != g.at(j, i)) {
          symmetric = false;
          break;
        }
  std::cout << "wrote " << out << ": " << g.rows << "x" << g.cols << ", min " << lo << ", max "
            << hi << ", symmetric " << (g.square() ? (symmetric ? "yes" : "NO") : "n/a (rect)")
            << "\n";
  return 0;
}

// ---- train / eval ------------------------------------------------------

int run_train(const std::string& gram_path, const spm::SvmConfig& svm, int workers,
              const std::string& out) {
  const auto gram = spm::load_spmk(gram_path);
  const auto model = spm::train(gram, svm, workers);
  spm::save_spmm(model, out);
  ordered_json echo;
  echo["gram"] = gram_path;
  echo["svm"] = {{"c", svm.c}, {"tolerance", svm.tolerance}, {"max_passes", svm.max_passes}};
  echo["classes"] = model.num_classes;
  echo["train_points"] = model.train_labels.size();
  write_text(out + ".config.json", echo.dump(2) + "\n");
  std::cout << "wrote " << out << " (" << model.num_classes << " classes)\n";
  return 0;
}

int run_eval(const std::string& model_path, const std::string& gram_path, const std::string& out) {
  const auto model = spm::load_spmm(model_path);
  const auto gram = spm::load_spmk(gram_path);
  const auto predicted = spm::decide(model, gram);

  ordered_json j;
  j["model"] = model_path;
  j["gram"] = gram_path;
  j["predictions"] = predicted;
  int labeled = 0, correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (gram.labels[i] < 0) continue;
    ++labeled;
    if (predicted[i] == gram.labels[i]) ++correct;
  }
  if (labeled > 0) j["accuracy_percent"] = 100.0 * correct / labeled;
  write_text(out, j.dump(2) + "\n");
  std::cout << "wrote " << out;
  if (labeled > 0) std::cout << " (accuracy " << 100.0 * correct / labeled << "%)";
  std::cout << "\n";
  return 0;
}

// ---- experiment / bench -------------------------------------------------

int run_experiment(const CommonFlags& f, const std::string& out_prefix) {
  const auto index = spm::scan_dataset(f.cfg.dataset_root);
  const auto report = spm::evaluate(index, f.cfg);
  write_text(out_prefix + ".json", spm::report_json(report).dump(2) + "\n");
  write_text(out_prefix + ".csv", spm::report_csv(report));
  std::cout << spm::to_string(f.cfg.descriptor) << ": "
            << spm::format_mean_std(report.mean_accuracy, report.std_accuracy) << " over "
            << f.cfg.split.repetitions << " repetitions\n";
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int run_bench(const CommonFlags& f, const std::string& images_dir, const std::string& descriptor,
              const std::string& out) {
  std::vector<std::string> paths;
  for (const auto& e : fs::directory_iterator(images_dir))
    if (e.is_regular_file()) paths.push_back(e.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.size() < 10) throw std::runtime_error("bench requires at least 10 images");

  std::vector<spm::GrayImage> images;
  for (const auto& p : paths) images.push_back(spm::load_gray(p));

  std::vector<spm::DescriptorTag> tags;
  if (descriptor == "all")
    tags = {spm::DescriptorTag::lbp, spm::DescriptorTag::tplbp, spm::DescriptorTag::combined};
  else
    tags = {spm::descriptor_tag_from_string(descriptor)};

  const auto rows = spm::bench_descriptors(images, tags, f.cfg);
  write_text(out, spm::bench_csv(rows));
  for (const auto& r : rows)
    std::cout << spm::to_string(r.descriptor) << ": " << r.mean_seconds_per_image << " s/image ("
              << r.images_timed << " timed)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LBP/TPLBP spatial-pyramid image classification"};
  app.require_subcommand(1);

  CommonFlags f;
  std::string dataset_root, out = "out", cols_path, rows_path, gram_path, model_path, images_dir;
  std::string bench_descriptor = "all";
  std::vector<std::string> image_paths;
  double lambda = 0.3;
  int workers = 0;
  bool gram_csv = false;
  std::string config_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file with flat dotted keys");
    cmd->add_option("--workers", workers, "worker threads (0 = auto)")->capture_default_str();
    cmd->add_option("--out", out, "output path or prefix")->capture_default_str();
    return cmd;
  };

  auto* extract = add_common(app.add_subcommand("extract", "images -> SPMH pyramid files"));
  add_descriptor_flags(*extract, f);
  extract->add_option("--dataset", dataset_root, "class-per-directory dataset root");
  extract->add_option("images", image_paths, "image files (alternative to --dataset)");

  auto* gram = add_common(app.add_subcommand("gram", "pyramid manifests -> SPMK kernel matrix"));
  gram->add_option("--rows", rows_path, "manifest for matrix rows")->required();
  gram->add_option("--cols", cols_path, "manifest for matrix columns (rectangular mode)");
  gram->add_option("--lambda", lambda, "combined-kernel weight")->capture_default_str();
  gram->add_flag("--csv", gram_csv, "also write a CSV copy");

  auto* train = add_common(app.add_subcommand("train", "SPMK -> SPMM model"));
  train->add_option("--gram", gram_path, "training kernel matrix")->required();
  train->add_option("--svm.c", f.cfg.svm.c, "box constraint")->capture_default_str();
  train->add_option("--svm.tolerance", f.cfg.svm.tolerance, "KKT tolerance")->capture_default_str();

  auto* eval = add_common(app.add_subcommand("eval", "model + test SPMK -> predictions"));
  eval->add_option("--model", model_path, "SPMM model file")->required();
  eval->add_option("--gram", gram_path, "test x train kernel matrix")->required();

  auto* experiment =
      add_common(app.add_subcommand("experiment", "full repeated-split protocol on a dataset"));
  add_descriptor_flags(*experiment, f);
  experiment->add_option("--dataset", dataset_root, "dataset root")->required();
  experiment->add_option("--lambda", f.cfg.combine.lambda, "combined-kernel weight")
      ->capture_default_str();
  experiment->add_option("--train-per-class", f.cfg.split.train_per_class)->capture_default_str();
  experiment->add_option("--repetitions", f.cfg.split.repetitions)->capture_default_str();
  experiment->add_option("--seed", f.cfg.split.seed)->capture_default_str();
  experiment->add_option("--svm.c", f.cfg.svm.c)->capture_default_str();
  experiment->add_option("--svm.tolerance", f.cfg.svm.tolerance)->capture_default_str();

  auto* bench = add_common(app.add_subcommand("bench", "per-image representation timing"));
  add_descriptor_flags(*bench, f);
  bench->add_option("--images", images_dir, "directory of benchmark images")->required();
  bench->add_option("--bench-descriptor", bench_descriptor, "lbp | tplbp | combined | all")
      ->check(CLI::IsMember({"lbp", "tplbp", "combined", "all"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty())
      for (CLI::App* sub : app.get_subcommands()) apply_config_file(*sub, config_path);
    if (extract->parsed()) {
      finish_flags(f);
      f.cfg.dataset_root = dataset_root;
      f.cfg.workers = workers;
      return run_extract(f, dataset_root, image_paths, out);
    }
    if (gram->parsed()) return run_gram(rows_path, cols_path, lambda, workers, out, gram_csv);
    if (train->parsed()) return run_train(gram_path, f.cfg.svm, workers, out);
    if (eval->parsed()) return run_eval(model_path, gram_path, out);
    if (experiment->parsed()) {
      finish_flags(f);
      f.cfg.dataset_root = dataset_root;
      f.cfg.workers = workers;
      return run_experiment(f, out);
    }
    if (bench->parsed()) {
      finish_flags(f);
      f.cfg.workers = 1;  // honest per-image seconds
      return run_bench(f, images_dir, bench_descriptor, out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
