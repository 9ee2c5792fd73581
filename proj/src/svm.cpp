#include "spm/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "spm/parallel.hpp"

namespace spm {

namespace {

// SMO on the dual
//   max  sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
//   s.t. 0 <= alpha_i <= C, sum alpha_i y_i = 0
// with first-order maximal-violating-pair selection. grad_i is the gradient
// of the minimization form 1/2 a'Qa - e'a, i.e. (Q alpha)_i - 1.
BinarySvm solve_binary(const GramMatrix& gram, const std::vector<signed char>& y,
                       const SvmConfig& cfg) {
  const int n = gram.rows;
  const double c = cfg.c;
  std::vector<double> alpha(std::size_t(n), 0.0);
  std::vector<double> grad(std::size_t(n), -1.0);
  const auto k = [&](int i, int j) { return gram.at(i, j); };

  double gap_hi = 0.0, gap_lo = 0.0;
  for (long pass = 0; pass < cfg.max_passes; ++pass) {
    // i: most violating index free to increase y*alpha, j: to decrease.
    int i = -1, j = -1;
    gap_hi = -std::numeric_limits<double>::infinity();
    gap_lo = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      const double v = -y[std::size_t(t)] * grad[std::size_t(t)];
      const bool in_up = (y[std::size_t(t)] > 0) ? alpha[std::size_t(t)] < c : alpha[std::size_t(t)] > 0;
      const bool in_low = (y[std::size_t(t)] > 0) ? alpha[std::size_t(t)] > 0 : alpha[std::size_t(t)] < c;
      if (in_up && v > gap_hi) {
        gap_hi = v;
        i = t;
      }
      if (in_low && v < gap_lo) {
        gap_lo = v;
        j = t;
      }
    }
    if (i < 0 || j < 0 || gap_hi - gap_lo < cfg.tolerance) break;

    const double yi = y[std::size_t(i)], yj = y[std::size_t(j)];
    const double old_i = alpha[std::size_t(i)], old_j = alpha[std::size_t(j)];
    double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
    if (quad <= 0.0) quad = 1e-12;
    double& ai = alpha[std::size_t(i)];
    double& aj = alpha[std::size_t(j)];

    if (yi != yj) {
      // alpha_i - alpha_j stays constant along the feasible direction.
      const double delta = (-grad[std::size_t(i)] - grad[std::size_t(j)]) / quad;
      const double diff = old_i - old_j;
      ai = old_i + delta;
      aj = old_j + delta;
      if (diff > 0) {
        if (aj < 0) { aj = 0; ai = diff; }
        if (ai > c) { ai = c; aj = c - diff; }
      } else {
        if (ai < 0) { ai = 0; aj = -diff; }
        if (aj > c) { aj = c; ai = c + diff; }
      }
    } else {
      // alpha_i + alpha_j stays constant.
      const double delta = (grad[std::size_t(i)] - grad[std::size_t(j)]) / quad;
      const double sum = old_i + old_j;
      ai = old_i - delta;
      aj = old_j + delta;
      if (sum > c) {
        if (ai > c) { ai = c; aj = sum - c; }
        if (aj > c) { aj = c; ai = sum - c; }
      } else {
        if (aj < 0) { aj = 0; ai = sum; }
        if (ai < 0) { ai = 0; aj = sum; }
      }
    }

    const double di = alpha[std::size_t(i)] - old_i;
    const double dj = alpha[std::size_t(j)] - old_j;
    for (int t = 0; t < n; ++t)
      grad[std::size_t(t)] +=
          y[std::size_t(t)] * (yi * di * k(t, i) + yj * dj * k(t, j));
  }

  BinarySvm model;
  // Bias from free support vectors; fall back to the violation-gap midpoint.
  double bias_sum = 0.0;
  int bias_count = 0;
  for (int t = 0; t < n; ++t) {
    if (alpha[std::size_t(t)] > 0 && alpha[std::size_t(t)] < c) {
      bias_sum += -y[std::size_t(t)] * grad[std::size_t(t)];
      ++bias_count;
    }
  }
  model.bias = bias_count > 0 ? bias_sum / bias_count : -(gap_hi + gap_lo) / 2.0;
  if (!std::isfinite(model.bias)) model.bias = 0.0;

  for (int t = 0; t < n; ++t) {
    if (alpha[std::size_t(t)] > 0) {
      model.support_indices.push_back(t);
      model.coefficients.push_back(alpha[std::size_t(t)] * y[std::size_t(t)]);
    }
  }
  return model;
}

}  // namespace

SvmModel train(const GramMatrix& gram, const SvmConfig& cfg, int workers) {
  if (!gram.square()) throw std::invalid_argument("train: gram must be square");
  if (cfg.c <= 0 || cfg.tolerance <= 0) throw std::invalid_argument("train: bad SvmConfig");
  for (int i = 0; i < gram.rows; ++i)
    for (int j = i + 1; j < gram.cols; ++j)
      if (gram.at(i, j) != gram.at(j, i)) throw std::invalid_argument("train: gram not symmetric");

  int num_classes = 0;
  for (int label : gram.labels) {
    if (label < 0) throw std::invalid_argument("train: gram has unlabeled rows");
    num_classes = std::max(num_classes, label + 1);
  }
  if (num_classes < 2) throw std::invalid_argument("train: need at least 2 classes");

  SvmModel model;
  model.config = cfg;
  model.train_labels = gram.labels;
  model.num_classes = num_classes;
  model.machines.resize(std::size_t(num_classes));
  parallel_for(std::size_t(num_classes), workers, [&](std::size_t c) {
    std::vector<signed char> y(std::size_t(gram.rows));
    for (int i = 0; i < gram.rows; ++i)
      y[std::size_t(i)] = gram.labels[std::size_t(i)] == int(c) ? 1 : -1;
    model.machines[c] = solve_binary(gram, y, cfg);
  });
  return model;
}

double decision_value(const BinarySvm& m, std::span<const double> kernel_row) {
  double v = m.bias;
  for (std::size_t s = 0; s < m.support_indices.size(); ++s)
    v += m.coefficients[s] * kernel_row[std::size_t(m.support_indices[s])];
  return v;
}

std::vector<int> decide(const SvmModel& model, const GramMatrix& test_gram) {
  if (test_gram.cols != int(model.train_labels.size()))
    throw std::invalid_argument("decide: kernel columns do not match training set size");

  std::vector<int> predictions(std::size_t(test_gram.rows));
  for (int i = 0; i < test_gram.rows; ++i) {
    const std::span<const double> row(test_gram.values.data() + std::size_t(i) * test_gram.cols,
                                      std::size_t(test_gram.cols));
    int best = 0;
    double best_value = decision_value(model.machines[0], row);
    for (int c = 1; c < model.num_classes; ++c) {
      const double v = decision_value(model.machines[std::size_t(c)], row);
      if (v > best_value) {  // strict: ties keep the lower class-id
        best_value = v;
        best = c;
      }
    }
    predictions[std::size_t(i)] = best;
  }
  return predictions;
}

namespace {
constexpr char kSpmmMagic[4] = {'S', 'P', 'M', 'M'};
constexpr std::uint16_t kSpmmVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DecodeError("SPMM: truncated file");
  return v;
}
}  // namespace

void save_spmm(const SvmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kSpmmMagic, 4);
  put(out, kSpmmVersion);
  put(out, model.config.c);
  put(out, model.config.tolerance);
  put(out, std::int64_t(model.config.max_passes));
  put(out, std::uint32_t(model.num_classes));
  put(out, std::uint32_t(model.train_labels.size()));
  out.write(reinterpret_cast<const char*>(model.train_labels.data()),
            std::streamsize(model.train_labels.size() * sizeof(std::int32_t)));
  for (const auto& m : model.machines) {
    put(out, m.bias);
    put(out, std::uint32_t(m.support_indices.size()));
    out.write(reinterpret_cast<const char*>(m.support_indices.data()),
              std::streamsize(m.support_indices.size() * sizeof(std::int32_t)));
    out.write(reinterpret_cast<const char*>(m.coefficients.data()),
              std::streamsize(m.coefficients.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

SvmModel load_spmm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kSpmmMagic, 4) != 0)
    throw FormatError("not an SPMM file: " + path.string());
  if (get<std::uint16_t>(in) != kSpmmVersion)
    throw FormatError("unsupported SPMM version: " + path.string());

  SvmModel model;
  model.config.c = get<double>(in);
  model.config.tolerance = get<double>(in);
  model.config.max_passes = long(get<std::int64_t>(in));
  model.num_classes = int(get<std::uint32_t>(in));
  const auto n = get<std::uint32_t>(in);
  model.train_labels.resize(n);
  in.read(reinterpret_cast<char*>(model.train_labels.data()),
          std::streamsize(n * sizeof(std::int32_t)));
  model.machines.resize(std::size_t(model.num_classes));
  for (auto& m : model.machines) {
    m.bias = get<double>(in);
    const auto sv = get<std::uint32_t>(in);
    m.support_indices.resize(sv);
    in.read(reinterpret_cast<char*>(m.support_indices.data()),
            std::streamsize(sv * sizeof(std::int32_t)));
    m.coefficients.resize(sv);
    in.read(reinterpret_cast<char*>(m.coefficients.data()), std::streamsize(sv * sizeof(double)));
  }
  if (!in) throw DecodeError("SPMM: truncated file: " + path.string());
  return model;
}

}  // namespace spm
