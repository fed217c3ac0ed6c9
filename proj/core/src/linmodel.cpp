#include "clickbait/linmodel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>

#include "json.hpp"

#include "clickbait/util.hpp"

namespace clickbait {

Matrix make_matrix(const std::vector<FeatureVector>& rows) {
  Matrix m;
  if (rows.empty()) return m;
  m.rows = rows.size();
  m.cols = rows[0].values.size();
  m.data.reserve(m.rows * m.cols);
  for (const FeatureVector& row : rows) {
    if (row.values.size() != m.cols) {
      throw UsageError("feature rows differ in dimension");
    }
    m.data.insert(m.data.end(), row.values.begin(), row.values.end());
  }
  return m;
}

Matrix select_columns(const Matrix& X, std::span<const std::size_t> indices) {
  Matrix out(X.rows, indices.size());
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double* src = X.row(i);
    double* dst = out.row(i);
    for (std::size_t j = 0; j < indices.size(); ++j) {
      if (indices[j] >= X.cols) throw UsageError("column index out of range");
      dst[j] = src[indices[j]];
    }
  }
  return out;
}

std::vector<double> select_values(std::span<const double> x,
                                  std::span<const std::size_t> indices) {
  std::vector<double> out;
  out.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= x.size()) throw UsageError("value index out of range");
    out.push_back(x[idx]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

Normalizer fit_normalizer(const Matrix& X) {
  Normalizer norm;
  norm.mean.assign(X.cols, 0.0);
  norm.std.assign(X.cols, 0.0);
  if (X.rows == 0) return norm;

  for (std::size_t i = 0; i < X.rows; ++i) {
    const double* row = X.row(i);
    for (std::size_t j = 0; j < X.cols; ++j) norm.mean[j] += row[j];
  }
  for (std::size_t j = 0; j < X.cols; ++j) {
    norm.mean[j] /= static_cast<double>(X.rows);
  }
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double* row = X.row(i);
    for (std::size_t j = 0; j < X.cols; ++j) {
      double d = row[j] - norm.mean[j];
      norm.std[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < X.cols; ++j) {
    norm.std[j] = std::sqrt(norm.std[j] / static_cast<double>(X.rows));
  }
  return norm;
}

std::vector<double> Normalizer::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) {
    throw UsageError("normalizer dimension mismatch");
  }
  std::vector<double> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    z[j] = std[j] > 0.0 ? (x[j] - mean[j]) / std[j] : 0.0;
  }
  return z;
}

Matrix apply_normalizer(const Normalizer& norm, const Matrix& X) {
  if (X.cols != norm.dimension()) {
    throw UsageError("normalizer dimension mismatch");
  }
  Matrix Z(X.rows, X.cols);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const double* src = X.row(i);
    double* dst = Z.row(i);
    for (std::size_t j = 0; j < X.cols; ++j) {
      dst[j] = norm.std[j] > 0.0 ? (src[j] - norm.mean[j]) / norm.std[j] : 0.0;
    }
  }
  return Z;
}

// ---------------------------------------------------------------------------
// Loss and training
// ---------------------------------------------------------------------------

double sigmoid(double z) {
  z = std::clamp(z, -36.0, 36.0);
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + e^s), stable for large |s|.
double softplus(double s) {
  if (s > 0.0) return s + std::log1p(std::exp(-s));
  return std::log1p(std::exp(s));
}

// Cross-entropy part of the loss from raw scores s_i = w.x_i + b.
double ce_from_scores(const std::vector<double>& s, const std::vector<int>& y) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    total += softplus(s[i]) - (y[i] == 1 ? s[i] : 0.0);
  }
  return total / static_cast<double>(s.size());
}

double l2_term(std::span<const double> w, double lambda) {
  double sq = 0.0;
  for (double v : w) sq += v * v;
  return 0.5 * lambda * sq;
}

}  // namespace

double logreg_loss(const Matrix& Xn, const std::vector<int>& y,
                   std::span<const double> w, double b, double lambda) {
  std::vector<double> s(Xn.rows, b);
  for (std::size_t i = 0; i < Xn.rows; ++i) {
    const double* row = Xn.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < Xn.cols; ++j) acc += row[j] * w[j];
    s[i] += acc;
  }
  return ce_from_scores(s, y) + l2_term(w, lambda);
}

void logreg_loss_grad(const Matrix& Xn, const std::vector<int>& y,
                      std::span<const double> w, double b, double lambda,
                      std::span<double> grad_w, double& grad_b) {
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  grad_b = 0.0;
  double inv_n = 1.0 / static_cast<double>(Xn.rows);
  for (std::size_t i = 0; i < Xn.rows; ++i) {
    const double* row = Xn.row(i);
    double s = b;
    for (std::size_t j = 0; j < Xn.cols; ++j) s += row[j] * w[j];
    double r = sigmoid(s) - (y[i] == 1 ? 1.0 : 0.0);
    for (std::size_t j = 0; j < Xn.cols; ++j) grad_w[j] += r * row[j];
    grad_b += r;
  }
  for (std::size_t j = 0; j < Xn.cols; ++j) {
    grad_w[j] = grad_w[j] * inv_n + lambda * w[j];
  }
  grad_b *= inv_n;
}

LogRegModel train_logreg(const Matrix& X, const std::vector<int>& y,
                         const TrainConfig& config) {
  if (X.rows != y.size()) throw TrainError("labels do not match matrix rows");
  if (X.rows < 2) throw TrainError("training needs at least two samples");
  bool any0 = false, any1 = false;
  for (int label : y) {
    if (label != 0 && label != 1) {
      throw TrainError("training labels must be 0 or 1");
    }
    (label == 1 ? any1 : any0) = true;
  }
  if (!any0 || !any1) throw TrainError("training labels are single-class");
  for (double v : X.data) {
    if (!std::isfinite(v)) throw TrainError("non-finite value in feature matrix");
  }

  LogRegModel model;
  model.config = config;
  model.normalizer = fit_normalizer(X);
  Matrix Z = apply_normalizer(model.normalizer, X);

  std::size_t n = Z.rows, d = Z.cols;
  std::vector<double> w(d, 0.0);
  double b = 0.0;

  // Cached raw scores s_i = w.z_i + b, updated in place after each step.
  std::vector<double> s(n, 0.0);
  std::vector<double> p(n), gw(d), dir(n);

  double loss = ce_from_scores(s, y) + l2_term(w, config.lambda);
  model.report.initial_loss = loss;
  model.report.loss_history.reserve(config.max_epochs);

  constexpr double kArmijoC1 = 1e-4;
  double alpha_start = 1.0;
  double gnorm = 0.0;

  std::size_t epoch = 0;
  for (; epoch < config.max_epochs; ++epoch) {
    // Gradient at the current point, from cached scores.
    double gb = 0.0;
    std::fill(gw.begin(), gw.end(), 0.0);
    double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      double r = sigmoid(s[i]) - (y[i] == 1 ? 1.0 : 0.0);
      p[i] = r;
      gb += r;
    }
    gb *= inv_n;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = Z.row(i);
      double r = p[i];
      for (std::size_t j = 0; j < d; ++j) gw[j] += r * row[j];
    }
    double gsq = gb * gb;
    gnorm = std::abs(gb);
    for (std::size_t j = 0; j < d; ++j) {
      gw[j] = gw[j] * inv_n + config.lambda * w[j];
      gsq += gw[j] * gw[j];
      gnorm = std::max(gnorm, std::abs(gw[j]));
    }
    if (gnorm < config.tol) {
      model.report.converged = true;
      break;
    }

    // Directional score change for O(n) line-search trials.
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = Z.row(i);
      double acc = gb;
      for (std::size_t j = 0; j < d; ++j) acc += row[j] * gw[j];
      dir[i] = acc;
    }

    double alpha = alpha_start;
    bool accepted = false;
    std::vector<double>& trial = p;  // reuse buffer for trial scores
    while (alpha > 1e-20) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = s[i] - alpha * dir[i];
      double reg = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        double wj = w[j] - alpha * gw[j];
        reg += wj * wj;
      }
      double trial_loss =
          ce_from_scores(trial, y) + 0.5 * config.lambda * reg;
      if (trial_loss <= loss - kArmijoC1 * alpha * gsq) {
        for (std::size_t j = 0; j < d; ++j) w[j] -= alpha * gw[j];
        b -= alpha * gb;
        std::swap(s, trial);
        loss = trial_loss;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // step size exhausted; gradient is numerical noise
    model.report.loss_history.push_back(loss);
    alpha_start = std::min(alpha * 2.0, 1e6);
  }

  model.weights = std::move(w);
  model.bias = b;
  model.report.epochs = epoch;
  model.report.final_loss = loss;
  model.report.grad_max_norm = gnorm;
  return model;
}

double LogRegModel::predict_from_normalized(std::span<const double> z) const {
  if (z.size() != weights.size()) {
    throw UsageError("prediction dimension mismatch");
  }
  double s = bias;
  for (std::size_t j = 0; j < z.size(); ++j) s += weights[j] * z[j];
  return sigmoid(s);
}

double LogRegModel::predict_proba(std::span<const double> x) const {
  return predict_from_normalized(normalizer.apply(x));
}

// ---------------------------------------------------------------------------
// CFS
// ---------------------------------------------------------------------------

namespace {

struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> std;  // population
};

ColumnStats column_stats(const Matrix& X) {
  Normalizer n = fit_normalizer(X);
  return {std::move(n.mean), std::move(n.std)};
}

double pearson(const Matrix& X, std::size_t a, std::size_t b,
               const ColumnStats& stats) {
  if (stats.std[a] == 0.0 || stats.std[b] == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < X.rows; ++i) {
    acc += (X.at(i, a) - stats.mean[a]) * (X.at(i, b) - stats.mean[b]);
  }
  return acc / (static_cast<double>(X.rows) * stats.std[a] * stats.std[b]);
}

double pearson_with_labels(const Matrix& X, std::size_t a,
                           const std::vector<int>& y,
                           const ColumnStats& stats) {
  double ymean = 0.0;
  for (int v : y) ymean += v;
  ymean /= static_cast<double>(y.size());
  double yvar = 0.0;
  for (int v : y) yvar += (v - ymean) * (v - ymean);
  double ystd = std::sqrt(yvar / static_cast<double>(y.size()));
  if (ystd == 0.0 || stats.std[a] == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < X.rows; ++i) {
    acc += (X.at(i, a) - stats.mean[a]) * (y[i] - ymean);
  }
  return acc / (static_cast<double>(X.rows) * stats.std[a] * ystd);
}

double merit_from_corr(std::span<const std::size_t> subset,
                       const std::vector<double>& rcf,
                       const std::function<double(std::size_t, std::size_t)>& rff) {
  double k = static_cast<double>(subset.size());
  double sum_cf = 0.0;
  for (std::size_t f : subset) sum_cf += rcf[f];
  double mean_cf = sum_cf / k;

  double mean_ff = 0.0;
  if (subset.size() > 1) {
    double sum_ff = 0.0;
    for (std::size_t i = 0; i < subset.size(); ++i) {
      for (std::size_t j = i + 1; j < subset.size(); ++j) {
        sum_ff += rff(subset[i], subset[j]);
      }
    }
    mean_ff = sum_ff / (k * (k - 1.0) / 2.0);
  }
  double denom = std::sqrt(k + k * (k - 1.0) * mean_ff);
  return denom > 0.0 ? k * mean_cf / denom : 0.0;
}

}  // namespace

double cfs_merit(const Matrix& X, const std::vector<int>& y,
                 std::span<const std::size_t> subset) {
  if (subset.empty()) throw UsageError("CFS merit of an empty subset");
  for (std::size_t f : subset) {
    if (f >= X.cols) throw UsageError("CFS subset index out of range");
  }
  ColumnStats stats = column_stats(X);
  std::vector<double> rcf(X.cols, 0.0);
  for (std::size_t f : subset) {
    rcf[f] = std::abs(pearson_with_labels(X, f, y, stats));
  }
  auto rff = [&](std::size_t a, std::size_t b) {
    return std::abs(pearson(X, a, b, stats));
  };
  return merit_from_corr(subset, rcf, rff);
}

CfsSelection cfs_select(const Matrix& X, const std::vector<int>& y) {
  if (X.rows < 2) throw TrainError("CFS needs at least two samples");
  if (X.rows != y.size()) throw TrainError("labels do not match matrix rows");
  if (X.cols == 0) throw TrainError("CFS needs at least one feature");

  ColumnStats stats = column_stats(X);
  std::vector<double> rcf(X.cols);
  for (std::size_t f = 0; f < X.cols; ++f) {
    rcf[f] = std::abs(pearson_with_labels(X, f, y, stats));
  }
  // Pairwise |corr|, computed on demand; -1 marks "not yet computed".
  Matrix ff(X.cols, X.cols);
  std::fill(ff.data.begin(), ff.data.end(), -1.0);
  auto rff = [&](std::size_t a, std::size_t b) {
    double& cell = ff.at(std::min(a, b), std::max(a, b));
    if (cell < 0.0) cell = std::abs(pearson(X, a, b, stats));
    return cell;
  };

  using Subset = std::vector<std::size_t>;  // kept sorted ascending
  struct Node {
    double merit;
    Subset subset;
  };
  // Highest merit first; ties prefer the lexicographically smaller subset,
  // which realizes the lower-feature-index rule.
  auto cmp = [](const Node& a, const Node& b) {
    if (a.merit != b.merit) return a.merit < b.merit;
    return a.subset > b.subset;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> open(cmp);
  std::set<Subset> visited;

  open.push({0.0, {}});
  visited.insert({});

  CfsSelection best;
  best.merit = -1.0;
  int stall = 0;

  while (!open.empty() && stall < 5) {
    Node node = open.top();
    open.pop();

    bool improved = false;
    for (std::size_t f = 0; f < X.cols; ++f) {
      if (std::binary_search(node.subset.begin(), node.subset.end(), f)) {
        continue;
      }
      Subset child = node.subset;
      child.insert(std::upper_bound(child.begin(), child.end(), f), f);
      if (!visited.insert(child).second) continue;
      double merit = merit_from_corr(child, rcf, rff);
      if (merit > best.merit) {
        best.merit = merit;
        best.indices = child;
        improved = true;
      }
      open.push({merit, std::move(child)});
    }
    stall = improved ? 0 : stall + 1;
  }

  return best;  // the first expansion always sets a best subset
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kLogRegFormat = "clickbait-logreg-v1";
}

std::string logreg_to_json(const LogRegModel& model,
                           const std::vector<std::string>& feature_names) {
  nlohmann::json j;
  j["format"] = kLogRegFormat;
  j["feature_names"] = feature_names;
  j["normalizer"]["mean"] = model.normalizer.mean;
  j["normalizer"]["std"] = model.normalizer.std;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["config"]["lambda"] = model.config.lambda;
  j["config"]["max_epochs"] = model.config.max_epochs;
  j["config"]["tol"] = model.config.tol;
  j["report"]["converged"] = model.report.converged;
  j["report"]["epochs"] = model.report.epochs;
  j["report"]["initial_loss"] = model.report.initial_loss;
  j["report"]["final_loss"] = model.report.final_loss;
  j["report"]["grad_max_norm"] = model.report.grad_max_norm;
  return j.dump(2) + "\n";
}

LogRegModel logreg_from_json(const std::string& text,
                             std::vector<std::string>* feature_names) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError("malformed model JSON");
  if (j.value("format", "") != kLogRegFormat) {
    throw DataError("unknown model format: " + j.value("format", "<missing>"));
  }
  LogRegModel model;
  model.normalizer.mean = j["normalizer"]["mean"].get<std::vector<double>>();
  model.normalizer.std = j["normalizer"]["std"].get<std::vector<double>>();
  model.weights = j["weights"].get<std::vector<double>>();
  model.bias = j["bias"].get<double>();
  model.config.lambda = j["config"]["lambda"].get<double>();
  model.config.max_epochs = j["config"]["max_epochs"].get<std::size_t>();
  model.config.tol = j["config"]["tol"].get<double>();
  model.report.converged = j["report"]["converged"].get<bool>();
  model.report.epochs = j["report"]["epochs"].get<std::size_t>();
  model.report.initial_loss = j["report"]["initial_loss"].get<double>();
  model.report.final_loss = j["report"]["final_loss"].get<double>();
  model.report.grad_max_norm = j["report"]["grad_max_norm"].get<double>();
  if (model.weights.size() != model.normalizer.mean.size() ||
      model.normalizer.mean.size() != model.normalizer.std.size()) {
    throw DataError("model JSON dimensions are inconsistent");
  }
  if (feature_names) {
    *feature_names = j["feature_names"].get<std::vector<std::string>>();
  }
  return model;
}

void save_logreg(const std::filesystem::path& path, const LogRegModel& model,
                 const std::vector<std::string>& feature_names) {
  write_file(path, logreg_to_json(model, feature_names));
}

LogRegModel load_logreg(const std::filesystem::path& path,
                        std::vector<std::string>* feature_names) {
  return logreg_from_json(read_file(path), feature_names);
}

}  // namespace clickbait
