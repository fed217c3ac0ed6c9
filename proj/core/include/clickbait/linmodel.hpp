#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "clickbait/features.hpp"

namespace clickbait {

// Dense row-major matrix; rows are instances, columns are features.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

Matrix make_matrix(const std::vector<FeatureVector>& rows);

// Column subset in the given index order (used by CFS-selected models).
Matrix select_columns(const Matrix& X, std::span<const std::size_t> indices);
std::vector<double> select_values(std::span<const double> x,
                                  std::span<const std::size_t> indices);

// Z-score statistics fitted on training data. Columns with zero standard
// deviation normalize to 0.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> std;

  std::size_t dimension() const { return mean.size(); }
  std::vector<double> apply(std::span<const double> x) const;
};

Normalizer fit_normalizer(const Matrix& X);
Matrix apply_normalizer(const Normalizer& norm, const Matrix& X);

struct TrainConfig {
  double lambda = 1e-4;      // L2 strength on weights (bias unregularized)
  std::size_t max_epochs = 1000;
  double tol = 1e-6;         // stop when gradient max-norm drops below this
};

struct TrainReport {
  bool converged = false;
  std::size_t epochs = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double grad_max_norm = 0.0;
  std::vector<double> loss_history;  // loss after each accepted step
};

// Logistic regression: sigma(w . normalize(x) + b).
struct LogRegModel {
  std::vector<double> weights;
  double bias = 0.0;
  Normalizer normalizer;
  TrainConfig config;
  TrainReport report;

  double predict_proba(std::span<const double> x) const;
  // Skips normalization; input is already z-scored.
  double predict_from_normalized(std::span<const double> z) const;
};

// Numerically stable sigmoid; the argument is clamped so the result stays in
// the open interval (0, 1) in double precision.
double sigmoid(double z);

// Mean cross-entropy + (lambda/2)*||w||^2 and its gradient, over an already
// normalized matrix. Exposed for finite-difference oracle tests.
double logreg_loss(const Matrix& Xn, const std::vector<int>& y,
                   std::span<const double> w, double b, double lambda);
void logreg_loss_grad(const Matrix& Xn, const std::vector<int>& y,
                      std::span<const double> w, double b, double lambda,
                      std::span<double> grad_w, double& grad_b);

// Deterministic full-batch gradient descent with Armijo backtracking.
// Throws TrainError on non-binary or single-class labels, non-finite inputs,
// or fewer than two samples.
LogRegModel train_logreg(const Matrix& X, const std::vector<int>& y,
                         const TrainConfig& config = {});

// ---------------------------------------------------------------------------
// Correlation-based feature subset selection
// ---------------------------------------------------------------------------

struct CfsSelection {
  std::vector<std::size_t> indices;  // ascending
  double merit = 0.0;
};

// merit = k*rcf / sqrt(k + k*(k-1)*rff), with rcf the mean |Pearson
// corr(feature, y)| and rff the mean pairwise |corr| inside the subset.
// Zero-variance columns contribute correlation 0. Throws UsageError on an
// empty subset.
double cfs_merit(const Matrix& X, const std::vector<int>& y,
                 std::span<const std::size_t> subset);

// Best-first forward search: expand by the single addition maximizing merit,
// keep the best subset seen, stop after 5 consecutive non-improving
// expansions. Ties break toward the lower feature index. Throws TrainError
// when X has fewer than 2 rows.
CfsSelection cfs_select(const Matrix& X, const std::vector<int>& y);

// ---------------------------------------------------------------------------
// Serialization (versioned JSON; round-trips bit-exactly)
// ---------------------------------------------------------------------------

std::string logreg_to_json(const LogRegModel& model,
                           const std::vector<std::string>& feature_names);
LogRegModel logreg_from_json(const std::string& text,
                             std::vector<std::string>* feature_names = nullptr);

void save_logreg(const std::filesystem::path& path, const LogRegModel& model,
                 const std::vector<std::string>& feature_names);
LogRegModel load_logreg(const std::filesystem::path& path,
                        std::vector<std::string>* feature_names = nullptr);

}  // namespace clickbait
