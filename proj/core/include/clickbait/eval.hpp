#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "clickbait/corpus.hpp"
#include "clickbait/ensemble.hpp"
#include "clickbait/features.hpp"
#include "clickbait/linmodel.hpp"

namespace clickbait {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
};

// All values in [0, 1]; zero-denominator cases evaluate to 0.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  double accuracy = 0.0;
  double mse_vs_mean = 0.0;
};

// Positive class = clickbait; a score counts as positive iff >= threshold.
ConfusionCounts confusion(std::span<const double> scores,
                          std::span<const int> labels,
                          double threshold = 0.5);

// Mean squared difference between scores and annotator means. Empty -> 0.
double mse_vs_mean(std::span<const double> scores,
                   std::span<const double> truth_means);

// P = tp/(tp+fp), R = tp/(tp+fn), F = 2PR/(P+R), accuracy = (tp+tn)/total;
// every zero denominator yields 0. truth_means may be empty (mse then 0).
Metrics metrics(const ConfusionCounts& c, std::span<const double> scores,
                std::span<const double> truth_means);

// ---------------------------------------------------------------------------
// Ablation grid: one single-level model per block subset per source
// ---------------------------------------------------------------------------

struct AblationRow {
  Source source = Source::Post;
  std::vector<Block> blocks;
  std::string label;  // subset label, e.g. "Morph_Styl_Gram"
  Metrics metrics;
};

struct AblationOptions {
  TrainConfig trainer;
  std::size_t threads = 0;  // 0 = hardware concurrency
  bool quick = false;       // restrict to the five single-block rows
};

// Trains one logistic regression per (subset, source) cell on `train`,
// evaluates on `test`, and returns rows grouped by source in the canonical
// subset order (singletons, pairs, triples, quadruples, quintet).
std::vector<AblationRow> ablation_grid(const std::vector<LabeledInstance>& train,
                                       const std::vector<LabeledInstance>& test,
                                       const FeatureExtractor& fx,
                                       std::span<const Source> sources,
                                       const AblationOptions& options = {});
// Default sources: post, then title.
std::vector<AblationRow> ablation_grid(const std::vector<LabeledInstance>& train,
                                       const std::vector<LabeledInstance>& test,
                                       const FeatureExtractor& fx,
                                       const AblationOptions& options = {});

// ---------------------------------------------------------------------------
// Cross-validated single-level comparison (4 rows)
// ---------------------------------------------------------------------------

struct CrossvalRow {
  std::string label;  // "Post", "Title", "Both", "Feature selection"
  Metrics pooled;     // canonical: confusion counts pooled across folds
  Metrics fold_mean;  // per-fold metrics averaged, for comparison
  std::vector<Metrics> per_fold;
};

struct CrossvalOptions {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  TrainConfig trainer;
  std::size_t threads = 0;
};

// k-fold cross-validation of four five-block configurations: post-only,
// title-only, post+title concatenated, and CFS-selected post+title (the
// selection is refit inside every fold, so no test information leaks).
std::vector<CrossvalRow> crossval_report(const std::vector<LabeledInstance>& train,
                                         const FeatureExtractor& fx,
                                         const CrossvalOptions& options = {});

// ---------------------------------------------------------------------------
// Threshold sweep
// ---------------------------------------------------------------------------

struct SweepPoint {
  double threshold = 0.0;
  ConfusionCounts counts;
  Metrics metrics;
};

// Evenly spaced thresholds from 0 to 1 inclusive. Raising the threshold
// never increases recall.
std::vector<SweepPoint> threshold_sweep(std::span<const double> scores,
                                        std::span<const int> labels,
                                        std::size_t steps = 101);

// ---------------------------------------------------------------------------
// Report writers. `stamp` is prepended as a "# ..." comment line when
// non-empty so artifacts carry their config hash and seed.
// ---------------------------------------------------------------------------

void write_ablation_csv(const std::filesystem::path& path,
                        const std::vector<AblationRow>& rows,
                        const std::string& stamp = "");
std::string format_ablation_tables(const std::vector<AblationRow>& rows);

void write_crossval_csv(const std::filesystem::path& path,
                        const std::vector<CrossvalRow>& rows,
                        const std::string& stamp = "");
std::string format_crossval_table(const std::vector<CrossvalRow>& rows);

void write_threshold_sweep_csv(const std::filesystem::path& path,
                               const std::vector<SweepPoint>& sweep,
                               const std::string& stamp = "");

// One line per instance, input order: {"id": ..., "clickbaitScore": ...}.
void write_predictions_jsonl(const std::filesystem::path& path,
                             std::span<const std::string> ids,
                             std::span<const double> scores);

}  // namespace clickbait
