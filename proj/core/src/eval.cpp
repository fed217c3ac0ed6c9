#include "clickbait/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "clickbait/util.hpp"

namespace clickbait {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

std::vector<int> labels_of(const std::vector<LabeledInstance>& data) {
  std::vector<int> labels;
  labels.reserve(data.size());
  for (const LabeledInstance& inst : data) labels.push_back(inst.label);
  return labels;
}

std::vector<double> means_of(const std::vector<LabeledInstance>& data) {
  std::vector<double> means;
  means.reserve(data.size());
  for (const LabeledInstance& inst : data) means.push_back(inst.truth.mean);
  return means;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

void append_padded(std::string& out, const std::string& cell,
                   std::size_t width) {
  out += cell;
  for (std::size_t i = cell.size(); i < width; ++i) out += ' ';
}

}  // namespace

ConfusionCounts confusion(std::span<const double> scores,
                          std::span<const int> labels, double threshold) {
  if (scores.size() != labels.size()) {
    throw UsageError("confusion: scores and labels differ in length");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    bool predicted = scores[i] >= threshold;
    bool actual = labels[i] == 1;
    if (predicted && actual) ++c.tp;
    else if (predicted && !actual) ++c.fp;
    else if (!predicted && actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double mse_vs_mean(std::span<const double> scores,
                   std::span<const double> truth_means) {
  if (truth_means.empty()) return 0.0;
  if (scores.size() != truth_means.size()) {
    throw UsageError("mse_vs_mean: scores and means differ in length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    double d = scores[i] - truth_means[i];
    sum += d * d;
  }
  return sum / static_cast<double>(scores.size());
}

Metrics metrics(const ConfusionCounts& c, std::span<const double> scores,
                std::span<const double> truth_means) {
  Metrics m;
  double tp = static_cast<double>(c.tp);
  m.precision = ratio(tp, tp + static_cast<double>(c.fp));
  m.recall = ratio(tp, tp + static_cast<double>(c.fn));
  m.f_score = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  m.accuracy = ratio(tp + static_cast<double>(c.tn),
                     static_cast<double>(c.total()));
  m.mse_vs_mean = mse_vs_mean(scores, truth_means);
  return m;
}

// ---------------------------------------------------------------------------
// Ablation grid
// ---------------------------------------------------------------------------

std::vector<AblationRow> ablation_grid(const std::vector<LabeledInstance>& train,
                                       const std::vector<LabeledInstance>& test,
                                       const FeatureExtractor& fx,
                                       std::span<const Source> sources,
                                       const AblationOptions& options) {
  if (train.empty() || test.empty()) {
    throw UsageError("ablation grid needs non-empty train and test sets");
  }

  std::vector<std::vector<Block>> subsets = canonical_block_subsets();
  if (options.quick) subsets.resize(kHandblockCount);  // singletons only

  std::vector<int> train_labels = labels_of(train);
  std::vector<double> test_means = means_of(test);
  std::vector<int> test_labels = labels_of(test);

  std::vector<InstanceBlocks> train_cache(train.size());
  std::vector<InstanceBlocks> test_cache(test.size());
  parallel_for(train.size() + test.size(), options.threads, [&](std::size_t i) {
    if (i < train.size()) {
      train_cache[i] = fx.compute_blocks(train[i].instance);
    } else {
      test_cache[i - train.size()] =
          fx.compute_blocks(test[i - train.size()].instance);
    }
  });

  std::vector<AblationRow> rows(sources.size() * subsets.size());
  parallel_for(rows.size(), options.threads, [&](std::size_t cell) {
    std::size_t src_idx = cell / subsets.size();
    std::size_t sub_idx = cell % subsets.size();
    AblationRow& row = rows[cell];
    row.source = sources[src_idx];
    row.blocks = subsets[sub_idx];
    row.label = subset_label(row.blocks);

    AssembleRequest req{row.blocks, row.source, true};
    std::vector<FeatureVector> train_rows;
    train_rows.reserve(train.size());
    for (const InstanceBlocks& blocks : train_cache) {
      train_rows.push_back(fx.assemble_from_blocks(blocks, req));
    }
    LogRegModel model =
        train_logreg(make_matrix(train_rows), train_labels, options.trainer);

    std::vector<double> scores;
    scores.reserve(test.size());
    for (const InstanceBlocks& blocks : test_cache) {
      FeatureVector v = fx.assemble_from_blocks(blocks, req);
      scores.push_back(model.predict_proba(v.values));
    }
    row.metrics = metrics(confusion(scores, test_labels), scores, test_means);
  });

  return rows;
}

std::vector<AblationRow> ablation_grid(const std::vector<LabeledInstance>& train,
                                       const std::vector<LabeledInstance>& test,
                                       const FeatureExtractor& fx,
                                       const AblationOptions& options) {
  static const Source kSources[] = {Source::Post, Source::Title};
  return ablation_grid(train, test, fx, kSources, options);
}

// ---------------------------------------------------------------------------
// Cross-validated comparison
// ---------------------------------------------------------------------------

namespace {

struct CrossvalCell {
  std::string label;
  Source source;
  bool use_cfs;
};

}  // namespace

std::vector<CrossvalRow> crossval_report(const std::vector<LabeledInstance>& train,
                                         const FeatureExtractor& fx,
                                         const CrossvalOptions& options) {
  const CrossvalCell cells[] = {
      {"Post", Source::Post, false},
      {"Title", Source::Title, false},
      {"Both", Source::PostAndTitle, false},
      {"Feature selection", Source::PostAndTitle, true},
  };

  std::vector<int> labels = labels_of(train);
  std::vector<double> means = means_of(train);
  FoldAssignment folds = make_folds(labels, options.k, options.seed);

  std::vector<InstanceBlocks> cache(train.size());
  parallel_for(train.size(), options.threads, [&](std::size_t i) {
    cache[i] = fx.compute_blocks(train[i].instance);
  });

  std::vector<std::vector<Block>> all_blocks(std::size(cells));
  for (auto& blocks : all_blocks) {
    blocks = {Block::MOR, Block::STY, Block::GRA, Block::SEN, Block::GID};
  }

  // One task per (configuration, fold); each writes its own fold slot.
  std::size_t n_cells = std::size(cells);
  std::vector<std::vector<ConfusionCounts>> fold_counts(
      n_cells, std::vector<ConfusionCounts>(folds.k));
  std::vector<std::vector<Metrics>> fold_metrics(
      n_cells, std::vector<Metrics>(folds.k));

  parallel_for(n_cells * folds.k, options.threads, [&](std::size_t task) {
    std::size_t ci = task / folds.k;
    std::size_t f = task % folds.k;
    const CrossvalCell& cell = cells[ci];

    AssembleRequest req{all_blocks[ci], cell.source, true};
    std::vector<FeatureVector> train_rows;
    std::vector<int> train_y;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (folds.fold_of[i] == f) {
        test_idx.push_back(i);
      } else {
        train_rows.push_back(fx.assemble_from_blocks(cache[i], req));
        train_y.push_back(labels[i]);
      }
    }
    Matrix X = make_matrix(train_rows);

    CfsSelection selection;
    if (cell.use_cfs) {
      selection = cfs_select(X, train_y);
      X = select_columns(X, selection.indices);
    }
    LogRegModel model = train_logreg(X, train_y, options.trainer);

    std::vector<double> scores;
    std::vector<int> y;
    std::vector<double> m;
    scores.reserve(test_idx.size());
    for (std::size_t idx : test_idx) {
      FeatureVector v = fx.assemble_from_blocks(cache[idx], req);
      std::vector<double> values =
          cell.use_cfs ? select_values(v.values, selection.indices)
                       : std::move(v.values);
      scores.push_back(model.predict_proba(values));
      y.push_back(labels[idx]);
      m.push_back(means[idx]);
    }
    fold_counts[ci][f] = confusion(scores, y);
    fold_metrics[ci][f] = metrics(fold_counts[ci][f], scores, m);
  });

  std::vector<CrossvalRow> rows(n_cells);
  for (std::size_t ci = 0; ci < n_cells; ++ci) {
    CrossvalRow& row = rows[ci];
    row.label = cells[ci].label;
    row.per_fold = fold_metrics[ci];

    ConfusionCounts pooled;
    Metrics mean_metrics;
    double mse_sum = 0.0;
    for (std::size_t f = 0; f < folds.k; ++f) {
      pooled.tp += fold_counts[ci][f].tp;
      pooled.fp += fold_counts[ci][f].fp;
      pooled.tn += fold_counts[ci][f].tn;
      pooled.fn += fold_counts[ci][f].fn;
      mean_metrics.precision += fold_metrics[ci][f].precision;
      mean_metrics.recall += fold_metrics[ci][f].recall;
      mean_metrics.f_score += fold_metrics[ci][f].f_score;
      mean_metrics.accuracy += fold_metrics[ci][f].accuracy;
      mse_sum += fold_metrics[ci][f].mse_vs_mean;
    }
    double k = static_cast<double>(folds.k);
    mean_metrics.precision /= k;
    mean_metrics.recall /= k;
    mean_metrics.f_score /= k;
    mean_metrics.accuracy /= k;
    mean_metrics.mse_vs_mean = mse_sum / k;
    row.fold_mean = mean_metrics;

    row.pooled = metrics(pooled, {}, {});
    // The pooled MSE weights every instance equally, unlike the fold mean.
    double weighted = 0.0;
    for (std::size_t f = 0; f < folds.k; ++f) {
      weighted += fold_metrics[ci][f].mse_vs_mean *
                  static_cast<double>(fold_counts[ci][f].total());
    }
    row.pooled.mse_vs_mean = ratio(weighted, static_cast<double>(pooled.total()));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Threshold sweep
// ---------------------------------------------------------------------------

std::vector<SweepPoint> threshold_sweep(std::span<const double> scores,
                                        std::span<const int> labels,
                                        std::size_t steps) {
  if (steps < 2) throw UsageError("threshold sweep needs at least 2 steps");
  std::vector<SweepPoint> sweep;
  sweep.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    SweepPoint point;
    point.threshold =
        static_cast<double>(i) / static_cast<double>(steps - 1);
    point.counts = confusion(scores, labels, point.threshold);
    point.metrics = metrics(point.counts, {}, {});
    sweep.push_back(point);
  }
  return sweep;
}

// ---------------------------------------------------------------------------
// Report writers
// ---------------------------------------------------------------------------

namespace {

std::string stamp_line(const std::string& stamp) {
  return stamp.empty() ? std::string() : "# " + stamp + "\n";
}

}  // namespace

void write_ablation_csv(const std::filesystem::path& path,
                        const std::vector<AblationRow>& rows,
                        const std::string& stamp) {
  std::string out = stamp_line(stamp);
  out += "source,features,f_score,precision,recall,accuracy,mse_vs_mean\n";
  for (const AblationRow& row : rows) {
    out += std::string(source_name(row.source)) + "," +
           csv_escape(row.label) + "," + format_double(row.metrics.f_score) +
           "," + format_double(row.metrics.precision) + "," +
           format_double(row.metrics.recall) + "," +
           format_double(row.metrics.accuracy) + "," +
           format_double(row.metrics.mse_vs_mean) + "\n";
  }
  write_file(path, out);
}

std::string format_ablation_tables(const std::vector<AblationRow>& rows) {
  std::size_t label_width = std::string("Features").size();
  for (const AblationRow& row : rows) {
    label_width = std::max(label_width, row.label.size());
  }
  label_width += 2;

  std::string out;
  Source current = Source::Post;
  bool first_section = true;
  for (const AblationRow& row : rows) {
    if (first_section || row.source != current) {
      current = row.source;
      if (!first_section) out += '\n';
      first_section = false;
      out += "Features extracted from the ";
      out += current == Source::Post ? "post text" :
             current == Source::Title ? "target title" : "post and title";
      out += "\n";
      append_padded(out, "Features", label_width);
      out += "F-score  Precision  Recall  Accuracy  MSE\n";
    }
    append_padded(out, row.label, label_width);
    append_padded(out, fixed3(row.metrics.f_score), 9);
    append_padded(out, fixed3(row.metrics.precision), 11);
    append_padded(out, fixed3(row.metrics.recall), 8);
    append_padded(out, fixed3(row.metrics.accuracy), 10);
    out += fixed3(row.metrics.mse_vs_mean);
    out += '\n';
  }
  return out;
}

void write_crossval_csv(const std::filesystem::path& path,
                        const std::vector<CrossvalRow>& rows,
                        const std::string& stamp) {
  std::string out = stamp_line(stamp);
  out += "features,aggregation,f_score,precision,recall,accuracy,mse_vs_mean\n";
  auto emit = [&out](const std::string& label, const char* aggregation,
                     const Metrics& m) {
    out += csv_escape(label) + "," + aggregation + "," +
           format_double(m.f_score) + "," + format_double(m.precision) + "," +
           format_double(m.recall) + "," + format_double(m.accuracy) + "," +
           format_double(m.mse_vs_mean) + "\n";
  };
  for (const CrossvalRow& row : rows) {
    emit(row.label, "pooled", row.pooled);
    emit(row.label, "fold_mean", row.fold_mean);
  }
  write_file(path, out);
}

std::string format_crossval_table(const std::vector<CrossvalRow>& rows) {
  std::size_t label_width = std::string("Features").size();
  for (const CrossvalRow& row : rows) {
    label_width = std::max(label_width, row.label.size());
  }
  label_width += 2;

  std::string out = "Cross-validated single-level models";
  out += " (pooled confusion counts; fold means in parentheses)\n";
  append_padded(out, "Features", label_width);
  out += "F-score          Precision        Recall           Accuracy\n";
  for (const CrossvalRow& row : rows) {
    append_padded(out, row.label, label_width);
    append_padded(out,
                  fixed3(row.pooled.f_score) + " (" +
                      fixed3(row.fold_mean.f_score) + ")",
                  17);
    append_padded(out,
                  fixed3(row.pooled.precision) + " (" +
                      fixed3(row.fold_mean.precision) + ")",
                  17);
    append_padded(out,
                  fixed3(row.pooled.recall) + " (" +
                      fixed3(row.fold_mean.recall) + ")",
                  17);
    out += fixed3(row.pooled.accuracy) + " (" +
           fixed3(row.fold_mean.accuracy) + ")";
    out += '\n';
  }
  return out;
}

void write_threshold_sweep_csv(const std::filesystem::path& path,
                               const std::vector<SweepPoint>& sweep,
                               const std::string& stamp) {
  std::string out = stamp_line(stamp);
  out += "threshold,tp,fp,tn,fn,precision,recall,f_score,accuracy\n";
  for (const SweepPoint& point : sweep) {
    out += format_double(point.threshold) + "," +
           std::to_string(point.counts.tp) + "," +
           std::to_string(point.counts.fp) + "," +
           std::to_string(point.counts.tn) + "," +
           std::to_string(point.counts.fn) + "," +
           format_double(point.metrics.precision) + "," +
           format_double(point.metrics.recall) + "," +
           format_double(point.metrics.f_score) + "," +
           format_double(point.metrics.accuracy) + "\n";
  }
  write_file(path, out);
}

void write_predictions_jsonl(const std::filesystem::path& path,
                             std::span<const std::string> ids,
                             std::span<const double> scores) {
  if (ids.size() != scores.size()) {
    throw UsageError("predictions: ids and scores differ in length");
  }
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    nlohmann::json id = ids[i];  // quotes + escapes the id
    out += "{\"id\": " + id.dump() + ", \"clickbaitScore\": " +
           format_double(scores[i]) + "}\n";
  }
  write_file(path, out);
}

}  // namespace clickbait
