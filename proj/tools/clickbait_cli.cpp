// Command-line front end: ingest, split, extract, train, predict, evaluate,
// ablate. Declarative JSON config with environment and flag overrides
// (flags win over env over file); all artifacts carry the config hash and
// seed, and results are independent of the thread count.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "clickbait/config.hpp"
#include "clickbait/corpus.hpp"
#include "clickbait/ensemble.hpp"
#include "clickbait/eval.hpp"
#include "clickbait/features.hpp"
#include "clickbait/textkit.hpp"
#include "clickbait/util.hpp"

namespace {

using namespace clickbait;

class StageTimer {
 public:
  explicit StageTimer(std::string name)
      : name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    auto elapsed = std::chrono::steady_clock::now() - start_;
    auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    std::fprintf(stderr, "[time] %s: %lld ms\n", name_.c_str(),
                 static_cast<long long>(ms));
  }

 private:
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

std::string resolve_data_dir(const RunConfig& config) {
  return config.data_dir.empty() ? default_data_dir() : config.data_dir;
}

std::filesystem::path model_dir(const RunConfig& config) {
  return config.model_dir.empty()
             ? std::filesystem::path(config.out_dir) / "model"
             : std::filesystem::path(config.model_dir);
}

std::string stamp(const RunConfig& config) {
  return "config_hash=" + to_hex(config_hash(config)) +
         " seed=" + std::to_string(config.seed);
}

std::vector<LabeledInstance> load_joined(const RunConfig& config) {
  StageTimer timer("load+join");
  if (config.instances_path.empty() || config.truth_path.empty()) {
    throw UsageError("instances and truth paths are required");
  }
  std::vector<PostInstance> instances = load_instances(config.instances_path);
  std::vector<TruthRecord> truths = load_truth(config.truth_path);
  std::vector<std::string> orphans;
  std::vector<LabeledInstance> joined =
      join_truth(instances, truths, binarization_policy(config), &orphans);
  if (!orphans.empty()) {
    std::fprintf(stderr, "[warn] %zu truth records have no instance\n",
                 orphans.size());
  }
  return joined;
}

DatasetSplit split_joined(const RunConfig& config,
                          const std::vector<LabeledInstance>& joined) {
  StageTimer timer("split");
  if (config.split_a + config.split_b + config.split_c != joined.size()) {
    throw UsageError(
        "split sizes " + std::to_string(config.split_a) + "+" +
        std::to_string(config.split_b) + "+" + std::to_string(config.split_c) +
        " do not sum to the corpus size " + std::to_string(joined.size()) +
        "; set split_a/split_b/split_c");
  }
  return split(joined, config.split_a, config.split_b, config.split_c,
               config.seed);
}

TextKit load_kit(const RunConfig& config) {
  StageTimer timer("lexicons");
  return TextKit(resolve_data_dir(config));
}

std::vector<PostInstance> instances_of(
    const std::vector<LabeledInstance>& labeled) {
  std::vector<PostInstance> out;
  out.reserve(labeled.size());
  for (const LabeledInstance& item : labeled) out.push_back(item.instance);
  return out;
}

std::vector<TruthRecord> truths_of(
    const std::vector<LabeledInstance>& labeled) {
  std::vector<TruthRecord> out;
  out.reserve(labeled.size());
  for (const LabeledInstance& item : labeled) out.push_back(item.truth);
  return out;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_ingest(const RunConfig& config) {
  std::vector<LabeledInstance> joined = load_joined(config);
  std::size_t clickbait = 0;
  double mean_sum = 0.0;
  std::size_t with_media = 0;
  for (const LabeledInstance& item : joined) {
    clickbait += item.label == 1 ? 1 : 0;
    mean_sum += item.truth.mean;
    with_media += item.instance.has_media ? 1 : 0;
  }
  std::printf("instances: %zu\n", joined.size());
  std::printf("clickbait: %zu (%.1f%%)\n", clickbait,
              joined.empty() ? 0.0
                             : 100.0 * static_cast<double>(clickbait) /
                                   static_cast<double>(joined.size()));
  std::printf("no-clickbait: %zu\n", joined.size() - clickbait);
  std::printf("mean annotator score: %.4f\n",
              joined.empty() ? 0.0
                             : mean_sum / static_cast<double>(joined.size()));
  std::printf("with media: %zu\n", with_media);
  std::printf("corpus hash: %s\n",
              to_hex(corpus_hash(instances_of(joined))).c_str());
  std::printf("config hash: %s\n", to_hex(config_hash(config)).c_str());
  return 0;
}

int cmd_split(const RunConfig& config) {
  std::vector<LabeledInstance> joined = load_joined(config);
  DatasetSplit parts = split_joined(config, joined);

  std::filesystem::path out(config.out_dir);
  StageTimer timer("write splits");
  write_instances(out / "set_a.jsonl", instances_of(parts.set_a));
  write_truth(out / "set_a_truth.jsonl", truths_of(parts.set_a));
  write_instances(out / "set_b.jsonl", instances_of(parts.set_b));
  write_truth(out / "set_b_truth.jsonl", truths_of(parts.set_b));
  write_instances(out / "set_c.jsonl", instances_of(parts.set_c));
  write_truth(out / "set_c_truth.jsonl", truths_of(parts.set_c));
  std::printf("wrote %zu/%zu/%zu instances under %s\n", parts.set_a.size(),
              parts.set_b.size(), parts.set_c.size(), out.string().c_str());
  return 0;
}

int cmd_extract(const RunConfig& config) {
  std::vector<LabeledInstance> joined = load_joined(config);
  TextKit kit = load_kit(config);
  FeatureExtractor fx(kit);

  AssembleRequest request = assemble_request(config);
  std::vector<PostInstance> instances = instances_of(joined);

  StageTimer timer("extract");
  VocabModel bow, ngr;
  const VocabModel* bow_ptr = nullptr;
  const VocabModel* ngr_ptr = nullptr;
  bool wants_bow = false, wants_ngr = false;
  for (Block b : request.blocks) {
    wants_bow |= b == Block::BOW;
    wants_ngr |= b == Block::NGR;
  }
  std::vector<std::string> texts;
  if (wants_bow || wants_ngr) {
    texts.reserve(instances.size());
    for (const PostInstance& inst : instances) texts.push_back(inst.post_text);
  }
  if (wants_bow) {
    bow = fx.fit_vocab(texts, VocabModel::Mode::Bow, config.bow_cap,
                       config.vocab_min_freq);
    bow_ptr = &bow;
  }
  if (wants_ngr) {
    ngr = fx.fit_vocab(texts, VocabModel::Mode::Ngram, config.ngr_cap,
                       config.vocab_min_freq);
    ngr_ptr = &ngr;
  }

  FeatureSchema schema = fx.schema_for(request, bow_ptr, ngr_ptr);
  std::vector<std::string> ids;
  std::vector<FeatureVector> rows(instances.size());
  ids.reserve(instances.size());
  for (const PostInstance& inst : instances) ids.push_back(inst.id);
  parallel_for(instances.size(), config.threads, [&](std::size_t i) {
    rows[i] = fx.assemble(instances[i], request, bow_ptr, ngr_ptr);
  });

  std::filesystem::path out(config.out_dir);
  write_feature_csv(out / "features.csv", schema, ids, rows);

  FeatureCacheData cache;
  cache.corpus_hash = corpus_hash(instances);
  cache.config_hash = config_hash(config);
  cache.names = schema.names();
  cache.ids = ids;
  cache.rows = rows;
  write_feature_cache(out / "features.cache", cache);

  std::printf("wrote %zu rows x %zu features to %s\n", rows.size(),
              schema.dimension(), (out / "features.csv").string().c_str());
  return 0;
}

int cmd_train(const RunConfig& config) {
  std::vector<LabeledInstance> joined = load_joined(config);
  DatasetSplit parts = split_joined(config, joined);
  TextKit kit = load_kit(config);
  FeatureExtractor fx(kit);

  StackingOptions options = stacking_options(config);
  StackedModel model;
  {
    StageTimer timer("train");
    model = options.holdout
                ? train_stacked_holdout(parts.set_a, parts.set_b, fx, options)
                : train_stacked(parts.set_a, fx, options);
  }
  model.config_hash = config_hash(config);
  model.corpus_hash = corpus_hash(instances_of(joined));

  std::filesystem::path dir = model_dir(config);
  {
    StageTimer timer("save bundle");
    save_stacked(dir, model);
  }
  std::size_t violations =
      audit_fold_log(model.fold_log, options.holdout ? parts.set_b : parts.set_a,
                     model.inventory.size());
  std::printf("trained %zu first-level models (k=%zu, %s)\n",
              model.inventory.size(), options.k,
              options.majority_only ? "majority-vote" : "second-level");
  std::printf("fold-log violations: %zu\n", violations);
  std::printf("bundle: %s\n", dir.string().c_str());
  std::printf("config hash: %s\n", to_hex(model.config_hash).c_str());
  return 0;
}

int cmd_predict(const RunConfig& config, const std::string& instances_path,
                const std::string& out_path) {
  if (instances_path.empty()) {
    throw UsageError("predict needs --instances");
  }
  StackedModel model;
  {
    StageTimer timer("load bundle");
    model = load_stacked(model_dir(config));
  }
  TextKit kit = load_kit(config);
  FeatureExtractor fx(kit);
  std::vector<PostInstance> instances = load_instances(instances_path);

  std::vector<std::string> ids(instances.size());
  std::vector<double> scores(instances.size());
  {
    StageTimer timer("predict");
    parallel_for(instances.size(), config.threads, [&](std::size_t i) {
      ids[i] = instances[i].id;
      std::vector<double> probs = first_level_probs(model, fx, instances[i]);
      scores[i] = model.options.majority_only
                      ? majority_vote_share(probs)
                      : model.second_level.predict_proba(probs);
    });
  }

  std::filesystem::path out = out_path.empty()
                                  ? std::filesystem::path(config.out_dir) /
                                        "predictions.jsonl"
                                  : std::filesystem::path(out_path);
  write_predictions_jsonl(out, ids, scores);
  std::printf("wrote %zu predictions to %s\n", scores.size(),
              out.string().c_str());
  return 0;
}

int cmd_evaluate(const RunConfig& config) {
  std::vector<LabeledInstance> joined = load_joined(config);
  DatasetSplit parts = split_joined(config, joined);
  const std::vector<LabeledInstance>& test = parts.set_c;
  if (test.empty()) throw UsageError("evaluate needs a non-empty test split");

  StackedModel model = load_stacked(model_dir(config));
  TextKit kit = load_kit(config);
  FeatureExtractor fx(kit);

  std::vector<std::string> ids(test.size());
  std::vector<double> scores(test.size());
  std::vector<int> labels(test.size());
  std::vector<double> means(test.size());
  {
    StageTimer timer("score test split");
    parallel_for(test.size(), config.threads, [&](std::size_t i) {
      ids[i] = test[i].instance.id;
      labels[i] = test[i].label;
      means[i] = test[i].truth.mean;
      std::vector<double> probs =
          first_level_probs(model, fx, test[i].instance);
      scores[i] = model.options.majority_only
                      ? majority_vote_share(probs)
                      : model.second_level.predict_proba(probs);
    });
  }

  ConfusionCounts counts = confusion(scores, labels);
  Metrics m = metrics(counts, scores, means);

  std::filesystem::path out(config.out_dir);
  write_predictions_jsonl(out / "predictions.jsonl", ids, scores);
  write_threshold_sweep_csv(out / "threshold_sweep.csv",
                            threshold_sweep(scores, labels), stamp(config));

  std::string csv = "# " + stamp(config) + "\n";
  csv += "tp,fp,tn,fn,f_score,precision,recall,accuracy,mse_vs_mean\n";
  csv += std::to_string(counts.tp) + "," + std::to_string(counts.fp) + "," +
         std::to_string(counts.tn) + "," + std::to_string(counts.fn) + "," +
         format_double(m.f_score) + "," + format_double(m.precision) + "," +
         format_double(m.recall) + "," + format_double(m.accuracy) + "," +
         format_double(m.mse_vs_mean) + "\n";
  write_file(out / "metrics.csv", csv);

  std::printf("test instances: %zu\n", test.size());
  std::printf("F-score: %.3f  Precision: %.3f  Recall: %.3f\n", m.f_score,
              m.precision, m.recall);
  std::printf("Accuracy: %.3f  MSE vs mean: %.4f\n", m.accuracy,
              m.mse_vs_mean);
  return 0;
}

int cmd_ablate(const RunConfig& config) {
  std::vector<LabeledInstance> joined = load_joined(config);
  DatasetSplit parts = split_joined(config, joined);
  if (parts.set_a.empty() || parts.set_c.empty()) {
    throw UsageError("ablate needs non-empty train and test splits");
  }
  TextKit kit = load_kit(config);
  FeatureExtractor fx(kit);

  AblationOptions grid_options;
  grid_options.trainer = trainer_config(config);
  grid_options.threads = config.threads;
  grid_options.quick = config.quick;
  std::vector<AblationRow> rows;
  {
    StageTimer timer("ablation grid");
    rows = ablation_grid(parts.set_a, parts.set_c, fx, grid_options);
  }

  CrossvalOptions cv_options;
  cv_options.k = config.folds;
  cv_options.seed = config.seed;
  cv_options.trainer = trainer_config(config);
  cv_options.threads = config.threads;
  std::vector<CrossvalRow> cv;
  {
    StageTimer timer("cross-validation report");
    cv = crossval_report(parts.set_a, fx, cv_options);
  }

  std::filesystem::path out(config.out_dir);
  write_ablation_csv(out / "ablation.csv", rows, stamp(config));
  write_file(out / "ablation.txt", format_ablation_tables(rows));
  write_crossval_csv(out / "crossval.csv", cv, stamp(config));
  write_file(out / "crossval.txt", format_crossval_table(cv));

  std::printf("%s", format_ablation_tables(rows).c_str());
  std::printf("\n%s", format_crossval_table(cv).c_str());
  std::printf("\nwrote reports under %s\n", out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level clickbait detector"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file");

  // Flag overrides; CLI11 only marks them seen, values apply after env.
  std::string flag_out, flag_stacking, flag_instances, flag_truth;
  std::string flag_model, flag_data_dir;
  std::uint64_t flag_seed = 0;
  std::size_t flag_folds = 0, flag_threads = 0;
  bool flag_quick = false;
  auto* opt_seed = app.add_option("--seed", flag_seed, "RNG seed");
  auto* opt_folds = app.add_option("--folds", flag_folds, "Fold count");
  auto* opt_stacking =
      app.add_option("--stacking", flag_stacking,
                     "Fusion mode: second-level | majority-vote");
  auto* opt_threads = app.add_option("--threads", flag_threads,
                                     "Worker threads (0 = hardware)");
  auto* opt_quick =
      app.add_flag("--quick", flag_quick, "Single-block evaluation rows only");
  auto* opt_out = app.add_option("--out", flag_out, "Output directory");
  auto* opt_instances =
      app.add_option("--instances", flag_instances, "Posts JSONL path");
  auto* opt_truth =
      app.add_option("--truth", flag_truth, "Truth judgments JSONL path");
  auto* opt_model =
      app.add_option("--model", flag_model, "Model bundle directory");
  auto* opt_data_dir =
      app.add_option("--data-dir", flag_data_dir, "Lexicon directory");

  CLI::App* ingest = app.add_subcommand("ingest", "Validate and summarize a corpus");
  CLI::App* split_cmd =
      app.add_subcommand("split", "Write the train/validation/test split");
  CLI::App* extract =
      app.add_subcommand("extract", "Write feature CSV and cache");
  CLI::App* train = app.add_subcommand("train", "Train the stacked ensemble");
  CLI::App* predict =
      app.add_subcommand("predict", "Score instances with a trained bundle");
  std::string predict_out;
  predict->add_option("--scores-out", predict_out,
                      "Predictions JSONL path (default <out>/predictions.jsonl)");
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score the test split and write metric reports");
  CLI::App* ablate = app.add_subcommand(
      "ablate", "Train and report the block-subset ablation grids");

  // Global flags may appear after the subcommand name.
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);  // prints the message or requested help text
    return rc == 0 ? 0 : 1;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config = load_config(config_path);
    apply_env_overrides(config);
    if (opt_seed->count()) config.seed = flag_seed;
    if (opt_folds->count()) config.folds = flag_folds;
    if (opt_stacking->count()) config.stacking = flag_stacking;
    if (opt_threads->count()) config.threads = flag_threads;
    if (opt_quick->count()) config.quick = flag_quick;
    if (opt_out->count()) config.out_dir = flag_out;
    if (opt_instances->count()) config.instances_path = flag_instances;
    if (opt_truth->count()) config.truth_path = flag_truth;
    if (opt_model->count()) config.model_dir = flag_model;
    if (opt_data_dir->count()) config.data_dir = flag_data_dir;
    validate_config(config);

    if (ingest->parsed()) return cmd_ingest(config);
    if (split_cmd->parsed()) return cmd_split(config);
    if (extract->parsed()) return cmd_extract(config);
    if (train->parsed()) return cmd_train(config);
    if (predict->parsed())
      return cmd_predict(config, config.instances_path, predict_out);
    if (evaluate->parsed()) return cmd_evaluate(config);
    if (ablate->parsed()) return cmd_ablate(config);
    throw UsageError("no command given");
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const TrainError& e) {
    std::fprintf(stderr, "training error: %s\n", e.what());
    return 3;
  }
}
