#include "clickbait/ensemble.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "clickbait/util.hpp"

namespace clickbait {

namespace {

using nlohmann::json;

constexpr int kInventorySize = 65;

const std::vector<Block>& handblocks() {
  static const std::vector<Block> blocks = {Block::MOR, Block::STY, Block::GRA,
                                            Block::SEN, Block::GID};
  return blocks;
}

std::string_view table_block_name(Block b) {
  switch (b) {
    case Block::MOR: return "Morph";
    case Block::STY: return "Styl";
    case Block::GRA: return "Gram";
    case Block::SEN: return "Sent";
    case Block::GID: return "GID";
    default: return block_name(b);
  }
}

}  // namespace

std::string_view variant_name(ModelSpec::Variant v) {
  switch (v) {
    case ModelSpec::Variant::Plain: return "plain";
    case ModelSpec::Variant::Bow: return "bow";
    case ModelSpec::Variant::Ngram: return "ngram";
    case ModelSpec::Variant::Cfs: return "cfs";
  }
  return "?";
}

std::string subset_label(const std::vector<Block>& blocks) {
  std::string label;
  for (Block b : blocks) {
    if (!label.empty()) label += '_';
    label += table_block_name(b);
  }
  return label;
}

std::string ModelSpec::label() const {
  switch (variant) {
    case Variant::Bow: return "bow";
    case Variant::Ngram: return "ngram";
    case Variant::Cfs: return "cfs";
    case Variant::Plain: break;
  }
  return std::string(source_name(source)) + "." + subset_label(blocks);
}

std::vector<std::vector<Block>> canonical_block_subsets() {
  const std::vector<Block>& all = handblocks();
  std::vector<std::vector<Block>> subsets;
  for (std::size_t size = 1; size <= all.size(); ++size) {
    // lexicographic combinations of `size` positions out of 5
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      std::vector<Block> subset;
      subset.reserve(size);
      for (std::size_t i : idx) subset.push_back(all[i]);
      subsets.push_back(std::move(subset));

      std::size_t i = size;
      while (i > 0 && idx[i - 1] == all.size() - size + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return subsets;
}

std::vector<ModelSpec> build_model_inventory() {
  std::vector<ModelSpec> inventory;
  inventory.reserve(kInventorySize);
  std::vector<std::vector<Block>> subsets = canonical_block_subsets();

  int index = 0;
  for (const std::vector<Block>& subset : subsets) {
    inventory.push_back(
        {index++, subset, Source::Post, ModelSpec::Variant::Plain});
  }
  for (const std::vector<Block>& subset : subsets) {
    inventory.push_back(
        {index++, subset, Source::PostAndTitle, ModelSpec::Variant::Plain});
  }
  inventory.push_back(
      {index++, {Block::BOW}, Source::Post, ModelSpec::Variant::Bow});
  inventory.push_back(
      {index++, {Block::NGR}, Source::Post, ModelSpec::Variant::Ngram});
  inventory.push_back(
      {index++, handblocks(), Source::Post, ModelSpec::Variant::Cfs});
  return inventory;
}

// ---------------------------------------------------------------------------
// Folds
// ---------------------------------------------------------------------------

FoldAssignment make_folds(const std::vector<int>& labels, std::size_t k,
                          std::uint64_t seed) {
  if (k < 2) throw UsageError("fold count must be at least 2");
  if (labels.size() < k) {
    throw UsageError("fewer instances than folds");
  }

  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.fold_of.assign(labels.size(), 0);

  std::mt19937_64 gen(seed);
  std::size_t cursor = 0;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if ((labels[i] == 1 ? 1 : 0) == cls) members.push_back(i);
    }
    for (std::size_t i = members.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(gen() % i);
      std::swap(members[i - 1], members[j]);
    }
    // One cursor shared across classes keeps overall fold sizes within 1.
    for (std::size_t idx : members) {
      out.fold_of[idx] = cursor % k;
      ++cursor;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spec fitting
// ---------------------------------------------------------------------------

namespace {

AssembleRequest request_for(const ModelSpec& spec) {
  switch (spec.variant) {
    case ModelSpec::Variant::Bow:
      return {{Block::BOW}, Source::Post, false};
    case ModelSpec::Variant::Ngram:
      return {{Block::NGR}, Source::Post, false};
    case ModelSpec::Variant::Cfs:
      return {handblocks(), Source::Post, true};
    case ModelSpec::Variant::Plain:
      break;
  }
  return {spec.blocks, spec.source, true};
}

struct SpecFit {
  LogRegModel model;
  VocabModel vocab;   // fitted for bow/ngram variants
  CfsSelection cfs;   // fitted for the cfs variant
};

SpecFit fit_spec(const FeatureExtractor& fx,
                 const std::vector<InstanceBlocks>& cache,
                 const std::vector<int>& labels,
                 const std::vector<std::size_t>& train_idx,
                 const ModelSpec& spec, const StackingOptions& options,
                 const std::string& context) {
  std::vector<int> y;
  y.reserve(train_idx.size());
  bool any0 = false, any1 = false;
  for (std::size_t idx : train_idx) {
    y.push_back(labels[idx]);
    (labels[idx] == 1 ? any1 : any0) = true;
  }
  if (!any0 || !any1) {
    throw TrainError(context + ": training portion is single-class");
  }

  SpecFit fit;
  const VocabModel* bow = nullptr;
  const VocabModel* ngr = nullptr;
  if (spec.variant == ModelSpec::Variant::Bow ||
      spec.variant == ModelSpec::Variant::Ngram) {
    bool is_bow = spec.variant == ModelSpec::Variant::Bow;
    std::vector<const std::vector<std::string>*> streams;
    streams.reserve(train_idx.size());
    for (std::size_t idx : train_idx) {
      streams.push_back(is_bow ? &cache[idx].bow_terms : &cache[idx].ngr_terms);
    }
    fit.vocab = FeatureExtractor::fit_vocab_from_streams(
        streams, is_bow ? VocabModel::Mode::Bow : VocabModel::Mode::Ngram,
        is_bow ? options.bow_cap : options.ngr_cap, options.vocab_min_freq);
    (is_bow ? bow : ngr) = &fit.vocab;
  }

  AssembleRequest req = request_for(spec);
  std::vector<FeatureVector> rows;
  rows.reserve(train_idx.size());
  for (std::size_t idx : train_idx) {
    rows.push_back(fx.assemble_from_blocks(cache[idx], req, bow, ngr));
  }
  Matrix X = make_matrix(rows);

  if (spec.variant == ModelSpec::Variant::Cfs) {
    fit.cfs = cfs_select(X, y);
    X = select_columns(X, fit.cfs.indices);
  }
  fit.model = train_logreg(X, y, options.trainer);
  return fit;
}

double predict_with_fit(const FeatureExtractor& fx, const InstanceBlocks& entry,
                        const ModelSpec& spec, const SpecFit& fit) {
  const VocabModel* bow =
      spec.variant == ModelSpec::Variant::Bow ? &fit.vocab : nullptr;
  const VocabModel* ngr =
      spec.variant == ModelSpec::Variant::Ngram ? &fit.vocab : nullptr;
  FeatureVector v = fx.assemble_from_blocks(entry, request_for(spec), bow, ngr);
  if (spec.variant == ModelSpec::Variant::Cfs) {
    v.values = select_values(v.values, fit.cfs.indices);
  }
  return fit.model.predict_proba(v.values);
}

std::vector<InstanceBlocks> compute_block_cache(
    const FeatureExtractor& fx, const std::vector<LabeledInstance>& data,
    std::size_t threads) {
  std::vector<InstanceBlocks> cache(data.size());
  parallel_for(data.size(), threads, [&](std::size_t i) {
    cache[i] = fx.compute_blocks(data[i].instance);
  });
  return cache;
}

std::vector<std::string> spec_feature_names(const FeatureExtractor& fx,
                                            const ModelSpec& spec,
                                            const SpecFit& fit) {
  const VocabModel* bow =
      spec.variant == ModelSpec::Variant::Bow ? &fit.vocab : nullptr;
  const VocabModel* ngr =
      spec.variant == ModelSpec::Variant::Ngram ? &fit.vocab : nullptr;
  std::vector<std::string> names =
      fx.schema_for(request_for(spec), bow, ngr).names();
  if (spec.variant == ModelSpec::Variant::Cfs) {
    std::vector<std::string> selected;
    selected.reserve(fit.cfs.indices.size());
    for (std::size_t idx : fit.cfs.indices) selected.push_back(names[idx]);
    return selected;
  }
  return names;
}

std::vector<std::string> second_level_names(
    const std::vector<ModelSpec>& inventory) {
  std::vector<std::string> names;
  names.reserve(inventory.size());
  for (const ModelSpec& spec : inventory) {
    char prefix[8];
    std::snprintf(prefix, sizeof(prefix), "%02d:", spec.index);
    names.push_back(prefix + spec.label());
  }
  return names;
}

}  // namespace

// ---------------------------------------------------------------------------
// Out-of-fold matrix
// ---------------------------------------------------------------------------

OofResult out_of_fold_matrix(const std::vector<LabeledInstance>& train,
                             const FeatureExtractor& fx,
                             const FoldAssignment& folds,
                             const StackingOptions& options) {
  if (folds.k < 2) throw UsageError("out-of-fold stacking needs k >= 2");
  if (folds.fold_of.size() != train.size()) {
    throw UsageError("fold assignment does not match training set");
  }

  std::vector<ModelSpec> inventory = build_model_inventory();
  std::vector<int> labels;
  labels.reserve(train.size());
  for (const LabeledInstance& inst : train) labels.push_back(inst.label);

  std::vector<InstanceBlocks> cache =
      compute_block_cache(fx, train, options.threads);

  // Per-fold index lists, shared by all specs.
  std::vector<std::vector<std::size_t>> fold_train(folds.k), fold_test(folds.k);
  for (std::size_t i = 0; i < train.size(); ++i) {
    for (std::size_t f = 0; f < folds.k; ++f) {
      (folds.fold_of[i] == f ? fold_test[f] : fold_train[f]).push_back(i);
    }
  }
  for (std::size_t f = 0; f < folds.k; ++f) {
    if (fold_test[f].empty()) {
      throw UsageError("fold " + std::to_string(f) + " is empty");
    }
  }

  OofResult result;
  result.folds = folds;
  result.probs = Matrix(train.size(), inventory.size());
  result.fold_log.resize(inventory.size() * folds.k);

  // One task per (spec, fold); every matrix cell is written exactly once.
  parallel_for(inventory.size() * folds.k, options.threads, [&](std::size_t t) {
    std::size_t s = t / folds.k;
    std::size_t f = t % folds.k;
    const ModelSpec& spec = inventory[s];
    std::string context =
        "spec " + std::to_string(s) + " (" + spec.label() + "), fold " +
        std::to_string(f);

    SpecFit fit = fit_spec(fx, cache, labels, fold_train[f], spec, options,
                           context);
    for (std::size_t idx : fold_test[f]) {
      result.probs.at(idx, s) = predict_with_fit(fx, cache[idx], spec, fit);
    }

    FoldLogEntry& entry = result.fold_log[t];
    entry.spec_index = spec.index;
    entry.fold = f;
    entry.train_ids.reserve(fold_train[f].size());
    for (std::size_t idx : fold_train[f]) {
      entry.train_ids.push_back(train[idx].instance.id);
    }
    entry.test_ids.reserve(fold_test[f].size());
    for (std::size_t idx : fold_test[f]) {
      entry.test_ids.push_back(train[idx].instance.id);
    }
  });

  return result;
}

// ---------------------------------------------------------------------------
// Stacked training
// ---------------------------------------------------------------------------

namespace {

// Full-data refit of every first-level model for deployment.
void refit_first_level(StackedModel& model,
                       const std::vector<LabeledInstance>& train,
                       const FeatureExtractor& fx,
                       const std::vector<InstanceBlocks>& cache,
                       const StackingOptions& options) {
  std::vector<int> labels;
  labels.reserve(train.size());
  for (const LabeledInstance& inst : train) labels.push_back(inst.label);

  std::vector<std::size_t> all_idx(train.size());
  for (std::size_t i = 0; i < all_idx.size(); ++i) all_idx[i] = i;

  model.first_level.resize(model.inventory.size());
  model.first_level_names.resize(model.inventory.size());
  std::vector<SpecFit> fits(model.inventory.size());
  parallel_for(model.inventory.size(), options.threads, [&](std::size_t s) {
    const ModelSpec& spec = model.inventory[s];
    fits[s] = fit_spec(fx, cache, labels, all_idx, spec, options,
                       "spec " + std::to_string(s) + " (" + spec.label() +
                           "), full training set");
    model.first_level_names[s] = spec_feature_names(fx, spec, fits[s]);
  });

  for (std::size_t s = 0; s < model.inventory.size(); ++s) {
    const ModelSpec& spec = model.inventory[s];
    model.first_level[s] = std::move(fits[s].model);
    if (spec.variant == ModelSpec::Variant::Bow) {
      model.bow = std::move(fits[s].vocab);
    } else if (spec.variant == ModelSpec::Variant::Ngram) {
      model.ngr = std::move(fits[s].vocab);
    } else if (spec.variant == ModelSpec::Variant::Cfs) {
      model.cfs = std::move(fits[s].cfs);
    }
  }
}

}  // namespace

StackedModel train_stacked(const std::vector<LabeledInstance>& train,
                           const FeatureExtractor& fx,
                           const StackingOptions& options) {
  StackedModel model;
  model.inventory = build_model_inventory();
  model.options = options;
  model.options.holdout = false;

  std::vector<int> labels;
  labels.reserve(train.size());
  for (const LabeledInstance& inst : train) labels.push_back(inst.label);

  FoldAssignment folds = make_folds(labels, options.k, options.seed);
  OofResult oof = out_of_fold_matrix(train, fx, folds, options);
  model.fold_log = std::move(oof.fold_log);

  if (!options.majority_only) {
    model.second_level = train_logreg(oof.probs, labels, options.trainer);
  }

  std::vector<InstanceBlocks> cache =
      compute_block_cache(fx, train, options.threads);
  refit_first_level(model, train, fx, cache, options);
  return model;
}

StackedModel train_stacked_holdout(const std::vector<LabeledInstance>& train,
                                   const std::vector<LabeledInstance>& holdout,
                                   const FeatureExtractor& fx,
                                   const StackingOptions& options) {
  if (holdout.empty()) throw UsageError("holdout stacking needs a holdout set");

  StackedModel model;
  model.inventory = build_model_inventory();
  model.options = options;
  model.options.holdout = true;

  std::vector<InstanceBlocks> cache =
      compute_block_cache(fx, train, options.threads);
  refit_first_level(model, train, fx, cache, options);

  // First-level probabilities on the holdout set feed the second level.
  Matrix probs(holdout.size(), model.inventory.size());
  parallel_for(holdout.size(), options.threads, [&](std::size_t i) {
    std::vector<double> p =
        first_level_probs(model, fx, holdout[i].instance);
    std::copy(p.begin(), p.end(), probs.row(i));
  });

  model.fold_log.resize(model.inventory.size());
  for (std::size_t s = 0; s < model.inventory.size(); ++s) {
    FoldLogEntry& entry = model.fold_log[s];
    entry.spec_index = model.inventory[s].index;
    entry.fold = 0;
    for (const LabeledInstance& inst : train) {
      entry.train_ids.push_back(inst.instance.id);
    }
    for (const LabeledInstance& inst : holdout) {
      entry.test_ids.push_back(inst.instance.id);
    }
  }

  if (!options.majority_only) {
    std::vector<int> holdout_labels;
    holdout_labels.reserve(holdout.size());
    for (const LabeledInstance& inst : holdout) {
      holdout_labels.push_back(inst.label);
    }
    model.second_level = train_logreg(probs, holdout_labels, options.trainer);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Prediction and fusion
// ---------------------------------------------------------------------------

std::vector<double> first_level_probs(const StackedModel& model,
                                      const FeatureExtractor& fx,
                                      const PostInstance& instance) {
  InstanceBlocks blocks = fx.compute_blocks(instance);
  std::vector<double> probs;
  probs.reserve(model.inventory.size());
  for (std::size_t s = 0; s < model.inventory.size(); ++s) {
    const ModelSpec& spec = model.inventory[s];
    const VocabModel* bow =
        spec.variant == ModelSpec::Variant::Bow ? &model.bow : nullptr;
    const VocabModel* ngr =
        spec.variant == ModelSpec::Variant::Ngram ? &model.ngr : nullptr;
    FeatureVector v =
        fx.assemble_from_blocks(blocks, request_for(spec), bow, ngr);
    if (spec.variant == ModelSpec::Variant::Cfs) {
      v.values = select_values(v.values, model.cfs.indices);
    }
    probs.push_back(model.first_level[s].predict_proba(v.values));
  }
  return probs;
}

double predict_stacked(const StackedModel& model, const FeatureExtractor& fx,
                       const PostInstance& instance) {
  if (model.options.majority_only) {
    throw UsageError("model was trained majority-only; no second level");
  }
  std::vector<double> probs = first_level_probs(model, fx, instance);
  return model.second_level.predict_proba(probs);
}

int majority_vote(std::span<const double> first_level_probs) {
  std::size_t votes = 0;
  for (double p : first_level_probs) {
    if (p >= 0.5) ++votes;
  }
  return 2 * votes > first_level_probs.size() ? 1 : 0;
}

double majority_vote_share(std::span<const double> first_level_probs) {
  if (first_level_probs.empty()) return 0.0;
  std::size_t votes = 0;
  for (double p : first_level_probs) {
    if (p >= 0.5) ++votes;
  }
  return static_cast<double>(votes) /
         static_cast<double>(first_level_probs.size());
}

std::size_t audit_fold_log(const std::vector<FoldLogEntry>& log,
                           const std::vector<LabeledInstance>& train,
                           std::size_t expected_specs) {
  std::size_t violations = 0;

  std::unordered_map<int, std::unordered_map<std::string, std::size_t>>
      coverage;
  for (const FoldLogEntry& entry : log) {
    std::unordered_set<std::string> train_ids(entry.train_ids.begin(),
                                              entry.train_ids.end());
    for (const std::string& id : entry.test_ids) {
      if (train_ids.count(id)) ++violations;  // leakage cell
      ++coverage[entry.spec_index][id];
    }
  }

  if (coverage.size() != expected_specs) {
    violations += expected_specs > coverage.size()
                      ? expected_specs - coverage.size()
                      : coverage.size() - expected_specs;
  }
  for (const auto& [spec_index, per_id] : coverage) {
    for (const LabeledInstance& inst : train) {
      auto it = per_id.find(inst.instance.id);
      std::size_t count = it == per_id.end() ? 0 : it->second;
      if (count != 1) ++violations;  // missing or duplicated coverage
    }
  }
  return violations;
}

// ---------------------------------------------------------------------------
// Bundle serialization
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kManifestFormat = "clickbait-stacked-v1";
constexpr const char* kVocabFormat = "clickbait-vocab-v1";
constexpr const char* kCfsFormat = "clickbait-cfs-v1";

std::string model_filename(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "model_%03d.json", index);
  return buf;
}

json spec_to_json(const ModelSpec& spec) {
  json j;
  j["index"] = spec.index;
  j["label"] = spec.label();
  std::vector<std::string> blocks;
  for (Block b : spec.blocks) blocks.emplace_back(block_name(b));
  j["blocks"] = blocks;
  j["source"] = std::string(source_name(spec.source));
  j["variant"] = std::string(variant_name(spec.variant));
  return j;
}

Block block_from_name(const std::string& name) {
  for (Block b : {Block::MOR, Block::STY, Block::GRA, Block::SEN, Block::GID,
                  Block::BOW, Block::NGR, Block::MEDIA}) {
    if (block_name(b) == name) return b;
  }
  throw DataError("unknown block name: " + name);
}

Source source_from_name(const std::string& name) {
  for (Source s : {Source::Post, Source::Title, Source::PostAndTitle}) {
    if (source_name(s) == name) return s;
  }
  throw DataError("unknown source name: " + name);
}

ModelSpec::Variant variant_from_name(const std::string& name) {
  for (ModelSpec::Variant v :
       {ModelSpec::Variant::Plain, ModelSpec::Variant::Bow,
        ModelSpec::Variant::Ngram, ModelSpec::Variant::Cfs}) {
    if (variant_name(v) == name) return v;
  }
  throw DataError("unknown variant name: " + name);
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec spec;
  spec.index = j.at("index").get<int>();
  for (const auto& b : j.at("blocks")) {
    spec.blocks.push_back(block_from_name(b.get<std::string>()));
  }
  spec.source = source_from_name(j.at("source").get<std::string>());
  spec.variant = variant_from_name(j.at("variant").get<std::string>());
  return spec;
}

void save_vocab(const std::filesystem::path& path, const VocabModel& vocab) {
  json j;
  j["format"] = kVocabFormat;
  j["mode"] = std::string(vocab_mode_name(vocab.mode()));
  j["cap"] = vocab.cap();
  j["min_freq"] = vocab.min_freq();
  j["terms"] = vocab.terms();
  write_file(path, j.dump(2) + "\n");
}

VocabModel load_vocab(const std::filesystem::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || j.value("format", "") != kVocabFormat) {
    throw DataError("malformed vocabulary file: " + path.string());
  }
  VocabModel::Mode mode = j.at("mode").get<std::string>() == "bow"
                              ? VocabModel::Mode::Bow
                              : VocabModel::Mode::Ngram;
  return VocabModel(mode, j.at("terms").get<std::vector<std::string>>(),
                    j.at("cap").get<std::size_t>(),
                    j.at("min_freq").get<std::size_t>());
}

}  // namespace

void save_stacked(const std::filesystem::path& dir, const StackedModel& model) {
  std::filesystem::create_directories(dir / "first_level");

  json manifest;
  manifest["format"] = kManifestFormat;
  manifest["config_hash"] = to_hex(model.config_hash);
  manifest["corpus_hash"] = to_hex(model.corpus_hash);
  manifest["seed"] = model.options.seed;
  manifest["k"] = model.options.k;
  manifest["stacking_mode"] =
      model.options.majority_only ? "majority-vote" : "second-level";
  manifest["protocol"] = model.options.holdout ? "holdout" : "out-of-fold";
  manifest["options"]["bow_cap"] = model.options.bow_cap;
  manifest["options"]["ngr_cap"] = model.options.ngr_cap;
  manifest["options"]["vocab_min_freq"] = model.options.vocab_min_freq;
  manifest["options"]["trainer"]["lambda"] = model.options.trainer.lambda;
  manifest["options"]["trainer"]["max_epochs"] =
      model.options.trainer.max_epochs;
  manifest["options"]["trainer"]["tol"] = model.options.trainer.tol;
  manifest["inventory"] = json::array();
  for (const ModelSpec& spec : model.inventory) {
    manifest["inventory"].push_back(spec_to_json(spec));
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  for (std::size_t s = 0; s < model.first_level.size(); ++s) {
    save_logreg(dir / "first_level" / model_filename(static_cast<int>(s)),
                model.first_level[s],
                s < model.first_level_names.size() ? model.first_level_names[s]
                                                   : std::vector<std::string>{});
  }
  if (!model.options.majority_only) {
    save_logreg(dir / "second_level.json", model.second_level,
                second_level_names(model.inventory));
  }
  save_vocab(dir / "vocab_bow.json", model.bow);
  save_vocab(dir / "vocab_ngr.json", model.ngr);

  json cfs;
  cfs["format"] = kCfsFormat;
  cfs["indices"] = model.cfs.indices;
  cfs["merit"] = model.cfs.merit;
  write_file(dir / "cfs.json", cfs.dump(2) + "\n");

  std::string log;
  for (const FoldLogEntry& entry : model.fold_log) {
    json line;
    line["spec"] = entry.spec_index;
    line["fold"] = entry.fold;
    line["train_ids"] = entry.train_ids;
    line["test_ids"] = entry.test_ids;
    log += line.dump();
    log += '\n';
  }
  write_file(dir / "fold_log.jsonl", log);
}

StackedModel load_stacked(const std::filesystem::path& dir) {
  json manifest = json::parse(read_file(dir / "manifest.json"), nullptr, false);
  if (manifest.is_discarded() ||
      manifest.value("format", "") != kManifestFormat) {
    throw DataError("malformed bundle manifest: " +
                    (dir / "manifest.json").string());
  }

  StackedModel model;
  model.config_hash =
      std::stoull(manifest.at("config_hash").get<std::string>(), nullptr, 16);
  model.corpus_hash =
      std::stoull(manifest.at("corpus_hash").get<std::string>(), nullptr, 16);
  model.options.seed = manifest.at("seed").get<std::uint64_t>();
  model.options.k = manifest.at("k").get<std::size_t>();
  model.options.majority_only =
      manifest.at("stacking_mode").get<std::string>() == "majority-vote";
  model.options.holdout =
      manifest.at("protocol").get<std::string>() == "holdout";
  model.options.bow_cap = manifest["options"].at("bow_cap").get<std::size_t>();
  model.options.ngr_cap = manifest["options"].at("ngr_cap").get<std::size_t>();
  model.options.vocab_min_freq =
      manifest["options"].at("vocab_min_freq").get<std::size_t>();
  model.options.trainer.lambda =
      manifest["options"]["trainer"].at("lambda").get<double>();
  model.options.trainer.max_epochs =
      manifest["options"]["trainer"].at("max_epochs").get<std::size_t>();
  model.options.trainer.tol =
      manifest["options"]["trainer"].at("tol").get<double>();

  for (const auto& j : manifest.at("inventory")) {
    model.inventory.push_back(spec_from_json(j));
  }
  if (model.inventory.size() != kInventorySize) {
    throw DataError("bundle inventory does not contain 65 models");
  }

  model.first_level.reserve(model.inventory.size());
  model.first_level_names.resize(model.inventory.size());
  for (std::size_t s = 0; s < model.inventory.size(); ++s) {
    model.first_level.push_back(
        load_logreg(dir / "first_level" / model_filename(static_cast<int>(s)),
                    &model.first_level_names[s]));
  }
  if (!model.options.majority_only) {
    model.second_level = load_logreg(dir / "second_level.json");
  }
  model.bow = load_vocab(dir / "vocab_bow.json");
  model.ngr = load_vocab(dir / "vocab_ngr.json");

  json cfs = json::parse(read_file(dir / "cfs.json"), nullptr, false);
  if (cfs.is_discarded() || cfs.value("format", "") != kCfsFormat) {
    throw DataError("malformed CFS file in bundle");
  }
  model.cfs.indices = cfs.at("indices").get<std::vector<std::size_t>>();
  model.cfs.merit = cfs.at("merit").get<double>();

  std::filesystem::path log_path = dir / "fold_log.jsonl";
  if (std::filesystem::exists(log_path)) {
    for (const std::string& line : read_lines(log_path)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) throw DataError("malformed fold log line");
      FoldLogEntry entry;
      entry.spec_index = j.at("spec").get<int>();
      entry.fold = j.at("fold").get<std::size_t>();
      entry.train_ids = j.at("train_ids").get<std::vector<std::string>>();
      entry.test_ids = j.at("test_ids").get<std::vector<std::string>>();
      model.fold_log.push_back(std::move(entry));
    }
  }
  return model;
}

}  // namespace clickbait
