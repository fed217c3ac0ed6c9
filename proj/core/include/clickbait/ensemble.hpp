#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clickbait/corpus.hpp"
#include "clickbait/features.hpp"
#include "clickbait/linmodel.hpp"

namespace clickbait {

// One first-level model: which blocks, which text source, which variant.
struct ModelSpec {
  enum class Variant { Plain, Bow, Ngram, Cfs };

  int index = 0;  // position in the 65-model inventory
  std::vector<Block> blocks;
  Source source = Source::Post;
  Variant variant = Variant::Plain;

  // Stable human-readable identifier, e.g. "post.Morph_Styl" or "bow".
  std::string label() const;
};

std::string_view variant_name(ModelSpec::Variant v);

// The 31 non-empty subsets of {MOR, STY, GRA, SEN, GID} in canonical order:
// singletons, pairs, triples, quadruples, quintet; lexicographic by block
// position inside each size class.
std::vector<std::vector<Block>> canonical_block_subsets();

// Table-row label for a subset: Morph/Styl/Gram/Sent/GID joined by "_".
std::string subset_label(const std::vector<Block>& blocks);

// 65 specs: the 31 subsets on the post text (0-30), the same 31 on
// post + title (31-61), BOW-post (62), NGR-post (63), CFS over the
// five-block post vector (64).
std::vector<ModelSpec> build_model_inventory();

// ---------------------------------------------------------------------------
// Folds
// ---------------------------------------------------------------------------

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of;  // per training instance
  std::uint64_t seed = 0;
};

// Stratified by label: each class is shuffled under the seed and dealt
// round-robin through one shared cursor, so overall fold sizes differ by at
// most one while both classes spread across folds.
FoldAssignment make_folds(const std::vector<int>& labels, std::size_t k,
                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Stacking
// ---------------------------------------------------------------------------

struct StackingOptions {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  TrainConfig trainer;
  std::size_t bow_cap = 1000;
  std::size_t ngr_cap = 2000;
  std::size_t vocab_min_freq = 1;
  std::size_t threads = 0;  // 0 = hardware concurrency
  bool majority_only = false;  // skip second-level training
  bool holdout = false;        // informational: Set-B protocol was used
};

struct FoldLogEntry {
  int spec_index = 0;
  std::size_t fold = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

struct OofResult {
  Matrix probs;  // n x 65, row order follows the training set
  FoldAssignment folds;
  std::vector<FoldLogEntry> fold_log;  // ordered by (spec, fold)
};

// Per-fold leak-free probabilities: vocabularies, normalizers, CFS and the
// model are refit on the out-of-fold portion for every (spec, fold) pair.
// Tasks run concurrently; results merge by (spec, fold) so the matrix is
// independent of the thread count.
OofResult out_of_fold_matrix(const std::vector<LabeledInstance>& train,
                             const FeatureExtractor& fx,
                             const FoldAssignment& folds,
                             const StackingOptions& options);

struct StackedModel {
  std::vector<ModelSpec> inventory;
  std::vector<LogRegModel> first_level;  // retrained on the full training set
  std::vector<std::vector<std::string>> first_level_names;  // per model
  LogRegModel second_level;              // over the 65 first-level outputs
  VocabModel bow;
  VocabModel ngr;
  CfsSelection cfs;
  StackingOptions options;
  std::uint64_t config_hash = 0;
  std::uint64_t corpus_hash = 0;
  std::vector<FoldLogEntry> fold_log;
};

// Out-of-fold protocol: the second level learns from k-fold out-of-fold
// probabilities over the whole training set.
StackedModel train_stacked(const std::vector<LabeledInstance>& train,
                           const FeatureExtractor& fx,
                           const StackingOptions& options);

// Holdout protocol: first-level models train on `train` only; the second
// level learns from their probabilities on `holdout`.
StackedModel train_stacked_holdout(const std::vector<LabeledInstance>& train,
                                   const std::vector<LabeledInstance>& holdout,
                                   const FeatureExtractor& fx,
                                   const StackingOptions& options);

// All 65 first-level probabilities for one instance, inventory order.
std::vector<double> first_level_probs(const StackedModel& model,
                                      const FeatureExtractor& fx,
                                      const PostInstance& instance);

// Second-level clickbait score in (0,1).
double predict_stacked(const StackedModel& model, const FeatureExtractor& fx,
                       const PostInstance& instance);

// Majority fusion: class 1 iff strictly more than half the models say >= 0.5.
int majority_vote(std::span<const double> first_level_probs);
// Fraction of models voting clickbait; the score reported in majority mode.
double majority_vote_share(std::span<const double> first_level_probs);

// Counts out-of-fold contract violations (test ids inside their own training
// lists, or ids not covered exactly once per spec). 0 means leak-free.
std::size_t audit_fold_log(const std::vector<FoldLogEntry>& log,
                           const std::vector<LabeledInstance>& train,
                           std::size_t expected_specs);

// ---------------------------------------------------------------------------
// Bundle serialization
// ---------------------------------------------------------------------------

// Directory layout: manifest.json, second_level.json (unless majority-only),
// first_level/model_000.json .. model_064.json, vocab_bow.json,
// vocab_ngr.json, cfs.json, fold_log.jsonl. The manifest carries config and
// corpus hashes, the seed and the inventory; it contains no timestamps, so
// identical runs produce byte-identical bundles.
void save_stacked(const std::filesystem::path& dir, const StackedModel& model);
StackedModel load_stacked(const std::filesystem::path& dir);

}  // namespace clickbait
