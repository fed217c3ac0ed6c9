#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "clickbait/corpus.hpp"
#include "clickbait/ensemble.hpp"
#include "clickbait/linmodel.hpp"

namespace clickbait {

// Declarative run configuration. Defaults reproduce the reference setup:
// an 18234/2000/1800 split, 10 folds, the 65-model inventory, vocabulary
// caps of 1000 (bag of words) and 2000 (n-grams).
struct RunConfig {
  // Inputs and outputs.
  std::string instances_path;  // posts JSONL
  std::string truth_path;      // annotator judgments JSONL
  std::string data_dir;        // lexicon directory; empty = bundled default
  std::string out_dir = "out";
  std::string model_dir;       // trained bundle; empty = <out_dir>/model

  // Corpus handling.
  std::string binarization = "truth-class-or-mean";  // or "mean-threshold"
  std::size_t split_a = 18234;  // training
  std::size_t split_b = 2000;   // validation / holdout
  std::size_t split_c = 1800;   // test
  std::uint64_t seed = 0;

  // Feature extraction (the `extract` command).
  std::string blocks = "MOR,STY,GRA,SEN,GID";  // comma-separated block names
  std::string source = "post";  // post | title | post_and_title

  // Ensemble.
  std::size_t folds = 10;
  std::string stacking = "second-level";  // or "majority-vote"
  bool holdout = false;  // second level learns from the validation split
  std::size_t bow_cap = 1000;
  std::size_t ngr_cap = 2000;
  std::size_t vocab_min_freq = 1;

  // Trainer.
  double lambda = 1e-4;
  std::size_t max_epochs = 1000;
  double tol = 1e-6;

  // Execution.
  std::size_t threads = 0;  // 0 = hardware concurrency; never affects results
  bool quick = false;       // evaluation: single-block rows only
};

// Reads a JSON object of config keys; unknown keys are an error so typos
// fail loudly. Missing keys keep their defaults.
RunConfig load_config(const std::filesystem::path& path);

// Applies CLICKBAIT_<UPPER_SNAKE_KEY> environment overrides (e.g.
// CLICKBAIT_FOLDS=5, CLICKBAIT_STACKING=majority-vote). Flag handling in
// the CLI runs after this, so flags win over env over file.
void apply_env_overrides(RunConfig& config);

// Canonical JSON dump (sorted keys, shortest round-trip numbers) of every
// result-affecting field; basis of the config hash.
std::string config_canonical_json(const RunConfig& config);

// FNV-1a of the canonical dump. Identical hashes guarantee identical
// artifacts; paths and the thread count are excluded because neither
// changes any result byte.
std::uint64_t config_hash(const RunConfig& config);

// Throws UsageError when enum-like strings or sizes are invalid.
void validate_config(const RunConfig& config);

BinarizationPolicy binarization_policy(const RunConfig& config);
TrainConfig trainer_config(const RunConfig& config);
StackingOptions stacking_options(const RunConfig& config);

// Parses the blocks/source selection strings ("MOR,STY" etc.); throws
// UsageError on unknown names.
AssembleRequest assemble_request(const RunConfig& config);

}  // namespace clickbait
