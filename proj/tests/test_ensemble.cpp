#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "clickbait/ensemble.hpp"
#include "clickbait/util.hpp"
#include "doctest.h"
#include "helpers/synth.hpp"

namespace fs = std::filesystem;
using namespace clickbait;

namespace {

const TextKit& kit() {
  static const TextKit instance(fs::path(CLICKBAIT_DATA_DIR));
  return instance;
}

const FeatureExtractor& extractor() {
  static const FeatureExtractor instance(kit());
  return instance;
}

StackingOptions smoke_options() {
  StackingOptions opt;
  opt.k = 2;
  opt.seed = 5;
  opt.trainer.max_epochs = 120;  // plenty for 40 items, keeps the suite fast
  opt.bow_cap = 50;
  opt.ngr_cap = 80;
  opt.threads = 2;
  return opt;
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("canonical subsets: 31 in size-then-lexicographic order") {
  auto subsets = canonical_block_subsets();
  REQUIRE(subsets.size() == 31);
  std::size_t by_size[6] = {0, 0, 0, 0, 0, 0};
  std::set<std::vector<Block>> unique;
  std::size_t prev_size = 1;
  for (const auto& s : subsets) {
    REQUIRE(!s.empty());
    REQUIRE(s.size() <= 5);
    ++by_size[s.size()];
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(s.size() >= prev_size);  // singletons first, quintet last
    prev_size = s.size();
    unique.insert(s);
    for (Block b : s) {
      CHECK(b != Block::BOW);
      CHECK(b != Block::NGR);
      CHECK(b != Block::MEDIA);
    }
  }
  CHECK(unique.size() == 31);
  CHECK(by_size[1] == 5);
  CHECK(by_size[2] == 10);
  CHECK(by_size[3] == 10);
  CHECK(by_size[4] == 5);
  CHECK(by_size[5] == 1);
  CHECK(subsets.front() == std::vector<Block>{Block::MOR});
  CHECK(subsets.back() ==
        std::vector<Block>{Block::MOR, Block::STY, Block::GRA, Block::SEN,
                           Block::GID});

  CHECK(subset_label(subsets.front()) == "Morph");
  CHECK(subset_label(subsets.back()) == "Morph_Styl_Gram_Sent_GID");
}

TEST_CASE("model inventory: 65 specs in the documented layout") {
  auto inventory = build_model_inventory();
  REQUIRE(inventory.size() == 65);
  auto subsets = canonical_block_subsets();

  std::set<std::string> labels;
  for (std::size_t i = 0; i < inventory.size(); ++i) {
    const auto& spec = inventory[i];
    CHECK(spec.index == static_cast<int>(i));
    labels.insert(spec.label());
    if (i < 31) {
      CHECK(spec.source == Source::Post);
      CHECK(spec.variant == ModelSpec::Variant::Plain);
      CHECK(spec.blocks == subsets[i]);
    } else if (i < 62) {
      CHECK(spec.source == Source::PostAndTitle);
      CHECK(spec.variant == ModelSpec::Variant::Plain);
      CHECK(spec.blocks == subsets[i - 31]);
    }
  }
  CHECK(labels.size() == 65);  // labels are unique

  CHECK(inventory[62].variant == ModelSpec::Variant::Bow);
  CHECK(inventory[62].source == Source::Post);
  CHECK(inventory[63].variant == ModelSpec::Variant::Ngram);
  CHECK(inventory[63].source == Source::Post);
  CHECK(inventory[64].variant == ModelSpec::Variant::Cfs);
  CHECK(inventory[64].source == Source::Post);
  CHECK(inventory[64].blocks == subsets.back());
}

TEST_CASE("fold assignment is stratified, balanced, and seeded") {
  std::vector<int> labels;
  for (int i = 0; i < 47; ++i) labels.push_back(i % 3 == 0 ? 1 : 0);

  auto folds = make_folds(labels, 4, 9);
  REQUIRE(folds.fold_of.size() == labels.size());
  CHECK(folds.k == 4);

  std::map<std::size_t, std::size_t> total, positive;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    REQUIRE(folds.fold_of[i] < 4);
    ++total[folds.fold_of[i]];
    if (labels[i] == 1) ++positive[folds.fold_of[i]];
  }
  // overall fold sizes differ by at most one
  std::size_t lo = labels.size(), hi = 0;
  for (auto& [fold, n] : total) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  CHECK(hi - lo <= 1);
  // each class spreads across folds: 16 positives over 4 folds -> 4 each
  for (auto& [fold, n] : positive) CHECK(n == 4);

  CHECK(make_folds(labels, 4, 9).fold_of == folds.fold_of);
  CHECK(make_folds(labels, 4, 10).fold_of != folds.fold_of);

  CHECK_THROWS_AS(make_folds(labels, 1, 0), UsageError);
  CHECK_THROWS_AS(make_folds(labels, 48, 0), UsageError);
}

TEST_CASE("out-of-fold matrix is leak-free and thread-count independent") {
  auto corpus = synth::channel_corpus(40, 77);
  auto labels = synth::labels_of(corpus);
  auto options = smoke_options();
  auto folds = make_folds(labels, options.k, options.seed);

  auto oof = out_of_fold_matrix(corpus, extractor(), folds, options);
  REQUIRE(oof.probs.rows == 40);
  REQUIRE(oof.probs.cols == 65);
  for (double p : oof.probs.data) {
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
  CHECK(oof.fold_log.size() == 65 * options.k);
  CHECK(audit_fold_log(oof.fold_log, corpus, 65) == 0);

  // identical matrix bytes regardless of the worker count
  auto serial = options;
  serial.threads = 1;
  auto oof1 = out_of_fold_matrix(corpus, extractor(), folds, serial);
  auto parallel = options;
  parallel.threads = 4;
  auto oof4 = out_of_fold_matrix(corpus, extractor(), folds, parallel);
  CHECK(oof1.probs.data == oof4.probs.data);
  CHECK(oof1.probs.data == oof.probs.data);
}

TEST_CASE("fold-log audit counts violations on tampered logs") {
  auto corpus = synth::channel_corpus(16, 3);
  auto labels = synth::labels_of(corpus);
  StackingOptions options = smoke_options();
  options.k = 2;
  auto folds = make_folds(labels, 2, 1);
  auto oof = out_of_fold_matrix(corpus, extractor(), folds, options);
  REQUIRE(audit_fold_log(oof.fold_log, corpus, 65) == 0);

  auto tampered = oof.fold_log;
  // smuggle a test id into its own training list
  REQUIRE(!tampered[0].test_ids.empty());
  tampered[0].train_ids.push_back(tampered[0].test_ids[0]);
  CHECK(audit_fold_log(tampered, corpus, 65) > 0);

  // drop a fold entry: its test ids are no longer covered exactly once
  auto missing = oof.fold_log;
  missing.pop_back();
  CHECK(audit_fold_log(missing, corpus, 65) > 0);

  // duplicate coverage is a violation too
  auto doubled = oof.fold_log;
  doubled.push_back(doubled[0]);
  CHECK(audit_fold_log(doubled, corpus, 65) > 0);
}

TEST_CASE("train_stacked produces a complete, deterministic model") {
  auto corpus = synth::channel_corpus(40, 123);
  auto options = smoke_options();

  auto model = train_stacked(corpus, extractor(), options);
  CHECK(model.inventory.size() == 65);
  CHECK(model.first_level.size() == 65);
  CHECK(model.first_level_names.size() == 65);
  CHECK(model.second_level.weights.size() == 65);
  CHECK(model.bow.size() > 0);
  CHECK(model.bow.size() <= options.bow_cap);
  CHECK(model.ngr.size() <= options.ngr_cap);
  CHECK(!model.cfs.indices.empty());
  CHECK(model.fold_log.size() == 65 * options.k);
  CHECK(audit_fold_log(model.fold_log, corpus, 65) == 0);

  // per-model weight dimensions match their feature names
  for (std::size_t m = 0; m < 65; ++m) {
    CHECK(model.first_level[m].weights.size() ==
          model.first_level_names[m].size());
  }

  // the CFS model sees a column subset of the five-block post vector
  CHECK(model.first_level[64].weights.size() == model.cfs.indices.size());

  // prediction consistency: second level consumes the first-level outputs
  auto probs = first_level_probs(model, extractor(), corpus[0].instance);
  REQUIRE(probs.size() == 65);
  double direct = predict_stacked(model, extractor(), corpus[0].instance);
  double via = model.second_level.predict_proba(probs);
  CHECK(direct == via);
  CHECK(direct > 0.0);
  CHECK(direct < 1.0);

  // full determinism across a retrain
  auto again = train_stacked(corpus, extractor(), options);
  CHECK(again.second_level.weights == model.second_level.weights);
  for (std::size_t m = 0; m < 65; ++m) {
    CHECK(again.first_level[m].weights == model.first_level[m].weights);
  }
  CHECK(again.config_hash == model.config_hash);
  CHECK(again.corpus_hash == model.corpus_hash);
}

TEST_CASE("majority vote semantics") {
  // strictly more than half: 33 of 65 is a majority, 32 is not
  std::vector<double> probs(65, 0.0);
  for (std::size_t i = 0; i < 32; ++i) probs[i] = 0.9;
  CHECK(majority_vote(probs) == 0);
  probs[32] = 0.5;  // >= 0.5 counts as a clickbait vote
  CHECK(majority_vote(probs) == 1);
  CHECK(majority_vote_share(probs) == doctest::Approx(33.0 / 65.0).epsilon(1e-12));

  std::vector<double> even(4, 0.0);
  even[0] = even[1] = 1.0;
  CHECK(majority_vote(even) == 0);  // exactly half is not a majority
  even[2] = 0.7;
  CHECK(majority_vote(even) == 1);
}

TEST_CASE("majority-only training skips the second level") {
  auto corpus = synth::channel_corpus(40, 33);
  auto options = smoke_options();
  options.majority_only = true;

  auto model = train_stacked(corpus, extractor(), options);
  CHECK(model.options.majority_only);
  CHECK(model.first_level.size() == 65);
  CHECK(model.second_level.weights.empty());
  CHECK_THROWS_AS(predict_stacked(model, extractor(), corpus[0].instance),
                  UsageError);
  auto probs = first_level_probs(model, extractor(), corpus[0].instance);
  int vote = majority_vote(probs);
  CHECK((vote == 0 || vote == 1));
}

TEST_CASE("holdout protocol trains the second level on held-out data") {
  auto corpus = synth::channel_corpus(60, 9);
  std::vector<LabeledInstance> train(corpus.begin(), corpus.begin() + 40);
  std::vector<LabeledInstance> holdout(corpus.begin() + 40, corpus.end());
  auto options = smoke_options();
  options.holdout = true;

  auto model = train_stacked_holdout(train, holdout, extractor(), options);
  CHECK(model.first_level.size() == 65);
  CHECK(model.second_level.weights.size() == 65);
  double p = predict_stacked(model, extractor(), holdout[0].instance);
  CHECK(p > 0.0);
  CHECK(p < 1.0);
}

TEST_CASE("stacked bundle survives a save/load round trip") {
  auto corpus = synth::channel_corpus(40, 55);
  auto options = smoke_options();
  auto model = train_stacked(corpus, extractor(), options);

  fs::path dir = fs::temp_directory_path() / "clickbait_bundle_test";
  fs::remove_all(dir);
  save_stacked(dir, model);

  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "second_level.json"));
  CHECK(fs::exists(dir / "first_level" / "model_000.json"));
  CHECK(fs::exists(dir / "first_level" / "model_064.json"));
  CHECK(fs::exists(dir / "vocab_bow.json"));
  CHECK(fs::exists(dir / "vocab_ngr.json"));
  CHECK(fs::exists(dir / "cfs.json"));
  CHECK(fs::exists(dir / "fold_log.jsonl"));

  auto loaded = load_stacked(dir);
  CHECK(loaded.inventory.size() == 65);
  CHECK(loaded.second_level.weights == model.second_level.weights);
  CHECK(loaded.bow.terms() == model.bow.terms());
  CHECK(loaded.ngr.terms() == model.ngr.terms());
  CHECK(loaded.cfs.indices == model.cfs.indices);
  CHECK(loaded.cfs.merit == model.cfs.merit);
  CHECK(loaded.config_hash == model.config_hash);
  CHECK(loaded.corpus_hash == model.corpus_hash);
  for (std::size_t m = 0; m < 65; ++m) {
    CHECK(loaded.first_level[m].weights == model.first_level[m].weights);
    CHECK(loaded.first_level[m].bias == model.first_level[m].bias);
  }

  // bit-identical predictions after the round trip
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(predict_stacked(loaded, extractor(), corpus[i].instance) ==
          predict_stacked(model, extractor(), corpus[i].instance));
  }

  CHECK_THROWS_AS(load_stacked(dir / "not_there"), DataError);
}

TEST_CASE("first-level probabilities are invariant to instance identity") {
  // same text, different id/metadata -> same probabilities
  auto corpus = synth::channel_corpus(40, 21);
  auto options = smoke_options();
  auto model = train_stacked(corpus, extractor(), options);

  PostInstance a = corpus[3].instance;
  PostInstance b = a;
  b.id = "renamed";
  CHECK(first_level_probs(model, extractor(), a) ==
        first_level_probs(model, extractor(), b));
}

TEST_CASE("single-class fold data fails loudly") {
  // 4 items, k=2, but labels grouped so one fold trains on one class only
  auto corpus = synth::channel_corpus(6, 2);
  for (auto& li : corpus) li.label = 1;
  corpus[0].label = 0;
  auto options = smoke_options();
  options.k = 6;
  CHECK_THROWS_AS(train_stacked(corpus, extractor(), options), TrainError);
}

}  // TEST_SUITE
