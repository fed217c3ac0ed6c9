// Microbenchmarks for the per-instance hot paths: tokenization, tagging,
// block extraction, vector assembly, vocabulary counting, logistic-regression
// training, and full 65-model scoring.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "clickbait/ensemble.hpp"
#include "clickbait/features.hpp"
#include "clickbait/linmodel.hpp"
#include "clickbait/textkit.hpp"
#include "clickbait/util.hpp"

using namespace clickbait;

namespace {

const TextKit& kit() {
  static const TextKit instance{default_data_dir()};
  return instance;
}

const FeatureExtractor& extractor() {
  static const FeatureExtractor instance{kit()};
  return instance;
}

const std::string& sample_text() {
  static const std::string text =
      "You won't believe what the city council decided last night! Top 10 "
      "reasons the new stadium deal fell through, number 7 is shocking... "
      "Officials in Springfield declined to comment. http://example.com/story "
      "#local @cityhall :)";
  return text;
}

PostInstance sample_instance() {
  PostInstance instance;
  instance.id = "bench";
  instance.post_text = sample_text();
  instance.target_title = "Stadium deal collapses after late council vote";
  instance.target_description =
      "The council rejected the financing plan in a split decision.";
  instance.has_media = true;
  return instance;
}

// Small balanced corpus with a few token-level label signals, enough to give
// every first-level model something to fit.
std::vector<LabeledInstance> bench_corpus(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> pool = {
      "match", "season", "score", "derby", "crowd", "ticket"};
  std::mt19937_64 gen(seed);
  std::vector<LabeledInstance> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    int y = static_cast<int>(i % 2);
    LabeledInstance li;
    li.instance.id = std::to_string(1000 + i);
    li.instance.post_text = "update on the " + pool[gen() % pool.size()] +
                            (y ? " ? ? ? zeebok" : " lol lol lol zeehok");
    li.instance.target_title =
        "notes about the " + pool[gen() % pool.size()] +
        (y ? " ? ? ?" : " lol lol lol");
    li.instance.target_description = "daily digest of the season";
    li.truth.id = li.instance.id;
    li.truth.judgments.assign(5, y ? 1.0 : 0.0);
    li.truth.mean = y ? 1.0 : 0.0;
    li.label = y;
    items.push_back(std::move(li));
  }
  return items;
}

const StackedModel& stacked_model() {
  static const StackedModel model = [] {
    StackingOptions options;
    options.k = 3;
    options.seed = 12;
    options.trainer.max_epochs = 120;
    options.bow_cap = 50;
    options.ngr_cap = 80;
    return train_stacked(bench_corpus(60, 12), extractor(), options);
  }();
  return model;
}

void BM_Tokenize(benchmark::State& state) {
  const std::string& text = sample_text();
  for (auto _ : state) {
    benchmark::DoNotOptimize(kit().tokenize(text));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Tokenize);

void BM_TagPosNe(benchmark::State& state) {
  std::vector<Token> tokens = kit().tokenize(sample_text());
  for (auto _ : state) {
    benchmark::DoNotOptimize(kit().ne_tag(kit().pos_tag(tokens)));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(tokens.size()));
}
BENCHMARK(BM_TagPosNe);

void BM_ComputeBlocks(benchmark::State& state) {
  PostInstance instance = sample_instance();
  for (auto _ : state) {
    benchmark::DoNotOptimize(extractor().compute_blocks(instance));
  }
}
BENCHMARK(BM_ComputeBlocks);

void BM_AssembleFiveBlocks(benchmark::State& state) {
  InstanceBlocks blocks = extractor().compute_blocks(sample_instance());
  AssembleRequest request;
  request.blocks = {Block::MOR, Block::STY, Block::GRA, Block::SEN, Block::GID};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        extractor().assemble_from_blocks(blocks, request));
  }
}
BENCHMARK(BM_AssembleFiveBlocks);

void BM_VocabCounts(benchmark::State& state) {
  std::vector<std::string> corpus;
  for (const LabeledInstance& li : bench_corpus(60, 12)) {
    corpus.push_back(li.instance.post_text);
  }
  VocabModel vocab =
      extractor().fit_vocab(corpus, VocabModel::Mode::Ngram, 200);
  const std::string& text = sample_text();
  for (auto _ : state) {
    benchmark::DoNotOptimize(extractor().extract_vocab_counts(text, vocab));
  }
}
BENCHMARK(BM_VocabCounts);

void BM_TrainLogreg(benchmark::State& state) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix X(256, 64);
  for (double& v : X.data) v = unif(gen);
  std::vector<int> y(X.rows);
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = static_cast<int>(i % 2);
    X.at(i, 0) += y[i] ? 0.5 : -0.5;
  }
  TrainConfig config;
  config.max_epochs = 60;
  config.tol = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_logreg(X, y, config));
  }
}
BENCHMARK(BM_TrainLogreg);

void BM_ScoreInstance(benchmark::State& state) {
  const StackedModel& model = stacked_model();
  PostInstance instance = sample_instance();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        predict_stacked(model, extractor(), instance));
  }
}
BENCHMARK(BM_ScoreInstance);

}  // namespace

BENCHMARK_MAIN();
