#pragma once

// Deterministic synthetic data shared by the unit suites and the acceptance
// checks. Everything is seeded; the same seed always produces the same bytes.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "clickbait/corpus.hpp"
#include "clickbait/linmodel.hpp"

namespace synth {

// A labeled corpus with three redundant label channels, each visible to a
// different feature family and each independently noisy:
//   - post channel: clickbait posts carry "? ? ?" (question marks), others
//     carry "lol lol lol" (slang) — readable from the post hand blocks;
//   - title channel: the same construction in the target title — readable
//     only by models that also see the title;
//   - vocab channel: the post carries the token "zeebok" vs "zeehok" — two
//     six-letter words absent from every lexicon and identical under every
//     hand-crafted count, so only term-count features can read it.
// Each channel reports the true label with probability `reliability`. No
// single feature subset sees all three channels, so fusing many models can
// beat every individual one.
inline std::vector<clickbait::LabeledInstance> channel_corpus(
    std::size_t n, std::uint64_t seed, double reliability = 0.85) {
  static const std::vector<std::string> pool = {
      "match",  "season", "score",   "derby",
      "crowd",  "ticket", "replay",  "stadium"};
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<clickbait::LabeledInstance> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    int y = static_cast<int>(i % 2);  // balanced classes
    auto noisy = [&](int v) { return unif(gen) < reliability ? v : 1 - v; };
    int post_bit = noisy(y);
    int vocab_bit = noisy(y);
    int title_bit = noisy(y);

    std::string post = "update on the " + pool[gen() % pool.size()] + " " +
                       pool[gen() % pool.size()];
    post += post_bit ? " ? ? ?" : " lol lol lol";
    post += vocab_bit ? " zeebok" : " zeehok";

    std::string title = "notes about the " + pool[gen() % pool.size()];
    title += title_bit ? " ? ? ?" : " lol lol lol";

    clickbait::LabeledInstance li;
    li.instance.id = std::to_string(1000 + i);
    li.instance.post_text = post;
    li.instance.target_title = title;
    li.instance.target_description = "daily digest of the season";
    li.instance.has_media = i % 7 == 0;
    li.truth.id = li.instance.id;
    li.truth.judgments.assign(5, y == 1 ? 1.0 : 0.0);
    li.truth.mean = y == 1 ? 1.0 : 0.0;
    li.truth.truth_class = y == 1 ? clickbait::TruthClass::Clickbait
                                  : clickbait::TruthClass::NoClickbait;
    li.label = y;
    items.push_back(std::move(li));
  }
  return items;
}

inline std::vector<clickbait::PostInstance> instances_of(
    const std::vector<clickbait::LabeledInstance>& items) {
  std::vector<clickbait::PostInstance> out;
  out.reserve(items.size());
  for (const auto& li : items) out.push_back(li.instance);
  return out;
}

inline std::vector<clickbait::TruthRecord> truths_of(
    const std::vector<clickbait::LabeledInstance>& items) {
  std::vector<clickbait::TruthRecord> out;
  out.reserve(items.size());
  for (const auto& li : items) out.push_back(li.truth);
  return out;
}

inline std::vector<int> labels_of(
    const std::vector<clickbait::LabeledInstance>& items) {
  std::vector<int> out;
  out.reserve(items.size());
  for (const auto& li : items) out.push_back(li.label);
  return out;
}

// Writes instances.jsonl and truth.jsonl under dir.
inline void write_corpus(const std::filesystem::path& dir,
                         const std::vector<clickbait::LabeledInstance>& items) {
  std::filesystem::create_directories(dir);
  clickbait::write_instances(dir / "instances.jsonl", instances_of(items));
  clickbait::write_truth(dir / "truth.jsonl", truths_of(items));
}

struct Points {
  clickbait::Matrix X;
  std::vector<int> y;
};

// Linearly separable: column 0 is <= -1 for class 0 and >= +1 for class 1
// (margin 2); column 1 is uniform noise.
inline Points separable_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Points p;
  p.X = clickbait::Matrix(n, 2);
  p.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    int cls = static_cast<int>(i % 2);
    p.X.at(i, 0) = cls == 1 ? 1.0 + unif(gen) : -1.0 - unif(gen);
    p.X.at(i, 1) = unif(gen);
    p.y[i] = cls;
  }
  return p;
}

inline clickbait::Matrix random_matrix(std::size_t rows, std::size_t cols,
                                       std::uint64_t seed, double lo = -1.0,
                                       double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  clickbait::Matrix X(rows, cols);
  for (double& v : X.data) v = unif(gen);
  return X;
}

inline std::vector<int> random_labels(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<int> y(n);
  bool has0 = false, has1 = false;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(gen() % 2);
    has0 = has0 || y[i] == 0;
    has1 = has1 || y[i] == 1;
  }
  // guarantee both classes
  if (!has0) y[0] = 0;
  if (!has1) y[n - 1] = 1;
  return y;
}

inline std::vector<double> random_scores(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> s(n);
  for (double& v : s) v = unif(gen);
  return s;
}

}  // namespace synth
