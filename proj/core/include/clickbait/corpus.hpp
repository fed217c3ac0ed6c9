#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace clickbait {

// One social-media post joined with its target-article fields, as read from
// the challenge JSONL format. postText arrays are space-joined into a single
// string; missing optional fields become empty strings.
struct PostInstance {
  std::string id;
  std::string post_text;
  std::string target_title;
  std::string target_description;
  bool has_media = false;

  // Passthrough fields, unused by feature extraction.
  std::string timestamp;
  std::string target_keywords;
  std::string target_paragraphs;
  std::string target_captions;
};

enum class TruthClass { Clickbait, NoClickbait };

struct TruthRecord {
  std::string id;
  std::vector<double> judgments;  // exactly 5 scores in [0,1]
  double mean = 0.0;
  std::optional<TruthClass> truth_class;
};

struct LabeledInstance {
  PostInstance instance;
  TruthRecord truth;
  int label = 0;  // 1 = clickbait
};

// How annotator scores turn into a binary label. TruthClassOrMean honors the
// provided class field and falls back to mean >= 0.5 when it is absent;
// MeanThreshold always applies mean >= 0.5.
enum class BinarizationPolicy { TruthClassOrMean, MeanThreshold };

struct DatasetSplit {
  std::vector<LabeledInstance> set_a;
  std::vector<LabeledInstance> set_b;
  std::vector<LabeledInstance> set_c;
  std::uint64_t seed = 0;
};

std::vector<PostInstance> load_instances(const std::filesystem::path& path);
std::vector<TruthRecord> load_truth(const std::filesystem::path& path);

void write_instances(const std::filesystem::path& path,
                     const std::vector<PostInstance>& instances);
void write_truth(const std::filesystem::path& path,
                 const std::vector<TruthRecord>& truths);

// Joins instances with their truth records, in instance order. Throws
// DataError when an instance has no truth record. Orphan truth records (no
// matching instance) are reported through `orphan_ids` when given.
std::vector<LabeledInstance> join_truth(
    const std::vector<PostInstance>& instances,
    const std::vector<TruthRecord>& truths, BinarizationPolicy policy,
    std::vector<std::string>* orphan_ids = nullptr);

// Label an instance under the policy; exposed so tests can recompute labels.
int binarize(const TruthRecord& truth, BinarizationPolicy policy);

// Deterministic shuffle (Fisher-Yates over mt19937_64) followed by a
// size-exact cut into three sets. na + nb + nc must equal data.size().
DatasetSplit split(const std::vector<LabeledInstance>& data, std::size_t na,
                   std::size_t nb, std::size_t nc, std::uint64_t seed);

// Fingerprint of ids and text fields, used to key feature caches.
std::uint64_t corpus_hash(const std::vector<PostInstance>& instances);

}  // namespace clickbait
