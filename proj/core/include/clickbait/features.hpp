#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clickbait/corpus.hpp"
#include "clickbait/textkit.hpp"

namespace clickbait {

// Feature blocks in canonical concatenation order. MEDIA is the single
// trailing presence bit, never a standalone block.
enum class Block { MOR, STY, GRA, SEN, GID, BOW, NGR, MEDIA };
inline constexpr int kHandblockCount = 5;  // MOR..GID
std::string_view block_name(Block b);

// Which text the blocks are computed from. PostAndTitle concatenates the
// post-text blocks with the same blocks computed on the target title.
enum class Source { Post, Title, PostAndTitle };
std::string_view source_name(Source s);

struct SchemaSlot {
  std::string name;
  Block block;
  Source source;  // Post or Title: which text produced this slot
};

struct FeatureSchema {
  std::vector<SchemaSlot> slots;

  std::size_t dimension() const { return slots.size(); }
  std::vector<std::string> names() const;
};

struct FeatureVector {
  std::vector<double> values;
};

// A fitted term vocabulary: unigrams (bow) or word 1-4-grams joined by a
// single space (ngram). Terms are ordered by (frequency desc, term asc) at
// fit time and the order is part of the model.
class VocabModel {
 public:
  enum class Mode { Bow, Ngram };

  VocabModel() = default;
  VocabModel(Mode mode, std::vector<std::string> terms, std::size_t cap,
             std::size_t min_freq);

  Mode mode() const { return mode_; }
  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  std::size_t cap() const { return cap_; }
  std::size_t min_freq() const { return min_freq_; }
  std::optional<std::size_t> index_of(std::string_view term) const;

 private:
  Mode mode_ = Mode::Bow;
  std::vector<std::string> terms_;
  std::size_t cap_ = 0;
  std::size_t min_freq_ = 1;
  std::unordered_map<std::string, std::size_t> index_;
};

std::string_view vocab_mode_name(VocabModel::Mode mode);

// Per-instance raw blocks, computed once and reused when assembling many
// block subsets of the same instance (the ensemble's hot path).
struct InstanceBlocks {
  std::array<std::vector<double>, kHandblockCount> post;
  std::array<std::vector<double>, kHandblockCount> title;
  std::vector<std::string> bow_terms;  // post unigrams
  std::vector<std::string> ngr_terms;  // post 1-4-grams
  bool has_media = false;
};

struct AssembleRequest {
  std::vector<Block> blocks;  // non-empty subset of MOR..NGR, canonical order
  Source source = Source::Post;
  bool include_media = true;
};

// Computes the hand-crafted blocks and vocabulary counts. Stateless apart
// from the shared TextKit; safe to use from multiple threads.
class FeatureExtractor {
 public:
  // The GID lexicon must carry exactly `gid_dimension` categories.
  explicit FeatureExtractor(const TextKit& kit, std::size_t gid_dimension = 182);

  const TextKit& kit() const { return *kit_; }
  std::size_t gid_dimension() const { return gid_dimension_; }

  // 16 values; `zero_title_similarity` marks the title-source variant, whose
  // similarity-to-title slot is 0 by convention (self similarity).
  FeatureVector extract_mor(const std::string& text, const std::string& title,
                            const std::string& description,
                            bool zero_title_similarity = false) const;
  FeatureVector extract_sty(const std::string& text) const;  // 9 values
  FeatureVector extract_gra(const std::string& text) const;  // 26 values
  FeatureVector extract_sen(const std::string& text) const;  // 6 values
  FeatureVector extract_gid(const std::string& text) const;  // 182 values

  // Term streams feeding vocabularies: lowercased word/number/hashtag/mention
  // tokens; ngram terms are all 1-4-grams of that stream joined by spaces.
  std::vector<std::string> unigram_terms(const std::string& text) const;
  std::vector<std::string> ngram_terms(const std::string& text) const;

  VocabModel fit_vocab(std::span<const std::string> corpus,
                       VocabModel::Mode mode, std::size_t cap,
                       std::size_t min_freq = 1) const;
  // Same ranking over pre-extracted term streams (the cached training path).
  static VocabModel fit_vocab_from_streams(
      std::span<const std::vector<std::string>* const> streams,
      VocabModel::Mode mode, std::size_t cap, std::size_t min_freq = 1);
  FeatureVector extract_vocab_counts(const std::string& text,
                                     const VocabModel& vocab) const;
  static FeatureVector count_terms(const std::vector<std::string>& terms,
                                   const VocabModel& vocab);

  // |types(a) & types(b)| / |types(a)| over case-folded word tokens.
  double token_overlap_similarity(const std::string& a,
                                  const std::string& b) const;

  InstanceBlocks compute_blocks(const PostInstance& instance) const;

  FeatureSchema schema_for(const AssembleRequest& request,
                           const VocabModel* bow = nullptr,
                           const VocabModel* ngr = nullptr) const;
  FeatureVector assemble(const PostInstance& instance,
                         const AssembleRequest& request,
                         const VocabModel* bow = nullptr,
                         const VocabModel* ngr = nullptr) const;
  FeatureVector assemble_from_blocks(const InstanceBlocks& blocks,
                                     const AssembleRequest& request,
                                     const VocabModel* bow = nullptr,
                                     const VocabModel* ngr = nullptr) const;

  // Per-block slot names without the source prefix, in block layout order.
  std::vector<std::string> block_slot_names(Block b, const VocabModel* bow,
                                            const VocabModel* ngr) const;

 private:
  const TextKit* kit_;
  std::size_t gid_dimension_;
};

// CSV export: header "id,<schema names...>", one row per instance.
void write_feature_csv(const std::filesystem::path& path,
                       const FeatureSchema& schema,
                       const std::vector<std::string>& ids,
                       const std::vector<FeatureVector>& rows);

// Compact binary cache keyed by corpus + config fingerprints. load returns
// nullopt when the file is absent or either key mismatches.
struct FeatureCacheData {
  std::uint64_t corpus_hash = 0;
  std::uint64_t config_hash = 0;
  std::vector<std::string> names;
  std::vector<std::string> ids;
  std::vector<FeatureVector> rows;
};

void write_feature_cache(const std::filesystem::path& path,
                         const FeatureCacheData& data);
std::optional<FeatureCacheData> load_feature_cache(
    const std::filesystem::path& path, std::uint64_t corpus_hash,
    std::uint64_t config_hash);

}  // namespace clickbait
