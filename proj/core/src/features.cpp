#include "clickbait/features.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "clickbait/util.hpp"

namespace clickbait {

namespace {

const std::unordered_set<std::string>& first_person_pronouns() {
  static const std::unordered_set<std::string> words = {
      "i",    "me",   "my",   "mine", "myself",    "we",  "us",
      "our",  "ours", "ourselves", "i'm", "i've", "i'll", "i'd",
      "we're", "we've", "we'll", "we'd"};
  return words;
}

const std::unordered_set<std::string>& second_person_pronouns() {
  static const std::unordered_set<std::string> words = {
      "you",   "your",   "yours", "yourself", "yourselves",
      "you're", "you've", "you'll", "you'd"};
  return words;
}

const std::unordered_set<std::string>& third_person_pronouns() {
  static const std::unordered_set<std::string> words = {
      "he",   "him",  "his",   "himself", "she",     "her",    "hers",
      "herself", "it", "its",  "itself",  "they",    "them",   "their",
      "theirs", "themselves", "he's", "she's", "it's", "they're",
      "they've", "they'll", "they'd", "he'll", "she'll", "he'd", "she'd"};
  return words;
}

bool contains_any(const std::vector<Token>& tokens,
                  const std::unordered_set<std::string>& set) {
  for (const Token& t : tokens) {
    if (t.kind == TokenKind::Word && set.count(t.lower)) return true;
  }
  return false;
}

long count_punct(const std::vector<Token>& tokens, std::string_view surface) {
  long n = 0;
  for (const Token& t : tokens) {
    if (t.kind == TokenKind::Punctuation && t.surface == surface) ++n;
  }
  return n;
}

}  // namespace

std::string_view block_name(Block b) {
  switch (b) {
    case Block::MOR: return "mor";
    case Block::STY: return "sty";
    case Block::GRA: return "gra";
    case Block::SEN: return "sen";
    case Block::GID: return "gid";
    case Block::BOW: return "bow";
    case Block::NGR: return "ngr";
    case Block::MEDIA: return "media";
  }
  return "?";
}

std::string_view source_name(Source s) {
  switch (s) {
    case Source::Post: return "post";
    case Source::Title: return "title";
    case Source::PostAndTitle: return "post_and_title";
  }
  return "?";
}

std::vector<std::string> FeatureSchema::names() const {
  std::vector<std::string> out;
  out.reserve(slots.size());
  for (const SchemaSlot& s : slots) out.push_back(s.name);
  return out;
}

// ---------------------------------------------------------------------------
// VocabModel
// ---------------------------------------------------------------------------

VocabModel::VocabModel(Mode mode, std::vector<std::string> terms,
                       std::size_t cap, std::size_t min_freq)
    : mode_(mode), terms_(std::move(terms)), cap_(cap), min_freq_(min_freq) {
  for (std::size_t i = 0; i < terms_.size(); ++i) index_[terms_[i]] = i;
}

std::optional<std::size_t> VocabModel::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string_view vocab_mode_name(VocabModel::Mode mode) {
  return mode == VocabModel::Mode::Bow ? "bow" : "ngram";
}

// ---------------------------------------------------------------------------
// FeatureExtractor
// ---------------------------------------------------------------------------

FeatureExtractor::FeatureExtractor(const TextKit& kit, std::size_t gid_dimension)
    : kit_(&kit), gid_dimension_(gid_dimension) {
  if (kit.gid().categories().size() != gid_dimension_) {
    throw DataError("GID lexicon carries " +
                    std::to_string(kit.gid().categories().size()) +
                    " categories, configured dimension is " +
                    std::to_string(gid_dimension_));
  }
}

FeatureVector FeatureExtractor::extract_mor(const std::string& text,
                                            const std::string& title,
                                            const std::string& description,
                                            bool zero_title_similarity) const {
  std::vector<Token> tokens = kit_->tokenize(text);
  std::vector<TaggedToken> tagged = kit_->pos_tag(tokens);

  long chars = static_cast<long>(codepoint_count(text));
  long words = 0;
  long word_cps = 0;
  long common = 0;
  for (const Token& t : tokens) {
    if (t.kind != TokenKind::Word) continue;
    ++words;
    word_cps += static_cast<long>(t.end - t.start);
    if (kit_->common_words().count(t.lower)) ++common;
  }
  long uppercase = 0;
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') ++uppercase;
  }
  long questions = count_punct(tokens, "?");
  long exclamations = count_punct(tokens, "!");

  // Dependency-length proxy: within each sentence, distance in token
  // positions between the first verb and the nominal farthest from it.
  long longest_dep = 0;
  for (const SentenceSpan& s : TextKit::sentences(tokens)) {
    long verb_idx = -1;
    for (std::size_t k = s.begin; k < s.end; ++k) {
      if (tagged[k].pos == PosTag::VERB) {
        verb_idx = static_cast<long>(k);
        break;
      }
    }
    if (verb_idx < 0) continue;
    for (std::size_t k = s.begin; k < s.end; ++k) {
      if (tagged[k].pos == PosTag::NOUN || tagged[k].pos == PosTag::PROPN) {
        long dist = std::labs(static_cast<long>(k) - verb_idx);
        longest_dep = std::max(longest_dep, dist);
      }
    }
  }

  bool det_or_pron = false;
  for (const TaggedToken& t : tagged) {
    if (t.pos == PosTag::DET || t.pos == PosTag::PRON) {
      det_or_pron = true;
      break;
    }
  }

  FeatureVector fv;
  fv.values = {
      static_cast<double>(chars),
      static_cast<double>(words),
      static_cast<double>(questions),
      static_cast<double>(exclamations),
      static_cast<double>(uppercase),
      questions > 0 ? 1.0 : 0.0,
      exclamations > 0 ? 1.0 : 0.0,
      contains_any(tokens, first_person_pronouns()) ? 1.0 : 0.0,
      contains_any(tokens, second_person_pronouns()) ? 1.0 : 0.0,
      contains_any(tokens, third_person_pronouns()) ? 1.0 : 0.0,
      words > 0 ? static_cast<double>(word_cps) / static_cast<double>(words)
                : 0.0,
      static_cast<double>(longest_dep),
      det_or_pron ? 1.0 : 0.0,
      static_cast<double>(common),
      zero_title_similarity ? 0.0 : token_overlap_similarity(text, title),
      token_overlap_similarity(text, description),
  };
  return fv;
}

FeatureVector FeatureExtractor::extract_sty(const std::string& text) const {
  std::vector<Token> tokens = kit_->tokenize(text);

  long slang = 0;
  bool has_please = false;
  bool has_contraction = false;
  for (const Token& t : tokens) {
    if (t.kind != TokenKind::Word) continue;
    if (kit_->slang().count(t.lower)) ++slang;
    if (t.lower == "please") has_please = true;
    if (t.lower.find('\'') != std::string::npos ||
        t.lower.find("\xe2\x80\x99") != std::string::npos) {
      has_contraction = true;
    }
  }
  bool has_hashtag = false, has_mention = false, has_punct = false;
  for (const Token& t : tokens) {
    has_hashtag = has_hashtag || t.kind == TokenKind::Hashtag;
    has_mention = has_mention || t.kind == TokenKind::Mention;
    has_punct = has_punct || t.kind == TokenKind::Punctuation;
  }
  bool begins_with_digit = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    begins_with_digit = c >= '0' && c <= '9';
    break;
  }

  FeatureVector fv;
  fv.values = {
      static_cast<double>(slang),
      kit_->flesch_reading_ease(text),
      count_punct(tokens, ":") > 0 ? 1.0 : 0.0,
      has_please ? 1.0 : 0.0,
      begins_with_digit ? 1.0 : 0.0,
      has_hashtag ? 1.0 : 0.0,
      has_mention ? 1.0 : 0.0,
      has_contraction ? 1.0 : 0.0,
      has_punct ? 1.0 : 0.0,
  };
  return fv;
}

FeatureVector FeatureExtractor::extract_gra(const std::string& text) const {
  std::vector<Token> tokens = kit_->tokenize(text);
  std::vector<TaggedToken> tagged = kit_->ne_tag(kit_->pos_tag(tokens));
  std::vector<SentenceSpan> spans = TextKit::sentences(tokens);

  FeatureVector fv;
  fv.values.assign(26, 0.0);

  // POS histogram over all tokens, normalized by token count.
  if (!tagged.empty()) {
    for (const TaggedToken& t : tagged) {
      fv.values[static_cast<std::size_t>(t.pos)] += 1.0;
    }
    for (int i = 0; i < kPosTagCount; ++i) {
      fv.values[static_cast<std::size_t>(i)] /=
          static_cast<double>(tagged.size());
    }
  }

  // NE histogram over entity tokens, normalized by entity-token count so it
  // sums to 1 whenever the text names any entity and stays all-zero
  // otherwise.
  long entity_tokens = 0;
  for (const TaggedToken& t : tagged) {
    if (t.ne != NeTag::NONE) ++entity_tokens;
  }
  if (entity_tokens > 0) {
    for (const TaggedToken& t : tagged) {
      if (t.ne == NeTag::NONE) continue;
      fv.values[12 + static_cast<std::size_t>(t.ne) - 1] +=
          1.0 / static_cast<double>(entity_tokens);
    }
  }

  long passive = 0;
  for (const SentenceSpan& s : spans) {
    std::span<const TaggedToken> sentence(tagged.data() + s.begin,
                                          s.end - s.begin);
    if (kit_->detect_passive(sentence)) ++passive;
  }
  fv.values[15] = spans.empty()
                      ? 0.0
                      : static_cast<double>(passive) /
                            static_cast<double>(spans.size());
  fv.values[16] = passive > 0 ? 1.0 : 0.0;

  long nouns = 0, adjectives = 0, verbs = 0, adverbs = 0;
  for (const TaggedToken& t : tagged) {
    switch (t.pos) {
      case PosTag::NOUN: ++nouns; break;
      case PosTag::ADJ: ++adjectives; break;
      case PosTag::VERB: ++verbs; break;
      case PosTag::ADV: ++adverbs; break;
      default: break;
    }
  }
  fv.values[17] = static_cast<double>(nouns);
  fv.values[18] = static_cast<double>(adjectives);
  fv.values[19] = static_cast<double>(verbs);
  fv.values[20] = static_cast<double>(adverbs);

  // Subject kind: the first pronoun/proper/common nominal decides.
  std::size_t subject_slot = 24;  // other
  for (const TaggedToken& t : tagged) {
    if (t.pos == PosTag::PRON) {
      subject_slot = 21;
      break;
    }
    if (t.pos == PosTag::PROPN) {
      subject_slot = 22;
      break;
    }
    if (t.pos == PosTag::NOUN) {
      subject_slot = 23;
      break;
    }
  }
  fv.values[subject_slot] = 1.0;

  long word_tokens = 0, stop_tokens = 0;
  for (const Token& t : tokens) {
    if (t.kind != TokenKind::Word) continue;
    ++word_tokens;
    if (kit_->stopwords().count(t.lower)) ++stop_tokens;
  }
  fv.values[25] = word_tokens > 0 ? static_cast<double>(stop_tokens) /
                                        static_cast<double>(word_tokens)
                                  : 0.0;
  return fv;
}

FeatureVector FeatureExtractor::extract_sen(const std::string& text) const {
  std::vector<Token> tokens = kit_->tokenize(text);

  long positive = 0, negative = 0, hyperbolic = 0, words = 0;
  bool happy = false, sad = false;
  for (const Token& t : tokens) {
    if (t.kind == TokenKind::Emoticon) {
      happy = happy || kit_->is_happy_emoticon(t.surface);
      sad = sad || kit_->is_sad_emoticon(t.surface);
      continue;
    }
    if (t.kind != TokenKind::Word) continue;
    ++words;
    if (kit_->positive_words().count(t.lower)) ++positive;
    if (kit_->negative_words().count(t.lower)) ++negative;
    if (kit_->hyperbolic().count(t.lower)) ++hyperbolic;
  }
  double sentiment = static_cast<double>(positive - negative) /
                     static_cast<double>(std::max(1L, words));
  sentiment = std::clamp(sentiment, -1.0, 1.0);

  FeatureVector fv;
  fv.values = {
      static_cast<double>(positive),  static_cast<double>(negative),
      happy ? 1.0 : 0.0,              sad ? 1.0 : 0.0,
      static_cast<double>(hyperbolic), sentiment,
  };
  return fv;
}

FeatureVector FeatureExtractor::extract_gid(const std::string& text) const {
  FeatureVector fv;
  fv.values.assign(gid_dimension_, 0.0);
  for (const Token& t : kit_->tokenize(text)) {
    if (t.kind != TokenKind::Word) continue;
    for (std::uint16_t cat : kit_->gid().categories_of(t.lower)) {
      fv.values[cat] += 1.0;
    }
  }
  return fv;
}

std::vector<std::string> FeatureExtractor::unigram_terms(
    const std::string& text) const {
  std::vector<std::string> terms;
  for (const Token& t : kit_->tokenize(text)) {
    switch (t.kind) {
      case TokenKind::Word:
      case TokenKind::Number:
      case TokenKind::Hashtag:
      case TokenKind::Mention:
        terms.push_back(t.lower);
        break;
      default:
        break;
    }
  }
  return terms;
}

std::vector<std::string> FeatureExtractor::ngram_terms(
    const std::string& text) const {
  std::vector<std::string> unigrams = unigram_terms(text);
  std::vector<std::string> terms;
  for (std::size_t n = 1; n <= 4; ++n) {
    if (unigrams.size() < n) break;
    for (std::size_t i = 0; i + n <= unigrams.size(); ++i) {
      std::string term = unigrams[i];
      for (std::size_t k = 1; k < n; ++k) {
        term += ' ';
        term += unigrams[i + k];
      }
      terms.push_back(std::move(term));
    }
  }
  return terms;
}

VocabModel FeatureExtractor::fit_vocab_from_streams(
    std::span<const std::vector<std::string>* const> streams,
    VocabModel::Mode mode, std::size_t cap, std::size_t min_freq) {
  if (streams.empty()) {
    throw DataError("cannot fit a vocabulary on an empty corpus");
  }

  std::unordered_map<std::string, std::size_t> freq;
  for (const std::vector<std::string>* stream : streams) {
    for (const std::string& term : *stream) ++freq[term];
  }

  std::vector<std::pair<std::string, std::size_t>> ranked;
  ranked.reserve(freq.size());
  for (auto& [term, count] : freq) {
    if (count >= min_freq) ranked.emplace_back(term, count);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > cap) ranked.resize(cap);

  std::vector<std::string> terms;
  terms.reserve(ranked.size());
  for (auto& [term, count] : ranked) terms.push_back(term);
  return VocabModel(mode, std::move(terms), cap, min_freq);
}

VocabModel FeatureExtractor::fit_vocab(std::span<const std::string> corpus,
                                       VocabModel::Mode mode, std::size_t cap,
                                       std::size_t min_freq) const {
  if (corpus.empty()) throw DataError("cannot fit a vocabulary on an empty corpus");

  std::vector<std::vector<std::string>> streams;
  streams.reserve(corpus.size());
  for (const std::string& text : corpus) {
    streams.push_back(mode == VocabModel::Mode::Bow ? unigram_terms(text)
                                                    : ngram_terms(text));
  }
  std::vector<const std::vector<std::string>*> ptrs;
  ptrs.reserve(streams.size());
  for (const auto& s : streams) ptrs.push_back(&s);
  return fit_vocab_from_streams(ptrs, mode, cap, min_freq);
}

FeatureVector FeatureExtractor::count_terms(
    const std::vector<std::string>& terms, const VocabModel& vocab) {
  FeatureVector fv;
  fv.values.assign(vocab.size(), 0.0);
  for (const std::string& term : terms) {
    if (auto idx = vocab.index_of(term)) fv.values[*idx] += 1.0;
  }
  return fv;
}

FeatureVector FeatureExtractor::extract_vocab_counts(
    const std::string& text, const VocabModel& vocab) const {
  std::vector<std::string> terms = vocab.mode() == VocabModel::Mode::Bow
                                       ? unigram_terms(text)
                                       : ngram_terms(text);
  return count_terms(terms, vocab);
}

double FeatureExtractor::token_overlap_similarity(const std::string& a,
                                                  const std::string& b) const {
  std::unordered_set<std::string> types_a, types_b;
  for (const Token& t : kit_->tokenize(a)) {
    if (t.kind == TokenKind::Word) types_a.insert(t.lower);
  }
  if (types_a.empty()) return 0.0;
  for (const Token& t : kit_->tokenize(b)) {
    if (t.kind == TokenKind::Word) types_b.insert(t.lower);
  }
  std::size_t shared = 0;
  for (const std::string& w : types_a) {
    if (types_b.count(w)) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(types_a.size());
}

InstanceBlocks FeatureExtractor::compute_blocks(
    const PostInstance& instance) const {
  InstanceBlocks out;
  const std::string& post = instance.post_text;
  const std::string& title = instance.target_title;
  const std::string& desc = instance.target_description;

  out.post[0] = extract_mor(post, title, desc, false).values;
  out.post[1] = extract_sty(post).values;
  out.post[2] = extract_gra(post).values;
  out.post[3] = extract_sen(post).values;
  out.post[4] = extract_gid(post).values;

  out.title[0] = extract_mor(title, title, desc, true).values;
  out.title[1] = extract_sty(title).values;
  out.title[2] = extract_gra(title).values;
  out.title[3] = extract_sen(title).values;
  out.title[4] = extract_gid(title).values;

  out.bow_terms = unigram_terms(post);
  out.ngr_terms = ngram_terms(post);
  out.has_media = instance.has_media;
  return out;
}

namespace {

// Validates the request and returns the block list in canonical order.
std::vector<Block> canonical_blocks(const AssembleRequest& request,
                                    const VocabModel* bow,
                                    const VocabModel* ngr) {
  if (request.blocks.empty()) {
    throw UsageError("assemble requires at least one feature block");
  }
  std::vector<Block> blocks = request.blocks;
  std::sort(blocks.begin(), blocks.end());
  if (std::adjacent_find(blocks.begin(), blocks.end()) != blocks.end()) {
    throw UsageError("duplicate feature block in assemble request");
  }
  for (Block b : blocks) {
    if (b == Block::MEDIA) {
      throw UsageError("the media bit is appended via include_media, not as a block");
    }
    if (b == Block::BOW && bow == nullptr) {
      throw UsageError("BOW block requested without a fitted vocabulary");
    }
    if (b == Block::NGR && ngr == nullptr) {
      throw UsageError("NGR block requested without a fitted vocabulary");
    }
    if ((b == Block::BOW || b == Block::NGR) &&
        request.source == Source::Title) {
      throw UsageError("vocabulary blocks are computed on the post text only");
    }
  }
  return blocks;
}

bool is_vocab(Block b) { return b == Block::BOW || b == Block::NGR; }

}  // namespace

std::vector<std::string> FeatureExtractor::block_slot_names(
    Block b, const VocabModel* bow, const VocabModel* ngr) const {
  switch (b) {
    case Block::MOR:
      return {"mor.char_count",       "mor.word_count",
              "mor.question_marks",   "mor.exclamation_marks",
              "mor.uppercase_chars",  "mor.has_question_mark",
              "mor.has_exclamation_mark", "mor.has_first_person",
              "mor.has_second_person", "mor.has_third_person",
              "mor.avg_word_length",  "mor.longest_dependency",
              "mor.has_det_or_pron",  "mor.common_words",
              "mor.title_similarity", "mor.description_similarity"};
    case Block::STY:
      return {"sty.slang_words", "sty.readability", "sty.has_colon",
              "sty.has_please",  "sty.begins_with_digit", "sty.has_hashtag",
              "sty.has_mention", "sty.has_contraction", "sty.has_punctuation"};
    case Block::GRA: {
      std::vector<std::string> names;
      for (int i = 0; i < kPosTagCount; ++i) {
        names.push_back("gra.pos_hist." +
                        std::string(pos_tag_name(static_cast<PosTag>(i))));
      }
      names.push_back("gra.ne_hist.PERSON");
      names.push_back("gra.ne_hist.LOCATION");
      names.push_back("gra.ne_hist.ORGANIZATION");
      names.insert(names.end(),
                   {"gra.passive_sentences", "gra.is_passive",
                    "gra.noun_count", "gra.adjective_count", "gra.verb_count",
                    "gra.adverb_count", "gra.subject_pronoun",
                    "gra.subject_proper", "gra.subject_common",
                    "gra.subject_other", "gra.stopword_ratio"});
      return names;
    }
    case Block::SEN:
      return {"sen.positive_words",     "sen.negative_words",
              "sen.has_happy_emoticon", "sen.has_sad_emoticon",
              "sen.hyperbolic_terms",   "sen.overall_sentiment"};
    case Block::GID: {
      std::vector<std::string> names;
      for (const std::string& cat : kit_->gid().categories()) {
        names.push_back("gid." + cat);
      }
      return names;
    }
    case Block::BOW: {
      std::vector<std::string> names;
      for (const std::string& term : bow->terms()) {
        names.push_back("bow." + term);
      }
      return names;
    }
    case Block::NGR: {
      std::vector<std::string> names;
      for (const std::string& term : ngr->terms()) {
        names.push_back("ngr." + term);
      }
      return names;
    }
    case Block::MEDIA:
      return {"has_media"};
  }
  return {};
}

FeatureSchema FeatureExtractor::schema_for(const AssembleRequest& request,
                                           const VocabModel* bow,
                                           const VocabModel* ngr) const {
  std::vector<Block> blocks = canonical_blocks(request, bow, ngr);

  FeatureSchema schema;
  auto append = [&](Source src, Block b) {
    std::string prefix(source_name(src));
    for (std::string& name : block_slot_names(b, bow, ngr)) {
      schema.slots.push_back({prefix + "." + std::move(name), b, src});
    }
  };

  if (request.source != Source::Title) {
    for (Block b : blocks) append(Source::Post, b);
  }
  if (request.source != Source::Post) {
    for (Block b : blocks) {
      if (!is_vocab(b)) append(Source::Title, b);
    }
  }
  if (request.include_media) {
    schema.slots.push_back({"has_media", Block::MEDIA, Source::Post});
  }
  return schema;
}

FeatureVector FeatureExtractor::assemble_from_blocks(
    const InstanceBlocks& blocks, const AssembleRequest& request,
    const VocabModel* bow, const VocabModel* ngr) const {
  std::vector<Block> order = canonical_blocks(request, bow, ngr);

  FeatureVector fv;
  auto append_hand = [&](const std::array<std::vector<double>, kHandblockCount>&
                             source_blocks,
                         Block b) {
    const std::vector<double>& vals =
        source_blocks[static_cast<std::size_t>(b)];
    fv.values.insert(fv.values.end(), vals.begin(), vals.end());
  };

  if (request.source != Source::Title) {
    for (Block b : order) {
      if (b == Block::BOW) {
        FeatureVector counts = count_terms(blocks.bow_terms, *bow);
        fv.values.insert(fv.values.end(), counts.values.begin(),
                         counts.values.end());
      } else if (b == Block::NGR) {
        FeatureVector counts = count_terms(blocks.ngr_terms, *ngr);
        fv.values.insert(fv.values.end(), counts.values.begin(),
                         counts.values.end());
      } else {
        append_hand(blocks.post, b);
      }
    }
  }
  if (request.source != Source::Post) {
    for (Block b : order) {
      if (!is_vocab(b)) append_hand(blocks.title, b);
    }
  }
  if (request.include_media) {
    fv.values.push_back(blocks.has_media ? 1.0 : 0.0);
  }
  return fv;
}

FeatureVector FeatureExtractor::assemble(const PostInstance& instance,
                                         const AssembleRequest& request,
                                         const VocabModel* bow,
                                         const VocabModel* ngr) const {
  return assemble_from_blocks(compute_blocks(instance), request, bow, ngr);
}

// ---------------------------------------------------------------------------
// CSV export and binary cache
// ---------------------------------------------------------------------------

void write_feature_csv(const std::filesystem::path& path,
                       const FeatureSchema& schema,
                       const std::vector<std::string>& ids,
                       const std::vector<FeatureVector>& rows) {
  if (ids.size() != rows.size()) {
    throw UsageError("feature CSV: ids and rows differ in length");
  }
  std::string out = "id";
  for (const SchemaSlot& slot : schema.slots) {
    out += ',';
    out += csv_escape(slot.name);
  }
  out += '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].values.size() != schema.dimension()) {
      throw UsageError("feature CSV: row dimension does not match schema");
    }
    out += csv_escape(ids[i]);
    for (double v : rows[i].values) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  write_file(path, out);
}

namespace {

constexpr char kCacheMagic[8] = {'C', 'B', 'F', 'C', '0', '0', '0', '1'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_str(std::string& out, const std::string& s) {
  put_u64(out, s.size());
  out += s;
}

struct CacheReader {
  const std::string& buf;
  std::size_t pos = 0;

  std::uint64_t u64() {
    if (pos + 8 > buf.size()) throw DataError("feature cache truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + static_cast<std::size_t>(i)]))
           << (8 * i);
    }
    pos += 8;
    return v;
  }
  std::string str() {
    std::uint64_t len = u64();
    if (pos + len > buf.size()) throw DataError("feature cache truncated");
    std::string s = buf.substr(pos, len);
    pos += len;
    return s;
  }
  double f64() {
    std::uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
  }
};

}  // namespace

void write_feature_cache(const std::filesystem::path& path,
                         const FeatureCacheData& data) {
  std::string out(kCacheMagic, sizeof(kCacheMagic));
  put_u64(out, data.corpus_hash);
  put_u64(out, data.config_hash);
  put_u64(out, data.names.size());
  put_u64(out, data.ids.size());
  for (const std::string& name : data.names) put_str(out, name);
  for (const std::string& id : data.ids) put_str(out, id);
  for (const FeatureVector& row : data.rows) {
    if (row.values.size() != data.names.size()) {
      throw UsageError("feature cache: row dimension does not match names");
    }
    for (double v : row.values) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      put_u64(out, bits);
    }
  }
  write_file(path, out);
}

std::optional<FeatureCacheData> load_feature_cache(
    const std::filesystem::path& path, std::uint64_t corpus_hash,
    std::uint64_t config_hash) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::string buf = read_file(path);
  if (buf.size() < sizeof(kCacheMagic) ||
      std::memcmp(buf.data(), kCacheMagic, sizeof(kCacheMagic)) != 0) {
    return std::nullopt;
  }
  CacheReader reader{buf, sizeof(kCacheMagic)};
  FeatureCacheData data;
  data.corpus_hash = reader.u64();
  data.config_hash = reader.u64();
  if (data.corpus_hash != corpus_hash || data.config_hash != config_hash) {
    return std::nullopt;
  }
  std::uint64_t cols = reader.u64();
  std::uint64_t n = reader.u64();
  data.names.reserve(cols);
  for (std::uint64_t i = 0; i < cols; ++i) data.names.push_back(reader.str());
  data.ids.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) data.ids.push_back(reader.str());
  data.rows.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    FeatureVector row;
    row.values.reserve(cols);
    for (std::uint64_t j = 0; j < cols; ++j) row.values.push_back(reader.f64());
    data.rows.push_back(std::move(row));
  }
  return data;
}

}  // namespace clickbait
