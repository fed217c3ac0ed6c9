#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace clickbait {

enum class TokenKind { Word, Number, Punctuation, Hashtag, Mention, Url, Emoticon };

// start/end are code-point offsets into the original text; surface keeps the
// raw bytes so the input can be reconstructed from tokens plus gaps.
struct Token {
  std::string surface;
  std::string lower;
  std::size_t start = 0;
  std::size_t end = 0;
  TokenKind kind = TokenKind::Word;
};

// 12-tag universal POS set.
enum class PosTag { NOUN, PROPN, VERB, ADJ, ADV, PRON, DET, ADP, NUM, CONJ, PRT, OTHER };
constexpr int kPosTagCount = 12;
std::string_view pos_tag_name(PosTag tag);

enum class NeTag { NONE, PERSON, LOCATION, ORGANIZATION };
constexpr int kNeClassCount = 3;  // NONE excluded from histograms
std::string_view ne_tag_name(NeTag tag);

struct TaggedToken {
  Token token;
  PosTag pos = PosTag::OTHER;
  NeTag ne = NeTag::NONE;
};

// [begin, end) indices into a token vector, one span per sentence.
struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// A word list with optional category tags per word. Lookups are
// case-insensitive; plain one-word-per-line files get a single implicit
// category named after the lexicon.
class Lexicon {
 public:
  Lexicon() = default;
  static Lexicon load(const std::filesystem::path& path, std::string name);

  const std::string& name() const { return name_; }
  bool contains(std::string_view word) const;
  // Indices into categories(), sorted ascending. Empty when absent.
  std::span<const std::uint16_t> categories_of(std::string_view word) const;
  // Category universe, sorted ascending by name.
  const std::vector<std::string>& categories() const { return categories_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::string name_;
  std::vector<std::string> categories_;
  std::unordered_map<std::string, std::vector<std::uint16_t>> entries_;
};

std::unordered_set<std::string> load_wordlist(const std::filesystem::path& path);

// Number of Unicode code points, with the same tolerant decoding the
// tokenizer uses (an invalid byte counts as one code point).
std::size_t codepoint_count(std::string_view text);

// Paths of the bundled data files, all relative to one directory.
struct TextKitPaths {
  std::filesystem::path dir;
  std::filesystem::path stopwords() const { return dir / "stopwords.txt"; }
  std::filesystem::path slang() const { return dir / "slang.txt"; }
  std::filesystem::path positive() const { return dir / "positive_words.txt"; }
  std::filesystem::path negative() const { return dir / "negative_words.txt"; }
  std::filesystem::path hyperbolic() const { return dir / "hyperbolic.txt"; }
  std::filesystem::path common_words() const { return dir / "common_words.txt"; }
  std::filesystem::path closed_class() const { return dir / "closed_class.tsv"; }
  std::filesystem::path freq_tags() const { return dir / "freq_tags.tsv"; }
  std::filesystem::path gazetteer_persons() const { return dir / "gazetteer_persons.txt"; }
  std::filesystem::path gazetteer_locations() const { return dir / "gazetteer_locations.txt"; }
  std::filesystem::path gazetteer_organizations() const { return dir / "gazetteer_organizations.txt"; }
  std::filesystem::path emoticons() const { return dir / "emoticons.tsv"; }
  std::filesystem::path irregular_participles() const { return dir / "irregular_participles.txt"; }
  std::filesystem::path gid() const { return dir / "gid_lexicon.tsv"; }
};

// Self-contained tokenizer, sentence splitter, rule/lexicon POS and NE
// taggers, syllable counting and readability. Immutable after construction
// and safe to share across threads.
class TextKit {
 public:
  explicit TextKit(const std::filesystem::path& data_dir);

  // Deterministic total tokenization. Hashtags (#x), mentions (@x), URLs and
  // emoticons from the bundled table stay single tokens; runs of
  // letters/digits (with internal apostrophes between letters) form
  // word/number tokens; any other non-space character is punctuation.
  std::vector<Token> tokenize(std::string_view text) const;

  // Sentences are maximal token runs; each run of . ! ? terminators closes
  // the sentence it follows. Text without a terminator is one sentence.
  static std::vector<SentenceSpan> sentences(const std::vector<Token>& tokens);
  std::vector<SentenceSpan> sentences(std::string_view text) const;

  std::vector<TaggedToken> pos_tag(const std::vector<Token>& tokens) const;
  std::vector<TaggedToken> ne_tag(std::vector<TaggedToken> tagged) const;

  // Maximal vowel groups (aeiouy), a word-final -ia/-io hiatus split, and a
  // terminal silent-e subtraction; never less than 1 for a non-empty word.
  static int syllable_count(std::string_view word);

  // 206.835 - 1.015*(words/sentences) - 84.6*(syllables/words); 0 when the
  // text has no word tokens.
  double flesch_reading_ease(std::string_view text) const;

  // True iff a form of "be" is followed within 3 tokens by a VERB ending in
  // -ed/-en or listed as an irregular participle.
  bool detect_passive(std::span<const TaggedToken> sentence) const;

  bool is_happy_emoticon(std::string_view surface) const;
  bool is_sad_emoticon(std::string_view surface) const;

  const std::unordered_set<std::string>& stopwords() const { return stopwords_; }
  const std::unordered_set<std::string>& slang() const { return slang_; }
  const std::unordered_set<std::string>& positive_words() const { return positive_; }
  const std::unordered_set<std::string>& negative_words() const { return negative_; }
  const std::unordered_set<std::string>& hyperbolic() const { return hyperbolic_; }
  const std::unordered_set<std::string>& common_words() const { return common_; }
  const Lexicon& gid() const { return gid_; }

 private:
  bool in_gazetteer(std::string_view lower) const;

  std::unordered_map<std::string, PosTag> closed_class_;
  std::unordered_map<std::string, PosTag> freq_tags_;
  std::unordered_set<std::string> persons_;
  std::unordered_set<std::string> locations_;
  std::unordered_set<std::string> organizations_;
  std::unordered_map<std::string, std::string> emoticons_;  // surface -> mood
  std::vector<std::string> emoticon_surfaces_;  // longest-first for matching
  std::unordered_set<std::string> irregular_participles_;
  std::unordered_set<std::string> stopwords_;
  std::unordered_set<std::string> slang_;
  std::unordered_set<std::string> positive_;
  std::unordered_set<std::string> negative_;
  std::unordered_set<std::string> hyperbolic_;
  std::unordered_set<std::string> common_;
  Lexicon gid_;
};

}  // namespace clickbait
