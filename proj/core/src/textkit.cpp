#include "clickbait/textkit.hpp"

#include <algorithm>
#include <cctype>

#include "clickbait/util.hpp"

namespace clickbait {

namespace {

struct CodePoint {
  char32_t cp = 0;
  std::size_t byte_pos = 0;
  std::size_t byte_len = 0;
};

// Tolerant UTF-8 decode: an invalid lead/continuation byte is taken as a
// single one-byte code point so tokenization stays total.
std::vector<CodePoint> decode_utf8(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char b = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t cp = b;
    if (b >= 0xF0) len = 4;
    else if (b >= 0xE0) len = 3;
    else if (b >= 0xC0) len = 2;
    if (len > 1) {
      if (i + len > text.size()) {
        len = 1;
      } else {
        char32_t acc = b & (0x7F >> len);
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
          unsigned char c = static_cast<unsigned char>(text[i + k]);
          if ((c & 0xC0) != 0x80) {
            ok = false;
            break;
          }
          acc = (acc << 6) | (c & 0x3F);
        }
        if (ok) cp = acc;
        else len = 1;
      }
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

bool is_ascii_letter(char32_t c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }
// Non-ASCII code points count as letters so multibyte words stay intact.
bool is_letterlike(char32_t c) { return is_ascii_letter(c) || c >= 0x80; }
bool is_wordlike(char32_t c) { return is_letterlike(c) || is_digit(c); }
bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v' || c == 0xA0;
}
bool is_apostrophe(char32_t c) { return c == '\'' || c == 0x2019; }

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > text.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char a = text[pos + i];
    if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
    if (a != prefix[i]) return false;
  }
  return true;
}

bool is_upper_ascii(char32_t c) { return c >= 'A' && c <= 'Z'; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

const std::unordered_set<std::string>& be_forms() {
  static const std::unordered_set<std::string> forms = {
      "am", "is", "are", "was", "were", "be", "been", "being"};
  return forms;
}

const std::unordered_set<std::string>& title_words() {
  static const std::unordered_set<std::string> words = {
      "mr",  "mrs", "ms",  "dr",        "prof",     "sir",   "madam",
      "rev", "sen", "rep", "president", "governor", "mayor", "judge",
      "gen", "capt", "lord", "lady", "pope", "king", "queen", "prince",
      "princess", "chancellor", "minister", "secretary", "coach"};
  return words;
}

const std::unordered_set<std::string>& corporate_suffixes() {
  static const std::unordered_set<std::string> words = {
      "inc",   "corp",  "co",    "ltd",   "llc",   "plc",     "group",
      "news",  "times", "post",  "daily", "press", "network", "media",
      "bank",  "airlines", "motors", "university", "college", "institute",
      "department", "agency", "committee", "association", "foundation",
      "company", "broadcasting", "studios"};
  return words;
}

std::string strip_possessive(std::string_view lower) {
  if (ends_with(lower, "'s")) return std::string(lower.substr(0, lower.size() - 2));
  // U+2019 apostrophe followed by s
  if (lower.size() >= 4 && ends_with(lower.substr(0, lower.size() - 1), "\xe2\x80\x99")) {
    if (lower.back() == 's') return std::string(lower.substr(0, lower.size() - 4));
  }
  return std::string(lower);
}

}  // namespace

std::string_view pos_tag_name(PosTag tag) {
  static const char* names[] = {"NOUN", "PROPN", "VERB", "ADJ", "ADV", "PRON",
                                "DET",  "ADP",   "NUM",  "CONJ", "PRT", "OTHER"};
  return names[static_cast<int>(tag)];
}

std::string_view ne_tag_name(NeTag tag) {
  static const char* names[] = {"NONE", "PERSON", "LOCATION", "ORGANIZATION"};
  return names[static_cast<int>(tag)];
}

// ---------------------------------------------------------------------------
// Lexicon
// ---------------------------------------------------------------------------

Lexicon Lexicon::load(const std::filesystem::path& path, std::string name) {
  Lexicon lex;
  lex.name_ = std::move(name);

  std::vector<std::string> lines = read_lines(path);
  // word -> set of category names, merged across duplicate lines
  std::unordered_map<std::string, std::unordered_set<std::string>> raw;
  std::unordered_set<std::string> universe;
  for (const std::string& line : lines) {
    if (line.empty() || line[0] == '#') continue;
    std::string word, cats;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      word = line;
      cats = lex.name_;
    } else {
      word = line.substr(0, tab);
      cats = line.substr(tab + 1);
      if (cats.empty()) cats = lex.name_;
    }
    word = lower_ascii(word);
    if (word.empty()) continue;
    auto& set = raw[word];
    std::size_t pos = 0;
    while (pos <= cats.size()) {
      auto comma = cats.find(',', pos);
      std::string cat = cats.substr(pos, comma == std::string::npos
                                              ? std::string::npos
                                              : comma - pos);
      if (!cat.empty()) {
        set.insert(cat);
        universe.insert(cat);
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (raw.empty()) throw DataError("empty lexicon: " + path.string());

  lex.categories_.assign(universe.begin(), universe.end());
  std::sort(lex.categories_.begin(), lex.categories_.end());
  std::unordered_map<std::string, std::uint16_t> index;
  for (std::size_t i = 0; i < lex.categories_.size(); ++i) {
    index[lex.categories_[i]] = static_cast<std::uint16_t>(i);
  }
  for (auto& [word, cats] : raw) {
    std::vector<std::uint16_t> ids;
    ids.reserve(cats.size());
    for (const auto& c : cats) ids.push_back(index[c]);
    std::sort(ids.begin(), ids.end());
    lex.entries_[word] = std::move(ids);
  }
  return lex;
}

bool Lexicon::contains(std::string_view word) const {
  return entries_.count(lower_ascii(word)) > 0;
}

std::span<const std::uint16_t> Lexicon::categories_of(std::string_view word) const {
  auto it = entries_.find(lower_ascii(word));
  if (it == entries_.end()) return {};
  return it->second;
}

std::size_t codepoint_count(std::string_view text) {
  return decode_utf8(text).size();
}

std::unordered_set<std::string> load_wordlist(const std::filesystem::path& path) {
  std::unordered_set<std::string> out;
  for (const std::string& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    out.insert(lower_ascii(line));
  }
  if (out.empty()) throw DataError("empty word list: " + path.string());
  return out;
}

// ---------------------------------------------------------------------------
// TextKit construction
// ---------------------------------------------------------------------------

namespace {

PosTag parse_pos(const std::string& s, const std::filesystem::path& path) {
  for (int i = 0; i < kPosTagCount; ++i) {
    if (pos_tag_name(static_cast<PosTag>(i)) == s) return static_cast<PosTag>(i);
  }
  throw DataError("unknown POS tag '" + s + "' in " + path.string());
}

std::unordered_map<std::string, PosTag> load_tag_map(
    const std::filesystem::path& path) {
  std::unordered_map<std::string, PosTag> out;
  for (const std::string& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("expected word<TAB>TAG in " + path.string());
    }
    out[lower_ascii(line.substr(0, tab))] = parse_pos(line.substr(tab + 1), path);
  }
  if (out.empty()) throw DataError("empty tag map: " + path.string());
  return out;
}

}  // namespace

TextKit::TextKit(const std::filesystem::path& data_dir) {
  TextKitPaths paths{data_dir};
  closed_class_ = load_tag_map(paths.closed_class());
  freq_tags_ = load_tag_map(paths.freq_tags());
  persons_ = load_wordlist(paths.gazetteer_persons());
  locations_ = load_wordlist(paths.gazetteer_locations());
  organizations_ = load_wordlist(paths.gazetteer_organizations());
  irregular_participles_ = load_wordlist(paths.irregular_participles());
  stopwords_ = load_wordlist(paths.stopwords());
  slang_ = load_wordlist(paths.slang());
  positive_ = load_wordlist(paths.positive());
  negative_ = load_wordlist(paths.negative());
  hyperbolic_ = load_wordlist(paths.hyperbolic());
  common_ = load_wordlist(paths.common_words());
  gid_ = Lexicon::load(paths.gid(), "gid");

  for (const std::string& line : read_lines(paths.emoticons())) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("expected surface<TAB>mood in " + paths.emoticons().string());
    }
    emoticons_[line.substr(0, tab)] = line.substr(tab + 1);
  }
  if (emoticons_.empty()) {
    throw DataError("empty emoticon table: " + paths.emoticons().string());
  }
  for (const auto& [surface, mood] : emoticons_) {
    emoticon_surfaces_.push_back(surface);
  }
  std::sort(emoticon_surfaces_.begin(), emoticon_surfaces_.end(),
            [](const std::string& a, const std::string& b) {
              return a.size() != b.size() ? a.size() > b.size() : a < b;
            });
}

bool TextKit::is_happy_emoticon(std::string_view surface) const {
  auto it = emoticons_.find(std::string(surface));
  return it != emoticons_.end() && it->second == "happy";
}

bool TextKit::is_sad_emoticon(std::string_view surface) const {
  auto it = emoticons_.find(std::string(surface));
  return it != emoticons_.end() && it->second == "sad";
}

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

std::vector<Token> TextKit::tokenize(std::string_view text) const {
  std::vector<CodePoint> cps = decode_utf8(text);
  std::vector<Token> tokens;
  std::size_t n = cps.size();
  std::size_t i = 0;

  auto make_token = [&](std::size_t begin, std::size_t end, TokenKind kind) {
    Token t;
    t.start = begin;
    t.end = end;
    std::size_t byte_begin = cps[begin].byte_pos;
    std::size_t byte_end = cps[end - 1].byte_pos + cps[end - 1].byte_len;
    t.surface = std::string(text.substr(byte_begin, byte_end - byte_begin));
    t.lower = lower_ascii(t.surface);
    t.kind = kind;
    tokens.push_back(std::move(t));
  };

  while (i < n) {
    char32_t c = cps[i].cp;
    if (is_space(c)) {
      ++i;
      continue;
    }
    bool at_boundary = i == 0 || is_space(cps[i - 1].cp);

    // URLs: http://, https://, www. up to the next whitespace.
    if (at_boundary && (starts_with_ci(text, cps[i].byte_pos, "http://") ||
                        starts_with_ci(text, cps[i].byte_pos, "https://") ||
                        starts_with_ci(text, cps[i].byte_pos, "www."))) {
      std::size_t j = i;
      while (j < n && !is_space(cps[j].cp)) ++j;
      make_token(i, j, TokenKind::Url);
      i = j;
      continue;
    }

    // Mentions and hashtags: marker preceded by a non-word character and
    // followed by at least one [A-Za-z0-9_].
    if ((c == '@' || c == '#') &&
        (i == 0 || !is_wordlike(cps[i - 1].cp)) && i + 1 < n &&
        (is_wordlike(cps[i + 1].cp) || cps[i + 1].cp == '_')) {
      std::size_t j = i + 1;
      while (j < n && (is_wordlike(cps[j].cp) || cps[j].cp == '_')) ++j;
      make_token(i, j, c == '@' ? TokenKind::Mention : TokenKind::Hashtag);
      i = j;
      continue;
    }

    // Emoticons from the bundled table, longest match first, only at a
    // whitespace boundary so ":/" inside text never matches.
    if (at_boundary && !is_wordlike(c)) {
      bool matched = false;
      for (const std::string& surface : emoticon_surfaces_) {
        if (text.substr(cps[i].byte_pos).substr(0, surface.size()) == surface) {
          std::size_t j = i;
          std::size_t consumed = 0;
          while (j < n && consumed < surface.size()) {
            consumed += cps[j].byte_len;
            ++j;
          }
          if (consumed == surface.size()) {
            make_token(i, j, TokenKind::Emoticon);
            i = j;
            matched = true;
            break;
          }
        }
      }
      if (matched) continue;
    }

    if (is_wordlike(c)) {
      std::size_t j = i;
      bool all_digits = true;
      while (j < n) {
        if (is_wordlike(cps[j].cp)) {
          all_digits = all_digits && is_digit(cps[j].cp);
          ++j;
        } else if (is_apostrophe(cps[j].cp) && j > i &&
                   is_letterlike(cps[j - 1].cp) && j + 1 < n &&
                   is_letterlike(cps[j + 1].cp)) {
          all_digits = false;
          ++j;  // internal apostrophe joins (don't, UK's)
        } else {
          break;
        }
      }
      make_token(i, j, all_digits ? TokenKind::Number : TokenKind::Word);
      i = j;
      continue;
    }

    make_token(i, i + 1, TokenKind::Punctuation);
    ++i;
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Sentences
// ---------------------------------------------------------------------------

namespace {
bool is_terminator(const Token& t) {
  return t.kind == TokenKind::Punctuation &&
         (t.surface == "." || t.surface == "!" || t.surface == "?");
}
}  // namespace

std::vector<SentenceSpan> TextKit::sentences(const std::vector<Token>& tokens) {
  std::vector<SentenceSpan> spans;
  std::size_t begin = 0;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (is_terminator(tokens[i])) {
      // absorb the full terminator run into this sentence
      while (i < tokens.size() && is_terminator(tokens[i])) ++i;
      spans.push_back({begin, i});
      begin = i;
    } else {
      ++i;
    }
  }
  if (begin < tokens.size()) spans.push_back({begin, tokens.size()});

  // drop spans that are terminators only (leading "..." and the like)
  std::vector<SentenceSpan> out;
  for (const auto& s : spans) {
    bool has_content = false;
    for (std::size_t k = s.begin; k < s.end; ++k) {
      if (!is_terminator(tokens[k])) {
        has_content = true;
        break;
      }
    }
    if (has_content) out.push_back(s);
  }
  return out;
}

std::vector<SentenceSpan> TextKit::sentences(std::string_view text) const {
  return sentences(tokenize(text));
}

// ---------------------------------------------------------------------------
// POS tagging
// ---------------------------------------------------------------------------

bool TextKit::in_gazetteer(std::string_view lower) const {
  std::string base = strip_possessive(lower);
  return persons_.count(base) || locations_.count(base) ||
         organizations_.count(base);
}

std::vector<TaggedToken> TextKit::pos_tag(const std::vector<Token>& tokens) const {
  std::vector<TaggedToken> out;
  out.reserve(tokens.size());

  // first word token of each sentence is ambiguous for the capitalization rule
  std::vector<bool> sentence_initial(tokens.size(), false);
  for (const SentenceSpan& s : sentences(tokens)) {
    for (std::size_t k = s.begin; k < s.end; ++k) {
      if (tokens[k].kind == TokenKind::Word) {
        sentence_initial[k] = true;
        break;
      }
    }
  }

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& tok = tokens[i];
    TaggedToken tt;
    tt.token = tok;

    if (tok.kind == TokenKind::Number) {
      tt.pos = PosTag::NUM;
    } else if (tok.kind != TokenKind::Word) {
      tt.pos = PosTag::OTHER;
    } else {
      const bool capitalized =
          !tok.surface.empty() && is_upper_ascii(static_cast<unsigned char>(tok.surface[0]));
      auto closed = closed_class_.find(tok.lower);
      auto freq = freq_tags_.find(tok.lower);
      if (closed != closed_class_.end()) {
        tt.pos = closed->second;
      } else if (freq != freq_tags_.end()) {
        tt.pos = freq->second;
      } else if (capitalized && in_gazetteer(tok.lower)) {
        // gazetteer names are proper nouns even sentence-initially
        tt.pos = PosTag::PROPN;
      } else if (tok.lower.size() >= 4 && ends_with(tok.lower, "ly")) {
        tt.pos = PosTag::ADV;
      } else if (tok.lower.size() >= 5 && ends_with(tok.lower, "ing")) {
        tt.pos = PosTag::VERB;
      } else if (tok.lower.size() >= 4 && ends_with(tok.lower, "ed")) {
        tt.pos = PosTag::VERB;
      } else if (tok.lower.size() >= 5 && (ends_with(tok.lower, "ous") ||
                                           ends_with(tok.lower, "ful") ||
                                           ends_with(tok.lower, "able"))) {
        tt.pos = PosTag::ADJ;
      } else if (capitalized && !sentence_initial[i]) {
        tt.pos = PosTag::PROPN;
      } else {
        tt.pos = PosTag::NOUN;
      }
    }
    out.push_back(std::move(tt));
  }
  return out;
}

// ---------------------------------------------------------------------------
// NE tagging
// ---------------------------------------------------------------------------

std::vector<TaggedToken> TextKit::ne_tag(std::vector<TaggedToken> tagged) const {
  std::vector<Token> plain;
  plain.reserve(tagged.size());
  for (const auto& t : tagged) plain.push_back(t.token);
  std::vector<SentenceSpan> spans = sentences(plain);

  auto prev_non_punct = [&](std::size_t idx, std::size_t floor) -> const TaggedToken* {
    while (idx > floor) {
      --idx;
      if (tagged[idx].token.kind != TokenKind::Punctuation) return &tagged[idx];
    }
    return nullptr;
  };

  for (const SentenceSpan& s : spans) {
    std::size_t i = s.begin;
    while (i < s.end) {
      if (tagged[i].pos != PosTag::PROPN) {
        ++i;
        continue;
      }
      std::size_t run_begin = i;
      while (i < s.end && tagged[i].pos == PosTag::PROPN) ++i;
      std::size_t run_end = i;

      NeTag cls = NeTag::NONE;
      bool person = false, location = false, organization = false;
      bool corporate = false;
      for (std::size_t k = run_begin; k < run_end; ++k) {
        std::string base = strip_possessive(tagged[k].token.lower);
        person = person || persons_.count(base);
        location = location || locations_.count(base);
        organization = organization || organizations_.count(base);
        corporate = corporate || corporate_suffixes().count(base);
      }
      if (person) cls = NeTag::PERSON;
      else if (location) cls = NeTag::LOCATION;
      else if (organization) cls = NeTag::ORGANIZATION;
      else {
        const TaggedToken* before = prev_non_punct(run_begin, s.begin);
        if (before && title_words().count(strip_possessive(before->token.lower))) {
          cls = NeTag::PERSON;
        } else if (corporate) {
          cls = NeTag::ORGANIZATION;
        }
      }
      for (std::size_t k = run_begin; k < run_end; ++k) tagged[k].ne = cls;
    }
  }
  return tagged;
}

// ---------------------------------------------------------------------------
// Syllables and readability
// ---------------------------------------------------------------------------

int TextKit::syllable_count(std::string_view word) {
  std::string w = lower_ascii(word);
  auto is_vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  int groups = 0;
  bool in_group = false;
  bool any_alpha = false;
  for (char c : w) {
    if (c >= 'a' && c <= 'z') any_alpha = true;
    if (is_vowel(c)) {
      if (!in_group) ++groups;
      in_group = true;
    } else {
      in_group = false;
    }
  }
  if (!any_alpha) return 0;
  // word-final -ia/-io is a hiatus: me-di-a, ra-di-o
  if (w.size() >= 3 && (ends_with(w, "ia") || ends_with(w, "io")) &&
      !is_vowel(w[w.size() - 3])) {
    ++groups;
  }
  // terminal silent e
  if (w.size() >= 2 && w.back() == 'e' && !is_vowel(w[w.size() - 2]) &&
      groups > 1) {
    --groups;
  }
  return std::max(groups, 1);
}

double TextKit::flesch_reading_ease(std::string_view text) const {
  std::vector<Token> tokens = tokenize(text);
  long words = 0;
  long syllables = 0;
  for (const Token& t : tokens) {
    if (t.kind == TokenKind::Word) {
      ++words;
      syllables += syllable_count(t.surface);
    }
  }
  if (words == 0) return 0.0;

  long sentence_count = 0;
  for (const SentenceSpan& s : sentences(tokens)) {
    for (std::size_t k = s.begin; k < s.end; ++k) {
      if (tokens[k].kind == TokenKind::Word) {
        ++sentence_count;
        break;
      }
    }
  }
  if (sentence_count == 0) sentence_count = 1;

  double w = static_cast<double>(words);
  double s = static_cast<double>(sentence_count);
  double sy = static_cast<double>(syllables);
  return 206.835 - 1.015 * (w / s) - 84.6 * (sy / w);
}

// ---------------------------------------------------------------------------
// Passive voice
// ---------------------------------------------------------------------------

bool TextKit::detect_passive(std::span<const TaggedToken> sentence) const {
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (sentence[i].token.kind != TokenKind::Word) continue;
    if (!be_forms().count(sentence[i].token.lower)) continue;
    std::size_t limit = std::min(sentence.size(), i + 4);
    for (std::size_t j = i + 1; j < limit; ++j) {
      if (sentence[j].pos != PosTag::VERB) continue;
      const std::string& w = sentence[j].token.lower;
      if (ends_with(w, "ed") || ends_with(w, "en") ||
          irregular_participles_.count(w)) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace clickbait
