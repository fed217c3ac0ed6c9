#pragma once

// Brute-force recounts of the hand-crafted feature blocks, written as
// independent straight-line loops over the tokenizer output. The unit and
// acceptance suites compare these against the extractor: count and boolean
// slots must match exactly, ratio slots to within floating-point noise.

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "clickbait/textkit.hpp"

namespace oracle {

using clickbait::PosTag;
using clickbait::SentenceSpan;
using clickbait::TaggedToken;
using clickbait::TextKit;
using clickbait::Token;
using clickbait::TokenKind;

// Valid UTF-8 code points = bytes that are not continuation bytes.
inline long utf8_codepoints(std::string_view s) {
  long n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

inline const std::unordered_set<std::string>& first_person() {
  static const std::unordered_set<std::string> words = {
      "i",    "me",   "my",   "mine", "myself",    "we",  "us",
      "our",  "ours", "ourselves", "i'm", "i've", "i'll", "i'd",
      "we're", "we've", "we'll", "we'd"};
  return words;
}

inline const std::unordered_set<std::string>& second_person() {
  static const std::unordered_set<std::string> words = {
      "you",   "your",   "yours", "yourself", "yourselves",
      "you're", "you've", "you'll", "you'd"};
  return words;
}

inline const std::unordered_set<std::string>& third_person() {
  static const std::unordered_set<std::string> words = {
      "he",   "him",  "his",   "himself", "she",     "her",    "hers",
      "herself", "it", "its",  "itself",  "they",    "them",   "their",
      "theirs", "themselves", "he's", "she's", "it's", "they're",
      "they've", "they'll", "they'd", "he'll", "she'll", "he'd", "she'd"};
  return words;
}

inline double overlap(const TextKit& kit, const std::string& a,
                      const std::string& b) {
  std::unordered_set<std::string> ta, tb;
  for (const Token& t : kit.tokenize(a)) {
    if (t.kind == TokenKind::Word) ta.insert(t.lower);
  }
  if (ta.empty()) return 0.0;
  for (const Token& t : kit.tokenize(b)) {
    if (t.kind == TokenKind::Word) tb.insert(t.lower);
  }
  long shared = 0;
  for (const std::string& w : ta) {
    if (tb.count(w)) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(ta.size());
}

inline double readability(const TextKit& kit, const std::string& text) {
  std::vector<Token> tokens = kit.tokenize(text);
  long words = 0, syllables = 0;
  for (const Token& t : tokens) {
    if (t.kind == TokenKind::Word) {
      ++words;
      syllables += TextKit::syllable_count(t.surface);
    }
  }
  if (words == 0) return 0.0;
  long sentence_count = 0;
  for (const SentenceSpan& s : TextKit::sentences(tokens)) {
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

inline std::vector<double> mor(const TextKit& kit, const std::string& text,
                               const std::string& title,
                               const std::string& description,
                               bool zero_title_similarity) {
  std::vector<Token> tokens = kit.tokenize(text);
  std::vector<TaggedToken> tagged = kit.pos_tag(tokens);

  long words = 0, word_cps = 0, common = 0;
  bool first = false, second = false, third = false;
  for (const Token& t : tokens) {
    if (t.kind != TokenKind::Word) continue;
    ++words;
    word_cps += utf8_codepoints(t.surface);
    if (kit.common_words().count(t.lower)) ++common;
    first = first || first_person().count(t.lower) > 0;
    second = second || second_person().count(t.lower) > 0;
    third = third || third_person().count(t.lower) > 0;
  }
  long questions = 0, exclamations = 0;
  for (const Token& t : tokens) {
    if (t.kind != TokenKind::Punctuation) continue;
    if (t.surface == "?") ++questions;
    if (t.surface == "!") ++exclamations;
  }
  long uppercase = 0;
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') ++uppercase;
  }

  long longest_dep = 0;
  for (const SentenceSpan& s : TextKit::sentences(tokens)) {
    long verb = -1;
    for (std::size_t k = s.begin; k < s.end; ++k) {
      if (tagged[k].pos == PosTag::VERB) {
        verb = static_cast<long>(k);
        break;
      }
    }
    if (verb < 0) continue;
    for (std::size_t k = s.begin; k < s.end; ++k) {
      if (tagged[k].pos == PosTag::NOUN || tagged[k].pos == PosTag::PROPN) {
        long dist = static_cast<long>(k) - verb;
        if (dist < 0) dist = -dist;
        longest_dep = std::max(longest_dep, dist);
      }
    }
  }

  bool det_or_pron = false;
  for (const TaggedToken& t : tagged) {
    det_or_pron =
        det_or_pron || t.pos == PosTag::DET || t.pos == PosTag::PRON;
  }

  return {
      static_cast<double>(utf8_codepoints(text)),
      static_cast<double>(words),
      static_cast<double>(questions),
      static_cast<double>(exclamations),
      static_cast<double>(uppercase),
      questions > 0 ? 1.0 : 0.0,
      exclamations > 0 ? 1.0 : 0.0,
      first ? 1.0 : 0.0,
      second ? 1.0 : 0.0,
      third ? 1.0 : 0.0,
      words > 0 ? static_cast<double>(word_cps) / static_cast<double>(words)
                : 0.0,
      static_cast<double>(longest_dep),
      det_or_pron ? 1.0 : 0.0,
      static_cast<double>(common),
      zero_title_similarity ? 0.0 : overlap(kit, text, title),
      overlap(kit, text, description),
  };
}

// Slots holding real-valued ratios rather than counts/booleans.
inline bool mor_slot_is_ratio(std::size_t i) {
  return i == 10 || i == 14 || i == 15;
}

inline std::vector<double> sty(const TextKit& kit, const std::string& text) {
  std::vector<Token> tokens = kit.tokenize(text);
  long slang = 0;
  bool please = false, contraction = false, colon = false;
  bool hashtag = false, mention = false, punct = false;
  for (const Token& t : tokens) {
    hashtag = hashtag || t.kind == TokenKind::Hashtag;
    mention = mention || t.kind == TokenKind::Mention;
    punct = punct || t.kind == TokenKind::Punctuation;
    if (t.kind == TokenKind::Punctuation && t.surface == ":") colon = true;
    if (t.kind != TokenKind::Word) continue;
    if (kit.slang().count(t.lower)) ++slang;
    please = please || t.lower == "please";
    contraction = contraction || t.lower.find('\'') != std::string::npos ||
                  t.lower.find("\xe2\x80\x99") != std::string::npos;
  }
  bool begins_with_digit = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    begins_with_digit = c >= '0' && c <= '9';
    break;
  }
  return {
      static_cast<double>(slang),
      readability(kit, text),
      colon ? 1.0 : 0.0,
      please ? 1.0 : 0.0,
      begins_with_digit ? 1.0 : 0.0,
      hashtag ? 1.0 : 0.0,
      mention ? 1.0 : 0.0,
      contraction ? 1.0 : 0.0,
      punct ? 1.0 : 0.0,
  };
}

inline bool sty_slot_is_ratio(std::size_t i) { return i == 1; }

inline std::vector<double> sen(const TextKit& kit, const std::string& text) {
  long positive = 0, negative = 0, hyperbolic = 0, words = 0;
  bool happy = false, sad = false;
  for (const Token& t : kit.tokenize(text)) {
    if (t.kind == TokenKind::Emoticon) {
      happy = happy || kit.is_happy_emoticon(t.surface);
      sad = sad || kit.is_sad_emoticon(t.surface);
      continue;
    }
    if (t.kind != TokenKind::Word) continue;
    ++words;
    if (kit.positive_words().count(t.lower)) ++positive;
    if (kit.negative_words().count(t.lower)) ++negative;
    if (kit.hyperbolic().count(t.lower)) ++hyperbolic;
  }
  double sentiment = static_cast<double>(positive - negative) /
                     static_cast<double>(std::max(1L, words));
  sentiment = std::clamp(sentiment, -1.0, 1.0);
  return {
      static_cast<double>(positive), static_cast<double>(negative),
      happy ? 1.0 : 0.0,             sad ? 1.0 : 0.0,
      static_cast<double>(hyperbolic), sentiment,
  };
}

inline bool sen_slot_is_ratio(std::size_t i) { return i == 5; }

// Total category memberships of the text's word tokens, for the GID
// sum-consistency check.
inline long gid_membership_total(const TextKit& kit, const std::string& text) {
  long total = 0;
  for (const Token& t : kit.tokenize(text)) {
    if (t.kind != TokenKind::Word) continue;
    total += static_cast<long>(kit.gid().categories_of(t.lower).size());
  }
  return total;
}

}  // namespace oracle
