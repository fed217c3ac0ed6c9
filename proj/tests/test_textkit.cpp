#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "clickbait/textkit.hpp"
#include "clickbait/util.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace clickbait;

namespace {

const TextKit& kit() {
  static const TextKit instance(fs::path(CLICKBAIT_DATA_DIR));
  return instance;
}

std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

PosTag tag_of(const std::string& text, const std::string& surface) {
  auto tagged = kit().pos_tag(kit().tokenize(text));
  for (const auto& t : tagged) {
    if (t.token.surface == surface) return t.pos;
  }
  FAIL("token not found: ", surface);
  return PosTag::OTHER;
}

NeTag ne_of(const std::string& text, const std::string& surface) {
  auto tagged = kit().ne_tag(kit().pos_tag(kit().tokenize(text)));
  for (const auto& t : tagged) {
    if (t.token.surface == surface) return t.ne;
  }
  FAIL("token not found: ", surface);
  return NeTag::NONE;
}

}  // namespace

TEST_SUITE("textkit") {

TEST_CASE("tokenize basics") {
  CHECK(kit().tokenize("").empty());
  CHECK(kit().tokenize("   \t\n").empty());

  auto tokens = kit().tokenize(
      "Two dead after standoff with cops in Philadelphia @nbcphiladelphia");
  REQUIRE(tokens.size() == 9);
  CHECK(tokens.back().kind == TokenKind::Mention);
  CHECK(tokens.back().surface == "@nbcphiladelphia");
  CHECK(tokens[0].surface == "Two");
  CHECK(tokens[0].lower == "two");
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    CHECK(tokens[i].kind == TokenKind::Word);
  }

  tokens = kit().tokenize("so sad :(");
  REQUIRE(surfaces(tokens) == std::vector<std::string>{"so", "sad", ":("});
  CHECK(tokens[2].kind == TokenKind::Emoticon);
}

TEST_CASE("tokenize urls, numbers, contractions") {
  auto tokens = kit().tokenize("Check this https://example.com/story now");
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[2].kind == TokenKind::Url);
  CHECK(tokens[2].surface == "https://example.com/story");
  CHECK(kit().tokenize("see www.example.org please")[1].kind == TokenKind::Url);
  // a URL prefix glued to a word is not at a whitespace boundary
  auto glued = kit().tokenize("xhttp://nope");
  CHECK(glued[0].kind != TokenKind::Url);

  tokens = kit().tokenize("3,500 names");
  REQUIRE(surfaces(tokens) == std::vector<std::string>{"3", ",", "500", "names"});
  CHECK(tokens[0].kind == TokenKind::Number);
  CHECK(tokens[1].kind == TokenKind::Punctuation);
  CHECK(tokens[2].kind == TokenKind::Number);

  tokens = kit().tokenize("don't");
  REQUIRE(tokens.size() == 1);
  CHECK(tokens[0].kind == TokenKind::Word);
  CHECK(tokens[0].lower == "don't");
  // curly-quote contraction stays one token too
  tokens = kit().tokenize("won\xe2\x80\x99t stop");
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].kind == TokenKind::Word);
  // trailing apostrophe is not internal
  tokens = kit().tokenize("cats' toys");
  REQUIRE(surfaces(tokens) == std::vector<std::string>{"cats", "'", "toys"});
}

TEST_CASE("tokenize hashtags and mentions need word boundaries") {
  auto tokens = kit().tokenize("find her #missing now");
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[2].kind == TokenKind::Hashtag);
  CHECK(tokens[2].surface == "#missing");

  // '#' glued to a word stays punctuation; '#' with nothing after too
  tokens = kit().tokenize("x#y");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[1].kind == TokenKind::Punctuation);
  tokens = kit().tokenize("end #");
  CHECK(tokens[1].kind == TokenKind::Punctuation);

  tokens = kit().tokenize("email me @some_user");
  CHECK(tokens[2].kind == TokenKind::Mention);
  CHECK(tokens[2].surface == "@some_user");
}

TEST_CASE("tokenize emoticons only at boundaries, longest match wins") {
  auto tokens = kit().tokenize("great game :P");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[2].kind == TokenKind::Emoticon);
  CHECK(kit().is_happy_emoticon(tokens[2].surface));

  tokens = kit().tokenize("so sad :(");
  CHECK(kit().is_sad_emoticon(tokens[2].surface));
  CHECK_FALSE(kit().is_happy_emoticon(tokens[2].surface));

  // inside a URL-ish run with no boundary, ":(" does not match
  tokens = kit().tokenize("a:(b");
  CHECK(tokens.size() == 4);
}

TEST_CASE("tokenize offsets reconstruct the input") {
  const std::string samples[] = {
      "Two dead after standoff with cops in Philadelphia @nbcphiladelphia",
      "Caf\xc3\xa9 r\xc3\xa9sum\xc3\xa9 na\xc3\xafve \xe2\x80\x94 m\xc3\xbcller scored twice",
      "Please RT: help us find her #missing #Philadelphia",
      "Check this out https://example.com/story right now",
      "Hi!? Ok. Fine then.", "don't click this #weird :P",
      "btw this is so lol \xe2\x80\x94 number 9 made me laugh"};
  for (const std::string& text : samples) {
    CAPTURE(text);
    auto tokens = kit().tokenize(text);
    // surfaces laid end to end equal the text with tokenizer whitespace
    // removed (every non-space character belongs to exactly one token)
    std::string concat;
    for (const auto& t : tokens) concat += t.surface;
    std::string squeezed;
    for (char c : text) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
          c == '\v') {
        continue;
      }
      squeezed += c;
    }
    CHECK(concat == squeezed);
    // offsets are strictly increasing code-point ranges
    std::size_t prev_end = 0;
    for (const auto& t : tokens) {
      CHECK(t.start >= prev_end);
      CHECK(t.end > t.start);
      prev_end = t.end;
    }
    CHECK(codepoint_count(text) >= prev_end);
    // re-tokenizing the surfaces yields the same surfaces (idempotence)
    std::string rejoined;
    for (const auto& t : tokens) {
      if (!rejoined.empty()) rejoined += ' ';
      rejoined += t.surface;
    }
    CHECK(surfaces(kit().tokenize(rejoined)) == surfaces(tokens));
  }
}

TEST_CASE("codepoint_count handles multibyte and invalid bytes") {
  CHECK(codepoint_count("") == 0);
  CHECK(codepoint_count("abc") == 3);
  CHECK(codepoint_count("Caf\xc3\xa9") == 4);
  CHECK(codepoint_count("\xe2\x80\x94") == 1);
  CHECK(codepoint_count("a\xffz") == 3);  // stray byte counts as one
}

TEST_CASE("sentence splitting") {
  auto count = [&](const std::string& text) {
    return kit().sentences(text).size();
  };
  CHECK(count("A. B!") == 2);
  CHECK(count("no punct") == 1);
  CHECK(count("Hi!? Ok.") == 2);
  CHECK(count("Hi!? Ok. Fine then.") == 3);
  CHECK(count("") == 0);
  CHECK(count("...") == 0);  // terminator-only spans are dropped
  CHECK(count("... wait.") == 1);

  auto tokens = kit().tokenize("A. B!");
  auto spans = TextKit::sentences(tokens);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].begin == 0);
  CHECK(spans[0].end == 2);  // "A" "." — terminator run absorbed
  CHECK(spans[1].begin == 2);
  CHECK(spans[1].end == 4);
}

TEST_CASE("pos tagging rule priorities") {
  CHECK(tag_of("the cat", "the") == PosTag::DET);
  CHECK(tag_of("she ran quickly home", "quickly") == PosTag::ADV);
  CHECK(tag_of("agents from Europol arrived", "Europol") == PosTag::PROPN);
  CHECK(tag_of("2 men", "2") == PosTag::NUM);
  CHECK(tag_of("hello, world", ",") == PosTag::OTHER);
  CHECK(tag_of("a famous standoff", "standoff") == PosTag::NOUN);
  // suffix rules with length guards
  CHECK(tag_of("a wonderful thing", "wonderful") == PosTag::ADJ);
  CHECK(tag_of("it was doable maybe", "doable") == PosTag::ADJ);
  CHECK(tag_of("they were chasing him", "chasing") == PosTag::VERB);
  CHECK(tag_of("he botched it", "botched") == PosTag::VERB);
  // capitalization: mid-sentence unknown capitalized word is PROPN,
  // sentence-initial is not
  CHECK(tag_of("we met Flembotron today", "Flembotron") == PosTag::PROPN);
  CHECK(tag_of("Flembotron arrived", "Flembotron") == PosTag::NOUN);
  // gazetteer names are PROPN even sentence-initially
  CHECK(tag_of("Philadelphia votes today", "Philadelphia") == PosTag::PROPN);
  // frequency lexicon beats the capitalization rule
  CHECK(tag_of("meet the President today", "President") == PosTag::NOUN);
}

TEST_CASE("pos tagging is deterministic across calls") {
  const std::string text =
      "President Maduro visited Caracas University on Monday";
  auto a = kit().pos_tag(kit().tokenize(text));
  auto b = kit().pos_tag(kit().tokenize(text));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].pos == b[i].pos);
}

TEST_CASE("ne tagging: gazetteers, title words, corporate suffixes") {
  CHECK(ne_of("standoff with cops in Philadelphia today", "Philadelphia") ==
        NeTag::LOCATION);
  // person gazetteer run of length 2
  auto tagged = kit().ne_tag(kit().pos_tag(
      kit().tokenize("what Donald Trump said this time")));
  int person_run = 0;
  for (const auto& t : tagged) person_run += t.ne == NeTag::PERSON;
  CHECK(person_run == 2);
  CHECK(ne_of("what Donald Trump said this time", "Donald") == NeTag::PERSON);
  CHECK(ne_of("what Donald Trump said this time", "Trump") == NeTag::PERSON);

  // all-lowercase text has no PROPN, hence no entities
  for (const auto& t : kit().ne_tag(kit().pos_tag(
           kit().tokenize("i think michelle obama was amazing last night")))) {
    CHECK(t.ne == NeTag::NONE);
  }

  // unknown PROPN after a title word becomes PERSON
  CHECK(ne_of("President Maduro visited Caracas University on Monday",
              "Maduro") == NeTag::PERSON);
  // unknown PROPN run containing a corporate suffix becomes ORGANIZATION
  CHECK(ne_of("President Maduro visited Caracas University on Monday",
              "Caracas") == NeTag::ORGANIZATION);
  CHECK(ne_of("President Maduro visited Caracas University on Monday",
              "University") == NeTag::ORGANIZATION);
  CHECK(ne_of("shares of Flembotron Inc fell again", "Flembotron") ==
        NeTag::ORGANIZATION);
  // organization gazetteer
  CHECK(ne_of("files that Europol released", "Europol") ==
        NeTag::ORGANIZATION);
  // unknown PROPN with no cue stays NONE
  CHECK(ne_of("we met Flembotron today", "Flembotron") == NeTag::NONE);
}

TEST_CASE("syllable counting") {
  CHECK(TextKit::syllable_count("cat") == 1);
  CHECK(TextKit::syllable_count("make") == 1);
  CHECK(TextKit::syllable_count("media") == 3);
  CHECK(TextKit::syllable_count("the") == 1);
  CHECK(TextKit::syllable_count("readability") == 5);
  CHECK(TextKit::syllable_count("e") == 1);        // never below 1
  CHECK(TextKit::syllable_count("rhythm") == 1);   // y as vowel
  CHECK(TextKit::syllable_count("xzzt") == 1);     // no vowels -> minimum
  CHECK(TextKit::syllable_count("radio") == 3);    // -io hiatus
}

TEST_CASE("flesch reading ease") {
  CHECK(kit().flesch_reading_ease("The cat sat.") ==
        doctest::Approx(119.19).epsilon(1e-11));
  CHECK(kit().flesch_reading_ease("") == 0.0);
  CHECK(kit().flesch_reading_ease("?!??") == 0.0);  // no word tokens

  // invariant under duplication of an identical sentence
  double once = kit().flesch_reading_ease("The cat sat on the mat.");
  double twice =
      kit().flesch_reading_ease("The cat sat on the mat. The cat sat on the mat.");
  CHECK(once == doctest::Approx(twice).epsilon(1e-12));

  // more syllables per word, same word/sentence counts -> strictly lower
  double plain = kit().flesch_reading_ease("The cat sat on it.");
  double heavy = kit().flesch_reading_ease("The animal rested on it.");
  CHECK(heavy < plain);
}

TEST_CASE("passive voice detection") {
  auto tag = [&](const std::string& text) {
    return kit().pos_tag(kit().tokenize(text));
  };
  auto passive = [&](const std::string& text) {
    auto t = tag(text);
    return kit().detect_passive(std::span<const TaggedToken>(t));
  };
  CHECK(passive("names were linked"));
  CHECK(passive("The names were linked to suspected criminals."));
  CHECK_FALSE(passive("she links names"));
  CHECK_FALSE(passive(""));
  // participle must be within 3 tokens of the auxiliary
  CHECK(passive("it was quickly linked"));
  CHECK_FALSE(passive("it was so very quickly maybe linked"));
  // irregular participle list
  CHECK(passive("it was taken"));
}

TEST_CASE("lexicon loading and merge rules") {
  fs::path dir = fs::temp_directory_path() / "clickbait_lexicon_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "two.tsv");
    out << "alpha\tCatA,CatB\n";
    out << "beta\tCatB\n";
  }
  Lexicon two = Lexicon::load(dir / "two.tsv", "two");
  CHECK(two.size() == 2);
  CHECK(two.contains("alpha"));
  CHECK(two.contains("ALPHA"));  // case-insensitive
  CHECK_FALSE(two.contains("gamma"));
  REQUIRE(two.categories().size() == 2);
  CHECK(two.categories_of("alpha").size() == 2);
  CHECK(two.categories_of("beta").size() == 1);
  CHECK(two.categories_of("missing").empty());

  {
    std::ofstream out(dir / "dup.tsv");
    out << "word\tOne\n";
    out << "word\tTwo\n";
  }
  Lexicon dup = Lexicon::load(dir / "dup.tsv", "dup");
  CHECK(dup.size() == 1);
  CHECK(dup.categories_of("word").size() == 2);  // categories unioned

  {
    std::ofstream out(dir / "plain.txt");
    out << "hello\nworld\n";
  }
  Lexicon plain = Lexicon::load(dir / "plain.txt", "plain");
  CHECK(plain.size() == 2);
  REQUIRE(plain.categories().size() == 1);  // implicit single category
  CHECK(plain.categories_of("hello").size() == 1);

  CHECK_THROWS_AS(Lexicon::load(dir / "absent.tsv", "x"), DataError);
  { std::ofstream out(dir / "empty.tsv"); }
  CHECK_THROWS_AS(Lexicon::load(dir / "empty.tsv", "x"), DataError);
}

TEST_CASE("bundled general-inquirer lexicon has the full category universe") {
  CHECK(kit().gid().categories().size() == 182);
  CHECK(kit().gid().size() > 0);
}

TEST_CASE("missing data directory fails loudly") {
  CHECK_THROWS_AS(TextKit(fs::path("/nonexistent/clickbait-data")), DataError);
}

}  // TEST_SUITE
