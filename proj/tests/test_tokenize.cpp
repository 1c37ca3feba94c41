#include <catch2/catch_amalgamated.hpp>

#include "deid/rng.hpp"
#include "deid/tokenize.hpp"

using namespace deid;

namespace {

std::vector<std::string> texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const Token& t : tokens) out.push_back(t.text);
  return out;
}

}  // namespace

TEST_CASE("letter runs, digit runs and single specials") {
  auto tokens = tokenize("Dr. Smith");
  REQUIRE(texts(tokens) == std::vector<std::string>{"Dr", ".", "Smith"});
  CHECK(tokens[0].start == 0);
  CHECK(tokens[0].end == 2);
  CHECK(tokens[1].start == 2);
  CHECK(tokens[1].end == 3);
  CHECK(tokens[2].start == 4);
  CHECK(tokens[2].end == 9);
}

TEST_CASE("empty text yields no tokens") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("   \n\t ").empty());
}

TEST_CASE("mixed alphanumerics split at class changes") {
  CHECK(texts(tokenize("A1-2B")) ==
        std::vector<std::string>{"A", "1", "-", "2", "B"});

  // rule oracle: recompute boundaries from character classes
  KeyedRng rng(5150);
  const std::string alphabet = "aB9-. ";
  for (int iter = 0; iter < 500; ++iter) {
    std::string s;
    size_t len = rng.below(12);
    for (size_t i = 0; i < len; ++i) s += alphabet[rng.below(6)];

    std::u32string u = uni::decode_utf8(s);
    std::vector<std::pair<size_t, size_t>> expected;
    size_t i = 0;
    auto cls = [&](char32_t c) {
      if (uni::is_letter(c)) return 0;
      if (uni::is_digit(c)) return 1;
      if (uni::is_space(c)) return 2;
      return 3;
    };
    while (i < u.size()) {
      int c = cls(u[i]);
      if (c == 2) { ++i; continue; }
      if (c == 3) { expected.push_back({i, i + 1}); ++i; continue; }
      size_t j = i;
      while (j < u.size() && cls(u[j]) == c) ++j;
      expected.push_back({i, j});
      i = j;
    }

    auto tokens = tokenize(u);
    REQUIRE(tokens.size() == expected.size());
    for (size_t k = 0; k < tokens.size(); ++k) {
      CHECK(tokens[k].start == expected[k].first);
      CHECK(tokens[k].end == expected[k].second);
    }
  }
}

TEST_CASE("offsets reconstruct the exact source substring") {
  std::string s = "Call (416) 555-2368 on 2019-03-05, ok?";
  std::u32string u = uni::decode_utf8(s);
  for (const Token& t : tokenize(u))
    CHECK(uni::encode_utf8(u.substr(t.start, t.end - t.start)) == t.text);
}

TEST_CASE("token ranges tile the non-whitespace characters") {
  KeyedRng rng(99);
  const std::string alphabet = "xY7(). \n\t";
  for (int iter = 0; iter < 300; ++iter) {
    std::string s;
    size_t len = rng.below(30);
    for (size_t i = 0; i < len; ++i) s += alphabet[rng.below(9)];
    std::u32string u = uni::decode_utf8(s);
    std::vector<bool> covered(u.size(), false);
    for (const Token& t : tokenize(u)) {
      REQUIRE(t.start < t.end);
      REQUIRE(t.end <= u.size());
      for (size_t i = t.start; i < t.end; ++i) {
        CHECK_FALSE(covered[i]);
        covered[i] = true;
      }
    }
    for (size_t i = 0; i < u.size(); ++i)
      CHECK(covered[i] == !uni::is_space(u[i]));
  }
}

TEST_CASE("unicode offsets count scalar values, not bytes") {
  // é is two UTF-8 bytes but one scalar
  auto tokens = tokenize("José fue");
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].text == "José");
  CHECK(tokens[0].start == 0);
  CHECK(tokens[0].end == 4);
  CHECK(tokens[1].start == 5);
  CHECK(tokens[1].end == 8);
}

TEST_CASE("sentence split after terminator plus uppercase") {
  auto tokens = tokenize_sentences(uni::decode_utf8("He left. She stayed."));
  REQUIRE(tokens.size() == 6);
  CHECK(tokens[0].sentence_index == 0);  // He
  CHECK(tokens[2].sentence_index == 0);  // .
  CHECK(tokens[3].sentence_index == 1);  // She
  CHECK(tokens[5].sentence_index == 1);  // .
}

TEST_CASE("no terminator means one sentence") {
  auto tokens = tokenize_sentences(uni::decode_utf8("just one line of text"));
  for (const Token& t : tokens) CHECK(t.sentence_index == 0);
}

TEST_CASE("abbreviation periods split too (documented limitation)") {
  auto tokens = tokenize_sentences(uni::decode_utf8("Dr. Smith came."));
  REQUIRE(tokens.size() == 5);
  CHECK(tokens[1].sentence_index == 0);  // "." after Dr
  CHECK(tokens[2].sentence_index == 1);  // Smith starts sentence 2
  auto ranges = sentence_ranges(tokens);
  CHECK(ranges.size() == 2);
}

TEST_CASE("newline also acts as a boundary before an uppercase start") {
  auto tokens = tokenize_sentences(uni::decode_utf8("stable overnight\nPlan continue"));
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[1].sentence_index == 0);
  CHECK(tokens[2].sentence_index == 1);
}

TEST_CASE("lowercase after period does not split") {
  auto tokens = tokenize_sentences(uni::decode_utf8("version 2. continued text"));
  for (const Token& t : tokens) CHECK(t.sentence_index == 0);
}

TEST_CASE("sentence indices are nondecreasing and cover all tokens") {
  KeyedRng rng(4242);
  const std::string alphabet = "aB. \n?";
  for (int iter = 0; iter < 200; ++iter) {
    std::string s;
    size_t len = rng.below(40);
    for (size_t i = 0; i < len; ++i) s += alphabet[rng.below(6)];
    auto tokens = tokenize_sentences(uni::decode_utf8(s));
    size_t prev = 0;
    for (const Token& t : tokens) {
      CHECK(t.sentence_index >= prev);
      CHECK(t.sentence_index <= prev + 1);
      prev = t.sentence_index;
    }
    auto ranges = sentence_ranges(tokens);
    size_t total = 0;
    for (auto [b, e] : ranges) {
      CHECK(b < e);
      total += e - b;
    }
    CHECK(total == tokens.size());
  }
}
