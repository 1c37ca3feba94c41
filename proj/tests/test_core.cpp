#include <catch2/catch_amalgamated.hpp>

#include "deid/core.hpp"
#include "deid/rng.hpp"
#include "deid/tokenize.hpp"

using namespace deid;

namespace {

Token tok(std::string text, size_t start, size_t end, size_t sent = 0) {
  Token t;
  t.text = std::move(text);
  t.start = start;
  t.end = end;
  t.sentence_index = sent;
  return t;
}

AnnotatedSpan span(size_t start, size_t end, EntityClass cls,
                   std::string text = {}) {
  AnnotatedSpan s;
  s.start = start;
  s.end = end;
  s.entity_class = cls;
  s.text = std::move(text);
  return s;
}

}  // namespace

TEST_CASE("entity classes round-trip through their names") {
  for (EntityClass c : all_entity_classes()) {
    auto parsed = parse_entity_class(to_string(c));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == c);
  }
  CHECK_FALSE(parse_entity_class("NOPE").has_value());
  CHECK(all_entity_classes().size() == 8);
}

TEST_CASE("tag strings round-trip") {
  CHECK(to_string(Tag::outside()) == "O");
  CHECK(to_string(Tag::begin(EntityClass::NAME)) == "B-NAME");
  CHECK(to_string(Tag::inside(EntityClass::DATE)) == "I-DATE");
  for (EntityClass c : all_entity_classes()) {
    for (Tag t : {Tag::begin(c), Tag::inside(c)}) {
      auto parsed = parse_tag(to_string(t));
      REQUIRE(parsed.has_value());
      CHECK(*parsed == t);
    }
  }
  CHECK(parse_tag("O") == Tag::outside());
  CHECK_FALSE(parse_tag("B-").has_value());
  CHECK_FALSE(parse_tag("X-NAME").has_value());
  CHECK_FALSE(parse_tag("").has_value());
}

TEST_CASE("spans_to_tags basic BIO assignment") {
  std::vector<Token> tokens = {tok("John", 0, 4), tok("Smith", 5, 10),
                               tok("visited", 11, 18)};
  std::vector<AnnotatedSpan> spans = {span(0, 10, EntityClass::NAME)};
  auto tags = spans_to_tags(tokens, spans);
  REQUIRE(tags.size() == 3);
  CHECK(tags[0] == Tag::begin(EntityClass::NAME));
  CHECK(tags[1] == Tag::inside(EntityClass::NAME));
  CHECK(tags[2] == Tag::outside());
}

TEST_CASE("spans_to_tags with no spans is all O") {
  std::vector<Token> tokens = {tok("a", 0, 1), tok("b", 2, 3)};
  auto tags = spans_to_tags(tokens, {});
  for (const Tag& t : tags) CHECK(t == Tag::outside());
}

TEST_CASE("partial character overlap still tags the token") {
  // token "2019-03-05" at [0,10); span covers only "2019"
  std::vector<Token> tokens = {tok("2019-03-05", 0, 10)};
  auto tags = spans_to_tags(tokens, {span(0, 4, EntityClass::DATE)});
  REQUIRE(tags.size() == 1);
  CHECK(tags[0] == Tag::begin(EntityClass::DATE));

  // intersection oracle: every token whose range intersects gets tagged
  std::vector<Token> three = {tok("ab", 0, 2), tok("cd", 3, 5), tok("ef", 6, 8)};
  auto mid = spans_to_tags(three, {span(4, 7, EntityClass::ID)});
  CHECK(mid[0] == Tag::outside());
  CHECK(mid[1] == Tag::begin(EntityClass::ID));
  CHECK(mid[2] == Tag::inside(EntityClass::ID));
}

TEST_CASE("overlapping spans are rejected with both spans named") {
  std::vector<Token> tokens = {tok("abcdef", 0, 6)};
  std::vector<AnnotatedSpan> spans = {span(0, 4, EntityClass::NAME),
                                      span(3, 6, EntityClass::DATE)};
  try {
    spans_to_tags(tokens, spans);
    FAIL("expected span conflict");
  } catch (const error& e) {
    std::string msg = e.what();
    CHECK(msg.find("NAME") != std::string::npos);
    CHECK(msg.find("DATE") != std::string::npos);
  }
}

TEST_CASE("tags_to_spans merges maximal runs") {
  std::vector<Token> tokens = {tok("John", 0, 4), tok("Smith", 5, 10),
                               tok("visited", 11, 18)};
  std::vector<Tag> tags = {Tag::begin(EntityClass::NAME),
                           Tag::inside(EntityClass::NAME), Tag::outside()};
  auto spans = tags_to_spans(tokens, tags);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].start == 0);
  CHECK(spans[0].end == 10);
  CHECK(spans[0].entity_class == EntityClass::NAME);
}

TEST_CASE("tags_to_spans on all O is empty") {
  std::vector<Token> tokens = {tok("x", 0, 1)};
  CHECK(tags_to_spans(tokens, {Tag::outside()}).empty());
}

TEST_CASE("I after O is repaired to a begin") {
  std::vector<Token> tokens = {tok("a", 0, 1), tok("b", 2, 3), tok("c", 4, 5)};
  std::vector<Tag> tags = {Tag::outside(), Tag::inside(EntityClass::DATE),
                           Tag::outside()};
  auto spans = tags_to_spans(tokens, tags);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].start == 2);
  CHECK(spans[0].end == 3);
  CHECK(spans[0].entity_class == EntityClass::DATE);
}

TEST_CASE("class change inside a run starts a new span") {
  std::vector<Token> tokens = {tok("a", 0, 1), tok("b", 2, 3)};
  std::vector<Tag> tags = {Tag::begin(EntityClass::NAME),
                           Tag::inside(EntityClass::DATE)};
  auto spans = tags_to_spans(tokens, tags);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].entity_class == EntityClass::NAME);
  CHECK(spans[1].entity_class == EntityClass::DATE);
}

TEST_CASE("length mismatch between tokens and tags throws") {
  std::vector<Token> tokens = {tok("a", 0, 1)};
  CHECK_THROWS_AS(tags_to_spans(tokens, {}), error);
}

TEST_CASE("token-aligned spans survive a tags round trip") {
  // 1000 random token-aligned fixtures
  KeyedRng rng(20240601);
  for (int iter = 0; iter < 1000; ++iter) {
    size_t n_tokens = 1 + rng.below(12);
    std::vector<Token> tokens;
    size_t pos = 0;
    for (size_t i = 0; i < n_tokens; ++i) {
      size_t len = 1 + rng.below(5);
      tokens.push_back(tok(std::string(len, 'x'), pos, pos + len));
      pos += len + 1 + rng.below(3);
    }

    std::vector<AnnotatedSpan> spans;
    size_t i = 0;
    while (i < n_tokens) {
      if (rng.below(3) == 0) {
        size_t len = 1 + rng.below(3);
        size_t last = std::min(n_tokens - 1, i + len - 1);
        EntityClass cls =
            all_entity_classes()[rng.below(kNumEntityClasses)];
        spans.push_back(
            span(tokens[i].start, tokens[last].end, cls));
        i = last + 2;  // gap so adjacent spans cannot merge
      } else {
        ++i;
      }
    }

    auto tags = spans_to_tags(tokens, spans);
    auto back = tags_to_spans(tokens, tags);
    REQUIRE(back.size() == spans.size());
    for (size_t k = 0; k < spans.size(); ++k) {
      CHECK(back[k].start == spans[k].start);
      CHECK(back[k].end == spans[k].end);
      CHECK(back[k].entity_class == spans[k].entity_class);
    }
  }
}

TEST_CASE("spans_to_tags output is always valid BIO") {
  KeyedRng rng(77);
  for (int iter = 0; iter < 200; ++iter) {
    size_t n = 1 + rng.below(10);
    std::vector<Token> tokens;
    for (size_t i = 0; i < n; ++i) tokens.push_back(tok("t", i * 3, i * 3 + 2));
    std::vector<AnnotatedSpan> spans;
    size_t cursor = 0;
    while (cursor + 1 < n * 3) {
      if (rng.below(2) == 0) {
        size_t len = 1 + rng.below(4);
        size_t end = std::min(cursor + len, n * 3 - 1);
        if (end > cursor)
          spans.push_back(span(cursor, end,
                               all_entity_classes()[rng.below(8)]));
        cursor = end + 1;
      } else {
        ++cursor;
      }
    }
    auto tags = spans_to_tags(tokens, spans);
    for (size_t i = 0; i < tags.size(); ++i) {
      if (tags[i].position == Tag::Position::I) {
        REQUIRE(i > 0);
        CHECK(tags[i - 1].position != Tag::Position::O);
        CHECK(tags[i - 1].entity_class == tags[i].entity_class);
      }
    }
  }
}

TEST_CASE("span text is filled from the document text") {
  std::u32string text = uni::decode_utf8("John went home");
  std::vector<Token> tokens = tokenize(text);
  std::vector<Tag> tags = {Tag::begin(EntityClass::NAME), Tag::outside(),
                           Tag::outside()};
  auto spans = tags_to_spans(tokens, tags, text);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].text == "John");
}
