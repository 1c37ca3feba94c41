// core.hpp -- domain types shared by every module, plus the BIO tag codec.

#ifndef DEID_CORE_HPP
#define DEID_CORE_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deid/unicode.hpp"

namespace deid {

// ---------------------------------------------------------------------------
// Entity classes
// ---------------------------------------------------------------------------

enum class EntityClass : uint8_t {
  NAME = 0,
  PROFESSION,
  LOCATION,
  AGE,
  DATE,
  CONTACT,
  ID,
  PHI,  // catch-all
};

constexpr size_t kNumEntityClasses = 8;

constexpr std::array<EntityClass, kNumEntityClasses> all_entity_classes() {
  return {EntityClass::NAME, EntityClass::PROFESSION, EntityClass::LOCATION,
          EntityClass::AGE,  EntityClass::DATE,       EntityClass::CONTACT,
          EntityClass::ID,   EntityClass::PHI};
}

inline std::string_view to_string(EntityClass c) {
  switch (c) {
    case EntityClass::NAME: return "NAME";
    case EntityClass::PROFESSION: return "PROFESSION";
    case EntityClass::LOCATION: return "LOCATION";
    case EntityClass::AGE: return "AGE";
    case EntityClass::DATE: return "DATE";
    case EntityClass::CONTACT: return "CONTACT";
    case EntityClass::ID: return "ID";
    case EntityClass::PHI: return "PHI";
  }
  return "?";
}

inline std::optional<EntityClass> parse_entity_class(std::string_view s) {
  for (EntityClass c : all_entity_classes())
    if (to_string(c) == s) return c;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Tokens and spans
// ---------------------------------------------------------------------------

// Character offsets are Unicode scalar-value indices into the document text.
struct Token {
  std::string text;       // UTF-8 surface form
  size_t start = 0;       // inclusive
  size_t end = 0;         // exclusive
  size_t sentence_index = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

struct AnnotatedSpan {
  size_t start = 0;
  size_t end = 0;
  EntityClass entity_class = EntityClass::PHI;
  std::string text;  // surface form

  friend bool operator==(const AnnotatedSpan&, const AnnotatedSpan&) = default;
};

struct Document {
  std::string id;
  std::string text;  // UTF-8
  std::vector<Token> tokens;
  std::vector<AnnotatedSpan> gold;  // empty when unannotated
};

// ---------------------------------------------------------------------------
// BIO tags
// ---------------------------------------------------------------------------

struct Tag {
  enum class Position : uint8_t { O = 0, B, I };

  Position position = Position::O;
  EntityClass entity_class = EntityClass::PHI;  // meaningless when O

  static Tag outside() { return Tag{}; }
  static Tag begin(EntityClass c) { return Tag{Position::B, c}; }
  static Tag inside(EntityClass c) { return Tag{Position::I, c}; }

  bool is_outside() const { return position == Position::O; }

  friend bool operator==(const Tag& a, const Tag& b) {
    if (a.position != b.position) return false;
    return a.position == Position::O || a.entity_class == b.entity_class;
  }
};

inline std::string to_string(const Tag& t) {
  switch (t.position) {
    case Tag::Position::O: return "O";
    case Tag::Position::B: return "B-" + std::string(to_string(t.entity_class));
    case Tag::Position::I: return "I-" + std::string(to_string(t.entity_class));
  }
  return "?";
}

inline std::optional<Tag> parse_tag(std::string_view s) {
  if (s == "O") return Tag::outside();
  if (s.size() < 3 || s[1] != '-') return std::nullopt;
  auto cls = parse_entity_class(s.substr(2));
  if (!cls) return std::nullopt;
  if (s[0] == 'B') return Tag::begin(*cls);
  if (s[0] == 'I') return Tag::inside(*cls);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Span <-> tag conversion
// ---------------------------------------------------------------------------

namespace detail {
inline std::string span_desc(const AnnotatedSpan& s) {
  return std::string(to_string(s.entity_class)) + "[" +
         std::to_string(s.start) + "," + std::to_string(s.end) + ")";
}
}  // namespace detail

// Throws when two spans overlap; used by readers and the codec.
inline void check_non_overlapping(std::vector<AnnotatedSpan> spans,
                                  const std::string& context = {}) {
  std::sort(spans.begin(), spans.end(),
            [](const AnnotatedSpan& a, const AnnotatedSpan& b) {
              return a.start < b.start || (a.start == b.start && a.end < b.end);
            });
  for (size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].start < spans[i - 1].end) {
      throw error("span conflict" + (context.empty() ? "" : " in " + context) +
                  ": " + detail::span_desc(spans[i - 1]) + " overlaps " +
                  detail::span_desc(spans[i]));
    }
  }
}

// One tag per token. A token receives B/I of class c iff its character range
// intersects a span of class c; the first intersecting token of a span gets
// B. Span boundaries need not align to token boundaries.
inline std::vector<Tag> spans_to_tags(const std::vector<Token>& tokens,
                                      const std::vector<AnnotatedSpan>& spans) {
  check_non_overlapping(spans);
  std::vector<AnnotatedSpan> sorted = spans;
  std::sort(sorted.begin(), sorted.end(),
            [](const AnnotatedSpan& a, const AnnotatedSpan& b) {
              return a.start < b.start;
            });

  std::vector<Tag> tags(tokens.size(), Tag::outside());
  for (const AnnotatedSpan& span : sorted) {
    bool first = true;
    for (size_t i = 0; i < tokens.size(); ++i) {
      const Token& t = tokens[i];
      bool intersects = t.start < span.end && span.start < t.end;
      if (!intersects) continue;
      if (!tags[i].is_outside()) continue;  // claimed by an earlier span
      tags[i] = first ? Tag::begin(span.entity_class)
                      : Tag::inside(span.entity_class);
      first = false;
    }
  }
  return tags;
}

// Maximal B-I runs become spans. Ill-formed I (after O, after a different
// class, or at sequence start) is repaired by treating it as B.
inline std::vector<AnnotatedSpan> tags_to_spans(const std::vector<Token>& tokens,
                                                const std::vector<Tag>& tags) {
  if (tokens.size() != tags.size())
    throw error("tags_to_spans: " + std::to_string(tokens.size()) +
                " tokens vs " + std::to_string(tags.size()) + " tags");

  std::vector<AnnotatedSpan> spans;
  std::optional<size_t> open;  // index of first token of the open span
  EntityClass open_class = EntityClass::PHI;
  size_t open_end = 0;

  auto close = [&](size_t) {
    if (!open) return;
    AnnotatedSpan s;
    s.start = tokens[*open].start;
    s.end = open_end;
    s.entity_class = open_class;
    spans.push_back(s);
    open.reset();
  };

  for (size_t i = 0; i < tags.size(); ++i) {
    const Tag& t = tags[i];
    if (t.is_outside()) {
      close(i);
      continue;
    }
    bool continues = open && t.position == Tag::Position::I &&
                     t.entity_class == open_class;
    if (continues) {
      open_end = tokens[i].end;
    } else {
      close(i);  // B, or repaired I
      open = i;
      open_class = t.entity_class;
      open_end = tokens[i].end;
    }
  }
  close(tags.size());
  return spans;
}

// Fills span surface text from the document text (offsets are scalar-value
// indices). The two-argument tags_to_spans leaves text empty.
inline void fill_span_text(std::vector<AnnotatedSpan>& spans,
                           const std::u32string& text) {
  for (AnnotatedSpan& s : spans) {
    if (s.end > text.size())
      throw error("span " + detail::span_desc(s) + " out of bounds (text length " +
                  std::to_string(text.size()) + ")");
    s.text = uni::encode_utf8(
        std::u32string_view(text).substr(s.start, s.end - s.start));
  }
}

inline std::vector<AnnotatedSpan> tags_to_spans(const std::vector<Token>& tokens,
                                                const std::vector<Tag>& tags,
                                                const std::u32string& text) {
  auto spans = tags_to_spans(tokens, tags);
  fill_span_text(spans, text);
  return spans;
}

}  // namespace deid

#endif  // DEID_CORE_HPP
