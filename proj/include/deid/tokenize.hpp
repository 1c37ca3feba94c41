// tokenize.hpp -- offset-preserving tokenizer and sentence splitter.
//
// Tokens are maximal letter runs, maximal digit runs, or single other
// non-whitespace characters. Offsets reconstruct the exact source substring,
// which the masking engine relies on.

#ifndef DEID_TOKENIZE_HPP
#define DEID_TOKENIZE_HPP

#include <string>
#include <string_view>
#include <vector>

#include "deid/core.hpp"
#include "deid/unicode.hpp"

namespace deid {

inline std::vector<Token> tokenize(const std::u32string& text) {
  std::vector<Token> tokens;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    char32_t c = text[i];
    if (uni::is_space(c)) {
      ++i;
      continue;
    }
    size_t start = i;
    if (uni::is_letter(c)) {
      while (i < n && uni::is_letter(text[i])) ++i;
    } else if (uni::is_digit(c)) {
      while (i < n && uni::is_digit(text[i])) ++i;
    } else {
      ++i;  // single special character
    }
    Token t;
    t.start = start;
    t.end = i;
    t.text = uni::encode_utf8(std::u32string_view(text).substr(start, i - start));
    tokens.push_back(std::move(t));
  }
  return tokens;
}

inline std::vector<Token> tokenize(std::string_view text) {
  return tokenize(uni::decode_utf8(text));
}

// Assigns sentence indices in place. A boundary falls between token i and
// i+1 when token i is ".", "!" or "?" followed by whitespace, or the gap
// contains a newline -- in both cases only when the next token starts with
// an uppercase letter. No abbreviation list: "Dr. Smith" splits.
inline void split_sentences(const std::u32string& text,
                            std::vector<Token>& tokens) {
  size_t sentence = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    tokens[i].sentence_index = sentence;
    if (i + 1 == tokens.size()) break;

    const Token& cur = tokens[i];
    const Token& next = tokens[i + 1];
    std::u32string_view gap =
        std::u32string_view(text).substr(cur.end, next.start - cur.end);

    char32_t next_first = text[next.start];
    if (!uni::is_upper(next_first)) continue;

    bool terminator = cur.text == "." || cur.text == "!" || cur.text == "?";
    bool gap_has_space = !gap.empty();
    bool gap_has_newline = gap.find(U'\n') != std::u32string_view::npos;

    if ((terminator && gap_has_space) || gap_has_newline) ++sentence;
  }
}

inline std::vector<Token> tokenize_sentences(const std::u32string& text) {
  std::vector<Token> tokens = tokenize(text);
  split_sentences(text, tokens);
  return tokens;
}

inline std::vector<Token> tokenize_sentences(std::string_view text) {
  return tokenize_sentences(uni::decode_utf8(text));
}

// Groups a token stream into per-sentence slices (indices into the stream).
inline std::vector<std::pair<size_t, size_t>> sentence_ranges(
    const std::vector<Token>& tokens) {
  std::vector<std::pair<size_t, size_t>> ranges;
  size_t begin = 0;
  for (size_t i = 1; i <= tokens.size(); ++i) {
    if (i == tokens.size() ||
        tokens[i].sentence_index != tokens[begin].sentence_index) {
      ranges.emplace_back(begin, i);
      begin = i;
    }
  }
  return ranges;
}

}  // namespace deid

#endif  // DEID_TOKENIZE_HPP
