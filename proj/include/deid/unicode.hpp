// unicode.hpp -- minimal UTF-8 handling and codepoint classification.
//
// All character offsets in this library are Unicode scalar-value indices,
// not byte indices. Documents are decoded once and processed as u32 text
// wherever offsets matter (tokenization, span splicing).
//
// Classification covers ASCII plus the Latin-1 letter block; anything
// beyond U+00FF is treated as a "special" character (kept verbatim by
// word-shape, tokenized as a single-character token).

#ifndef DEID_UNICODE_HPP
#define DEID_UNICODE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace deid {

class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

namespace uni {

inline bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

inline bool is_upper(char32_t c) {
  if (c >= U'A' && c <= U'Z') return true;
  // Latin-1: À..Þ minus ×
  return c >= 0xC0 && c <= 0xDE && c != 0xD7;
}

inline bool is_lower(char32_t c) {
  if (c >= U'a' && c <= U'z') return true;
  // Latin-1: ß..ÿ minus ÷
  return c >= 0xDF && c <= 0xFF && c != 0xF7;
}

inline bool is_letter(char32_t c) { return is_upper(c) || is_lower(c); }

inline bool is_alnum(char32_t c) { return is_letter(c) || is_digit(c); }

inline bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v' || c == 0xA0;
}

inline char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;  // ß has no upper pair
  return c;
}

inline char32_t to_upper(char32_t c) {
  if (c >= U'a' && c <= U'z') return c - 32;
  if (c >= 0xE0 && c <= 0xFE && c != 0xF7) return c - 32;
  return c;
}

// Decodes UTF-8. Malformed sequences are rejected; the library accepts
// UTF-8 input only.
inline std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      throw error("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + len > s.size())
      throw error("truncated UTF-8 sequence at offset " + std::to_string(i));
    for (size_t k = 1; k < len; ++k) {
      unsigned char b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80)
        throw error("invalid UTF-8 continuation at offset " +
                    std::to_string(i + k));
      cp = (cp << 6) | (b & 0x3F);
    }
    // reject overlong encodings and surrogates
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || (cp >= 0xD800 && cp <= 0xDFFF) ||
        cp > 0x10FFFF)
      throw error("invalid UTF-8 scalar at offset " + std::to_string(i));
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) append_utf8(out, cp);
  return out;
}

inline std::string casefold(std::string_view s) {
  std::u32string u = decode_utf8(s);
  for (char32_t& c : u) c = to_lower(c);
  return encode_utf8(u);
}

// Number of Unicode scalar values in a UTF-8 string.
inline size_t length(std::string_view s) {
  size_t n = 0;
  for (size_t i = 0; i < s.size(); ++i)
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) ++n;
  return n;
}

}  // namespace uni
}  // namespace deid

#endif  // DEID_UNICODE_HPP
