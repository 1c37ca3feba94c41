// gazetteer.hpp -- single-token dictionaries used as CRF features.
//
// Multi-word source names are split into tokens before insertion
// ("New York City" -> new, york, city). Lookup is case-insensitive.

#ifndef DEID_GAZETTEER_HPP
#define DEID_GAZETTEER_HPP

#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "deid/tokenize.hpp"
#include "deid/unicode.hpp"

namespace deid {

class Gazetteer {
public:
  Gazetteer() = default;
  Gazetteer(std::string name, std::unordered_set<std::string> entries)
      : name_(std::move(name)), entries_(std::move(entries)) {}

  const std::string& name() const { return name_; }
  size_t entry_count() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool contains(std::string_view token_text) const {
    return entries_.count(uni::casefold(token_text)) > 0;
  }

private:
  std::string name_;
  std::unordered_set<std::string> entries_;
};

// One raw name per line; blank lines and "#" comments ignored. Every
// alphabetic token of length >= 2 is case-folded and inserted. Single
// letters from split names would fire on nearly every document.
inline Gazetteer load_gazetteer(std::string name, std::istream& source) {
  std::unordered_set<std::string> entries;
  std::string line;
  while (std::getline(source, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();  // CRLF
    if (line.empty() || line[0] == '#') continue;
    for (const Token& tok : tokenize(line)) {
      std::u32string u = uni::decode_utf8(tok.text);
      if (u.size() < 2) continue;
      bool alpha = true;
      for (char32_t c : u)
        if (!uni::is_letter(c)) { alpha = false; break; }
      if (!alpha) continue;
      entries.insert(uni::casefold(tok.text));
    }
  }
  return Gazetteer(std::move(name), std::move(entries));
}

inline Gazetteer load_gazetteer_from_string(std::string name,
                                            std::string_view source) {
  std::istringstream in{std::string(source)};
  return load_gazetteer(std::move(name), in);
}

}  // namespace deid

#endif  // DEID_GAZETTEER_HPP
