// features.hpp -- sparse feature extraction for the CRF recognizers.
//
// Per token: identity (case-folded), casing/alpha flags, word shape, and
// optional gazetteer membership flags, each replicated over a window of
// 4 tokens before and 4 after. Windows stop at sentence boundaries and
// missing slots emit BOS/EOS markers.

#ifndef DEID_FEATURES_HPP
#define DEID_FEATURES_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "deid/core.hpp"
#include "deid/gazetteer.hpp"
#include "deid/unicode.hpp"

namespace deid {

constexpr int kWindow = 4;  // tokens before and after

// Maps uppercase -> 'W', lowercase -> 'w', digit -> 'd'; specials remain.
inline std::string word_shape(std::string_view token_text) {
  std::u32string u = uni::decode_utf8(token_text);
  for (char32_t& c : u) {
    if (uni::is_upper(c)) c = U'W';
    else if (uni::is_lower(c)) c = U'w';
    else if (uni::is_digit(c)) c = U'd';
  }
  return uni::encode_utf8(u);
}

namespace detail {
inline std::string offset_suffix(int offset) {
  std::string s = "[";
  if (offset > 0) s += '+';
  s += std::to_string(offset);
  s += ']';
  return s;
}
}  // namespace detail

// Sorted, duplicate-free set of feature-string identifiers for one position.
struct FeatureVector {
  std::vector<std::string> active;

  void add(std::string f) { active.push_back(std::move(f)); }
  void finish() {
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());
  }
  bool operator==(const FeatureVector&) const = default;
};

inline void lexical_features(std::string_view token_text, int offset,
                             FeatureVector& out) {
  const std::string suffix = detail::offset_suffix(offset);
  std::u32string u = uni::decode_utf8(token_text);

  out.add("w" + suffix + "=" + uni::casefold(token_text));

  bool all_upper = !u.empty(), all_lower = !u.empty();
  bool all_alnum = !u.empty(), all_alpha = !u.empty();
  for (char32_t c : u) {
    all_upper = all_upper && uni::is_upper(c);
    all_lower = all_lower && uni::is_lower(c);
    all_alnum = all_alnum && uni::is_alnum(c);
    all_alpha = all_alpha && uni::is_letter(c);
  }
  if (all_upper) out.add("upper" + suffix);
  if (all_lower) out.add("lower" + suffix);
  if (!u.empty() && uni::is_upper(u[0])) out.add("initcap" + suffix);
  if (all_alnum) out.add("alnum" + suffix);
  if (all_alpha) out.add("alpha" + suffix);

  out.add("shape" + suffix + "=" + word_shape(token_text));
}

inline void gazetteer_features(std::string_view token_text, int offset,
                               std::span<const Gazetteer> gazetteers,
                               FeatureVector& out) {
  const std::string suffix = detail::offset_suffix(offset);
  for (const Gazetteer& g : gazetteers)
    if (g.contains(token_text)) out.add("dict:" + g.name() + suffix);
}

// Feature vectors for one sentence. Position i sees tokens i-4..i+4;
// out-of-range slots contribute BOS[k]/EOS[k] markers instead.
inline std::vector<FeatureVector> extract_sequence(
    std::span<const Token> sentence, bool use_gazetteers = false,
    std::span<const Gazetteer> gazetteers = {}) {
  const int n = static_cast<int>(sentence.size());
  std::vector<FeatureVector> vectors(sentence.size());
  for (int i = 0; i < n; ++i) {
    FeatureVector& v = vectors[i];
    for (int k = -kWindow; k <= kWindow; ++k) {
      int j = i + k;
      if (j < 0) {
        v.add("BOS" + detail::offset_suffix(k));
      } else if (j >= n) {
        v.add("EOS" + detail::offset_suffix(k));
      } else {
        lexical_features(sentence[j].text, k, v);
        if (use_gazetteers) gazetteer_features(sentence[j].text, k, gazetteers, v);
      }
    }
    v.finish();
  }
  return vectors;
}

// ---------------------------------------------------------------------------
// FeatureIndex: feature string -> dense id, frozen after training
// ---------------------------------------------------------------------------

class FeatureIndex {
public:
  // Assigns ids in first-seen order while unfrozen.
  uint32_t add(const std::string& feature) {
    if (frozen_) throw error("FeatureIndex: add after freeze");
    auto [it, inserted] = ids_.try_emplace(feature, names_.size());
    if (inserted) names_.push_back(feature);
    return it->second;
  }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  size_t size() const { return names_.size(); }

  std::optional<uint32_t> lookup(const std::string& feature) const {
    auto it = ids_.find(feature);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& name(uint32_t id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }

private:
  std::unordered_map<std::string, uint32_t> ids_;
  std::vector<std::string> names_;
  bool frozen_ = false;
};

// Builds an index over training data; ids are deterministic given corpus
// order because FeatureVector keeps its strings sorted.
inline FeatureIndex index_features(
    const std::vector<std::vector<FeatureVector>>& sequences) {
  FeatureIndex index;
  for (const auto& seq : sequences)
    for (const FeatureVector& v : seq)
      for (const std::string& f : v.active) index.add(f);
  index.freeze();
  return index;
}

// Unknown features at apply time are dropped (frozen-index contract).
inline std::vector<uint32_t> vectorize(const FeatureVector& v,
                                       const FeatureIndex& index) {
  if (!index.frozen()) throw error("vectorize: FeatureIndex not frozen");
  std::vector<uint32_t> ids;
  ids.reserve(v.active.size());
  for (const std::string& f : v.active)
    if (auto id = index.lookup(f)) ids.push_back(*id);
  return ids;
}

}  // namespace deid

#endif  // DEID_FEATURES_HPP
