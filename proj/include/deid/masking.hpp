// masking.hpp -- per-entity masking policies (redact / mask / keep), the
// pluggable masker contract, the builtin maskers, and the splicing engine
// that produces masked documents plus an audit trail.
//
// Fail-closed: anything a masker cannot transform falls back to redaction
// and the event is flagged. Original PII never passes through silently.

#ifndef DEID_MASKING_HPP
#define DEID_MASKING_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deid/core.hpp"
#include "deid/features.hpp"  // word_shape
#include "deid/rng.hpp"
#include "deid/unicode.hpp"

namespace deid {

// ---------------------------------------------------------------------------
// Masker contract
// ---------------------------------------------------------------------------

struct MaskerConfig {
  std::map<std::string, std::string> options;
  std::vector<std::string> first_names;
  std::vector<std::string> last_names;
  std::vector<std::string> professions;

  std::string option(const std::string& key, const std::string& fallback = {}) const {
    auto it = options.find(key);
    return it == options.end() ? fallback : it->second;
  }
};

struct MaskContext {
  std::string doc_id;
};

struct MaskResult {
  std::string text;
  std::string flag;  // empty when the masker succeeded normally
};

class Masker {
public:
  virtual ~Masker() = default;
  virtual void initialize(const MaskerConfig& config, uint64_t seed) = 0;
  virtual MaskResult apply(std::string_view span_text, EntityClass entity_class,
                           const MaskContext& context) const = 0;
};

// ---------------------------------------------------------------------------
// Standalone masking operations
// ---------------------------------------------------------------------------

inline std::string redact(std::string_view /*span_text*/, EntityClass cls,
                          std::string_view fixed = {}) {
  if (!fixed.empty()) return std::string(fixed);
  return "XXX-" + std::string(to_string(cls));
}

inline std::string keep(std::string_view span_text) {
  return std::string(span_text);
}

namespace mask_detail {

enum class CaseStyle { all_caps, init_cap };

inline CaseStyle case_style(std::u32string_view u) {
  bool has_upper = false, has_lower = false;
  for (char32_t c : u) {
    has_upper = has_upper || uni::is_upper(c);
    has_lower = has_lower || uni::is_lower(c);
  }
  return (has_upper && !has_lower) ? CaseStyle::all_caps : CaseStyle::init_cap;
}

inline std::string apply_case(std::string_view word, CaseStyle style) {
  std::u32string u = uni::decode_utf8(word);
  if (style == CaseStyle::all_caps) {
    for (char32_t& c : u) c = uni::to_upper(c);
  } else {
    for (size_t i = 0; i < u.size(); ++i)
      u[i] = i == 0 ? uni::to_upper(u[i]) : uni::to_lower(u[i]);
  }
  return uni::encode_utf8(u);
}

inline size_t whitespace_token_count(std::u32string_view u) {
  size_t n = 0;
  bool in_tok = false;
  for (char32_t c : u) {
    bool sp = uni::is_space(c);
    if (!sp && !in_tok) ++n;
    in_tok = !sp;
  }
  return n;
}

}  // namespace mask_detail

// Replacement drawn pseudo-randomly, keyed by (seed, doc_key, casefolded
// span) so repeated mentions of one name in a document get the same
// surrogate. 1-token names map to a first name; longer names to
// "First Last". Redraws while the surrogate casefold-equals the original.
inline std::string surrogate_name(std::string_view span_text,
                                  const std::vector<std::string>& first_names,
                                  const std::vector<std::string>& last_names,
                                  uint64_t seed, std::string_view doc_key) {
  if (first_names.empty() || last_names.empty())
    throw error("surrogate_name: empty surrogate list");
  std::u32string u = uni::decode_utf8(span_text);
  std::string folded = uni::casefold(span_text);
  KeyedRng rng(seed, doc_key, "name", folded);
  const bool multi = mask_detail::whitespace_token_count(u) >= 2;
  const mask_detail::CaseStyle style = mask_detail::case_style(u);

  for (int attempt = 0; attempt < 100; ++attempt) {
    std::string out = mask_detail::apply_case(
        first_names[rng.below(static_cast<uint32_t>(first_names.size()))], style);
    if (multi)
      out += " " + mask_detail::apply_case(
                       last_names[rng.below(static_cast<uint32_t>(last_names.size()))],
                       style);
    if (uni::casefold(out) != folded) return out;
  }
  return mask_detail::apply_case(first_names[0], style) + " (masked)";
}

inline std::string surrogate_profession(std::string_view span_text,
                                        const std::vector<std::string>& professions,
                                        uint64_t seed, std::string_view doc_key) {
  if (professions.empty())
    throw error("surrogate_profession: empty surrogate list");
  std::string folded = uni::casefold(span_text);
  KeyedRng rng(seed, doc_key, "profession", folded);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const std::string& pick =
        professions[rng.below(static_cast<uint32_t>(professions.size()))];
    if (uni::casefold(pick) != folded) return pick;
  }
  return professions[0];
}

// Which digit positions of a span get randomized.
struct PositionSpec {
  int last_n = 4;  // <= 0 selects every digit position

  static std::optional<PositionSpec> parse(std::string_view s) {
    if (s == "all") return PositionSpec{0};
    if (s.rfind("last", 0) == 0) {
      int n = 0;
      for (char c : s.substr(4)) {
        if (c < '0' || c > '9') return std::nullopt;
        n = n * 10 + (c - '0');
      }
      if (n <= 0) return std::nullopt;
      return PositionSpec{n};
    }
    return std::nullopt;
  }
};

// Same length out, non-digits untouched, selected digits replaced by keyed
// pseudo-random digits; the whole selection is redrawn if it collides with
// the original. Returns nullopt when the span has no digits.
inline std::optional<std::string> randomize_digits(std::string_view span_text,
                                                   const PositionSpec& spec,
                                                   uint64_t seed,
                                                   std::string_view doc_key) {
  std::u32string u = uni::decode_utf8(span_text);
  std::vector<size_t> digit_positions;
  for (size_t i = 0; i < u.size(); ++i)
    if (uni::is_digit(u[i])) digit_positions.push_back(i);
  if (digit_positions.empty()) return std::nullopt;

  std::vector<size_t> selected;
  if (spec.last_n <= 0 ||
      static_cast<size_t>(spec.last_n) >= digit_positions.size())
    selected = digit_positions;
  else
    selected.assign(digit_positions.end() - spec.last_n, digit_positions.end());

  KeyedRng rng(seed, doc_key, "digits", uni::casefold(span_text));
  std::u32string out = u;
  for (int attempt = 0; attempt < 100; ++attempt) {
    bool changed = false;
    for (size_t pos : selected) {
      out[pos] = U'0' + rng.below(10);
      changed = changed || out[pos] != u[pos];
    }
    if (changed) return uni::encode_utf8(out);
  }
  size_t pos = selected.back();
  out[pos] = U'0' + (static_cast<uint32_t>(u[pos] - U'0') + 1) % 10;
  return uni::encode_utf8(out);
}

// Last three non-space characters generalized: digit -> '0', letter -> 'A',
// anything else left as is. Returns nullopt when fewer than three non-space
// characters exist.
inline std::optional<std::string> mask_zip(std::string_view span_text) {
  std::u32string u = uni::decode_utf8(span_text);
  size_t non_space = 0;
  for (char32_t c : u)
    if (!uni::is_space(c)) ++non_space;
  if (non_space < 3) return std::nullopt;

  size_t replaced = 0;
  for (size_t i = u.size(); i-- > 0 && replaced < 3;) {
    if (uni::is_space(u[i])) continue;
    if (uni::is_digit(u[i])) u[i] = U'0';
    else if (uni::is_letter(u[i])) u[i] = U'A';
    ++replaced;
  }
  return uni::encode_utf8(u);
}

// ---------------------------------------------------------------------------
// Date shifting
// ---------------------------------------------------------------------------

namespace mask_detail {

struct ParsedDate {
  std::chrono::year_month_day ymd;
  int format = 0;           // index into the supported-format list
  int day_width = 1;        // rendered digit width of the day field
  int month_width = 2;      // for numeric months
  bool two_digit_year = false;
  std::string month_token;  // original month name, empty for numeric formats
};

inline const char* kMonthAbbrev[12] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                       "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
inline const char* kMonthFull[12] = {"January",   "February", "March",    "April",
                                     "May",       "June",     "July",     "August",
                                     "September", "October",  "November", "December"};

inline std::optional<int> month_from_name(std::string_view name) {
  std::string folded = uni::casefold(name);
  for (int i = 0; i < 12; ++i) {
    if (folded == uni::casefold(kMonthFull[i]) ||
        folded == uni::casefold(kMonthAbbrev[i]))
      return i + 1;
  }
  return std::nullopt;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

// Splits "A<sep>B<sep>C" on a single-character separator.
inline std::optional<std::array<std::string, 3>> split3(std::string_view s,
                                                        char sep) {
  auto p1 = s.find(sep);
  if (p1 == std::string_view::npos) return std::nullopt;
  auto p2 = s.find(sep, p1 + 1);
  if (p2 == std::string_view::npos || s.find(sep, p2 + 1) != std::string_view::npos)
    return std::nullopt;
  return std::array<std::string, 3>{std::string(s.substr(0, p1)),
                                    std::string(s.substr(p1 + 1, p2 - p1 - 1)),
                                    std::string(s.substr(p2 + 1))};
}

inline std::optional<std::chrono::year_month_day> make_date(int y, int m, int d) {
  using namespace std::chrono;
  if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

inline int expand_two_digit_year(int yy) {  // pivot at 30
  return yy < 30 ? 2000 + yy : 1900 + yy;
}

// Supported formats, first match wins:
//   0 MM/DD/YYYY  1 M/D/YYYY  2 YYYY-MM-DD  3 MM-DD-YYYY
//   4 Mon D, YYYY  5 Month D, YYYY  6 D Month YYYY  7 MM/DD/YY
inline std::optional<ParsedDate> parse_date(std::string_view s) {
  ParsedDate out;

  if (auto f = split3(s, '/')) {
    const auto& [a, b, c] = *f;
    if (!all_digits(a) || !all_digits(b) || !all_digits(c)) return std::nullopt;
    if (a.size() == 2 && b.size() == 2 && c.size() == 4) out.format = 0;
    else if (a.size() <= 2 && b.size() <= 2 && c.size() == 4) out.format = 1;
    else if (a.size() == 2 && b.size() == 2 && c.size() == 2) out.format = 7;
    else return std::nullopt;
    int year = out.format == 7 ? expand_two_digit_year(to_int(c)) : to_int(c);
    auto ymd = make_date(year, to_int(a), to_int(b));
    if (!ymd) return std::nullopt;
    out.ymd = *ymd;
    out.month_width = static_cast<int>(a.size());
    out.day_width = static_cast<int>(b.size());
    out.two_digit_year = out.format == 7;
    return out;
  }

  if (auto f = split3(s, '-')) {
    const auto& [a, b, c] = *f;
    if (!all_digits(a) || !all_digits(b) || !all_digits(c)) return std::nullopt;
    std::optional<std::chrono::year_month_day> ymd;
    if (a.size() == 4 && b.size() == 2 && c.size() == 2) {
      out.format = 2;
      ymd = make_date(to_int(a), to_int(b), to_int(c));
      out.month_width = 2;
      out.day_width = 2;
    } else if (a.size() == 2 && b.size() == 2 && c.size() == 4) {
      out.format = 3;
      ymd = make_date(to_int(c), to_int(a), to_int(b));
      out.month_width = 2;
      out.day_width = 2;
    } else {
      return std::nullopt;
    }
    if (!ymd) return std::nullopt;
    out.ymd = *ymd;
    return out;
  }

  // "Mon D, YYYY" / "Month D, YYYY"
  {
    auto sp = s.find(' ');
    if (sp != std::string_view::npos) {
      std::string_view month_tok = s.substr(0, sp);
      auto comma = s.find(", ", sp + 1);
      if (comma != std::string_view::npos) {
        std::string_view day_tok = s.substr(sp + 1, comma - sp - 1);
        std::string_view year_tok = s.substr(comma + 2);
        auto m = month_from_name(month_tok);
        if (m && all_digits(day_tok) && day_tok.size() <= 2 &&
            year_tok.size() == 4 && all_digits(year_tok)) {
          auto ymd = make_date(to_int(year_tok), *m, to_int(day_tok));
          if (!ymd) return std::nullopt;
          out.format = month_tok.size() == 3 ? 4 : 5;
          out.ymd = *ymd;
          out.day_width = static_cast<int>(day_tok.size());
          out.month_token = std::string(month_tok);
          return out;
        }
      }
    }
  }

  // "D Month YYYY"
  {
    auto p1 = s.find(' ');
    if (p1 == std::string_view::npos) return std::nullopt;
    auto p2 = s.find(' ', p1 + 1);
    if (p2 == std::string_view::npos || s.find(' ', p2 + 1) != std::string_view::npos)
      return std::nullopt;
    std::string_view day_tok = s.substr(0, p1);
    std::string_view month_tok = s.substr(p1 + 1, p2 - p1 - 1);
    std::string_view year_tok = s.substr(p2 + 1);
    auto m = month_from_name(month_tok);
    if (!m || !all_digits(day_tok) || day_tok.size() > 2 ||
        year_tok.size() != 4 || !all_digits(year_tok))
      return std::nullopt;
    auto ymd = make_date(to_int(year_tok), *m, to_int(day_tok));
    if (!ymd) return std::nullopt;
    out.format = 6;
    out.ymd = *ymd;
    out.day_width = static_cast<int>(day_tok.size());
    out.month_token = std::string(month_tok);
    return out;
  }
}

inline std::string pad_int(int v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

// Month name rendered in the case style of the original token.
inline std::string render_month_name(int month, const std::string& original) {
  bool full = original.size() != 3;
  std::string name = full ? kMonthFull[month - 1] : kMonthAbbrev[month - 1];
  std::u32string u = uni::decode_utf8(original);
  bool any_lower = false;
  for (char32_t c : u) any_lower = any_lower || uni::is_lower(c);
  if (!any_lower && !u.empty() && uni::is_upper(u[0]))
    return apply_case(name, CaseStyle::all_caps);
  if (!u.empty() && uni::is_lower(u[0])) {
    std::u32string n = uni::decode_utf8(name);
    for (char32_t& c : n) c = uni::to_lower(c);
    return uni::encode_utf8(n);
  }
  return name;
}

inline std::string render_date(const ParsedDate& p,
                               std::chrono::year_month_day ymd) {
  int y = static_cast<int>(ymd.year());
  int m = static_cast<int>(static_cast<unsigned>(ymd.month()));
  int d = static_cast<int>(static_cast<unsigned>(ymd.day()));
  switch (p.format) {
    case 0:
    case 1:
      return pad_int(m, p.month_width) + "/" + pad_int(d, p.day_width) + "/" +
             pad_int(y, 4);
    case 7:
      return pad_int(m, 2) + "/" + pad_int(d, 2) + "/" +
             pad_int(((y % 100) + 100) % 100, 2);
    case 2:
      return pad_int(y, 4) + "-" + pad_int(m, 2) + "-" + pad_int(d, 2);
    case 3:
      return pad_int(m, 2) + "-" + pad_int(d, 2) + "-" + pad_int(y, 4);
    case 4:
    case 5:
      return render_month_name(m, p.month_token) + " " + pad_int(d, p.day_width) +
             ", " + pad_int(y, 4);
    case 6:
      return pad_int(d, p.day_width) + " " + render_month_name(m, p.month_token) +
             " " + pad_int(y, 4);
  }
  throw error("render_date: unknown format");
}

}  // namespace mask_detail

// Calendar-correct day shift, rendered back in the original format with
// padding and separator preserved. nullopt when the span is not a
// supported date.
inline std::optional<std::string> shift_date(std::string_view span_text,
                                             int shift_days) {
  auto parsed = mask_detail::parse_date(span_text);
  if (!parsed) return std::nullopt;
  using namespace std::chrono;
  sys_days days_since_epoch{parsed->ymd};
  year_month_day shifted{days_since_epoch + days{shift_days}};
  return mask_detail::render_date(*parsed, shifted);
}

// Per-document shift derived from (seed, doc_key): magnitude 1..364, either
// sign. Intra-document intervals survive; cross-document linkage does not.
inline int derive_shift_days(uint64_t seed, std::string_view doc_key,
                             int max_magnitude = 364) {
  KeyedRng rng(seed, doc_key, "date_shift", "");
  uint32_t v = rng.below(static_cast<uint32_t>(2 * max_magnitude));
  return v < static_cast<uint32_t>(max_magnitude)
             ? static_cast<int>(v) + 1
             : -(static_cast<int>(v) - max_magnitude + 1);
}

// ---------------------------------------------------------------------------
// Builtin maskers
// ---------------------------------------------------------------------------

class RedactMasker final : public Masker {
public:
  void initialize(const MaskerConfig& config, uint64_t) override {
    fixed_ = config.option("fixed");
  }
  MaskResult apply(std::string_view span, EntityClass cls,
                   const MaskContext&) const override {
    return {redact(span, cls, fixed_), {}};
  }

private:
  std::string fixed_;
};

class KeepMasker final : public Masker {
public:
  void initialize(const MaskerConfig&, uint64_t) override {}
  MaskResult apply(std::string_view span, EntityClass,
                   const MaskContext&) const override {
    return {keep(span), {}};
  }
};

class NameSurrogateMasker final : public Masker {
public:
  void initialize(const MaskerConfig& config, uint64_t seed) override {
    first_names_ = config.first_names;
    last_names_ = config.last_names;
    seed_ = seed;
    if (first_names_.empty() || last_names_.empty())
      throw error("name_surrogate: surrogate name lists must be nonempty");
  }
  MaskResult apply(std::string_view span, EntityClass,
                   const MaskContext& ctx) const override {
    return {surrogate_name(span, first_names_, last_names_, seed_, ctx.doc_id), {}};
  }

private:
  std::vector<std::string> first_names_, last_names_;
  uint64_t seed_ = 0;
};

class ProfessionSurrogateMasker final : public Masker {
public:
  void initialize(const MaskerConfig& config, uint64_t seed) override {
    professions_ = config.professions;
    seed_ = seed;
    if (professions_.empty())
      throw error("profession_surrogate: profession list must be nonempty");
  }
  MaskResult apply(std::string_view span, EntityClass,
                   const MaskContext& ctx) const override {
    return {surrogate_profession(span, professions_, seed_, ctx.doc_id), {}};
  }

private:
  std::vector<std::string> professions_;
  uint64_t seed_ = 0;
};

class DateShiftMasker final : public Masker {
public:
  void initialize(const MaskerConfig& config, uint64_t seed) override {
    seed_ = seed;
    std::string mag = config.option("max_shift", "364");
    max_magnitude_ = mask_detail::all_digits(mag) ? mask_detail::to_int(mag) : 364;
    if (max_magnitude_ < 1) max_magnitude_ = 364;
  }
  MaskResult apply(std::string_view span, EntityClass cls,
                   const MaskContext& ctx) const override {
    int days = derive_shift_days(seed_, ctx.doc_id, max_magnitude_);
    if (auto shifted = shift_date(span, days)) {
      std::string flag =
          word_shape(*shifted) == word_shape(span) ? "" : "shape-changed";
      return {*shifted, flag};
    }
    return {redact(span, cls), "unparsed-date"};  // never pass PII through
  }

private:
  uint64_t seed_ = 0;
  int max_magnitude_ = 364;
};

class DigitRandomizeMasker final : public Masker {
public:
  void initialize(const MaskerConfig& config, uint64_t seed) override {
    seed_ = seed;
    std::string spec = config.option("positions", "last4");
    auto parsed = PositionSpec::parse(spec);
    if (!parsed) throw error("digit_randomize: bad positions spec '" + spec + "'");
    spec_ = *parsed;
  }
  MaskResult apply(std::string_view span, EntityClass cls,
                   const MaskContext& ctx) const override {
    if (auto out = randomize_digits(span, spec_, seed_, ctx.doc_id))
      return {*out, {}};
    return {redact(span, cls), "no-digits"};
  }

private:
  uint64_t seed_ = 0;
  PositionSpec spec_;
};

class ZipMasker final : public Masker {
public:
  void initialize(const MaskerConfig&, uint64_t) override {}
  MaskResult apply(std::string_view span, EntityClass cls,
                   const MaskContext&) const override {
    if (auto out = mask_zip(span)) return {*out, {}};
    return {redact(span, cls), "too-short"};
  }
};

// ---------------------------------------------------------------------------
// Registry and policy
// ---------------------------------------------------------------------------

class MaskerRegistry {
public:
  void register_masker(std::string name, std::unique_ptr<Masker> masker) {
    if (maskers_.count(name))
      throw error("masker '" + name + "' already registered");
    maskers_.emplace(std::move(name), std::move(masker));
  }

  const Masker* find(const std::string& name) const {
    auto it = maskers_.find(name);
    return it == maskers_.end() ? nullptr : it->second.get();
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : maskers_) out.push_back(name);
    return out;
  }

  // The shipped masker library. Surrogate-backed maskers are registered
  // only when their lists are present.
  static MaskerRegistry builtins(const MaskerConfig& config, uint64_t seed) {
    MaskerRegistry r;
    auto add = [&](const std::string& name, std::unique_ptr<Masker> m) {
      m->initialize(config, seed);
      r.register_masker(name, std::move(m));
    };
    add("redact", std::make_unique<RedactMasker>());
    add("keep", std::make_unique<KeepMasker>());
    add("date_shift", std::make_unique<DateShiftMasker>());
    add("digit_randomize", std::make_unique<DigitRandomizeMasker>());
    add("zip_mask", std::make_unique<ZipMasker>());
    if (!config.first_names.empty() && !config.last_names.empty())
      add("name_surrogate", std::make_unique<NameSurrogateMasker>());
    if (!config.professions.empty())
      add("profession_surrogate", std::make_unique<ProfessionSurrogateMasker>());
    return r;
  }

private:
  std::map<std::string, std::unique_ptr<Masker>> maskers_;
};

struct MaskAction {
  enum class Kind { redact, keep, mask };
  Kind kind = Kind::redact;
  std::string masker;  // for Kind::mask
  std::string fixed;   // optional fixed string for Kind::redact

  static MaskAction redact_action(std::string fixed = {}) {
    return {Kind::redact, {}, std::move(fixed)};
  }
  static MaskAction keep_action() { return {Kind::keep, {}, {}}; }
  static MaskAction mask_action(std::string masker) {
    return {Kind::mask, std::move(masker), {}};
  }
};

inline std::string_view to_string(MaskAction::Kind k) {
  switch (k) {
    case MaskAction::Kind::redact: return "redact";
    case MaskAction::Kind::keep: return "keep";
    case MaskAction::Kind::mask: return "mask";
  }
  return "?";
}

// Total over EntityClass; unlisted classes redact.
class MaskPolicy {
public:
  void set(EntityClass cls, MaskAction action) { actions_[cls] = std::move(action); }

  const MaskAction& action_for(EntityClass cls) const {
    auto it = actions_.find(cls);
    return it == actions_.end() ? default_ : it->second;
  }

  // Every referenced masker must exist in the registry.
  void validate(const MaskerRegistry& registry) const {
    std::string missing;
    for (const auto& [cls, action] : actions_) {
      if (action.kind == MaskAction::Kind::mask && !registry.find(action.masker))
        missing += "  " + std::string(to_string(cls)) + " -> unknown masker '" +
                   action.masker + "'\n";
    }
    if (!missing.empty()) throw error("policy validation failed:\n" + missing);
  }

private:
  std::map<EntityClass, MaskAction> actions_;
  MaskAction default_ = MaskAction::redact_action();
};

struct MaskEvent {
  AnnotatedSpan span;       // original offsets, text and class
  std::string action;       // redact | mask | keep
  std::string masker;       // masker name for mask actions
  std::string replacement;
  std::string flag;         // e.g. unparsed-date, shape-changed
};

struct MaskedDocument {
  std::string text;
  std::vector<MaskEvent> events;  // ascending by span start
};

// Splices replacements right to left so earlier offsets stay valid; text
// outside predictions is byte-identical to the original.
inline MaskedDocument apply_policy(const Document& doc,
                                   const std::vector<AnnotatedSpan>& predictions,
                                   const MaskPolicy& policy,
                                   const MaskerRegistry& registry) {
  std::vector<AnnotatedSpan> spans = predictions;
  std::sort(spans.begin(), spans.end(),
            [](const AnnotatedSpan& a, const AnnotatedSpan& b) {
              return a.start < b.start;
            });
  check_non_overlapping(spans, "document " + doc.id);
  policy.validate(registry);

  std::u32string text = uni::decode_utf8(doc.text);
  MaskContext ctx{doc.id};
  MaskedDocument out;

  for (const AnnotatedSpan& span : spans) {
    if (span.start >= span.end || span.end > text.size())
      throw error("document " + doc.id + ": prediction " +
                  detail::span_desc(span) + " out of bounds");
    MaskEvent ev;
    ev.span = span;
    ev.span.text = uni::encode_utf8(
        std::u32string_view(text).substr(span.start, span.end - span.start));

    const MaskAction& action = policy.action_for(span.entity_class);
    ev.action = std::string(to_string(action.kind));
    switch (action.kind) {
      case MaskAction::Kind::redact:
        ev.replacement = redact(ev.span.text, span.entity_class, action.fixed);
        break;
      case MaskAction::Kind::keep:
        ev.replacement = keep(ev.span.text);
        break;
      case MaskAction::Kind::mask: {
        const Masker* m = registry.find(action.masker);
        MaskResult r = m->apply(ev.span.text, span.entity_class, ctx);
        ev.masker = action.masker;
        ev.replacement = r.text;
        ev.flag = r.flag;
        break;
      }
    }
    out.events.push_back(std::move(ev));
  }

  for (size_t i = out.events.size(); i-- > 0;) {
    const MaskEvent& ev = out.events[i];
    text.replace(ev.span.start, ev.span.end - ev.span.start,
                 uni::decode_utf8(ev.replacement));
  }
  out.text = uni::encode_utf8(text);
  return out;
}

}  // namespace deid

#endif  // DEID_MASKING_HPP
