// metrics.hpp -- precision/recall/F1 at token level and strict span level,
// with fixed-width report rendering.

#ifndef DEID_METRICS_HPP
#define DEID_METRICS_HPP

#include <array>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deid/core.hpp"

namespace deid {

enum class MetricsLevel { token, span_strict };

inline std::string_view to_string(MetricsLevel l) {
  return l == MetricsLevel::token ? "token" : "span_strict";
}

struct ClassCounts {
  long tp = 0, fp = 0, fn = 0;
  long support = 0;  // gold count (tokens or spans depending on level)
};

struct Scores {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  long support = 0;
};

inline Scores scores_from_counts(const ClassCounts& c) {
  Scores s;
  s.precision = (c.tp + c.fp) > 0 ? double(c.tp) / double(c.tp + c.fp) : 0.0;
  s.recall = (c.tp + c.fn) > 0 ? double(c.tp) / double(c.tp + c.fn) : 0.0;
  s.f1 = (s.precision + s.recall) > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  s.support = c.support;
  return s;
}

struct MetricsReport {
  MetricsLevel level = MetricsLevel::token;
  std::map<EntityClass, ClassCounts> counts;  // keyed by class, enum order

  Scores per_class(EntityClass c) const {
    auto it = counts.find(c);
    return it == counts.end() ? Scores{} : scores_from_counts(it->second);
  }

  // Micro-average over non-O classes: pooled TP/FP/FN.
  Scores overall() const {
    ClassCounts pooled;
    for (const auto& [cls, c] : counts) {
      pooled.tp += c.tp;
      pooled.fp += c.fp;
      pooled.fn += c.fn;
      pooled.support += c.support;
    }
    return scores_from_counts(pooled);
  }
};

// ---------------------------------------------------------------------------
// Token-level: a token is TP for class c iff gold and predicted class agree
// (B/I distinction ignored; boundary errors are charged at span level).
// ---------------------------------------------------------------------------

inline void accumulate_token_counts(const std::vector<Tag>& gold,
                                    const std::vector<Tag>& predicted,
                                    MetricsReport& report,
                                    const std::string& doc_id = {}) {
  if (gold.size() != predicted.size())
    throw error("token_metrics: length mismatch" +
                (doc_id.empty() ? "" : " in document " + doc_id) + " (" +
                std::to_string(gold.size()) + " gold vs " +
                std::to_string(predicted.size()) + " predicted)");
  for (size_t i = 0; i < gold.size(); ++i) {
    std::optional<EntityClass> g, p;
    if (!gold[i].is_outside()) g = gold[i].entity_class;
    if (!predicted[i].is_outside()) p = predicted[i].entity_class;
    if (g) ++report.counts[*g].support;
    if (g && p && *g == *p) {
      ++report.counts[*g].tp;
    } else {
      if (g) ++report.counts[*g].fn;
      if (p) ++report.counts[*p].fp;
    }
  }
}

inline MetricsReport token_metrics(
    const std::vector<std::pair<std::vector<Tag>, std::vector<Tag>>>& docs) {
  MetricsReport report;
  report.level = MetricsLevel::token;
  for (const auto& [gold, predicted] : docs)
    accumulate_token_counts(gold, predicted, report);
  return report;
}

// ---------------------------------------------------------------------------
// Span-level strict: TP iff (start, end, class) all equal.
// ---------------------------------------------------------------------------

inline void accumulate_span_counts(const std::vector<AnnotatedSpan>& gold,
                                   const std::vector<AnnotatedSpan>& predicted,
                                   MetricsReport& report) {
  check_non_overlapping(gold);
  check_non_overlapping(predicted);
  auto key = [](const AnnotatedSpan& s) {
    return std::tuple(s.start, s.end, s.entity_class);
  };
  std::vector<bool> matched(predicted.size(), false);
  for (const AnnotatedSpan& g : gold) {
    ++report.counts[g.entity_class].support;
    bool hit = false;
    for (size_t j = 0; j < predicted.size(); ++j) {
      if (!matched[j] && key(predicted[j]) == key(g)) {
        matched[j] = true;
        hit = true;
        break;
      }
    }
    if (hit)
      ++report.counts[g.entity_class].tp;
    else
      ++report.counts[g.entity_class].fn;
  }
  for (size_t j = 0; j < predicted.size(); ++j)
    if (!matched[j]) ++report.counts[predicted[j].entity_class].fp;
}

inline MetricsReport span_metrics(
    const std::vector<std::pair<std::vector<AnnotatedSpan>,
                                std::vector<AnnotatedSpan>>>& docs) {
  MetricsReport report;
  report.level = MetricsLevel::span_strict;
  for (const auto& [gold, predicted] : docs)
    accumulate_span_counts(gold, predicted, report);
  return report;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

// Fixed-width table: one row per class present in gold (enum order) plus
// Overall; values to 2 decimals.
inline std::string render_report(const MetricsReport& r) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-12s %9s %9s %9s %9s\n", "", "Precision",
                "Recall", "F1-Score", "Support");
  out += buf;
  auto row = [&](std::string_view name, const Scores& s) {
    std::snprintf(buf, sizeof(buf), "%-12s %9.2f %9.2f %9.2f %9ld\n",
                  std::string(name).c_str(), s.precision, s.recall, s.f1,
                  s.support);
    out += buf;
  };
  for (EntityClass c : all_entity_classes()) {
    auto it = r.counts.find(c);
    if (it == r.counts.end() || it->second.support == 0) continue;
    row(to_string(c), scores_from_counts(it->second));
  }
  row("Overall", r.overall());
  return out;
}

// Machine-readable lines: level<TAB>class<TAB>p<TAB>r<TAB>f1<TAB>support
inline std::string render_report_tsv(const MetricsReport& r) {
  std::string out;
  char buf[160];
  auto line = [&](std::string_view cls, const Scores& s) {
    std::snprintf(buf, sizeof(buf), "%s\t%s\t%.4f\t%.4f\t%.4f\t%ld\n",
                  std::string(to_string(r.level)).c_str(),
                  std::string(cls).c_str(), s.precision, s.recall, s.f1,
                  s.support);
    out += buf;
  };
  for (EntityClass c : all_entity_classes()) {
    auto it = r.counts.find(c);
    if (it == r.counts.end() || it->second.support == 0) continue;
    line(to_string(c), scores_from_counts(it->second));
  }
  line("Overall", r.overall());
  return out;
}

}  // namespace deid

#endif  // DEID_METRICS_HPP
