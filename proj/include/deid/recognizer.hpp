// recognizer.hpp -- the recognizer plugin contract and the two shipped
// recognizers: a trainable linear-chain CRF and a regex rule recognizer.
//
// Every recognizer implements the same five operations (initialize,
// transform_sequences, learn, perform_ner, evaluate) and is interchangeable
// in the training harness, the evaluation harness and the pipeline.

#ifndef DEID_RECOGNIZER_HPP
#define DEID_RECOGNIZER_HPP

#include <algorithm>
#include <cstdio>
#include <istream>
#include <memory>
#include <regex>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "deid/core.hpp"
#include "deid/crf.hpp"
#include "deid/features.hpp"
#include "deid/gazetteer.hpp"
#include "deid/metrics.hpp"
#include "deid/rng.hpp"
#include "deid/tokenize.hpp"

namespace deid {

struct TokenTag {
  Token token;
  Tag tag;
};

// One sentence as (tokens, features, labels); the transformed unit the
// contract's learn/evaluate consume.
struct SentenceInstance {
  std::vector<Token> tokens;
  std::vector<FeatureVector> features;
  std::vector<Tag> tags;
};

struct DocumentInstance {
  std::string id;
  std::string text;
  std::vector<SentenceInstance> sentences;
};

using Dataset = std::vector<DocumentInstance>;

struct RulePattern {
  EntityClass entity_class = EntityClass::PHI;
  std::string pattern;
  int priority = 0;
};

struct RecognizerConfig {
  // CRF recognizer
  bool use_gazetteers = false;
  std::vector<Gazetteer> gazetteers;
  CrfTrainConfig train;
  // rule recognizer
  std::vector<RulePattern> patterns;
};

class Recognizer {
public:
  virtual ~Recognizer() = default;

  virtual std::string name() const = 0;
  virtual bool trainable() const = 0;

  virtual void initialize(const RecognizerConfig& config) = 0;
  virtual Dataset transform_sequences(const std::vector<Document>& docs) const = 0;
  virtual void learn(const Dataset& data) = 0;
  virtual std::vector<TokenTag> perform_ner(const std::string& text) const = 0;
  virtual MetricsReport evaluate(const Dataset& data) const = 0;
};

namespace recognizer_detail {

// Tokenizes a document and pairs each sentence with gold tags projected
// from the document's span annotations.
inline std::vector<SentenceInstance> sentence_instances(const Document& doc) {
  std::u32string text = uni::decode_utf8(doc.text);
  std::vector<Token> tokens = tokenize_sentences(text);
  std::vector<Tag> tags = spans_to_tags(tokens, doc.gold);

  std::vector<SentenceInstance> out;
  for (auto [b, e] : sentence_ranges(tokens)) {
    SentenceInstance s;
    s.tokens.assign(tokens.begin() + b, tokens.begin() + e);
    s.tags.assign(tags.begin() + b, tags.begin() + e);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace recognizer_detail

// ---------------------------------------------------------------------------
// CRF recognizer
// ---------------------------------------------------------------------------

class CrfRecognizer final : public Recognizer {
public:
  explicit CrfRecognizer(std::string name = "crf") : name_(std::move(name)) {}

  std::string name() const override { return name_; }
  bool trainable() const override { return true; }

  void initialize(const RecognizerConfig& config) override {
    use_gazetteers_ = config.use_gazetteers;
    gazetteers_ = config.gazetteers;
    train_config_ = config.train;
  }

  Dataset transform_sequences(const std::vector<Document>& docs) const override {
    Dataset data;
    data.reserve(docs.size());
    for (const Document& doc : docs) {
      DocumentInstance inst;
      inst.id = doc.id;
      inst.text = doc.text;
      inst.sentences = recognizer_detail::sentence_instances(doc);
      for (SentenceInstance& s : inst.sentences)
        s.features = extract_sequence(s.tokens, use_gazetteers_, gazetteers_);
      data.push_back(std::move(inst));
    }
    return data;
  }

  void learn(const Dataset& data) override {
    std::vector<TaggedSentence> corpus;
    for (const DocumentInstance& doc : data)
      for (const SentenceInstance& s : doc.sentences)
        corpus.push_back({s.features, s.tags});
    TrainResult result = train_crf(corpus, train_config_, bio_label_set(),
                                   config_hash());
    model_ = std::move(result.model);
    epoch_nll_ = std::move(result.epoch_nll);
    has_model_ = true;
  }

  std::vector<TokenTag> perform_ner(const std::string& text) const override {
    if (!has_model_) throw error("CrfRecognizer '" + name_ + "': no model");
    std::u32string utext = uni::decode_utf8(text);
    std::vector<Token> tokens = tokenize_sentences(utext);

    std::vector<TokenTag> out;
    out.reserve(tokens.size());
    for (auto [b, e] : sentence_ranges(tokens)) {
      std::span<const Token> sent(tokens.data() + b, e - b);
      std::vector<FeatureVector> fv =
          extract_sequence(sent, use_gazetteers_, gazetteers_);
      std::vector<std::vector<uint32_t>> x;
      x.reserve(fv.size());
      for (const FeatureVector& v : fv)
        x.push_back(vectorize(v, model_.feature_index()));
      std::vector<uint32_t> path = viterbi(model_, x);
      for (size_t i = 0; i < sent.size(); ++i)
        out.push_back({sent[i], model_.labels()[path[i]]});
    }
    return out;
  }

  MetricsReport evaluate(const Dataset& data) const override {
    if (!has_model_) throw error("CrfRecognizer '" + name_ + "': no model");
    MetricsReport report;
    report.level = MetricsLevel::token;
    for (const DocumentInstance& doc : data) {
      for (const SentenceInstance& s : doc.sentences) {
        std::vector<std::vector<uint32_t>> x;
        x.reserve(s.features.size());
        for (const FeatureVector& v : s.features)
          x.push_back(vectorize(v, model_.feature_index()));
        if (x.empty()) continue;
        std::vector<uint32_t> path = viterbi(model_, x);
        std::vector<Tag> predicted;
        predicted.reserve(path.size());
        for (uint32_t id : path) predicted.push_back(model_.labels()[id]);
        accumulate_token_counts(s.tags, predicted, report, doc.id);
      }
    }
    return report;
  }

  bool has_model() const { return has_model_; }
  const CrfModel& model() const {
    if (!has_model_) throw error("CrfRecognizer '" + name_ + "': no model");
    return model_;
  }
  void set_model(CrfModel model) {
    model_ = std::move(model);
    has_model_ = true;
  }
  const std::vector<double>& epoch_nll() const { return epoch_nll_; }
  bool uses_gazetteers() const { return use_gazetteers_; }

private:
  std::string config_hash() const {
    std::ostringstream os;
    os << "gaz=" << use_gazetteers_ << ";lambda=" << train_config_.l2_lambda
       << ";epochs=" << train_config_.max_epochs
       << ";tol=" << train_config_.grad_tolerance;
    for (const Gazetteer& g : gazetteers_)
      os << ";" << g.name() << "=" << g.entry_count();
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(os.str())));
    return buf;
  }

  std::string name_;
  bool use_gazetteers_ = false;
  std::vector<Gazetteer> gazetteers_;
  CrfTrainConfig train_config_;
  CrfModel model_;
  bool has_model_ = false;
  std::vector<double> epoch_nll_;
};

// ---------------------------------------------------------------------------
// Rule recognizer
// ---------------------------------------------------------------------------

// Non-ML baseline for regular entities and pipeline fallback.
inline std::vector<RulePattern> default_rule_patterns() {
  return {
      {EntityClass::CONTACT,
       R"(\(\d{3}\) ?\d{3}[-. ]\d{4}|\b\d{3}[-. ]\d{3}[-. ]\d{4}\b)", 30},
      {EntityClass::ID,
       R"(\b(?=(?:[A-Za-z]*\d){2})[A-Za-z0-9]{6,}\b)", 20},
      {EntityClass::DATE,
       R"(\b\d{1,2}/\d{1,2}/\d{2,4}\b|\b\d{4}-\d{2}-\d{2}\b|\b\d{1,2}-\d{1,2}-\d{4}\b)",
       10},
  };
}

// One `CLASS<TAB>priority<TAB>regex` per line; blank lines and "#" ignored.
inline std::vector<RulePattern> load_rule_patterns(std::istream& in) {
  std::vector<RulePattern> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = line.find('\t', t1 == std::string::npos ? t1 : t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw error("pattern file line " + std::to_string(line_no) +
                  ": expected CLASS<TAB>priority<TAB>regex");
    auto cls = parse_entity_class(line.substr(0, t1));
    if (!cls)
      throw error("pattern file line " + std::to_string(line_no) +
                  ": unknown class '" + line.substr(0, t1) + "'");
    RulePattern p;
    p.entity_class = *cls;
    try {
      p.priority = std::stoi(line.substr(t1 + 1, t2 - t1 - 1));
    } catch (const std::exception&) {
      throw error("pattern file line " + std::to_string(line_no) +
                  ": bad priority");
    }
    p.pattern = line.substr(t2 + 1);
    out.push_back(std::move(p));
  }
  return out;
}

class RuleRecognizer final : public Recognizer {
public:
  explicit RuleRecognizer(std::string name = "rules") : name_(std::move(name)) {}

  std::string name() const override { return name_; }
  bool trainable() const override { return false; }

  void initialize(const RecognizerConfig& config) override {
    patterns_.clear();
    compiled_.clear();
    const std::vector<RulePattern>& src =
        config.patterns.empty() ? default_patterns_ : config.patterns;
    for (const RulePattern& p : src) {
      try {
        compiled_.emplace_back(p.pattern, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        throw error("rule pattern for " + std::string(to_string(p.entity_class)) +
                    " does not compile: " + e.what());
      }
      patterns_.push_back(p);
    }
  }

  Dataset transform_sequences(const std::vector<Document>& docs) const override {
    Dataset data;
    for (const Document& doc : docs) {
      DocumentInstance inst;
      inst.id = doc.id;
      inst.text = doc.text;
      inst.sentences = recognizer_detail::sentence_instances(doc);
      data.push_back(std::move(inst));
    }
    return data;
  }

  void learn(const Dataset&) override {}  // nothing to train

  std::vector<TokenTag> perform_ner(const std::string& text) const override {
    std::vector<AnnotatedSpan> spans = match_spans(text);
    std::u32string utext = uni::decode_utf8(text);
    std::vector<Token> tokens = tokenize_sentences(utext);
    std::vector<Tag> tags = spans_to_tags(tokens, spans);
    std::vector<TokenTag> out;
    out.reserve(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) out.push_back({tokens[i], tags[i]});
    return out;
  }

  MetricsReport evaluate(const Dataset& data) const override {
    MetricsReport report;
    report.level = MetricsLevel::token;
    for (const DocumentInstance& doc : data) {
      std::vector<TokenTag> predicted = perform_ner(doc.text);
      std::vector<Tag> pred_tags, gold_tags;
      for (const TokenTag& tt : predicted) pred_tags.push_back(tt.tag);
      for (const SentenceInstance& s : doc.sentences)
        gold_tags.insert(gold_tags.end(), s.tags.begin(), s.tags.end());
      accumulate_token_counts(gold_tags, pred_tags, report, doc.id);
    }
    return report;
  }

  // Overlaps resolved by priority, then match length, then earlier start.
  std::vector<AnnotatedSpan> match_spans(const std::string& text) const {
    // byte offset -> scalar offset map for regex match positions
    std::vector<size_t> scalar_at(text.size() + 1, 0);
    {
      size_t scalar = 0;
      for (size_t i = 0; i < text.size(); ++i) {
        scalar_at[i] = scalar;
        if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) ++scalar;
        else scalar_at[i] = scalar - 1;  // continuation byte
      }
      scalar_at[text.size()] = scalar;
    }

    struct Candidate {
      AnnotatedSpan span;
      int priority;
    };
    std::vector<Candidate> candidates;
    for (size_t pi = 0; pi < compiled_.size(); ++pi) {
      auto begin = std::sregex_iterator(text.begin(), text.end(), compiled_[pi]);
      for (auto it = begin; it != std::sregex_iterator(); ++it) {
        if (it->length() == 0) continue;
        size_t bstart = static_cast<size_t>(it->position());
        size_t bend = bstart + static_cast<size_t>(it->length());
        AnnotatedSpan s;
        s.start = scalar_at[bstart];
        s.end = scalar_at[bend];
        s.entity_class = patterns_[pi].entity_class;
        s.text = it->str();
        candidates.push_back({std::move(s), patterns_[pi].priority});
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                if (a.priority != b.priority) return a.priority > b.priority;
                size_t la = a.span.end - a.span.start;
                size_t lb = b.span.end - b.span.start;
                if (la != lb) return la > lb;
                return a.span.start < b.span.start;
              });
    std::vector<AnnotatedSpan> accepted;
    for (const Candidate& c : candidates) {
      bool clash = false;
      for (const AnnotatedSpan& a : accepted)
        if (c.span.start < a.end && a.start < c.span.end) {
          clash = true;
          break;
        }
      if (!clash) accepted.push_back(c.span);
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const AnnotatedSpan& a, const AnnotatedSpan& b) {
                return a.start < b.start;
              });
    return accepted;
  }

private:
  std::string name_;
  std::vector<RulePattern> patterns_;
  std::vector<std::regex> compiled_;
  std::vector<RulePattern> default_patterns_ = default_rule_patterns();
};

// Free-function forms of the two recognizers' tagging step.

inline std::vector<TokenTag> crf_perform_ner(
    const CrfModel& model, const std::string& text, bool use_gazetteers = false,
    std::vector<Gazetteer> gazetteers = {}) {
  CrfRecognizer r;
  RecognizerConfig cfg;
  cfg.use_gazetteers = use_gazetteers;
  cfg.gazetteers = std::move(gazetteers);
  r.initialize(cfg);
  r.set_model(model);
  return r.perform_ner(text);
}

inline std::vector<TokenTag> rule_perform_ner(
    const std::vector<RulePattern>& patterns, const std::string& text) {
  RuleRecognizer r;
  RecognizerConfig cfg;
  cfg.patterns = patterns;
  r.initialize(cfg);
  return r.perform_ner(text);
}

// ---------------------------------------------------------------------------
// Corpus-level evaluation
// ---------------------------------------------------------------------------

struct EvaluationResult {
  MetricsReport token;
  MetricsReport span;
};

// Runs perform_ner per document and scores predictions against gold at
// both levels.
inline EvaluationResult evaluate_recognizer(const Recognizer& recognizer,
                                            const std::vector<Document>& corpus) {
  EvaluationResult result;
  result.token.level = MetricsLevel::token;
  result.span.level = MetricsLevel::span_strict;
  for (const Document& doc : corpus) {
    std::vector<TokenTag> predicted = recognizer.perform_ner(doc.text);
    std::vector<Token> tokens;
    std::vector<Tag> pred_tags;
    for (const TokenTag& tt : predicted) {
      tokens.push_back(tt.token);
      pred_tags.push_back(tt.tag);
    }
    std::vector<Tag> gold_tags = spans_to_tags(tokens, doc.gold);
    accumulate_token_counts(gold_tags, pred_tags, result.token, doc.id);

    std::vector<AnnotatedSpan> pred_spans = tags_to_spans(tokens, pred_tags);
    accumulate_span_counts(doc.gold, pred_spans, result.span);
  }
  return result;
}

}  // namespace deid

#endif  // DEID_RECOGNIZER_HPP
