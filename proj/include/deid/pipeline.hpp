// pipeline.hpp -- the train / evaluate / deidentify / inspect commands,
// shared by the CLI and the end-to-end tests.
//
// Everything here is deterministic given (config, seed, corpus): the
// corpus split is a seeded shuffle, surrogate draws are keyed hashes and
// outputs are written in document order regardless of worker count.

#ifndef DEID_PIPELINE_HPP
#define DEID_PIPELINE_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "deid/config.hpp"
#include "deid/core.hpp"
#include "deid/io.hpp"
#include "deid/masking.hpp"
#include "deid/metrics.hpp"
#include "deid/recognizer.hpp"
#include "deid/rng.hpp"

namespace deid {

// ---------------------------------------------------------------------------
// Corpus handling
// ---------------------------------------------------------------------------

struct CorpusSplit {
  std::vector<Document> train;
  std::vector<Document> test;
};

// Seeded shuffle, then train gets floor(n * fraction), remainder to test.
inline CorpusSplit split_corpus(std::vector<Document> docs, double fraction,
                                uint64_t seed) {
  deterministic_shuffle(docs, seed);
  const size_t n_train =
      static_cast<size_t>(std::floor(static_cast<double>(docs.size()) * fraction));
  CorpusSplit split;
  split.train.assign(docs.begin(), docs.begin() + n_train);
  split.test.assign(docs.begin() + n_train, docs.end());
  return split;
}

namespace pipeline_detail {

inline std::filesystem::path resolve(const std::filesystem::path& base,
                                     const std::string& p) {
  std::filesystem::path path(p);
  if (base.empty() || path.is_absolute()) return path;
  return base / path;
}

}  // namespace pipeline_detail

inline std::vector<Document> read_corpus(const PipelineConfig& cfg,
                                         const std::filesystem::path& base) {
  if (cfg.corpus.format == "standoff") {
    if (cfg.corpus.text_dir.empty() || cfg.corpus.ann_dir.empty())
      throw error("standoff corpus needs text_dir and ann_dir");
    return read_standoff(pipeline_detail::resolve(base, cfg.corpus.text_dir),
                         pipeline_detail::resolve(base, cfg.corpus.ann_dir));
  }
  if (cfg.corpus.bio_file.empty()) throw error("bio corpus needs bio_file");
  return read_bio_file(pipeline_detail::resolve(base, cfg.corpus.bio_file));
}

// ---------------------------------------------------------------------------
// Recognizer construction
// ---------------------------------------------------------------------------

inline std::unique_ptr<Recognizer> build_recognizer(
    const RecognizerSpec& spec, const std::filesystem::path& base) {
  RecognizerConfig rc;
  if (spec.type == "crf") {
    rc.use_gazetteers = spec.use_gazetteers;
    for (const auto& [name, path] : spec.gazetteer_files) {
      std::filesystem::path full = pipeline_detail::resolve(base, path);
      std::ifstream in(full, std::ios::binary);
      if (!in) throw error("cannot open gazetteer " + full.string());
      Gazetteer g = load_gazetteer(name, in);
      if (g.entry_count() == 0)
        throw error("gazetteer " + full.string() + " is empty");
      rc.gazetteers.push_back(std::move(g));
    }
    rc.train = spec.train;
    auto r = std::make_unique<CrfRecognizer>(spec.name);
    r->initialize(rc);
    return r;
  }
  if (spec.type == "rules") {
    if (!spec.patterns_file.empty()) {
      std::filesystem::path full =
          pipeline_detail::resolve(base, spec.patterns_file);
      std::ifstream in(full, std::ios::binary);
      if (!in) throw error("cannot open pattern file " + full.string());
      rc.patterns = load_rule_patterns(in);
    }
    auto r = std::make_unique<RuleRecognizer>(spec.name);
    r->initialize(rc);
    return r;
  }
  throw error("unknown recognizer type '" + spec.type + "'");
}

// Builds every configured recognizer; when load_models is set, CRF
// recognizers read their model files instead of starting empty.
inline std::map<std::string, std::unique_ptr<Recognizer>> build_recognizers(
    const PipelineConfig& cfg, const std::filesystem::path& base,
    bool load_models) {
  std::map<std::string, std::unique_ptr<Recognizer>> out;
  for (const RecognizerSpec& spec : cfg.recognizers) {
    auto r = build_recognizer(spec, base);
    if (load_models && spec.type == "crf") {
      if (spec.model_path.empty())
        throw error("recognizer '" + spec.name + "' has no model path");
      CrfModel model =
          load_model(pipeline_detail::resolve(base, spec.model_path));
      static_cast<CrfRecognizer*>(r.get())->set_model(std::move(model));
    }
    out.emplace(spec.name, std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Masking environment
// ---------------------------------------------------------------------------

struct MaskingEnv {
  MaskerConfig config;
  MaskerRegistry registry;
};

inline MaskingEnv build_masking_env(const PipelineConfig& cfg,
                                    const std::filesystem::path& base) {
  MaskingEnv env;
  env.config.options = cfg.masking_options;
  if (!cfg.first_names_file.empty())
    env.config.first_names =
        load_word_list(pipeline_detail::resolve(base, cfg.first_names_file));
  if (!cfg.last_names_file.empty())
    env.config.last_names =
        load_word_list(pipeline_detail::resolve(base, cfg.last_names_file));
  if (!cfg.professions_file.empty())
    env.config.professions =
        load_word_list(pipeline_detail::resolve(base, cfg.professions_file));
  env.registry = MaskerRegistry::builtins(env.config, cfg.seed);
  cfg.policy.validate(env.registry);
  return env;
}

// ---------------------------------------------------------------------------
// Cross-recognizer span merging
// ---------------------------------------------------------------------------

// Regular, high-precision pattern classes outrank fuzzier ones when the
// recognizers assigned to two classes disagree about the same characters.
inline int class_priority(EntityClass cls) {
  switch (cls) {
    case EntityClass::ID: return 8;
    case EntityClass::CONTACT: return 7;
    case EntityClass::DATE: return 6;
    case EntityClass::NAME: return 5;
    case EntityClass::LOCATION: return 4;
    case EntityClass::AGE: return 3;
    case EntityClass::PROFESSION: return 2;
    case EntityClass::PHI: return 1;
  }
  return 0;
}

inline std::vector<AnnotatedSpan> merge_spans(std::vector<AnnotatedSpan> candidates) {
  std::sort(candidates.begin(), candidates.end(),
            [](const AnnotatedSpan& a, const AnnotatedSpan& b) {
              int pa = class_priority(a.entity_class);
              int pb = class_priority(b.entity_class);
              if (pa != pb) return pa > pb;
              size_t la = a.end - a.start, lb = b.end - b.start;
              if (la != lb) return la > lb;
              if (a.start != b.start) return a.start < b.start;
              return a.end < b.end;
            });
  std::vector<AnnotatedSpan> accepted;
  for (const AnnotatedSpan& c : candidates) {
    bool clash = false;
    for (const AnnotatedSpan& a : accepted)
      if (c.start < a.end && a.start < c.end) {
        clash = true;
        break;
      }
    if (!clash) accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const AnnotatedSpan& a, const AnnotatedSpan& b) {
              return a.start < b.start;
            });
  return accepted;
}

// Runs each distinct assigned recognizer once, keeps per-class spans from
// the class's assigned recognizer only, then resolves cross-class overlaps.
inline std::vector<AnnotatedSpan> predict_spans(
    const Document& doc, const PipelineConfig& cfg,
    const std::map<std::string, std::unique_ptr<Recognizer>>& recognizers) {
  auto recognizer_for = [&](EntityClass cls) -> const std::string& {
    auto it = cfg.assignment.find(cls);
    return it == cfg.assignment.end() ? cfg.default_recognizer : it->second;
  };

  std::set<std::string> needed;
  for (EntityClass cls : all_entity_classes()) needed.insert(recognizer_for(cls));

  std::map<std::string, std::vector<AnnotatedSpan>> spans_by_recognizer;
  std::u32string utext = uni::decode_utf8(doc.text);
  for (const std::string& name : needed) {
    auto it = recognizers.find(name);
    if (it == recognizers.end())
      throw error("recognizer '" + name + "' is not configured");
    std::vector<TokenTag> tagged = it->second->perform_ner(doc.text);
    std::vector<Token> tokens;
    std::vector<Tag> tags;
    for (TokenTag& tt : tagged) {
      tokens.push_back(std::move(tt.token));
      tags.push_back(tt.tag);
    }
    spans_by_recognizer[name] = tags_to_spans(tokens, tags, utext);
  }

  std::vector<AnnotatedSpan> candidates;
  for (EntityClass cls : all_entity_classes()) {
    const std::vector<AnnotatedSpan>& from = spans_by_recognizer[recognizer_for(cls)];
    for (const AnnotatedSpan& s : from)
      if (s.entity_class == cls) candidates.push_back(s);
  }
  return merge_spans(std::move(candidates));
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline void print_evaluation(std::ostream& out, const std::string& name,
                             const EvaluationResult& result, bool tsv) {
  if (tsv) {
    out << render_report_tsv(result.token);
    out << render_report_tsv(result.span);
    return;
  }
  out << "recognizer " << name << ", token level\n"
      << render_report(result.token) << "\n";
  out << "recognizer " << name << ", strict span level\n"
      << render_report(result.span) << "\n";
}

// Reads the corpus, splits it, trains every trainable recognizer, saves
// models and a per-epoch objective log, then reports held-out scores for
// every configured recognizer.
inline int cmd_train(const PipelineConfig& cfg, const std::filesystem::path& base,
                     std::ostream& out, std::ostream& err) {
  std::vector<Document> corpus = read_corpus(cfg, base);
  if (corpus.empty()) {
    err << "error: corpus is empty\n";
    return 1;
  }
  CorpusSplit split = split_corpus(std::move(corpus), cfg.split, cfg.seed);
  out << "corpus: " << split.train.size() << " train / " << split.test.size()
      << " test documents\n";

  auto recognizers = build_recognizers(cfg, base, /*load_models=*/false);
  for (const RecognizerSpec& spec : cfg.recognizers) {
    Recognizer& r = *recognizers.at(spec.name);
    if (!r.trainable()) continue;
    if (spec.model_path.empty())
      throw error("recognizer '" + spec.name +
                  "' is trainable but has no model path");

    auto t0 = std::chrono::steady_clock::now();
    Dataset data = r.transform_sequences(split.train);
    r.learn(data);
    auto t1 = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(t1 - t0).count();

    auto& crf = static_cast<CrfRecognizer&>(r);
    std::filesystem::path model_path =
        pipeline_detail::resolve(base, spec.model_path);
    if (model_path.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(model_path.parent_path(), ec);
    }
    save_model(crf.model(), model_path);

    std::ofstream log(model_path.string() + ".log", std::ios::trunc);
    for (size_t i = 0; i < crf.epoch_nll().size(); ++i)
      log << i << '\t' << crf.epoch_nll()[i] << '\n';

    err << "trained " << spec.name << " in " << secs << " s, "
        << crf.epoch_nll().size() << " epochs, "
        << crf.model().num_features() << " features -> " << model_path.string()
        << "\n";
  }

  if (!split.test.empty()) {
    for (const RecognizerSpec& spec : cfg.recognizers) {
      Recognizer& r = *recognizers.at(spec.name);
      if (r.trainable() && !static_cast<CrfRecognizer&>(r).has_model()) continue;
      EvaluationResult result = evaluate_recognizer(r, split.test);
      print_evaluation(out, spec.name, result, /*tsv=*/false);
    }
  }
  return 0;
}

// Scores every configured recognizer (models loaded from disk) on the
// held-out part of the corpus, at both levels.
inline int cmd_evaluate(const PipelineConfig& cfg,
                        const std::filesystem::path& base, bool tsv,
                        std::ostream& out, std::ostream& err) {
  std::vector<Document> corpus = read_corpus(cfg, base);
  if (corpus.empty()) {
    err << "error: corpus is empty\n";
    return 1;
  }
  CorpusSplit split = split_corpus(std::move(corpus), cfg.split, cfg.seed);
  if (split.test.empty()) {
    err << "error: held-out split is empty\n";
    return 1;
  }
  auto recognizers = build_recognizers(cfg, base, /*load_models=*/true);
  for (const RecognizerSpec& spec : cfg.recognizers) {
    EvaluationResult result =
        evaluate_recognizer(*recognizers.at(spec.name), split.test);
    print_evaluation(out, spec.name, result, tsv);
  }
  return 0;
}

struct DeidentifyStats {
  size_t documents = 0;
  size_t spans_masked = 0;
  double total_seconds = 0.0;
};

// Masks every *.txt under input_dir into out_dir plus one audit log.
// Documents may be processed by a worker pool; outputs and audit rows are
// emitted in document order so reruns are byte-identical.
inline DeidentifyStats cmd_deidentify(const PipelineConfig& cfg,
                                      const std::filesystem::path& base,
                                      const std::filesystem::path& input_dir,
                                      const std::filesystem::path& out_dir,
                                      unsigned workers, bool include_originals,
                                      std::ostream& out, std::ostream& err) {
  std::vector<Document> docs = read_text_dir(input_dir);
  DeidentifyStats stats;
  if (docs.empty()) {
    err << "warning: no .txt documents in " << input_dir.string() << "\n";
    return stats;
  }

  auto recognizers = build_recognizers(cfg, base, /*load_models=*/true);
  MaskingEnv env = build_masking_env(cfg, base);

  struct PerDoc {
    MaskedDocument masked;
    double seconds = 0.0;
  };
  std::vector<PerDoc> results(docs.size());

  auto process = [&](size_t i) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<AnnotatedSpan> spans = predict_spans(docs[i], cfg, recognizers);
    results[i].masked = apply_policy(docs[i], spans, cfg.policy, env.registry);
    auto t1 = std::chrono::steady_clock::now();
    results[i].seconds = std::chrono::duration<double>(t1 - t0).count();
  };

  workers = std::max(1u, workers);
  if (workers == 1 || docs.size() < 2) {
    for (size_t i = 0; i < docs.size(); ++i) process(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (unsigned w = 0; w < std::min<size_t>(workers, docs.size()); ++w)
      pool.emplace_back([&] {
        while (true) {
          size_t i = next.fetch_add(1);
          if (i >= docs.size()) return;
          try {
            process(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw error("cannot create " + out_dir.string() + ": " + ec.message());
  std::ofstream audit(out_dir / "audit.tsv", std::ios::binary | std::ios::trunc);
  if (!audit) throw error("cannot create audit log in " + out_dir.string());

  for (size_t i = 0; i < docs.size(); ++i) {
    write_masked(out_dir, docs[i].id, results[i].masked.text);
    write_audit(audit, docs[i].id, results[i].masked.events, include_originals);
    stats.documents += 1;
    stats.spans_masked += results[i].masked.events.size();
    stats.total_seconds += results[i].seconds;
    err << docs[i].id << ": " << results[i].masked.events.size() << " spans, "
        << results[i].seconds << " s\n";
  }
  audit.flush();
  if (!audit) throw error("write failed for audit log in " + out_dir.string());

  err << stats.documents << " documents, " << stats.spans_masked << " spans, "
      << stats.total_seconds << " s total ("
      << (stats.total_seconds / static_cast<double>(stats.documents))
      << " s/document)\n";
  out << "wrote " << stats.documents << " masked documents to "
      << out_dir.string() << "\n";
  return stats;
}

// Prints label set, feature count and the k strongest-emission features
// per entity class.
inline int cmd_inspect(const std::filesystem::path& model_path, int top_k,
                       std::ostream& out) {
  CrfModel model = load_model(model_path);
  out << "labels:";
  for (const Tag& t : model.labels()) out << " " << to_string(t);
  out << "\nfeatures: " << model.num_features() << "\n";
  out << "l2_lambda: " << model.l2_lambda() << "\n";
  if (!model.config_hash().empty())
    out << "config: " << model.config_hash() << "\n";

  if (top_k <= 0) return 0;
  for (EntityClass cls : all_entity_classes()) {
    std::vector<std::pair<double, uint32_t>> best;
    auto b_id = model.label_id(Tag::begin(cls));
    auto i_id = model.label_id(Tag::inside(cls));
    for (uint32_t f = 0; f < model.num_features(); ++f) {
      double w = -std::numeric_limits<double>::infinity();
      if (b_id) w = std::max(w, model.emission_weight(f, *b_id));
      if (i_id) w = std::max(w, model.emission_weight(f, *i_id));
      if (std::isfinite(w)) best.emplace_back(w, f);
    }
    size_t k = std::min<size_t>(static_cast<size_t>(top_k), best.size());
    std::partial_sort(best.begin(), best.begin() + k, best.end(),
                      [](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first > b.first;
                        return a.second < b.second;
                      });
    out << to_string(cls) << ":\n";
    for (size_t i = 0; i < k; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%+.4f", best[i].first);
      out << "  " << buf << "  " << model.feature_index().name(best[i].second)
          << "\n";
    }
  }
  return 0;
}

}  // namespace deid

#endif  // DEID_PIPELINE_HPP
