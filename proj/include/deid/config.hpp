// config.hpp -- sectioned key=value pipeline configuration.
//
// Without a config file the pipeline falls back to the rule recognizer
// with a redact-all policy, so the tool works with zero training. All
// validation problems are collected and reported in one error.

#ifndef DEID_CONFIG_HPP
#define DEID_CONFIG_HPP

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "deid/core.hpp"
#include "deid/crf.hpp"
#include "deid/masking.hpp"

namespace deid {

struct ReaderConfig {
  std::string format = "bio";  // "standoff" | "bio"
  std::string text_dir;
  std::string ann_dir;
  std::string bio_file;
};

struct RecognizerSpec {
  std::string name;
  std::string type = "crf";  // "crf" | "rules"
  bool use_gazetteers = false;
  std::vector<std::pair<std::string, std::string>> gazetteer_files;  // name, path
  CrfTrainConfig train;
  std::string patterns_file;  // rules type; empty = built-in defaults
  std::string model_path;     // save target for train, load source otherwise
};

struct PipelineConfig {
  ReaderConfig corpus;
  double split = 0.8;

  std::vector<RecognizerSpec> recognizers;
  std::map<EntityClass, std::string> assignment;  // class -> recognizer name
  std::string default_recognizer;

  MaskPolicy policy;
  std::map<std::string, std::string> masking_options;
  std::string first_names_file;
  std::string last_names_file;
  std::string professions_file;

  uint64_t seed = 0;
  bool seed_set = false;

  const RecognizerSpec* find_recognizer(const std::string& name) const {
    for (const RecognizerSpec& r : recognizers)
      if (r.name == name) return &r;
    return nullptr;
  }
};

// Usable with no file at all: rule recognizer everywhere, redact-all.
inline PipelineConfig default_pipeline_config() {
  PipelineConfig cfg;
  RecognizerSpec rules;
  rules.name = "rules";
  rules.type = "rules";
  cfg.recognizers.push_back(std::move(rules));
  cfg.default_recognizer = "rules";
  return cfg;
}

namespace config_detail {

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string word;
  while (is >> word) out.push_back(word);
  return out;
}

inline bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") { out = true; return true; }
  if (v == "false" || v == "0" || v == "no" || v == "off") { out = false; return true; }
  return false;
}

// `CLASS = redact [text] | keep | mask MASKER [key=value ...]`
inline std::optional<MaskAction> parse_action(const std::string& value,
                                              std::map<std::string, std::string>& options,
                                              std::string& problem) {
  std::vector<std::string> words = split_ws(value);
  if (words.empty()) {
    problem = "empty action";
    return std::nullopt;
  }
  if (words[0] == "redact") {
    std::string fixed;
    for (size_t i = 1; i < words.size(); ++i)
      fixed += (fixed.empty() ? "" : " ") + words[i];
    return MaskAction::redact_action(fixed);
  }
  if (words[0] == "keep") {
    if (words.size() > 1) {
      problem = "keep takes no arguments";
      return std::nullopt;
    }
    return MaskAction::keep_action();
  }
  if (words[0] == "mask") {
    if (words.size() < 2) {
      problem = "mask requires a masker name";
      return std::nullopt;
    }
    for (size_t i = 2; i < words.size(); ++i) {
      size_t eq = words[i].find('=');
      if (eq == std::string::npos || eq == 0) {
        problem = "masker parameter '" + words[i] + "' is not key=value";
        return std::nullopt;
      }
      options[words[i].substr(0, eq)] = words[i].substr(eq + 1);
    }
    return MaskAction::mask_action(words[1]);
  }
  problem = "unknown action '" + words[0] + "' (expected redact, keep or mask)";
  return std::nullopt;
}

}  // namespace config_detail

// Parses and validates; every problem is reported, not just the first.
inline PipelineConfig load_pipeline_config(std::istream& in,
                                           const std::string& source = "config") {
  using config_detail::trim;
  PipelineConfig cfg = default_pipeline_config();
  cfg.recognizers.clear();
  cfg.default_recognizer.clear();

  std::vector<std::string> errors;
  auto fail = [&](size_t line_no, const std::string& msg) {
    errors.push_back(source + " line " + std::to_string(line_no) + ": " + msg);
  };

  enum class Section { none, corpus, recognizer, assign, policy, masking };
  Section section = Section::none;
  RecognizerSpec* current = nullptr;

  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;

    if (t.front() == '[') {
      if (t.back() != ']') {
        fail(line_no, "unterminated section header");
        section = Section::none;
        continue;
      }
      std::string header = trim(t.substr(1, t.size() - 2));
      current = nullptr;
      if (header == "corpus") section = Section::corpus;
      else if (header == "assign") section = Section::assign;
      else if (header == "policy") section = Section::policy;
      else if (header == "masking") section = Section::masking;
      else if (header.rfind("recognizer", 0) == 0) {
        std::string name = trim(header.substr(10));
        if (name.empty()) {
          fail(line_no, "recognizer section needs a name: [recognizer NAME]");
          section = Section::none;
          continue;
        }
        if (cfg.find_recognizer(name)) {
          fail(line_no, "duplicate recognizer '" + name + "'");
          section = Section::none;
          continue;
        }
        RecognizerSpec spec;
        spec.name = name;
        cfg.recognizers.push_back(std::move(spec));
        current = &cfg.recognizers.back();
        section = Section::recognizer;
      } else {
        fail(line_no, "unknown section [" + header + "]");
        section = Section::none;
      }
      continue;
    }

    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      fail(line_no, "expected key = value");
      continue;
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      fail(line_no, "empty key");
      continue;
    }

    switch (section) {
      case Section::none:
        fail(line_no, "key '" + key + "' outside any section");
        break;

      case Section::corpus:
        if (key == "format") {
          if (value != "standoff" && value != "bio")
            fail(line_no, "format must be standoff or bio, got '" + value + "'");
          else cfg.corpus.format = value;
        } else if (key == "text_dir") cfg.corpus.text_dir = value;
        else if (key == "ann_dir") cfg.corpus.ann_dir = value;
        else if (key == "bio_file") cfg.corpus.bio_file = value;
        else if (key == "split") {
          try {
            cfg.split = std::stod(value);
          } catch (const std::exception&) {
            fail(line_no, "split is not a number: '" + value + "'");
          }
        } else fail(line_no, "unknown corpus key '" + key + "'");
        break;

      case Section::recognizer: {
        RecognizerSpec& r = *current;
        if (key == "type") {
          if (value != "crf" && value != "rules")
            fail(line_no, "recognizer type must be crf or rules, got '" + value + "'");
          else r.type = value;
        } else if (key == "use_gazetteers") {
          if (!config_detail::parse_bool(value, r.use_gazetteers))
            fail(line_no, "use_gazetteers is not a boolean: '" + value + "'");
        } else if (key == "gazetteer") {
          size_t colon = value.find(':');
          if (colon == std::string::npos || colon == 0 || colon + 1 >= value.size())
            fail(line_no, "gazetteer must be NAME:PATH, got '" + value + "'");
          else
            r.gazetteer_files.emplace_back(trim(value.substr(0, colon)),
                                           trim(value.substr(colon + 1)));
        } else if (key == "l2_lambda" || key == "grad_tolerance") {
          try {
            double d = std::stod(value);
            if (key == "l2_lambda") r.train.l2_lambda = d;
            else r.train.grad_tolerance = d;
          } catch (const std::exception&) {
            fail(line_no, key + " is not a number: '" + value + "'");
          }
        } else if (key == "max_epochs") {
          try {
            r.train.max_epochs = std::stoi(value);
          } catch (const std::exception&) {
            fail(line_no, "max_epochs is not an integer: '" + value + "'");
          }
        } else if (key == "patterns") r.patterns_file = value;
        else if (key == "model") r.model_path = value;
        else fail(line_no, "unknown recognizer key '" + key + "'");
        break;
      }

      case Section::assign:
        if (key == "default") {
          cfg.default_recognizer = value;
        } else {
          auto cls = parse_entity_class(key);
          if (!cls) fail(line_no, "unknown entity class '" + key + "'");
          else cfg.assignment[*cls] = value;
        }
        break;

      case Section::policy: {
        auto cls = parse_entity_class(key);
        if (!cls) {
          fail(line_no, "unknown entity class '" + key + "'");
          break;
        }
        std::string problem;
        auto action =
            config_detail::parse_action(value, cfg.masking_options, problem);
        if (!action) fail(line_no, "policy for " + key + ": " + problem);
        else cfg.policy.set(*cls, std::move(*action));
        break;
      }

      case Section::masking:
        if (key == "seed") {
          try {
            cfg.seed = std::stoull(value);
            cfg.seed_set = true;
          } catch (const std::exception&) {
            fail(line_no, "seed is not an integer: '" + value + "'");
          }
        } else if (key == "first_names") cfg.first_names_file = value;
        else if (key == "last_names") cfg.last_names_file = value;
        else if (key == "professions") cfg.professions_file = value;
        else cfg.masking_options[key] = value;
        break;
    }
  }

  // cross-field validation, still collecting everything
  if (!(cfg.split > 0.0 && cfg.split < 1.0))
    errors.push_back(source + ": split must be in (0,1), got " +
                     std::to_string(cfg.split));
  if (cfg.corpus.format == "standoff" && cfg.corpus.bio_file.empty() &&
      (cfg.corpus.text_dir.empty() != cfg.corpus.ann_dir.empty()))
    errors.push_back(source +
                     ": standoff corpus needs both text_dir and ann_dir");

  if (cfg.recognizers.empty()) {
    RecognizerSpec rules;
    rules.name = "rules";
    rules.type = "rules";
    cfg.recognizers.push_back(std::move(rules));
  }
  if (cfg.default_recognizer.empty())
    cfg.default_recognizer = cfg.recognizers.front().name;
  if (!cfg.find_recognizer(cfg.default_recognizer))
    errors.push_back(source + ": default recognizer '" + cfg.default_recognizer +
                     "' is not defined");
  for (const auto& [cls, name] : cfg.assignment)
    if (!cfg.find_recognizer(name))
      errors.push_back(source + ": " + std::string(to_string(cls)) +
                       " assigned to undefined recognizer '" + name + "'");

  bool any_mask = false;
  for (EntityClass cls : all_entity_classes())
    if (cfg.policy.action_for(cls).kind == MaskAction::Kind::mask) any_mask = true;
  if (any_mask && !cfg.seed_set)
    errors.push_back(source +
                     ": policy uses mask actions but [masking] seed is not set");

  if (!errors.empty()) {
    std::string all;
    for (const std::string& e : errors) all += e + "\n";
    throw error("configuration invalid:\n" + all);
  }
  return cfg;
}

}  // namespace deid

#endif  // DEID_CONFIG_HPP
