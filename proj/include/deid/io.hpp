// io.hpp -- corpus readers (standoff, BIO), masked-output and audit
// writers, and the versioned binary model container.
//
// Text is UTF-8 only and every offset on disk is a Unicode scalar-value
// index, not a byte index; masking splices depend on that.

#ifndef DEID_IO_HPP
#define DEID_IO_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "deid/core.hpp"
#include "deid/crf.hpp"
#include "deid/masking.hpp"
#include "deid/tokenize.hpp"

namespace deid {

namespace io_detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw error("read failed for " + path.string());
  return buf.str();
}

inline void write_file(const std::filesystem::path& path,
                       std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error("cannot create " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw error("write failed for " + path.string());
}

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (true) {
    size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

inline std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// TSV cells must stay single-line; audit originals can contain anything.
inline std::string escape_cell(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Standoff reader: <id>.txt + <id>.ann, ann lines start<TAB>end<TAB>CLASS<TAB>surface
// ---------------------------------------------------------------------------

// Annotation lines that disagree with the text are rejected, not repaired:
// silent repair could hide annotation corruption in PII data.
inline Document read_standoff_document(const std::string& id,
                                       const std::string& text,
                                       std::istream& ann,
                                       const std::string& ann_name) {
  Document doc;
  doc.id = id;
  doc.text = text;
  std::u32string utext = uni::decode_utf8(text);

  std::string line;
  size_t line_no = 0;
  while (std::getline(ann, line)) {
    ++line_no;
    line = io_detail::strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const std::string where = ann_name + " line " + std::to_string(line_no);

    std::vector<std::string> cells = io_detail::split_tabs(line);
    if (cells.size() != 4)
      throw error(where + ": expected start<TAB>end<TAB>CLASS<TAB>surface, got " +
                  std::to_string(cells.size()) + " fields");
    AnnotatedSpan span;
    try {
      span.start = std::stoull(cells[0]);
      span.end = std::stoull(cells[1]);
    } catch (const std::exception&) {
      throw error(where + ": offsets are not integers");
    }
    auto cls = parse_entity_class(cells[2]);
    if (!cls) throw error(where + ": unknown class '" + cells[2] + "'");
    span.entity_class = *cls;
    if (span.start >= span.end || span.end > utext.size())
      throw error(where + ": offsets [" + cells[0] + "," + cells[1] +
                  ") out of bounds for text of length " +
                  std::to_string(utext.size()));
    std::string slice =
        uni::encode_utf8(utext.substr(span.start, span.end - span.start));
    if (slice != cells[3])
      throw error(where + ": surface '" + cells[3] + "' does not match text '" +
                  slice + "'");
    span.text = std::move(slice);
    doc.gold.push_back(std::move(span));
  }
  std::sort(doc.gold.begin(), doc.gold.end(),
            [](const AnnotatedSpan& a, const AnnotatedSpan& b) {
              return a.start < b.start;
            });
  check_non_overlapping(doc.gold, "document " + id);
  return doc;
}

inline std::vector<Document> read_standoff(const std::filesystem::path& text_dir,
                                           const std::filesystem::path& ann_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(text_dir))
    throw error("not a directory: " + text_dir.string());
  if (!fs::is_directory(ann_dir))
    throw error("not a directory: " + ann_dir.string());

  std::vector<fs::path> texts;
  for (const auto& entry : fs::directory_iterator(text_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      texts.push_back(entry.path());
  std::sort(texts.begin(), texts.end());

  std::vector<Document> docs;
  for (const fs::path& txt : texts) {
    const std::string id = txt.stem().string();
    fs::path ann_path = ann_dir / (id + ".ann");
    if (!fs::exists(ann_path))
      throw error("missing annotation file " + ann_path.string() + " for " +
                  txt.string());
    std::string text = io_detail::read_file(txt);
    std::ifstream ann(ann_path);
    if (!ann) throw error("cannot open " + ann_path.string());
    docs.push_back(
        read_standoff_document(id, text, ann, ann_path.filename().string()));
  }
  return docs;
}

// Gold-less input (the deidentify path): every *.txt in a directory.
inline std::vector<Document> read_text_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw error("not a directory: " + dir.string());
  std::vector<fs::path> texts;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      texts.push_back(entry.path());
  std::sort(texts.begin(), texts.end());

  std::vector<Document> docs;
  for (const fs::path& txt : texts) {
    Document doc;
    doc.id = txt.stem().string();
    doc.text = io_detail::read_file(txt);
    uni::decode_utf8(doc.text);  // validate encoding up front
    docs.push_back(std::move(doc));
  }
  return docs;
}

// ---------------------------------------------------------------------------
// BIO interchange: token<TAB>tag, blank = sentence break, double blank =
// document break; text reconstructed by single-space joining.
// ---------------------------------------------------------------------------

inline std::vector<Document> read_bio(std::istream& in,
                                      const std::string& source_name = "bio") {
  std::vector<Document> docs;

  std::vector<std::vector<std::pair<std::string, Tag>>> sentences;
  std::vector<std::pair<std::string, Tag>> sentence;

  auto flush_sentence = [&] {
    if (!sentence.empty()) {
      sentences.push_back(std::move(sentence));
      sentence.clear();
    }
  };
  auto flush_document = [&] {
    flush_sentence();
    if (sentences.empty()) return;
    Document doc;
    std::u32string text;
    size_t sentence_index = 0;
    std::vector<Tag> tags;
    for (const auto& sent : sentences) {
      for (const auto& [tok, tag] : sent) {
        if (!text.empty()) text += U' ';
        Token t;
        t.start = text.size();
        std::u32string utok = uni::decode_utf8(tok);
        text += utok;
        t.end = text.size();
        t.text = tok;
        t.sentence_index = sentence_index;
        doc.tokens.push_back(std::move(t));
        tags.push_back(tag);
      }
      ++sentence_index;
    }
    doc.text = uni::encode_utf8(text);
    doc.gold = tags_to_spans(doc.tokens, tags, text);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06zu", docs.size() + 1);
    doc.id = source_name + "-" + buf;
    docs.push_back(std::move(doc));
    sentences.clear();
  };

  std::string line;
  size_t line_no = 0;
  int blanks = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = io_detail::strip_cr(line);
    if (line.empty()) {
      if (++blanks >= 2) flush_document();
      else flush_sentence();
      continue;
    }
    blanks = 0;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw error(source_name + " line " + std::to_string(line_no) +
                  ": expected token<TAB>tag");
    std::string tok = line.substr(0, tab);
    auto tag = parse_tag(line.substr(tab + 1));
    if (!tag)
      throw error(source_name + " line " + std::to_string(line_no) +
                  ": malformed tag '" + line.substr(tab + 1) + "'");
    sentence.emplace_back(std::move(tok), *tag);
  }
  flush_document();
  return docs;
}

inline std::vector<Document> read_bio_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open " + path.string());
  return read_bio(in, path.stem().string());
}

inline void write_bio(std::ostream& out, std::span<const Document> docs) {
  bool first_doc = true;
  for (const Document& doc : docs) {
    if (!first_doc) out << "\n\n";  // double blank = document break
    first_doc = false;
    std::vector<Tag> tags = spans_to_tags(doc.tokens, doc.gold);
    size_t prev_sentence = doc.tokens.empty() ? 0 : doc.tokens[0].sentence_index;
    for (size_t i = 0; i < doc.tokens.size(); ++i) {
      if (doc.tokens[i].sentence_index != prev_sentence) {
        out << "\n";  // single blank = sentence break
        prev_sentence = doc.tokens[i].sentence_index;
      }
      out << doc.tokens[i].text << '\t' << to_string(tags[i]) << '\n';
    }
  }
}

inline void write_bio_file(const std::filesystem::path& path,
                           std::span<const Document> docs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error("cannot create " + path.string());
  write_bio(out, docs);
  out.flush();
  if (!out) throw error("write failed for " + path.string());
}

// One entry per line; blank lines and "#" comments skipped.
inline std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    line = io_detail::strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Masked output and audit log
// ---------------------------------------------------------------------------

inline void write_masked(const std::filesystem::path& out_dir,
                         const std::string& doc_id,
                         const std::string& masked_text) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw error("cannot create " + out_dir.string() + ": " + ec.message());
  io_detail::write_file(out_dir / (doc_id + ".txt"), masked_text);
}

// One tab-separated record per event: doc_id, start, end, class, action,
// masker, original_text, replacement. The audit log is itself PII, so the
// original column is "-" unless the operator opts in.
inline void write_audit(std::ostream& out, const std::string& doc_id,
                        std::span<const MaskEvent> events,
                        bool include_originals) {
  for (const MaskEvent& e : events) {
    out << doc_id << '\t' << e.span.start << '\t' << e.span.end << '\t'
        << to_string(e.span.entity_class) << '\t' << e.action << '\t'
        << (e.masker.empty() ? "-" : e.masker) << '\t'
        << (include_originals ? io_detail::escape_cell(e.span.text)
                              : std::string("-"))
        << '\t' << io_detail::escape_cell(e.replacement) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Model container: versioned binary, byte-deterministic
// ---------------------------------------------------------------------------

namespace io_detail {

constexpr char kModelMagic[8] = {'D', 'E', 'I', 'D', 'C', 'R', 'F', '\n'};

inline void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}
inline void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}
inline void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<uint64_t>(v));
}
inline void put_str(std::string& out, std::string_view s) {
  put_u64(out, s.size());
  out.append(s);
}

struct ByteReader {
  const std::string& data;
  size_t pos = 0;
  const std::string& source;

  void need(size_t n) const {
    if (pos + n > data.size())
      throw error("corrupt model file " + source + ": truncated at byte " +
                  std::to_string(pos));
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= uint32_t(static_cast<unsigned char>(data[pos++])) << (8 * i);
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= uint64_t(static_cast<unsigned char>(data[pos++])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    uint64_t n = u64();
    need(n);
    std::string s = data.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace io_detail

inline std::string serialize_model(const CrfModel& model) {
  std::string out;
  out.append(io_detail::kModelMagic, sizeof(io_detail::kModelMagic));
  io_detail::put_u32(out, CrfModel::kFormatVersion);

  io_detail::put_u64(out, model.num_labels());
  for (const Tag& t : model.labels()) {
    out.push_back(static_cast<char>(t.position));
    out.push_back(static_cast<char>(t.entity_class));
  }
  io_detail::put_u64(out, model.num_features());
  for (const std::string& name : model.feature_index().names())
    io_detail::put_str(out, name);
  io_detail::put_f64(out, model.l2_lambda());
  io_detail::put_str(out, model.config_hash());
  io_detail::put_u64(out, model.params().size());
  for (double w : model.params()) io_detail::put_f64(out, w);
  return out;
}

inline CrfModel deserialize_model(const std::string& bytes,
                                  const std::string& source) {
  if (bytes.size() < sizeof(io_detail::kModelMagic) ||
      bytes.compare(0, sizeof(io_detail::kModelMagic), io_detail::kModelMagic,
                    sizeof(io_detail::kModelMagic)) != 0)
    throw error(source + " is not a model file (bad magic)");
  io_detail::ByteReader r{bytes, sizeof(io_detail::kModelMagic), source};

  uint32_t version = r.u32();
  if (version != CrfModel::kFormatVersion)
    throw error(source + ": model format version " + std::to_string(version) +
                " unsupported (expected " +
                std::to_string(CrfModel::kFormatVersion) + ")");

  uint64_t label_count = r.u64();
  if (label_count == 0 || label_count > 1000)
    throw error("corrupt model file " + source + ": label count " +
                std::to_string(label_count));
  std::vector<Tag> labels;
  labels.reserve(label_count);
  for (uint64_t i = 0; i < label_count; ++i) {
    r.need(2);
    auto pos = static_cast<uint8_t>(bytes[r.pos++]);
    auto cls = static_cast<uint8_t>(bytes[r.pos++]);
    if (pos > 2 || cls >= kNumEntityClasses)
      throw error("corrupt model file " + source + ": bad label entry " +
                  std::to_string(i));
    Tag t;
    t.position = static_cast<Tag::Position>(pos);
    t.entity_class = static_cast<EntityClass>(cls);
    labels.push_back(t);
  }

  uint64_t feature_count = r.u64();
  FeatureIndex index;
  for (uint64_t i = 0; i < feature_count; ++i) index.add(r.str());
  if (index.size() != feature_count)
    throw error("corrupt model file " + source + ": duplicate feature names");
  index.freeze();

  double lambda = r.f64();
  std::string config_hash = r.str();

  CrfModel model(std::move(labels), std::move(index), lambda,
                 std::move(config_hash));
  uint64_t param_count = r.u64();
  if (param_count != model.param_count())
    throw error("corrupt model file " + source + ": parameter count " +
                std::to_string(param_count) + " does not match shape " +
                std::to_string(model.param_count()));
  for (uint64_t i = 0; i < param_count; ++i) {
    double w = r.f64();
    if (!std::isfinite(w))
      throw error("corrupt model file " + source + ": non-finite weight at " +
                  std::to_string(i));
    model.params()[i] = w;
  }
  if (r.pos != bytes.size())
    throw error("corrupt model file " + source + ": trailing bytes");
  return model;
}

inline void save_model(const CrfModel& model, const std::filesystem::path& path) {
  io_detail::write_file(path, serialize_model(model));
}

inline CrfModel load_model(const std::filesystem::path& path) {
  return deserialize_model(io_detail::read_file(path), path.string());
}

}  // namespace deid

#endif  // DEID_IO_HPP
