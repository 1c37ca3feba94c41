// corpusgen -- regenerates the bundled synthetic corpus, gazetteers and
// word lists. The checked-in files under data/ are exactly the output of
// this tool with its defaults.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "deid/io.hpp"
#include "deid/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw deid::error("cannot create " + path.string());
  for (const std::string& l : lines) out << l << '\n';
}

void write_standoff(const fs::path& dir, const deid::Document& doc) {
  fs::create_directories(dir / "text");
  fs::create_directories(dir / "ann");
  deid::io_detail::write_file(dir / "text" / (doc.id + ".txt"), doc.text);
  std::ofstream ann(dir / "ann" / (doc.id + ".ann"),
                    std::ios::binary | std::ios::trunc);
  for (const deid::AnnotatedSpan& s : doc.gold)
    ann << s.start << '\t' << s.end << '\t' << deid::to_string(s.entity_class)
        << '\t' << s.text << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regenerate the bundled synthetic corpus and gazetteers"};
  std::string out_dir = "data";
  uint64_t seed = 2024;
  size_t docs = 320;
  size_t standoff_samples = 4;
  size_t input_samples = 3;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--docs", docs, "number of documents");

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path root(out_dir);

    for (const char* name : {"first_names", "last_names", "cities", "countries"})
      write_lines(root / "gazetteers" / (std::string(name) + ".txt"),
                  deid::synthetic::gazetteer_entries(name));
    write_lines(root / "wordlists" / "professions.txt",
                deid::synthetic::professions());

    deid::synthetic::CorpusConfig cfg;
    cfg.seed = seed;
    cfg.documents = docs;
    std::vector<deid::Document> corpus = deid::synthetic::make_corpus(cfg);

    fs::create_directories(root / "synthetic");
    deid::write_bio_file(root / "synthetic" / "corpus.bio", corpus);

    for (size_t i = 0; i < std::min(standoff_samples, corpus.size()); ++i)
      write_standoff(root / "synthetic" / "standoff", corpus[i]);

    fs::create_directories(root / "sample_input");
    for (size_t i = 0; i < std::min(input_samples, corpus.size()); ++i)
      deid::io_detail::write_file(
          root / "sample_input" / (corpus[i].id + ".txt"), corpus[i].text);

    size_t tokens = 0, spans = 0;
    for (const deid::Document& d : corpus) {
      tokens += d.tokens.size();
      spans += d.gold.size();
    }
    std::cerr << "wrote " << corpus.size() << " documents (" << tokens
              << " tokens, " << spans << " spans) under " << root.string()
              << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
