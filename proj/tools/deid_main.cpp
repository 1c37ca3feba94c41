// deid -- de-identification pipeline CLI.
//
//   deid train      --config conf [--seed N]
//   deid evaluate   --config conf [--seed N] [--tsv]
//   deid deidentify --config conf --input DIR --output DIR
//                   [--seed N] [--workers N] [--include-originals]
//   deid inspect    --model FILE [--top-k N]
//
// Exit code 0 iff no errors; diagnostics go to stderr, data to files or
// stdout.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "deid/config.hpp"
#include "deid/pipeline.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  uint64_t seed = 0;
  bool seed_given = false;
  std::string format;
};

deid::PipelineConfig load_config(const GlobalArgs& args,
                                 std::filesystem::path& base) {
  deid::PipelineConfig cfg;
  if (args.config_path.empty()) {
    cfg = deid::default_pipeline_config();
    base = std::filesystem::current_path();
  } else {
    std::ifstream in(args.config_path);
    if (!in) throw deid::error("cannot open config " + args.config_path);
    cfg = deid::load_pipeline_config(in, args.config_path);
    base = std::filesystem::absolute(args.config_path).parent_path();
  }
  if (args.seed_given) {
    cfg.seed = args.seed;
    cfg.seed_set = true;
  }
  if (!args.format.empty()) cfg.corpus.format = args.format;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clinical text de-identification pipeline"};
  app.require_subcommand(1);

  GlobalArgs global;
  app.add_option("--config", global.config_path, "pipeline config file")
      ->expected(1);
  auto* seed_opt =
      app.add_option("--seed", global.seed, "override the configured seed");
  app.add_option("--format", global.format, "corpus format override")
      ->check(CLI::IsMember({"standoff", "bio"}));

  auto* train = app.add_subcommand("train", "train configured recognizers");
  auto* evaluate =
      app.add_subcommand("evaluate", "score recognizers on the held-out split");
  bool tsv = false;
  evaluate->add_flag("--tsv", tsv, "machine-readable report lines");

  auto* deidentify =
      app.add_subcommand("deidentify", "mask every document in a directory");
  std::string input_dir, output_dir;
  unsigned workers = 1;
  bool include_originals = false;
  deidentify->add_option("--input", input_dir, "directory of .txt documents")
      ->required();
  deidentify->add_option("--output", output_dir, "output directory")->required();
  deidentify->add_option("--workers", workers, "worker threads");
  deidentify->add_flag("--include-originals", include_originals,
                       "write original span text into the audit log");

  auto* inspect = app.add_subcommand("inspect", "summarize a trained model");
  std::string model_path;
  int top_k = 10;
  inspect->add_option("--model", model_path, "model file")->required();
  inspect->add_option("--top-k", top_k, "features listed per class");

  CLI11_PARSE(app, argc, argv);
  global.seed_given = seed_opt->count() > 0;

  try {
    if (inspect->parsed())
      return deid::cmd_inspect(model_path, top_k, std::cout);

    std::filesystem::path base;
    deid::PipelineConfig cfg = load_config(global, base);

    if (train->parsed()) return deid::cmd_train(cfg, base, std::cout, std::cerr);
    if (evaluate->parsed())
      return deid::cmd_evaluate(cfg, base, tsv, std::cout, std::cerr);
    if (deidentify->parsed()) {
      deid::cmd_deidentify(cfg, base, input_dir, output_dir, workers,
                           include_originals, std::cout, std::cerr);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
