#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "deckforge/pipeline.hpp"
#include "deckforge/rouge.hpp"

namespace df = deckforge;
namespace pl = deckforge::pipeline;

namespace {

// Flag name (without dashes) -> value, for flags given on the command line.
struct FlagSet {
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void add(CLI::App* app, const std::string& name, const std::string& help) {
    auto* opt = app->add_option("--" + name, values[name], help);
    options.emplace_back(name, opt);
  }

  std::map<std::string, std::string> given() const {
    std::map<std::string, std::string> out;
    for (const auto& [name, opt] : options) {
      if (opt->count() > 0) out[name] = values.at(name);
    }
    return out;
  }
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (char c : s) {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else if (c != ' ') {
      item.push_back(c);
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

int run_build(const FlagSet& flags, const std::string& config_path) {
  std::map<std::string, std::string> settings;
  if (!config_path.empty()) settings = pl::read_config_file(config_path);
  for (const auto& [k, v] : flags.given()) settings[k] = v;

  pl::PipelineConfig cfg;
  for (const auto& [k, v] : settings) pl::apply_setting(cfg, k, v);
  if (cfg.input.empty()) throw df::Error(df::ErrorCode::InvalidConfig, "--input is required");

  const auto report = pl::run(cfg);
  std::cout << "sections " << report.sections << ", sentences " << report.sentences << ", slides "
            << report.slides << ", audio files " << report.audio_files << "\n";
  for (const auto& path : report.written) std::cout << "wrote " << (cfg.out_dir / path).string() << "\n";
  std::cout << "manifest " << report.manifest.string() << "\n";
  for (const auto& t : report.timings) {
    std::fprintf(stderr, "timing %-10s %.3f s\n", t.stage.c_str(), t.seconds);
  }
  if (report.audio_failures.empty()) return pl::kExitOk;

  int code = pl::kExitStage;
  for (const auto& f : report.audio_failures) {
    std::cerr << "audio: slide " << f.slide << ": " << f.message << "\n";
    if (f.code == df::ErrorCode::ServiceUnreachable) code = pl::kExitUnreachable;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deckforge: research paper to slide deck with narration"};
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build", "Summarize a paper into a slide deck");
  FlagSet flags;
  flags.add(build, "input", "Paper to convert");
  flags.add(build, "format", "plain | markdown | latex-min (default: from extension)");
  flags.add(build, "strategy", "centroid | textrank | regression");
  flags.add(build, "ratio", "Fraction of each section's sentences to keep");
  flags.add(build, "out", "Output directory");
  flags.add(build, "emit", "Comma list of md, json, pptx");
  flags.add(build, "audio", "off | stub | service");
  flags.add(build, "endpoint", "Synthesis service URL (audio=service)");
  flags.add(build, "voice-ref", "Reference WAV for voice enrollment (audio=service)");
  flags.add(build, "base-url", "Prefix for slide hyperlinks back to the source");
  flags.add(build, "seed", "Random seed");
  flags.add(build, "model", "Regression model written by 'train'");
  flags.add(build, "embeddings", "External sentence embeddings (sidecar text)");
  flags.add(build, "min-bullets", "Minimum bullets per slide");
  flags.add(build, "max-bullets", "Maximum bullets per slide");
  flags.add(build, "gl-iterations", "Griffin-Lim iterations per slide");
  std::string config_path;
  build->add_option("--config", config_path, "key=value file; flags override it");

  auto* eval = app.add_subcommand("eval", "Score strategies against reference summaries");
  std::string corpus, strategies = "centroid,textrank,random", eval_out = "eval_out";
  std::uint64_t eval_seed = 42;
  bool published = false;
  eval->add_option("--corpus", corpus, "Directory of X.md|X.txt|X.tex + X.ref.txt pairs");
  eval->add_option("--strategies", strategies, "Comma list of centroid, textrank, regression, random")
      ->capture_default_str();
  eval->add_option("--out", eval_out, "Report directory")->capture_default_str();
  eval->add_option("--seed", eval_seed, "Random seed")->capture_default_str();
  eval->add_flag("--published", published, "Print the published reference tables and exit");

  auto* train = app.add_subcommand("train", "Fit the regression strategy on a corpus");
  std::string train_corpus, model_out;
  train->add_option("--corpus", train_corpus, "Training corpus directory")->required();
  train->add_option("--out", model_out, "Model file to write")->required();

  auto* verify = app.add_subcommand("verify", "Check an output directory against its manifest");
  std::string verify_dir;
  verify->add_option("dir", verify_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pl::kExitInput;
  }

  try {
    if (*build) return run_build(flags, config_path);

    if (*eval) {
      if (published) {
        std::cout << df::rouge::render_tables(df::rouge::published_tables());
        return pl::kExitOk;
      }
      if (corpus.empty()) throw df::Error(df::ErrorCode::InvalidConfig, "--corpus is required");
      pl::EvalOptions opts;
      opts.corpus = corpus;
      opts.strategies = split_list(strategies);
      opts.summary.seed = eval_seed;
      opts.out_dir = eval_out;
      const auto report = pl::eval(opts);
      std::cout << df::rouge::render_tables(report.means);
      for (const auto& p : report.written) std::cerr << "wrote " << p.string() << "\n";
      return pl::kExitOk;
    }

    if (*train) {
      const auto bundle = pl::train(train_corpus);
      std::ofstream out(model_out, std::ios::binary | std::ios::trunc);
      out << pl::format_bundle(bundle);
      if (!out) throw df::Error(df::ErrorCode::IoError, "cannot write " + model_out);
      std::cerr << "wrote " << model_out << "\n";
      return pl::kExitOk;
    }

    if (*verify) {
      pl::verify_manifest(verify_dir);
      std::cout << "ok\n";
      return pl::kExitOk;
    }
  } catch (const df::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pl::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pl::kExitStage;
  }
  return pl::kExitOk;
}
