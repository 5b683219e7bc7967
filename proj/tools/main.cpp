// pitchside: command-line driver for the analysis pipeline.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pitchside/errors.hpp"
#include "pitchside/pipeline.hpp"

namespace {

constexpr const char* kOutEnv = "PITCHSIDE_OUT";

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool stage_only = false;
  bool quiet = false;
};

pitchside::PipelineConfig resolve(const Options& opt) {
  pitchside::PipelineConfig cfg;
  if (!opt.config.empty()) cfg = pitchside::load_pipeline_config(opt.config);
  // Precedence for the output directory: --out, then the environment, then
  // the config file.
  if (const char* env = std::getenv(kOutEnv); env && *env) cfg.output_dir = env;
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  if (opt.seed) cfg.seed = *opt.seed;
  return cfg;
}

int run(const Options& opt, std::optional<pitchside::Stage> stage) {
  try {
    pitchside::Pipeline pipeline(resolve(opt), opt.quiet ? nullptr : &std::cerr);
    if (!stage) {
      pipeline.run_all();
    } else if (opt.stage_only) {
      pipeline.run_stage(*stage);
    } else {
      pipeline.run_with_prerequisites(*stage);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "pitchside: " << e.what() << "\n";
    return pitchside::exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Political discourse analysis pipeline for football-related tweets"};
  app.set_version_flag("--version", std::string(pitchside::kVersion));
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", opt.config, "Pipeline configuration (JSON with comments)")
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--out", opt.out,
                    std::string("Output directory (overrides ") + kOutEnv + " and the config)");
    sub->add_option("--seed", opt.seed, "Master seed; stage seeds derive from it");
    sub->add_flag("-q,--quiet", opt.quiet, "Suppress per-stage progress lines");
  };

  std::optional<pitchside::Stage> selected;
  bool run_everything = false;
  for (pitchside::Stage stage : pitchside::kAllStages) {
    const std::string name(pitchside::to_string(stage));
    auto* sub = app.add_subcommand(name, "Run the " + name + " stage");
    add_common(sub);
    sub->add_flag("--stage-only", opt.stage_only,
                  "Fail instead of running missing upstream stages");
    sub->callback([&selected, stage] { selected = stage; });
  }
  auto* all = app.add_subcommand("all", "Run every stage in order");
  add_common(all);
  all->callback([&run_everything] { run_everything = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return run(opt, run_everything ? std::nullopt : selected);
}
