#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pitchside/graphs.hpp"
#include "pitchside/influence.hpp"
#include "pitchside/metrics.hpp"
#include "pitchside/synth.hpp"

namespace pitchside {

inline constexpr std::string_view kVersion = "0.3.0";

enum class Stage { synth, extract, networks, metrics, communities, themes, influence, report };
inline constexpr std::array<Stage, 8> kAllStages = {
    Stage::synth,       Stage::extract, Stage::networks,  Stage::metrics,
    Stage::communities, Stage::themes,  Stage::influence, Stage::report};

std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

struct PipelineConfig {
  // Empty corpus path: the pipeline runs on the synth stage's output, and the
  // other inputs default to the generated lexicon, profiles, annotations and
  // affiliations.
  struct Inputs {
    std::string corpus;
    std::string lexicon;
    std::string profiles;
    std::string annotations;
    std::string affiliations;
  } inputs;
  std::string output_dir = "pitchside-out";

  // Master seed. Stage seeds not given explicitly derive from it.
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> synth_seed;
  std::optional<std::uint64_t> user_projection_seed;
  std::optional<std::uint64_t> hashtag_projection_seed;
  std::optional<std::uint64_t> louvain_seed;

  SynthConfig synth;
  std::size_t summary_top_n = 15;
  MatrixFilter matrix;
  ProjectionConfig user_projection = ProjectionConfig::for_users();
  ProjectionConfig hashtag_projection = ProjectionConfig::for_hashtags();
  double cooccurrence_min_weight = 25.0;
  std::size_t core_k = 25;
  std::size_t top_k = 20;
  PageRankOptions pagerank;
  PathWeighting betweenness_weighting = PathWeighting::unweighted;
  double resolution = 1.0;
  std::size_t theme_clusters = 4;
  std::size_t min_community_size = 10;
  DetectorConfig detectors;

  bool uses_synthetic_input() const { return inputs.corpus.empty(); }

  // Effective seeds after defaulting.
  std::uint64_t effective_synth_seed() const;
  std::uint64_t effective_user_projection_seed() const;
  std::uint64_t effective_hashtag_projection_seed() const;
  std::uint64_t effective_louvain_seed() const;

  // Field-level checks; throws ConfigError naming the offending field.
  void validate() const;
};

// JSON with comments. Missing fields keep their defaults; unknown fields are
// rejected. Relative input paths resolve against `base_dir` when given.
PipelineConfig parse_pipeline_config(std::string_view text,
                                     const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Canonical form of every setting that affects artifacts (the output
// directory is left out), with defaulted seeds filled in.
std::string resolved_config_json(const PipelineConfig& config);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

class Pipeline {
 public:
  // `log` receives one progress line per stage; may be null.
  explicit Pipeline(PipelineConfig config, std::ostream* log = nullptr);

  const PipelineConfig& config() const { return config_; }
  std::filesystem::path out_dir() const { return config_.output_dir; }

  // Stages `stage` directly depends on under this configuration.
  std::vector<Stage> prerequisites(Stage stage) const;
  bool completed(Stage stage) const;

  // Runs one stage. Throws PrerequisiteError when an upstream stage has not
  // produced its artifacts.
  void run_stage(Stage stage);
  // Runs missing upstream stages first, then `stage`.
  void run_with_prerequisites(Stage stage);
  // Every stage in order (synth only for synthetic input).
  void run_all();

 private:
  void run_locked(const std::vector<Stage>& stages);
  void execute(Stage stage);
  void record_manifest(Stage stage);
  // Reads an input file and remembers its hash for the manifest.
  std::string read_input(const std::filesystem::path& path);
  void write_artifact(const std::filesystem::path& relative, std::string_view content);

  void stage_synth();
  void stage_extract();
  void stage_networks();
  void stage_metrics();
  void stage_communities();
  void stage_themes();
  void stage_influence();
  void stage_report();

  std::filesystem::path corpus_path() const;
  std::filesystem::path lexicon_path() const;
  std::optional<std::filesystem::path> profiles_path() const;
  std::optional<std::filesystem::path> annotations_path() const;
  std::optional<std::filesystem::path> affiliations_path() const;

  PipelineConfig config_;
  std::ostream* log_;
  std::vector<std::pair<std::string, std::string>> inputs_;     // path, hash
  std::vector<std::pair<std::string, std::string>> artifacts_;  // path, hash
};

// Process exit status for an exception escaping a pipeline run: 1 for
// configuration problems, 3 for missing prerequisites, 2 otherwise.
int exit_code_for(const std::exception& error);

}  // namespace pitchside
