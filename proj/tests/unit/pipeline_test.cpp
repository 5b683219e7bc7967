#include <gtest/gtest.h>

#include <filesystem>
#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "pitchside/errors.hpp"
#include "pitchside/export.hpp"
#include "pitchside/pipeline.hpp"

using namespace pitchside;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("pitchside-pipeline-" + name);
  fs::remove_all(p);
  return p;
}

PipelineConfig tiny(const fs::path& out) {
  auto c = parse_pipeline_config(R"({"synth": {"n_users": 1500, "n_tweets": 6000}})");
  c.output_dir = out.string();
  c.user_projection.permutations = 200;
  c.hashtag_projection.permutations = 200;
  return c;
}

}  // namespace

TEST(PipelineConfig, UnknownFieldsAreRejected) {
  try {
    parse_pipeline_config(R"({"networks": {"core_kk": 3}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "config: unknown field networks.core_kk");
  }
  EXPECT_THROW(parse_pipeline_config(R"({"seed": -1})"), ConfigError);
  EXPECT_THROW(parse_pipeline_config(R"({"seed": "1"})"), ConfigError);
  EXPECT_THROW(parse_pipeline_config("{"), ConfigError);
}

TEST(PipelineConfig, CommentsAllowed) {
  auto c = parse_pipeline_config("// note\n{ /* inline */ \"seed\": 9 }");
  EXPECT_EQ(c.seed, 9u);
}

TEST(PipelineConfig, ShippedDefaultsMatchBuiltIns) {
  auto shipped = load_pipeline_config(fs::path(PITCHSIDE_SOURCE_DIR) / "config" / "default.jsonc");
  EXPECT_EQ(resolved_config_json(shipped), resolved_config_json(PipelineConfig{}));
}

TEST(PipelineConfig, ShippedPlantedConfigParses) {
  auto c = load_pipeline_config(fs::path(PITCHSIDE_SOURCE_DIR) / "config" / "planted.jsonc");
  EXPECT_EQ(c.synth.campaigns.size(), 3u);
  EXPECT_NO_THROW(c.validate());
}

TEST(PipelineConfig, DerivedSeeds) {
  PipelineConfig c;
  c.seed = 10;
  EXPECT_EQ(c.effective_synth_seed(), 10u);
  EXPECT_EQ(c.effective_user_projection_seed(), 111u);
  EXPECT_EQ(c.effective_hashtag_projection_seed(), 212u);
  EXPECT_EQ(c.effective_louvain_seed(), 313u);
  c.louvain_seed = 4;
  EXPECT_EQ(c.effective_louvain_seed(), 4u);
}

TEST(PipelineConfig, ValidationMessages) {
  auto c = parse_pipeline_config(R"({"metrics": {"pagerank": {"damping": 1.5}}})");
  EXPECT_THROW(c.validate(), ConfigError);
  c = parse_pipeline_config(R"({"inputs": {"corpus": "/nonexistent/x.jsonl"}})");
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Stages, NamesRoundTrip) {
  for (Stage s : kAllStages) EXPECT_EQ(parse_stage(to_string(s)), s);
  EXPECT_FALSE(parse_stage("plot"));
}

TEST(ExitCodes, ByErrorKind) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), 1);
  EXPECT_EQ(exit_code_for(PrerequisiteError("metrics", "networks")), 3);
  EXPECT_EQ(exit_code_for(IoError("x")), 2);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), 2);
}

TEST(Hashing, Fnv1aKnownVectors) {
  EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
}

TEST(Pipeline, MissingPrerequisiteNamesTheStage) {
  const auto out = scratch("prereq");
  Pipeline p(tiny(out));
  try {
    p.run_stage(Stage::metrics);
    FAIL();
  } catch (const PrerequisiteError& e) {
    EXPECT_EQ(e.missing_stage(), "networks");
  }
  EXPECT_FALSE(fs::exists(out / ".pitchside.lock"));
  fs::remove_all(out);
}

TEST(Pipeline, HeldLockRefusesToRun) {
  const auto out = scratch("lock");
  fs::create_directories(out);
  write_file_atomic(out / ".pitchside.lock", "");
  Pipeline p(tiny(out));
  EXPECT_THROW(p.run_stage(Stage::synth), IoError);
  fs::remove_all(out);
}

TEST(Pipeline, SmallEndToEndRun) {
  const auto out = scratch("e2e");
  Pipeline p(tiny(out));
  p.run_all();
  for (Stage s : kAllStages) EXPECT_TRUE(p.completed(s)) << to_string(s);

  auto manifest = nlohmann::json::parse(read_file(out / "manifest.json"));
  std::vector<std::string> stages;
  for (auto it = manifest["stages"].begin(); it != manifest["stages"].end(); ++it) {
    stages.push_back(it.key());
  }
  EXPECT_EQ(stages.size(), kAllStages.size());
  for (const auto& [path, hash] : manifest["stages"]["networks"]["artifacts"].items()) {
    EXPECT_EQ(hex64(fnv1a64(read_file(out / path))), hash) << path;
  }

  auto report = nlohmann::json::parse(read_file(out / "report.json"));
  for (const char* key : {"summary", "networks", "global_metrics", "centrality", "communities",
                          "partitions", "themes", "engagement", "findings"}) {
    EXPECT_TRUE(report.contains(key)) << key;
  }

  const auto nodes = read_file(out / "communities" / "hashtag_similarity.nodes.csv");
  EXPECT_TRUE(nodes.starts_with("id,label,category,community\n"));
  EXPECT_EQ(nodes.find(",\n"), std::string::npos) << "every node has a community";

  // Re-running a single stage is deterministic.
  const auto before = read_file(out / "metrics" / "global.json");
  p.run_stage(Stage::metrics);
  EXPECT_EQ(read_file(out / "metrics" / "global.json"), before);
  fs::remove_all(out);
}
