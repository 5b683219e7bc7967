#include "pitchside/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pitchside/communities.hpp"
#include "pitchside/errors.hpp"
#include "pitchside/export.hpp"
#include "pitchside/graph.hpp"
#include "pitchside/ingest.hpp"

namespace pitchside {
namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// --- config reading -------------------------------------------------------

class Section {
 public:
  Section(const json* node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_->is_object()) throw ConfigError("config: " + where() + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    const json& v = (*node_)[key];
    const std::string field = join(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("config: " + field + " must be a boolean");
      out = v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("config: " + field + " must be a string");
      out = v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("config: " + field + " must be a number");
      out = v.get<T>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_unsigned()) {
        throw ConfigError("config: " + field + " must be a non-negative integer");
      }
      const auto raw = v.get<std::uint64_t>();
      if (raw > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
        throw ConfigError("config: " + field + " is out of range");
      }
      out = static_cast<T>(raw);
    } else {
      static_assert(sizeof(T) == 0, "unsupported config field type");
    }
  }

  template <class T>
  void get(const char* key, std::optional<T>& out) {
    T value{};
    seen_.insert(key);
    if (!node_ || !node_->contains(key) || (*node_)[key].is_null()) return;
    get(key, value);
    out = value;
  }

  Section child(const char* key) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return Section(nullptr, join(key));
    return Section(&(*node_)[key], join(key));
  }

  const json* raw(const char* key) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return nullptr;
    return &(*node_)[key];
  }

  std::string join(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  // Rejects keys that were never asked for.
  void finish() const {
    if (!node_) return;
    for (const auto& [k, v] : node_->items()) {
      if (!seen_.contains(k)) throw ConfigError("config: unknown field " + join(k));
    }
  }

 private:
  std::string where() const { return path_.empty() ? "top level" : path_; }

  const json* node_;
  std::string path_;
  std::set<std::string> seen_;
};

HashtagCategory parse_category(const std::string& s, const std::string& field) {
  for (std::size_t i = 0; i < 4; ++i) {
    const auto c = static_cast<HashtagCategory>(i);
    if (to_string(c) == s) return c;
  }
  throw ConfigError("config: " + field + " must be one of political, football, location, other");
}

void read_projection(Section s, ProjectionConfig& p, std::optional<std::uint64_t>& seed) {
  s.get("min_similarity", p.min_similarity);
  s.get("alpha", p.alpha);
  s.get("permutations", p.permutations);
  s.get("binary", p.binary);
  s.get("seed", seed);
  s.finish();
}

CampaignSpec read_campaign(const json& node, const std::string& path) {
  Section s(&node, path);
  std::string kind;
  s.get("kind", kind);
  if (kind == "hijack") {
    HijackCampaign c;
    s.get("retweets", c.retweets);
    s.get("quotes", c.quotes);
    s.get("audience_affiliation", c.audience_affiliation);
    s.get("repeat_amplifier_retweets", c.repeat_amplifier_retweets);
    s.get("audience_posts", c.audience_posts);
    s.get("domain", c.domain);
    s.finish();
    return c;
  }
  if (kind == "activism") {
    ActivismCampaign c;
    s.get("cluster_size", c.cluster_size);
    s.get("retweet_rate", c.retweet_rate);
    s.get("tweets_per_member", c.tweets_per_member);
    s.get("roots", c.roots);
    s.finish();
    return c;
  }
  if (kind == "megaphone") {
    MegaphoneCampaign c;
    s.get("mentions", c.mentions);
    s.get("replies", c.replies);
    s.get("quotes", c.quotes);
    s.get("topical_posts", c.topical_posts);
    s.get("own_posts", c.own_posts);
    s.finish();
    return c;
  }
  throw ConfigError("config: " + path + ".kind must be hijack, activism or megaphone");
}

ojson campaign_json(const CampaignSpec& spec) {
  return std::visit(
      [](const auto& c) -> ojson {
        using T = std::decay_t<decltype(c)>;
        ojson j;
        if constexpr (std::is_same_v<T, HijackCampaign>) {
          j["kind"] = "hijack";
          j["retweets"] = c.retweets;
          j["quotes"] = c.quotes;
          j["audience_affiliation"] = c.audience_affiliation;
          j["repeat_amplifier_retweets"] = c.repeat_amplifier_retweets;
          j["audience_posts"] = c.audience_posts;
          j["domain"] = c.domain;
        } else if constexpr (std::is_same_v<T, ActivismCampaign>) {
          j["kind"] = "activism";
          j["cluster_size"] = c.cluster_size;
          j["retweet_rate"] = c.retweet_rate;
          j["tweets_per_member"] = c.tweets_per_member;
          j["roots"] = c.roots;
        } else {
          j["kind"] = "megaphone";
          j["mentions"] = c.mentions;
          j["replies"] = c.replies;
          j["quotes"] = c.quotes;
          j["topical_posts"] = c.topical_posts;
          j["own_posts"] = c.own_posts;
        }
        return j;
      },
      spec);
}

std::string_view weighting_name(PathWeighting w) {
  return w == PathWeighting::unweighted ? "unweighted" : "inverse_weight";
}

// --- stage plumbing ---------------------------------------------------------

constexpr std::array<std::string_view, 8> kStageNames = {
    "synth", "extract", "networks", "metrics", "communities", "themes", "influence", "report"};

// File whose presence marks a stage as completed.
fs::path sentinel(Stage stage) {
  switch (stage) {
    case Stage::synth: return "synth/corpus.jsonl";
    case Stage::extract: return "extract/political.jsonl";
    case Stage::networks: return "networks/networks.json";
    case Stage::metrics: return "metrics/global.json";
    case Stage::communities: return "communities/summary.json";
    case Stage::themes: return "themes/themes.json";
    case Stage::influence: return "influence/findings.jsonl";
    case Stage::report: return "report.json";
  }
  return {};
}

struct NetworkInfo {
  std::string name;
  bool directed;
  bool hashtags;  // hashtag nodes (categories apply)
};

const std::vector<NetworkInfo>& network_catalog() {
  static const std::vector<NetworkInfo> nets = {
      {"hashtag_cooccurrence", false, true},
      {"hashtag_cooccurrence_filtered", false, true},
      {"interaction", true, false},
      {"retweet", true, false},
      {"quote", true, false},
      {"reply", true, false},
      {"mention", true, false},
      {"user_similarity", false, false},
      {"hashtag_similarity", false, true},
  };
  return nets;
}

const std::vector<std::string>& interaction_networks() {
  static const std::vector<std::string> n = {"interaction", "retweet", "quote", "reply",
                                             "mention"};
  return n;
}

const std::vector<std::string>& partitioned_networks() {
  static const std::vector<std::string> n = {"hashtag_cooccurrence", "interaction",
                                             "user_similarity", "hashtag_similarity",
                                             "retweet"};
  return n;
}

class OutputLock {
 public:
  explicit OutputLock(const fs::path& dir) : path_(dir / ".pitchside.lock") {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      throw IoError("output directory " + dir.string() +
                    " is locked by another pipeline run (remove " + path_.string() +
                    " if that run is gone)");
    }
  }
  ~OutputLock() {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

ojson parse_ordered(const std::string& text, const std::string& what) {
  ojson j = ojson::parse(text, nullptr, false);
  if (j.is_discarded()) throw CorpusFormatError("malformed JSON artifact " + what);
  return j;
}

std::vector<TweetRecord> parse_records(const std::string& text) {
  std::istringstream in(text);
  return parse_stream(in).records;
}

struct ThemeState {
  std::vector<CompositionVector> compositions;
  ThemeAssignment themes;
  EngagementResult engagement;
};

}  // namespace

std::string_view to_string(Stage stage) { return kStageNames[static_cast<std::size_t>(stage)]; }

std::optional<Stage> parse_stage(std::string_view name) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i) {
    if (kStageNames[i] == name) return static_cast<Stage>(i);
  }
  return std::nullopt;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::uint64_t PipelineConfig::effective_synth_seed() const { return synth_seed.value_or(seed); }
std::uint64_t PipelineConfig::effective_user_projection_seed() const {
  return user_projection_seed.value_or(seed + 101);
}
std::uint64_t PipelineConfig::effective_hashtag_projection_seed() const {
  return hashtag_projection_seed.value_or(seed + 202);
}
std::uint64_t PipelineConfig::effective_louvain_seed() const {
  return louvain_seed.value_or(seed + 303);
}

void PipelineConfig::validate() const {
  auto must_exist = [](const std::string& path, const char* field) {
    if (!path.empty() && !fs::exists(path)) {
      throw ConfigError(std::string("config: inputs.") + field + ": no such file '" + path + "'");
    }
  };
  must_exist(inputs.corpus, "corpus");
  must_exist(inputs.lexicon, "lexicon");
  must_exist(inputs.profiles, "profiles");
  must_exist(inputs.annotations, "annotations");
  must_exist(inputs.affiliations, "affiliations");
  if (!uses_synthetic_input() && inputs.lexicon.empty()) {
    throw ConfigError("config: inputs.lexicon: required when inputs.corpus is set");
  }
  if (output_dir.empty()) throw ConfigError("config: output_dir: must not be empty");
  if (uses_synthetic_input()) {
    try {
      synth.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  auto check_projection = [](const ProjectionConfig& p, const char* name) {
    try {
      p.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("config: networks.") + name + ": " + e.what());
    }
  };
  check_projection(user_projection, "user_projection");
  check_projection(hashtag_projection, "hashtag_projection");
  if (matrix.min_hashtag_uses == 0) {
    throw ConfigError("config: networks.min_hashtag_uses: must be > 0");
  }
  if (matrix.min_user_tweets == 0) {
    throw ConfigError("config: networks.min_user_tweets: must be > 0");
  }
  if (!(cooccurrence_min_weight >= 0.0)) {
    throw ConfigError("config: networks.cooccurrence_min_weight: must be >= 0");
  }
  if (top_k == 0) throw ConfigError("config: metrics.top_k: must be > 0");
  if (!(pagerank.damping > 0.0 && pagerank.damping < 1.0)) {
    throw ConfigError("config: metrics.pagerank.damping: must be in (0, 1)");
  }
  if (!(pagerank.tolerance > 0.0)) {
    throw ConfigError("config: metrics.pagerank.tolerance: must be > 0");
  }
  if (pagerank.max_iters == 0) {
    throw ConfigError("config: metrics.pagerank.max_iters: must be > 0");
  }
  if (!(resolution > 0.0)) throw ConfigError("config: communities.resolution: must be > 0");
  if (theme_clusters == 0) throw ConfigError("config: themes.clusters: must be > 0");
  try {
    detectors.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config: influence: ") + e.what());
  }
}

PipelineConfig parse_pipeline_config(std::string_view text, const fs::path& base_dir) {
  json root = json::parse(text.begin(), text.end(), nullptr, false, /*ignore_comments=*/true);
  if (root.is_discarded()) throw ConfigError("config: not valid JSON");
  PipelineConfig c;
  Section top(&root, "");

  auto in = top.child("inputs");
  in.get("corpus", c.inputs.corpus);
  in.get("lexicon", c.inputs.lexicon);
  in.get("profiles", c.inputs.profiles);
  in.get("annotations", c.inputs.annotations);
  in.get("affiliations", c.inputs.affiliations);
  in.finish();
  if (!base_dir.empty()) {
    for (auto* p : {&c.inputs.corpus, &c.inputs.lexicon, &c.inputs.profiles,
                    &c.inputs.annotations, &c.inputs.affiliations}) {
      if (!p->empty() && fs::path(*p).is_relative()) *p = (base_dir / *p).lexically_normal().string();
    }
  }
  top.get("output_dir", c.output_dir);
  top.get("seed", c.seed);

  auto sy = top.child("synth");
  sy.get("seed", c.synth_seed);
  sy.get("n_users", c.synth.n_users);
  sy.get("n_tweets", c.synth.n_tweets);
  sy.get("n_hashtags", c.synth.n_hashtags);
  sy.get("vocab_overlap", c.synth.vocab_overlap);
  {
    auto km = sy.child("kind_mix");
    km.get("original", c.synth.kind_mix.original);
    km.get("retweet", c.synth.kind_mix.retweet);
    km.get("quote", c.synth.kind_mix.quote);
    km.get("reply", c.synth.kind_mix.reply);
    km.finish();
  }
  if (const json* comms = sy.raw("communities")) {
    if (!comms->is_array()) throw ConfigError("config: synth.communities must be an array");
    for (std::size_t i = 0; i < comms->size(); ++i) {
      const std::string path = "synth.communities[" + std::to_string(i) + "]";
      Section s(&(*comms)[i], path);
      CommunitySpec spec;
      std::string focus = "other";
      s.get("size", spec.size);
      s.get("political_fraction", spec.political_fraction);
      s.get("focus", focus);
      spec.focus = parse_category(focus, path + ".focus");
      if (const json* vocab = s.raw("vocabulary")) {
        if (!vocab->is_array()) throw ConfigError("config: " + path + ".vocabulary must be an array");
        for (const auto& v : *vocab) {
          if (!v.is_string()) throw ConfigError("config: " + path + ".vocabulary must hold strings");
          spec.vocabulary.push_back(v.get<std::string>());
        }
      }
      s.finish();
      c.synth.community_spec.push_back(std::move(spec));
    }
  }
  if (const json* camps = sy.raw("campaigns")) {
    if (!camps->is_array()) throw ConfigError("config: synth.campaigns must be an array");
    for (std::size_t i = 0; i < camps->size(); ++i) {
      c.synth.campaigns.push_back(
          read_campaign((*camps)[i], "synth.campaigns[" + std::to_string(i) + "]"));
    }
  }
  sy.finish();

  auto ex = top.child("extract");
  ex.get("summary_top_n", c.summary_top_n);
  ex.finish();

  auto nw = top.child("networks");
  nw.get("min_hashtag_uses", c.matrix.min_hashtag_uses);
  nw.get("min_user_tweets", c.matrix.min_user_tweets);
  nw.get("cooccurrence_min_weight", c.cooccurrence_min_weight);
  nw.get("core_k", c.core_k);
  read_projection(nw.child("user_projection"), c.user_projection, c.user_projection_seed);
  read_projection(nw.child("hashtag_projection"), c.hashtag_projection,
                  c.hashtag_projection_seed);
  nw.finish();

  auto me = top.child("metrics");
  me.get("top_k", c.top_k);
  {
    auto pr = me.child("pagerank");
    pr.get("damping", c.pagerank.damping);
    pr.get("tolerance", c.pagerank.tolerance);
    pr.get("max_iters", c.pagerank.max_iters);
    pr.finish();
  }
  std::string weighting(weighting_name(c.betweenness_weighting));
  me.get("betweenness_weighting", weighting);
  if (weighting == "unweighted") {
    c.betweenness_weighting = PathWeighting::unweighted;
  } else if (weighting == "inverse_weight") {
    c.betweenness_weighting = PathWeighting::inverse_weight;
  } else {
    throw ConfigError("config: metrics.betweenness_weighting must be unweighted or inverse_weight");
  }
  me.finish();

  auto co = top.child("communities");
  co.get("resolution", c.resolution);
  co.get("seed", c.louvain_seed);
  co.finish();

  auto th = top.child("themes");
  th.get("clusters", c.theme_clusters);
  th.get("min_community_size", c.min_community_size);
  th.finish();

  auto inf = top.child("influence");
  {
    auto h = inf.child("hijack");
    h.get("min_engagement", c.detectors.hijack.min_engagement);
    h.get("max_affiliation_ratio", c.detectors.hijack.max_affiliation_ratio);
    h.finish();
    auto a = inf.child("activism");
    a.get("min_cluster_size", c.detectors.activism.min_cluster_size);
    a.get("min_retweet_rate_lift", c.detectors.activism.min_retweet_rate_lift);
    a.finish();
    auto m = inf.child("megaphone");
    m.get("top_k_in_degree", c.detectors.megaphone.top_k_in_degree);
    m.get("max_topical_posts", c.detectors.megaphone.max_topical_posts);
    m.finish();
  }
  inf.finish();
  top.finish();
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError&) {
    throw ConfigError("config: cannot read " + path.string());
  }
  return parse_pipeline_config(text, path.parent_path());
}

std::string resolved_config_json(const PipelineConfig& c) {
  ojson j;
  j["inputs"] = {{"corpus", c.inputs.corpus},
                 {"lexicon", c.inputs.lexicon},
                 {"profiles", c.inputs.profiles},
                 {"annotations", c.inputs.annotations},
                 {"affiliations", c.inputs.affiliations}};
  j["seed"] = c.seed;
  ojson synth;
  synth["seed"] = c.effective_synth_seed();
  synth["n_users"] = c.synth.n_users;
  synth["n_tweets"] = c.synth.n_tweets;
  synth["n_hashtags"] = c.synth.n_hashtags;
  synth["vocab_overlap"] = c.synth.vocab_overlap;
  synth["kind_mix"] = {{"original", c.synth.kind_mix.original},
                       {"retweet", c.synth.kind_mix.retweet},
                       {"quote", c.synth.kind_mix.quote},
                       {"reply", c.synth.kind_mix.reply}};
  ojson comms = ojson::array();
  for (const auto& s : c.synth.community_spec) {
    comms.push_back({{"size", s.size},
                     {"political_fraction", s.political_fraction},
                     {"focus", std::string(to_string(s.focus))},
                     {"vocabulary", s.vocabulary}});
  }
  synth["communities"] = std::move(comms);
  ojson camps = ojson::array();
  for (const auto& s : c.synth.campaigns) camps.push_back(campaign_json(s));
  synth["campaigns"] = std::move(camps);
  j["synth"] = std::move(synth);
  j["extract"] = {{"summary_top_n", c.summary_top_n}};
  auto projection = [](const ProjectionConfig& p, std::uint64_t seed) {
    ojson o;
    o["min_similarity"] = p.min_similarity;
    o["alpha"] = p.alpha;
    o["permutations"] = p.permutations;
    o["binary"] = p.binary;
    o["seed"] = seed;
    return o;
  };
  ojson nw;
  nw["min_hashtag_uses"] = c.matrix.min_hashtag_uses;
  nw["min_user_tweets"] = c.matrix.min_user_tweets;
  nw["cooccurrence_min_weight"] = c.cooccurrence_min_weight;
  nw["core_k"] = c.core_k;
  nw["user_projection"] = projection(c.user_projection, c.effective_user_projection_seed());
  nw["hashtag_projection"] =
      projection(c.hashtag_projection, c.effective_hashtag_projection_seed());
  j["networks"] = std::move(nw);
  ojson me;
  me["top_k"] = c.top_k;
  me["pagerank"] = {{"damping", c.pagerank.damping},
                    {"tolerance", c.pagerank.tolerance},
                    {"max_iters", c.pagerank.max_iters}};
  me["betweenness_weighting"] = std::string(weighting_name(c.betweenness_weighting));
  j["metrics"] = std::move(me);
  j["communities"] = {{"resolution", c.resolution}, {"seed", c.effective_louvain_seed()}};
  j["themes"] = {{"clusters", c.theme_clusters}, {"min_community_size", c.min_community_size}};
  ojson inf;
  inf["hijack"] = {{"min_engagement", c.detectors.hijack.min_engagement},
                   {"max_affiliation_ratio", c.detectors.hijack.max_affiliation_ratio}};
  inf["activism"] = {{"min_cluster_size", c.detectors.activism.min_cluster_size},
                     {"min_retweet_rate_lift", c.detectors.activism.min_retweet_rate_lift}};
  inf["megaphone"] = {{"top_k_in_degree", c.detectors.megaphone.top_k_in_degree},
                      {"max_topical_posts", c.detectors.megaphone.max_topical_posts}};
  j["influence"] = std::move(inf);
  return j.dump(2) + "\n";
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const PrerequisiteError*>(&error)) return 3;
  if (dynamic_cast<const ConfigError*>(&error)) return 1;
  return 2;
}

// --- pipeline ----------------------------------------------------------------

Pipeline::Pipeline(PipelineConfig config, std::ostream* log)
    : config_(std::move(config)), log_(log) {
  config_.validate();
}

fs::path Pipeline::corpus_path() const {
  return config_.uses_synthetic_input() ? out_dir() / "synth/corpus.jsonl"
                                        : fs::path(config_.inputs.corpus);
}
fs::path Pipeline::lexicon_path() const {
  if (!config_.inputs.lexicon.empty()) return config_.inputs.lexicon;
  return out_dir() / "synth/lexicon.json";
}
std::optional<fs::path> Pipeline::profiles_path() const {
  if (!config_.inputs.profiles.empty()) return fs::path(config_.inputs.profiles);
  if (config_.uses_synthetic_input()) return out_dir() / "synth/profiles.jsonl";
  return std::nullopt;
}
std::optional<fs::path> Pipeline::annotations_path() const {
  if (!config_.inputs.annotations.empty()) return fs::path(config_.inputs.annotations);
  if (config_.uses_synthetic_input()) return out_dir() / "synth/annotations.json";
  return std::nullopt;
}
std::optional<fs::path> Pipeline::affiliations_path() const {
  if (!config_.inputs.affiliations.empty()) return fs::path(config_.inputs.affiliations);
  if (config_.uses_synthetic_input()) return out_dir() / "synth/affiliations.json";
  return std::nullopt;
}

std::vector<Stage> Pipeline::prerequisites(Stage stage) const {
  switch (stage) {
    case Stage::synth: return {};
    case Stage::extract:
      return config_.uses_synthetic_input() ? std::vector<Stage>{Stage::synth}
                                            : std::vector<Stage>{};
    case Stage::networks: return {Stage::extract};
    case Stage::metrics: return {Stage::networks};
    case Stage::communities: return {Stage::networks};
    case Stage::themes: return {Stage::communities};
    case Stage::influence: return {Stage::themes};
    case Stage::report: return {Stage::metrics, Stage::influence};
  }
  return {};
}

bool Pipeline::completed(Stage stage) const { return fs::exists(out_dir() / sentinel(stage)); }

void Pipeline::run_stage(Stage stage) { run_locked({stage}); }

void Pipeline::run_with_prerequisites(Stage stage) {
  std::vector<Stage> plan;
  std::set<Stage> planned;
  auto visit = [&](auto&& self, Stage s, bool force) -> void {
    if (planned.contains(s)) return;
    if (!force && completed(s)) return;
    for (Stage p : prerequisites(s)) self(self, p, false);
    planned.insert(s);
    plan.push_back(s);
  };
  visit(visit, stage, true);
  run_locked(plan);
}

void Pipeline::run_all() {
  std::vector<Stage> plan;
  for (Stage s : kAllStages) {
    if (s == Stage::synth && !config_.uses_synthetic_input()) continue;
    plan.push_back(s);
  }
  run_locked(plan);
}

void Pipeline::run_locked(const std::vector<Stage>& stages) {
  OutputLock lock(out_dir());
  for (Stage s : stages) {
    // Stages earlier in this plan satisfy later prerequisites as they finish.
    for (Stage p : prerequisites(s)) {
      if (!completed(p)) throw PrerequisiteError(std::string(to_string(s)), std::string(to_string(p)));
    }
    execute(s);
  }
}

void Pipeline::execute(Stage stage) {
  inputs_.clear();
  artifacts_.clear();
  const auto started = std::chrono::steady_clock::now();
  switch (stage) {
    case Stage::synth: stage_synth(); break;
    case Stage::extract: stage_extract(); break;
    case Stage::networks: stage_networks(); break;
    case Stage::metrics: stage_metrics(); break;
    case Stage::communities: stage_communities(); break;
    case Stage::themes: stage_themes(); break;
    case Stage::influence: stage_influence(); break;
    case Stage::report: stage_report(); break;
  }
  record_manifest(stage);
  if (log_) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - started)
                        .count();
    *log_ << "[" << to_string(stage) << "] " << artifacts_.size() << " artifacts in " << ms
          << " ms\n";
  }
}

std::string Pipeline::read_input(const fs::path& path) {
  auto text = read_file(path);
  const auto rel = path.lexically_relative(out_dir());
  const bool inside = !rel.empty() && *rel.begin() != "..";
  inputs_.emplace_back(inside ? rel.generic_string() : path.generic_string(),
                       hex64(fnv1a64(text)));
  return text;
}

void Pipeline::write_artifact(const fs::path& relative, std::string_view content) {
  write_file_atomic(out_dir() / relative, content);
  artifacts_.emplace_back(relative.generic_string(), hex64(fnv1a64(content)));
}

void Pipeline::record_manifest(Stage stage) {
  const auto path = out_dir() / "manifest.json";
  const std::string resolved = resolved_config_json(config_);
  const std::string hash = hex64(fnv1a64(resolved));
  ojson manifest;
  if (fs::exists(path)) {
    manifest = ojson::parse(read_file(path), nullptr, false);
    if (manifest.is_discarded() || !manifest.is_object() ||
        manifest.value("config_hash", std::string()) != hash) {
      manifest = ojson();
    }
  }
  if (manifest.is_null()) {
    manifest["tool"] = "pitchside";
    manifest["version"] = std::string(kVersion);
    manifest["config_hash"] = hash;
    manifest["seeds"] = {{"master", config_.seed},
                         {"synth", config_.effective_synth_seed()},
                         {"user_projection", config_.effective_user_projection_seed()},
                         {"hashtag_projection", config_.effective_hashtag_projection_seed()},
                         {"louvain", config_.effective_louvain_seed()}};
    manifest["config"] = ojson::parse(resolved);
    manifest["stages"] = ojson::object();
  }
  ojson entry;
  ojson ins = ojson::object(), outs = ojson::object();
  for (const auto& [p, h] : inputs_) ins[p] = h;
  for (const auto& [p, h] : artifacts_) outs[p] = h;
  entry["inputs"] = std::move(ins);
  entry["artifacts"] = std::move(outs);
  // Keep stage entries in pipeline order regardless of run order.
  ojson stages = ojson::object();
  for (Stage s : kAllStages) {
    const std::string name(to_string(s));
    if (s == stage) {
      stages[name] = entry;
    } else if (manifest["stages"].contains(name)) {
      stages[name] = manifest["stages"][name];
    }
  }
  manifest["stages"] = std::move(stages);
  write_file_atomic(path, manifest.dump(2) + "\n");
}

void Pipeline::stage_synth() {
  SynthConfig sc = config_.synth;
  sc.seed = config_.effective_synth_seed();
  const auto corpus = generate_corpus(sc);
  std::ostringstream records;
  write_corpus(records, corpus.records);
  write_artifact("synth/corpus.jsonl", records.str());
  std::string profiles;
  for (const auto& p : corpus.profiles) profiles += serialize_profile(p) + "\n";
  write_artifact("synth/profiles.jsonl", profiles);
  write_artifact("synth/lexicon.json", lexicon_to_json(corpus.lexicon));
  write_artifact("synth/annotations.json", annotations_to_json(corpus.annotations));
  write_artifact("synth/affiliations.json", affiliations_to_json(corpus.affiliations));
  write_artifact("synth/truth.json", truth_to_json(corpus.truth));
}

void Pipeline::stage_extract() {
  std::istringstream in(read_input(corpus_path()));
  const auto parsed = parse_stream(in);
  const auto lexicon = parse_lexicon(read_input(lexicon_path()));
  const auto ex = extract_political_subset(parsed.records, lexicon);

  std::ostringstream political;
  write_corpus(political, ex.records);
  write_artifact("extract/political.jsonl", political.str());
  write_artifact("extract/summary.json",
                 summary_to_json(summarize(ex.records, &lexicon, config_.summary_top_n)));
  write_artifact("extract/corpus_summary.json",
                 summary_to_json(summarize(parsed.records, &lexicon, config_.summary_top_n)));
  ojson info;
  info["input_records"] = parsed.records.size();
  info["malformed_lines"] = parsed.malformed_lines;
  info["political"] = ex.political;
  info["context_parents"] = ex.context_parents;
  info["missing_parents"] = ex.missing_parents;
  write_artifact("extract/extraction.json", info.dump(2) + "\n");
}

void Pipeline::stage_networks() {
  const auto records = parse_records(read_input(out_dir() / "extract/political.jsonl"));
  NodeAnnotations annotations;
  if (auto p = annotations_path()) annotations = parse_annotations(read_input(*p));
  ProfileIndex profiles;
  if (auto p = profiles_path()) {
    std::istringstream in(read_input(*p));
    profiles = index_profiles(parse_profiles(in));
  }

  std::map<std::string, WeightedGraph> graphs;
  ojson info = ojson::object();
  graphs["hashtag_cooccurrence"] = build_hashtag_cooccurrence(records);
  graphs["hashtag_cooccurrence_filtered"] =
      filter_by_edge_weight(graphs["hashtag_cooccurrence"], config_.cooccurrence_min_weight);
  std::map<std::string, ojson> extra;
  {
    auto net = build_interaction_network(records);
    extra["interaction"] = {{"missing_target", net.missing_target},
                            {"self_interactions", net.self_interactions}};
    graphs["interaction"] = std::move(net.graph);
  }
  for (auto kind : kAllInteractionKinds) {
    auto net = build_interaction_network(records, kind);
    const std::string name(to_string(kind));
    extra[name] = {{"missing_target", net.missing_target},
                   {"self_interactions", net.self_interactions}};
    graphs[name] = std::move(net.graph);
  }
  const auto matrix = build_user_hashtag_matrix(records, config_.matrix);
  write_artifact("networks/matrix.csv", matrix_csv(matrix));
  for (auto [name, base, seed] :
       {std::tuple{"user_similarity", config_.user_projection,
                   config_.effective_user_projection_seed()},
        std::tuple{"hashtag_similarity", config_.hashtag_projection,
                   config_.effective_hashtag_projection_seed()}}) {
    base.rng_seed = seed;
    Projection proj;
    if (matrix.empty()) {
      proj.graph = GraphBuilder(false).build();
    } else {
      proj = project_similarity(matrix, base);
    }
    extra[name] = {{"candidates", proj.candidates}, {"retained", proj.retained.size()}};
    graphs[name] = std::move(proj.graph);
  }

  for (const auto& net : network_catalog()) {
    const auto& g = graphs.at(net.name);
    write_artifact("networks/" + net.name + ".edges.csv", edges_csv(g));
    NodeAttributes attributes;
    attributes.hashtags = net.hashtags;
    if (net.hashtags) {
      attributes.categories = &annotations;
    } else {
      attributes.profiles = &profiles;
    }
    write_artifact("networks/" + net.name + ".nodes.csv", nodes_csv(g, attributes));
    ojson e;
    e["directed"] = net.directed;
    e["node_kind"] = net.hashtags ? "hashtag" : "user";
    e["nodes"] = g.node_count();
    e["edges"] = g.edge_count();
    if (extra.contains(net.name)) {
      for (const auto& [k, v] : extra[net.name].items()) e[k] = v;
    }
    info[net.name] = std::move(e);
  }
  ojson matrix_info;
  matrix_info["users"] = matrix.users.size();
  matrix_info["hashtags"] = matrix.hashtags.size();
  matrix_info["total"] = matrix.total();
  info["user_hashtag_matrix"] = std::move(matrix_info);
  write_artifact("networks/networks.json", info.dump(2) + "\n");
}

namespace {

WeightedGraph load_network(const std::string& name, bool directed,
                           const std::function<std::string(const fs::path&)>& read) {
  return graph_from_csv(read("networks/" + name + ".edges.csv"),
                        read("networks/" + name + ".nodes.csv"), directed);
}

ojson ranked_json(const std::vector<RankedNode>& ranked) {
  ojson arr = ojson::array();
  for (const auto& r : ranked) {
    arr.push_back({{"rank", r.rank},
                   {"node", r.node},
                   {"score", r.score},
                   {"actor_type", std::string(to_string(r.actor_type))}});
  }
  return arr;
}

ThemeState compute_themes(const Partition& hashtag_part, const Partition& user_part,
                          const BipartiteMatrix& matrix, const NodeAnnotations& annotations,
                          std::size_t clusters, std::size_t min_size) {
  ThemeState st;
  st.compositions = community_composition(hashtag_part, annotations);
  if (!st.compositions.empty()) {
    st.themes = ward_cluster(st.compositions, std::min(clusters, st.compositions.size()));
  }
  st.engagement = engagement_profile(user_part, hashtag_part, matrix, st.themes.theme_of, min_size);
  return st;
}

}  // namespace

void Pipeline::stage_metrics() {
  auto read = [this](const fs::path& rel) { return read_input(out_dir() / rel); };
  ProfileIndex profiles;
  if (auto p = profiles_path()) {
    std::istringstream in(read_input(*p));
    profiles = index_profiles(parse_profiles(in));
  }
  std::map<std::string, GlobalMetrics> global;
  std::map<std::string, WeightedGraph> graphs;
  for (const auto& net : network_catalog()) {
    graphs[net.name] = load_network(net.name, net.directed, read);
    global[net.name] = global_properties(graphs[net.name]);
  }
  write_artifact("metrics/global.json", global_metrics_json(global));

  ojson top = ojson::object();
  std::map<CentralityMetric, std::map<std::string, std::vector<RankedNode>>> by_metric;
  for (const auto& name : interaction_networks()) {
    const auto& g = graphs.at(name);
    ojson per = ojson::object();
    for (auto metric : kAllCentralityMetrics) {
      CentralityTable table;
      bool converged = true;
      if (metric == CentralityMetric::betweenness) {
        table = {metric, name, g.ids(), betweenness(g, config_.betweenness_weighting)};
      } else {
        try {
          table = compute_centrality(g, metric, name, config_.pagerank);
        } catch (const PageRankNotConverged& e) {
          table = {metric, name, g.ids(), e.last_iterate()};
          converged = false;
        }
      }
      write_artifact("metrics/centrality/" + name + "." + std::string(to_string(metric)) + ".csv",
                     centrality_csv(table, profiles));
      auto ranked = top_influencers(table, profiles, config_.top_k);
      ojson m;
      m["top"] = ranked_json(ranked);
      if (metric == CentralityMetric::pagerank) m["converged"] = converged;
      per[std::string(to_string(metric))] = std::move(m);
      by_metric[metric][name] = std::move(ranked);
    }
    top[name] = std::move(per);
  }
  write_artifact("metrics/top_influencers.json", top.dump(2) + "\n");

  ojson actors = ojson::object();
  for (const auto& [metric, rankings] : by_metric) {
    ojson table = ojson::object();
    for (const auto& [type, counts] : actor_type_table(rankings)) {
      ojson row = ojson::object();
      for (const auto& name : interaction_networks()) {
        auto it = counts.find(name);
        row[name] = it == counts.end() ? 0 : it->second;
      }
      table[std::string(to_string(type))] = std::move(row);
    }
    actors[std::string(to_string(metric))] = std::move(table);
  }
  write_artifact("metrics/actor_types.json", actors.dump(2) + "\n");

  const auto& full = graphs.at("hashtag_cooccurrence");
  const auto& filtered = graphs.at("hashtag_cooccurrence_filtered");
  const auto core = k_core(full, config_.core_k);
  const auto filtered_core = k_core(filtered, config_.core_k);
  const auto numbers = core_numbers(full);
  ojson hc;
  hc["edge_weight_threshold"] = config_.cooccurrence_min_weight;
  hc["filtered_nodes"] = filtered.node_count();
  hc["filtered_edges"] = filtered.edge_count();
  hc["k"] = config_.core_k;
  hc["core_size"] = core.node_count();
  hc["core_nodes"] = core.ids();
  hc["filtered_core_size"] = filtered_core.node_count();
  hc["max_core_number"] = numbers.empty() ? 0 : *std::max_element(numbers.begin(), numbers.end());
  write_artifact("metrics/hashtag_core.json", hc.dump(2) + "\n");
}

void Pipeline::stage_communities() {
  auto read = [this](const fs::path& rel) { return read_input(out_dir() / rel); };
  ojson summary = ojson::object();
  for (const auto& name : partitioned_networks()) {
    const auto it = std::find_if(network_catalog().begin(), network_catalog().end(),
                                 [&](const auto& n) { return n.name == name; });
    const auto g = load_network(name, it->directed, read);
    const auto part = louvain(g, config_.resolution, config_.effective_louvain_seed());
    write_artifact("communities/" + name + ".partition.csv", partition_csv(part));
    write_artifact("communities/" + name + ".nodes.csv",
                   attach_partition(read("networks/" + name + ".nodes.csv"), part));
    ojson e;
    e["community_count"] = part.community_count;
    e["modularity"] = part.modularity;
    e["resolution"] = part.resolution;
    e["seed"] = part.seed;
    e["pass_modularity"] = part.pass_modularity;
    e["sizes"] = part.community_sizes();
    summary[name] = std::move(e);
  }
  write_artifact("communities/summary.json", summary.dump(2) + "\n");
}

void Pipeline::stage_themes() {
  NodeAnnotations annotations;
  if (auto p = annotations_path()) annotations = parse_annotations(read_input(*p));
  const auto hashtag_part =
      partition_from_csv(read_input(out_dir() / "communities/hashtag_similarity.partition.csv"));
  const auto user_part =
      partition_from_csv(read_input(out_dir() / "communities/user_similarity.partition.csv"));
  const auto matrix = matrix_from_csv(read_input(out_dir() / "networks/matrix.csv"));
  const auto st = compute_themes(hashtag_part, user_part, matrix, annotations,
                                 config_.theme_clusters, config_.min_community_size);
  write_artifact("themes/themes.json", themes_json(st.compositions, st.themes));
  write_artifact("themes/engagement.json", engagement_json(st.engagement));
}

void Pipeline::stage_influence() {
  auto read = [this](const fs::path& rel) { return read_input(out_dir() / rel); };
  const auto full = parse_records(read_input(corpus_path()));
  const auto political = parse_records(read("extract/political.jsonl"));
  NodeAnnotations annotations;
  if (auto p = annotations_path()) annotations = parse_annotations(read_input(*p));
  ProfileIndex profiles;
  if (auto p = profiles_path()) {
    std::istringstream in(read_input(*p));
    profiles = index_profiles(parse_profiles(in));
  }
  std::vector<AffiliationProfile> affiliations;
  if (auto p = affiliations_path()) affiliations = parse_affiliations(read_input(*p));

  const auto user_part = partition_from_csv(read("communities/user_similarity.partition.csv"));
  const auto hashtag_part =
      partition_from_csv(read("communities/hashtag_similarity.partition.csv"));
  const auto retweet_part = partition_from_csv(read("communities/retweet.partition.csv"));
  const auto matrix = matrix_from_csv(read("networks/matrix.csv"));
  const auto st = compute_themes(hashtag_part, user_part, matrix, annotations,
                                 config_.theme_clusters, config_.min_community_size);

  // User communities whose strongest engagement is with political themes.
  HijackContext context;
  const CorpusIndex full_index(full);
  const CorpusIndex index(political);
  context.reference = &full_index;
  context.user_partition = &user_part;
  for (const auto& profile : st.engagement.profiles) {
    std::map<Theme, std::uint64_t> by_theme;
    for (const auto& s : profile.sectors) {
      if (s.theme) by_theme[*s.theme] += s.count;
    }
    auto best = std::max_element(by_theme.begin(), by_theme.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    if (best != by_theme.end() && best->first == Theme::political) {
      context.political_communities.push_back(profile.user_community);
    }
  }

  auto graph = [&](const char* name) { return load_network(name, true, read); };
  const auto retweet = graph("retweet");
  const auto quote = graph("quote");
  const auto reply = graph("reply");
  const auto mention = graph("mention");

  auto findings = detect_hijacks(index, annotations, affiliations, profiles,
                                 config_.detectors.hijack, context);
  auto by_score = [](std::vector<InfluenceFinding>& v) {
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      return a.score != b.score ? a.score > b.score : a.subject < b.subject;
    });
  };
  by_score(findings);
  auto activism = detect_activist_clusters(retweet, retweet_part, index, config_.detectors.activism);
  by_score(activism);
  auto megaphones = detect_megaphones({&quote, &reply, &mention}, full_index, annotations,
                                      config_.detectors.megaphone, &user_part);
  by_score(megaphones);
  ojson counts;
  counts["hijack"] = findings.size();
  counts["embedded_activism"] = activism.size();
  counts["megaphone"] = megaphones.size();
  counts["political_user_communities"] = context.political_communities;
  findings.insert(findings.end(), std::make_move_iterator(activism.begin()),
                  std::make_move_iterator(activism.end()));
  findings.insert(findings.end(), std::make_move_iterator(megaphones.begin()),
                  std::make_move_iterator(megaphones.end()));
  write_artifact("influence/findings.jsonl", findings_jsonl(findings));
  write_artifact("influence/summary.json", counts.dump(2) + "\n");
}

void Pipeline::stage_report() {
  auto read_json = [this](const char* rel) {
    return parse_ordered(read_input(out_dir() / rel), rel);
  };
  ojson report;
  report["version"] = std::string(kVersion);
  report["config_hash"] = hex64(fnv1a64(resolved_config_json(config_)));
  report["extraction"] = read_json("extract/extraction.json");
  report["summary"] = read_json("extract/summary.json");
  report["networks"] = read_json("networks/networks.json");
  report["global_metrics"] = read_json("metrics/global.json");
  report["centrality"] = read_json("metrics/top_influencers.json");
  report["actor_types"] = read_json("metrics/actor_types.json");
  report["hashtag_core"] = read_json("metrics/hashtag_core.json");
  report["communities"] = read_json("communities/summary.json");
  ojson partitions = ojson::object();
  for (const auto& name : partitioned_networks()) {
    const auto part = partition_from_csv(
        read_input(out_dir() / ("communities/" + name + ".partition.csv")));
    ojson assignment = ojson::object();
    for (std::size_t i = 0; i < part.nodes.size(); ++i) assignment[part.nodes[i]] = part.assignment[i];
    partitions[name] = std::move(assignment);
  }
  report["partitions"] = std::move(partitions);
  report["themes"] = read_json("themes/themes.json");
  report["engagement"] = read_json("themes/engagement.json");
  ojson findings = ojson::array();
  std::istringstream lines(read_input(out_dir() / "influence/findings.jsonl"));
  for (std::string line; std::getline(lines, line);) {
    if (!line.empty()) findings.push_back(parse_ordered(line, "influence/findings.jsonl"));
  }
  report["findings"] = std::move(findings);
  write_artifact("report.json", report.dump(2) + "\n");
}

}  // namespace pitchside
