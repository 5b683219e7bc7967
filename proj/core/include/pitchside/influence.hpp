#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pitchside/communities.hpp"
#include "pitchside/graph.hpp"
#include "pitchside/graphs.hpp"
#include "pitchside/ingest.hpp"

namespace pitchside {

inline constexpr int kFindingSchemaVersion = 1;

struct AffiliationProfile {
  std::string domain;  // normalized hashtag, e.g. "mufc"
  std::vector<std::string> keywords;  // folded
  std::optional<double> baseline_rate;
};

// JSON array of {"domain", "keywords", "baseline_rate"?}.
std::vector<AffiliationProfile> parse_affiliations(std::string_view json_text);
std::vector<AffiliationProfile> load_affiliations(const std::string& path);

struct HijackConfig {
  std::uint32_t min_engagement = 100;
  double max_affiliation_ratio = 0.25;
};

struct ActivismConfig {
  std::uint32_t min_cluster_size = 10;
  double min_retweet_rate_lift = 0.2;
};

struct MegaphoneConfig {
  std::uint32_t top_k_in_degree = 20;
  std::uint32_t max_topical_posts = 5;
};

struct DetectorConfig {
  HijackConfig hijack;
  ActivismConfig activism;
  MegaphoneConfig megaphone;

  void validate() const;  // throws ConfigError
};

enum class FindingKind { hijack, embedded_activism, megaphone };
std::string_view to_string(FindingKind kind);

using EvidenceValue =
    std::variant<std::monostate, bool, std::int64_t, double, std::string,
                 std::vector<std::string>, std::map<std::string, std::int64_t>>;

struct InfluenceFinding {
  FindingKind kind = FindingKind::hijack;
  std::string subject;
  double score = 0.0;
  std::map<std::string, EvidenceValue> evidence;
  std::map<std::string, double> thresholds_used;
};

std::string serialize_finding(const InfluenceFinding& finding);

// Read-only lookups over a corpus shared by all detectors.
class CorpusIndex {
 public:
  explicit CorpusIndex(std::span<const TweetRecord> corpus);

  std::span<const TweetRecord> corpus() const { return corpus_; }
  const TweetRecord* tweet(std::string_view id) const;
  // Positions of retweets / quotes whose target is `tweet_id`.
  std::span<const std::size_t> retweets_of(std::string_view tweet_id) const;
  std::span<const std::size_t> quotes_of(std::string_view tweet_id) const;
  // Positions of tweets authored by `user_id`.
  std::span<const std::size_t> by_user(std::string_view user_id) const;

 private:
  std::span<const TweetRecord> corpus_;
  std::unordered_map<std::string_view, std::size_t> by_id_;
  std::unordered_map<std::string_view, std::vector<std::size_t>> retweets_;
  std::unordered_map<std::string_view, std::vector<std::size_t>> quotes_;
  std::unordered_map<std::string_view, std::vector<std::size_t>> authored_;
};

bool profile_matches(const UserProfile& profile, const AffiliationProfile& affiliation);

// Fraction of distinct retweeters of `tweet_id` with a profile whose
// description matches an affiliation keyword. Retweeters without a profile
// are left out of the denominator; nullopt when none remain.
std::optional<double> audience_affiliation(std::string_view tweet_id,
                                           const CorpusIndex& index,
                                           const ProfileIndex& profiles,
                                           const AffiliationProfile& affiliation);

// Share of users authoring original/quote/reply tweets tagged with the
// domain hashtag whose profile matches; nullopt when no such user has a
// profile.
std::optional<double> affiliation_baseline(const CorpusIndex& index,
                                           const ProfileIndex& profiles,
                                           const AffiliationProfile& affiliation);

// Optional context for hijack detection. `reference` is the corpus used for
// affiliation baselines (defaults to the detection corpus); the partition and
// political community list feed the active-retweeter community evidence.
struct HijackContext {
  const CorpusIndex* reference = nullptr;
  const Partition* user_partition = nullptr;
  std::vector<std::uint32_t> political_communities;
};

std::vector<InfluenceFinding> detect_hijacks(
    const CorpusIndex& index, const NodeAnnotations& annotations,
    std::span<const AffiliationProfile> affiliations, const ProfileIndex& profiles,
    const HijackConfig& config, const HijackContext& context = {});

std::vector<InfluenceFinding> detect_activist_clusters(
    const WeightedGraph& retweet_graph, const Partition& user_partition,
    const CorpusIndex& index, const ActivismConfig& config);

struct MegaphoneNetworks {
  const WeightedGraph* quote = nullptr;
  const WeightedGraph* reply = nullptr;
  const WeightedGraph* mention = nullptr;
};

// `topical` counts football-tagged posts per author and may index a larger
// corpus than the one the networks were built from.
std::vector<InfluenceFinding> detect_megaphones(
    const MegaphoneNetworks& networks, const CorpusIndex& topical,
    const NodeAnnotations& annotations, const MegaphoneConfig& config,
    const Partition* user_partition = nullptr);

}  // namespace pitchside
