#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pitchside/graphs.hpp"
#include "pitchside/influence.hpp"
#include "pitchside/ingest.hpp"

namespace pitchside {

struct CommunitySpec {
  std::size_t size = 0;
  double political_fraction = 0.3;
  HashtagCategory focus = HashtagCategory::other;
  // Explicit vocabulary; generated from the focus category when empty.
  std::vector<std::string> vocabulary;
};

struct KindMix {
  double original = 0.44;
  double retweet = 0.35;
  double quote = 0.14;
  double reply = 0.07;

  double share(TweetKind kind) const;
};

// Political meme tagged with a club hashtag and amplified by an audience
// with almost no club affiliation.
struct HijackCampaign {
  std::uint32_t retweets = 1413;
  std::uint32_t quotes = 205;
  double audience_affiliation = 0.008;
  std::uint32_t repeat_amplifier_retweets = 11;
  // Own political posts per audience member; keeps the audience from looking
  // like a pure retweet cluster.
  std::uint32_t audience_posts = 1;
  std::string domain = "mufc";
};

// Dense retweet cluster with a high retweet share around a few roots.
struct ActivismCampaign {
  std::uint32_t cluster_size = 1379;
  double retweet_rate = 0.97;
  std::uint32_t tweets_per_member = 2;
  std::uint32_t roots = 2;
};

// Political account drawing mentions, replies and quotes while barely
// posting on the topic itself.
struct MegaphoneCampaign {
  std::uint32_t mentions = 948;
  std::uint32_t replies = 240;
  std::uint32_t quotes = 120;
  std::uint32_t topical_posts = 1;
  std::uint32_t own_posts = 20;
};

using CampaignSpec = std::variant<HijackCampaign, ActivismCampaign, MegaphoneCampaign>;

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t n_users = 15000;
  std::size_t n_tweets = 50000;
  std::size_t n_hashtags = 240;  // spread over the generated vocabularies
  std::vector<CommunitySpec> community_spec;  // default layout when empty
  KindMix kind_mix;
  double vocab_overlap = 0.1;
  std::vector<CampaignSpec> campaigns;

  void validate() const;  // throws ConfigError
};

struct PlantedCampaign {
  FindingKind kind = FindingKind::hijack;
  std::vector<std::string> subjects;   // tweet ids (hijack) or user ids
  std::vector<std::string> tweet_ids;  // every injected record
  std::vector<std::string> user_ids;   // every participating user
};

struct GroundTruth {
  std::map<std::string, std::string> user_community;
  std::set<std::string> political_tweets;
  std::vector<PlantedCampaign> campaigns;
};

struct LexiconLists {
  std::vector<std::string> hashtags;
  std::vector<std::string> keywords;
  std::vector<std::string> excluded;

  Lexicon build() const { return Lexicon::make(hashtags, keywords, excluded); }
};

// Terms of the shipped starter lexicon.
LexiconLists starter_lexicon();

struct SynthCorpus {
  std::vector<TweetRecord> records;
  std::vector<UserProfile> profiles;
  GroundTruth truth;
  LexiconLists lexicon;
  NodeAnnotations annotations;
  std::vector<AffiliationProfile> affiliations;
};

// Deterministic in config.seed. Campaign records are part of n_tweets and
// campaign accounts part of n_users; background kind quotas absorb the
// campaign footprint so the overall kind shares match kind_mix.
SynthCorpus generate_corpus(const SynthConfig& config);

// Appends the campaign's records, accounts and profiles to `corpus` and
// records them in its ground truth. Existing records are left untouched.
// Throws ConfigError for degenerate parameters or when the campaign needs
// more accounts than the corpus population.
PlantedCampaign plant_campaign(SynthCorpus& corpus, const CampaignSpec& spec,
                               std::uint64_t seed);

// Per-kind record counts a campaign injects.
std::map<TweetKind, std::size_t> campaign_footprint(const CampaignSpec& spec);
std::size_t campaign_accounts(const CampaignSpec& spec);

std::string truth_to_json(const GroundTruth& truth);
std::string lexicon_to_json(const LexiconLists& lexicon);
std::string annotations_to_json(const NodeAnnotations& annotations);
std::string affiliations_to_json(const std::vector<AffiliationProfile>& affiliations);

}  // namespace pitchside
