#include <gtest/gtest.h>

#include <set>

#include "pitchside/errors.hpp"
#include "pitchside/synth.hpp"

using namespace pitchside;

namespace {

SynthConfig small(std::uint64_t seed) {
  SynthConfig c;
  c.seed = seed;
  c.n_users = 1500;
  c.n_tweets = 6000;
  return c;
}

std::map<TweetKind, std::size_t> kinds(const SynthCorpus& s) {
  std::map<TweetKind, std::size_t> n;
  for (const auto& r : s.records) ++n[r.kind];
  return n;
}

}  // namespace

TEST(Synth, SameSeedSameCorpus) {
  auto a = generate_corpus(small(3));
  auto b = generate_corpus(small(3));
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(truth_to_json(a.truth), truth_to_json(b.truth));
  EXPECT_NE(generate_corpus(small(4)).records, a.records);
}

TEST(Synth, SizesAndKindMixAreExact) {
  auto s = generate_corpus(small(1));
  EXPECT_EQ(s.records.size(), 6000u);
  auto n = kinds(s);
  EXPECT_EQ(n[TweetKind::original], 2640u);
  EXPECT_EQ(n[TweetKind::retweet], 2100u);
  EXPECT_EQ(n[TweetKind::quote], 840u);
  EXPECT_EQ(n[TweetKind::reply], 420u);
  EXPECT_TRUE(s.truth.campaigns.empty());
}

TEST(Synth, RecordsAreWellFormed) {
  auto s = generate_corpus(small(2));
  std::set<std::string> ids;
  for (const auto& r : s.records) ids.insert(r.tweet_id);
  EXPECT_EQ(ids.size(), s.records.size());
  for (const auto& r : s.records) {
    if (r.kind == TweetKind::original) {
      EXPECT_FALSE(r.target_tweet_id);
      continue;
    }
    ASSERT_TRUE(r.target_tweet_id) << r.tweet_id;
    EXPECT_TRUE(ids.contains(*r.target_tweet_id)) << r.tweet_id;
    EXPECT_NE(*r.target_user_id, r.user_id) << r.tweet_id;
  }
}

TEST(Synth, HijackFootprint) {
  auto c = small(5);
  HijackCampaign h;
  h.retweets = 100;
  h.quotes = 10;
  h.repeat_amplifier_retweets = 5;
  c.campaigns = {h};
  auto s = generate_corpus(c);
  ASSERT_EQ(s.truth.campaigns.size(), 1u);
  const auto& planted = s.truth.campaigns[0];
  EXPECT_EQ(planted.kind, FindingKind::hijack);
  ASSERT_EQ(planted.subjects.size(), 1u);
  std::size_t retweets = 0, quotes = 0;
  std::map<std::string, int> per_user;
  for (const auto& r : s.records) {
    if (r.target_tweet_id != planted.subjects[0]) continue;
    if (r.kind == TweetKind::retweet) {
      ++retweets;
      ++per_user[r.user_id];
    }
    if (r.kind == TweetKind::quote) ++quotes;
  }
  EXPECT_EQ(retweets, 100u);
  EXPECT_EQ(quotes, 10u);
  int max_repeat = 0;
  for (auto& [u, n] : per_user) max_repeat = std::max(max_repeat, n);
  EXPECT_EQ(max_repeat, 5);
  EXPECT_EQ(s.records.size(), 6000u);  // campaign records come out of the budget
}

TEST(Synth, ActivismRetweetRate) {
  auto c = small(6);
  ActivismCampaign a;
  a.cluster_size = 50;
  a.retweet_rate = 0.97;
  a.tweets_per_member = 4;
  c.campaigns = {a};
  auto s = generate_corpus(c);
  const auto& planted = s.truth.campaigns.at(0);
  EXPECT_EQ(planted.user_ids.size(), 50u);
  std::set<std::string> members(planted.user_ids.begin(), planted.user_ids.end());
  std::size_t total = 0, rts = 0;
  for (const auto& r : s.records) {
    if (!members.contains(r.user_id)) continue;
    ++total;
    if (r.kind == TweetKind::retweet) ++rts;
  }
  EXPECT_EQ(total, 200u);
  EXPECT_EQ(rts, 194u);
}

TEST(Synth, MegaphoneAccountGetsMentioned) {
  auto c = small(7);
  MegaphoneCampaign m;
  m.mentions = 60;
  m.replies = 10;
  m.quotes = 5;
  c.campaigns = {m};
  auto s = generate_corpus(c);
  const auto& account = s.truth.campaigns.at(0).subjects.at(0);
  std::size_t mentions = 0;
  for (const auto& r : s.records) {
    for (const auto& u : r.mentioned_user_ids) mentions += u == account;
  }
  EXPECT_GE(mentions, 60u);
}

TEST(Synth, ConfigValidation) {
  auto c = small(1);
  MegaphoneCampaign silent;
  silent.mentions = 0;
  c.campaigns = {silent};
  EXPECT_THROW(generate_corpus(c), ConfigError);

  c = small(1);
  ActivismCampaign huge;
  huge.cluster_size = 1490;
  c.campaigns = {huge};
  EXPECT_THROW(generate_corpus(c), ConfigError);

  c = small(1);
  HijackCampaign loud;  // needs more accounts than n_users provides
  c.n_users = 1000;
  c.campaigns = {loud};
  EXPECT_THROW(generate_corpus(c), ConfigError);

  c = small(1);
  c.kind_mix.original = 0.5;
  EXPECT_THROW(generate_corpus(c), ConfigError);
}

TEST(Synth, PlantIntoExistingCorpus) {
  auto s = generate_corpus(small(8));
  const auto before = s.records.size();
  MegaphoneCampaign m;
  m.mentions = 20;
  m.replies = 0;
  m.quotes = 0;
  m.own_posts = 3;
  auto planted = plant_campaign(s, m, 99);
  EXPECT_EQ(s.records.size(), before + 24);
  EXPECT_EQ(planted.tweet_ids.size(), 24u);
  EXPECT_EQ(s.truth.campaigns.size(), 1u);
}

TEST(Synth, StarterLexiconIsConsistent) {
  auto l = starter_lexicon();
  auto lex = l.build();
  EXPECT_EQ(lex.hashtags.size(), l.hashtags.size());
  EXPECT_TRUE(lex.excluded_terms.contains("vote"));
}
