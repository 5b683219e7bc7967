#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pitchside/errors.hpp"
#include "pitchside/graphs.hpp"

using namespace pitchside;
using fixture::tweet;

TEST(Cooccurrence, CountsTweetsSharingAPair) {
  std::vector<TweetRecord> corpus = {
      tweet("1", "a", "", TweetKind::original, {"brexit", "mufc", "nhs"}),
      tweet("2", "b", "", TweetKind::original, {"brexit", "mufc"}),
      tweet("3", "c", "", TweetKind::original, {"lfc"})};
  auto g = build_hashtag_cooccurrence(corpus);
  EXPECT_EQ(g.node_count(), 4u);  // lfc stays as an isolate
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_DOUBLE_EQ(g.weight(*g.find("brexit"), *g.find("mufc")), 2.0);
  EXPECT_DOUBLE_EQ(g.weight(*g.find("brexit"), *g.find("nhs")), 1.0);
}

TEST(Interactions, OneEdgePerActKind) {
  auto quote = tweet("3", "c", "", TweetKind::quote, {}, "1", "a");
  quote.mentioned_user_ids = {"d"};
  auto rt = tweet("2", "b", "", TweetKind::retweet, {}, "1", "a");
  rt.mentioned_user_ids = {"d"};  // mentions inside retweets are not the retweeter's
  std::vector<TweetRecord> corpus = {tweet("1", "a", ""), rt, quote};

  auto all = build_interaction_network(corpus);
  EXPECT_EQ(all.graph.edge_count(), 3u);
  auto retweets = build_interaction_network(corpus, InteractionKind::retweet);
  EXPECT_EQ(retweets.graph.edge_count(), 1u);
  auto mentions = build_interaction_network(corpus, InteractionKind::mention);
  ASSERT_EQ(mentions.graph.edge_count(), 1u);
  EXPECT_EQ(mentions.graph.id(mentions.graph.edges()[0].src), "c");
}

TEST(Interactions, SelfInteractionsAreCountedNotLinked) {
  std::vector<TweetRecord> corpus = {tweet("1", "a", ""),
                                     tweet("2", "a", "", TweetKind::reply, {}, "1", "a")};
  auto net = build_interaction_network(corpus);
  EXPECT_EQ(net.graph.edge_count(), 0u);
  EXPECT_EQ(net.self_interactions, 1u);
}

TEST(Interactions, MissingTargetUser) {
  auto r = tweet("2", "b", "", TweetKind::retweet, {}, "1");
  r.target_user_id.reset();
  auto net = build_interaction_network(std::vector<TweetRecord>{r});
  EXPECT_EQ(net.missing_target, 1u);
}

TEST(Matrix, FiltersUntilStable) {
  // "rare" is used twice, so it goes. That leaves user c with one tagged
  // tweet, below min_user_tweets, which in turn drops "mid" under threshold.
  std::vector<TweetRecord> corpus;
  int id = 0;
  auto add = [&](const char* user, std::vector<std::string> tags) {
    corpus.push_back(tweet(std::to_string(id++), user, "", TweetKind::original, std::move(tags)));
  };
  for (int i = 0; i < 3; ++i) add("a", {"common"});
  for (int i = 0; i < 3; ++i) add("b", {"common"});
  add("c", {"rare", "mid"});
  add("c", {"rare"});
  add("d", {"mid"});
  add("d", {"mid"});
  MatrixFilter f{3, 2};
  auto m = build_user_hashtag_matrix(corpus, f);
  EXPECT_EQ(m.hashtags, std::vector<std::string>{"common"});
  EXPECT_EQ(m.users, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(m.total(), 6u);
}

TEST(Matrix, ColumnsMirrorRows) {
  Rng rng(4);
  auto m = oracle::random_matrix(rng, 6, 5, 0.4);
  auto cols = m.columns();
  auto sums = m.column_sums();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    std::uint64_t s = 0;
    for (const auto& e : cols[c]) s += e.count;
    EXPECT_EQ(s, sums[c]);
  }
}

TEST(Cosine, KnownValues) {
  std::vector<double> a{1, 0}, b{0, 1}, c{2, 0};
  EXPECT_DOUBLE_EQ(cosine_similarity(a, b), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, c), 1.0);
}

TEST(Cosine, ZeroVectorIsUndefined) {
  std::vector<double> a{0, 0}, b{1, 1};
  EXPECT_THROW(cosine_similarity(a, b), DomainError);
}

TEST(ProjectionConfig, Validation) {
  ProjectionConfig c;
  c.alpha = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.permutations = 10;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NO_THROW(ProjectionConfig::for_hashtags().validate());
}

TEST(Projection, HeavyCliqueSurvivesLightNoise) {
  // Eight users share a distinctive four-hashtag profile; forty others use
  // single random hashtags.
  BipartiteMatrix m;
  for (int h = 0; h < 20; ++h) m.hashtags.push_back("h" + std::string(h < 10 ? "0" : "") + std::to_string(h));
  Rng rng(8);
  for (int u = 0; u < 48; ++u) {
    m.users.push_back("u" + std::string(u < 10 ? "0" : "") + std::to_string(u));
    std::vector<MatrixEntry> row;
    if (u < 8) {
      for (std::uint32_t h = 0; h < 4; ++h) row.push_back({h, 5});
    } else {
      row.push_back({static_cast<std::uint32_t>(4 + rng.below(16)), 1});
      row.push_back({static_cast<std::uint32_t>(4 + rng.below(16)), 1});
      if (row[0].col == row[1].col) row.pop_back();
      std::sort(row.begin(), row.end(), [](auto a, auto b) { return a.col < b.col; });
    }
    m.rows.push_back(row);
  }
  auto cfg = ProjectionConfig::for_users();
  cfg.min_similarity = 0.9;
  auto p = project_similarity(m, cfg);
  std::set<std::pair<std::uint32_t, std::uint32_t>> clique;
  for (std::uint32_t a = 0; a < 8; ++a) {
    for (std::uint32_t b = a + 1; b < 8; ++b) clique.insert({a, b});
  }
  std::set<std::pair<std::uint32_t, std::uint32_t>> kept;
  for (const auto& e : p.retained) {
    kept.insert({e.a, e.b});
    EXPECT_EQ(e.a < 8, e.b < 8) << "noise user linked to the clique";
  }
  EXPECT_TRUE(std::includes(kept.begin(), kept.end(), clique.begin(), clique.end()));
  EXPECT_EQ(p.graph.node_count(), 48u);
}

TEST(Projection, MatchesOracleOnBothAxes) {
  Rng rng(21);
  for (auto axis : {ProjectionAxis::user, ProjectionAxis::hashtag}) {
    auto m = oracle::random_matrix(rng, 15, 10, 0.3);
    ProjectionConfig cfg = axis == ProjectionAxis::user ? ProjectionConfig::for_users()
                                                        : ProjectionConfig::for_hashtags();
    cfg.permutations = 200;
    cfg.rng_seed = 77;
    auto p = project_similarity(m, cfg);
    std::set<std::pair<std::uint32_t, std::uint32_t>> kept;
    for (const auto& e : p.retained) kept.insert({e.a, e.b});
    EXPECT_EQ(kept, oracle::projection(m, cfg));
  }
}

TEST(Projection, SeededAndDeterministic) {
  Rng rng(5);
  auto m = oracle::random_matrix(rng, 25, 12, 0.3);
  auto cfg = ProjectionConfig::for_users();
  cfg.permutations = 300;
  auto a = project_similarity(m, cfg);
  auto b = project_similarity(m, cfg);
  ASSERT_EQ(a.retained.size(), b.retained.size());
  for (std::size_t i = 0; i < a.retained.size(); ++i) {
    EXPECT_EQ(a.retained[i].p_value, b.retained[i].p_value);
  }
}

TEST(Projection, EmptyMatrix) {
  BipartiteMatrix m;
  m.users = {"a", "b"};
  m.rows.resize(2);
  auto p = project_similarity(m, ProjectionConfig::for_users());
  EXPECT_EQ(p.graph.node_count(), 2u);
  EXPECT_EQ(p.graph.edge_count(), 0u);
}

TEST(Annotations, ParseNormalizesKeys) {
  auto a = parse_annotations(R"({"#Brexit":"political","MUFC":"football"})");
  EXPECT_EQ(a.category("brexit"), HashtagCategory::political);
  EXPECT_EQ(a.category("mufc"), HashtagCategory::football);
  EXPECT_EQ(a.category("unknown"), HashtagCategory::other);
  EXPECT_THROW(parse_annotations(R"({"x":"sport"})"), ConfigError);
}
