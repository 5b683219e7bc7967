#include "pitchside/influence.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pitchside/errors.hpp"
#include "pitchside/metrics.hpp"
#include "pitchside/text.hpp"

namespace pitchside {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 3> kFindingNames = {
    "hijack", "embedded_activism", "megaphone"};

const std::vector<std::size_t> kNoPositions;

std::span<const std::size_t> lookup(
    const std::unordered_map<std::string_view, std::vector<std::size_t>>& map,
    std::string_view key) {
  auto it = map.find(key);
  return it == map.end() ? std::span<const std::size_t>(kNoPositions)
                         : std::span<const std::size_t>(it->second);
}

ordered_json evidence_json(const EvidenceValue& v) {
  return std::visit(
      [](const auto& x) -> ordered_json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, std::map<std::string, std::int64_t>>) {
          ordered_json obj = ordered_json::object();
          for (const auto& [k, n] : x) obj[k] = n;
          return obj;
        } else {
          return x;
        }
      },
      v);
}

EvidenceValue optional_rate(const std::optional<double>& x) {
  if (x) return *x;
  return std::monostate{};
}

std::vector<std::string> in_degree_top_k(const WeightedGraph& g, std::size_t k,
                                         std::vector<double>& in_degree) {
  in_degree = weighted_in_degree(g);
  CentralityTable table;
  table.nodes = g.ids();
  table.scores = in_degree;
  std::vector<std::string> top;
  for (const auto& r : top_influencers(table, ProfileIndex{}, k)) {
    if (r.score > 0.0) top.push_back(r.node);
  }
  return top;
}

}  // namespace

std::string_view to_string(FindingKind kind) {
  return kFindingNames[static_cast<std::size_t>(kind)];
}

void DetectorConfig::validate() const {
  if (hijack.min_engagement == 0) throw ConfigError("hijack.min_engagement must be positive");
  if (!(hijack.max_affiliation_ratio > 0.0 && hijack.max_affiliation_ratio <= 1.0)) {
    throw ConfigError("hijack.max_affiliation_ratio must lie in (0, 1]");
  }
  if (activism.min_cluster_size == 0) {
    throw ConfigError("activism.min_cluster_size must be positive");
  }
  if (!(activism.min_retweet_rate_lift > 0.0 && activism.min_retweet_rate_lift <= 1.0)) {
    throw ConfigError("activism.min_retweet_rate_lift must lie in (0, 1]");
  }
  if (megaphone.top_k_in_degree == 0) {
    throw ConfigError("megaphone.top_k_in_degree must be positive");
  }
  if (megaphone.max_topical_posts == 0) {
    throw ConfigError("megaphone.max_topical_posts must be positive");
  }
}

std::vector<AffiliationProfile> parse_affiliations(std::string_view json_text) {
  auto j = nlohmann::json::parse(json_text.begin(), json_text.end(), nullptr, false, true);
  if (j.is_discarded() || !j.is_array()) {
    throw ConfigError("affiliations: expected a JSON array");
  }
  std::vector<AffiliationProfile> out;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("domain") || !item["domain"].is_string() ||
        !item.contains("keywords") || !item["keywords"].is_array()) {
      throw ConfigError("affiliations: each entry needs 'domain' and 'keywords'");
    }
    AffiliationProfile a;
    auto domain = normalize_hashtag(item["domain"].get<std::string>());
    if (!domain) throw ConfigError("affiliations: empty domain");
    a.domain = *domain;
    for (const auto& k : item["keywords"]) {
      if (!k.is_string()) throw ConfigError("affiliations: keywords must be strings");
      auto folded = text::fold(k.get<std::string>());
      if (!folded.empty()) a.keywords.push_back(std::move(folded));
    }
    if (a.keywords.empty()) {
      throw ConfigError("affiliations: '" + a.domain + "' has no keywords");
    }
    if (auto it = item.find("baseline_rate"); it != item.end() && !it->is_null()) {
      const double rate = it->get<double>();
      if (!(rate >= 0.0 && rate <= 1.0)) {
        throw ConfigError("affiliations: baseline_rate must lie in [0, 1]");
      }
      a.baseline_rate = rate;
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<AffiliationProfile> load_affiliations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open affiliation file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_affiliations(buf.str());
}

std::string serialize_finding(const InfluenceFinding& f) {
  ordered_json j;
  j["schema_version"] = kFindingSchemaVersion;
  j["kind"] = to_string(f.kind);
  j["subject"] = f.subject;
  j["score"] = f.score;
  ordered_json evidence = ordered_json::object();
  for (const auto& [key, value] : f.evidence) evidence[key] = evidence_json(value);
  j["evidence"] = std::move(evidence);
  ordered_json thresholds = ordered_json::object();
  for (const auto& [key, value] : f.thresholds_used) thresholds[key] = value;
  j["thresholds"] = std::move(thresholds);
  return j.dump();
}

CorpusIndex::CorpusIndex(std::span<const TweetRecord> corpus) : corpus_(corpus) {
  by_id_.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& t = corpus[i];
    by_id_.emplace(t.tweet_id, i);
    authored_[t.user_id].push_back(i);
    if (t.kind == TweetKind::retweet) retweets_[*t.target_tweet_id].push_back(i);
    if (t.kind == TweetKind::quote) quotes_[*t.target_tweet_id].push_back(i);
  }
}

const TweetRecord* CorpusIndex::tweet(std::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &corpus_[it->second];
}

std::span<const std::size_t> CorpusIndex::retweets_of(std::string_view tweet_id) const {
  return lookup(retweets_, tweet_id);
}

std::span<const std::size_t> CorpusIndex::quotes_of(std::string_view tweet_id) const {
  return lookup(quotes_, tweet_id);
}

std::span<const std::size_t> CorpusIndex::by_user(std::string_view user_id) const {
  return lookup(authored_, user_id);
}

bool profile_matches(const UserProfile& profile, const AffiliationProfile& affiliation) {
  const std::string folded = text::fold(profile.description);
  return std::any_of(affiliation.keywords.begin(), affiliation.keywords.end(),
                     [&](const std::string& k) { return text::contains_word(folded, k); });
}

std::optional<double> audience_affiliation(std::string_view tweet_id,
                                           const CorpusIndex& index,
                                           const ProfileIndex& profiles,
                                           const AffiliationProfile& affiliation) {
  std::set<std::string_view> retweeters;
  for (auto pos : index.retweets_of(tweet_id)) {
    retweeters.insert(index.corpus()[pos].user_id);
  }
  std::size_t with_profile = 0, matching = 0;
  for (auto user : retweeters) {
    auto it = profiles.find(std::string(user));
    if (it == profiles.end()) continue;
    ++with_profile;
    if (profile_matches(it->second, affiliation)) ++matching;
  }
  if (with_profile == 0) return std::nullopt;
  return static_cast<double>(matching) / static_cast<double>(with_profile);
}

std::optional<double> affiliation_baseline(const CorpusIndex& index,
                                           const ProfileIndex& profiles,
                                           const AffiliationProfile& affiliation) {
  std::set<std::string_view> users;
  for (const auto& t : index.corpus()) {
    if (t.kind == TweetKind::retweet) continue;
    if (std::find(t.hashtags.begin(), t.hashtags.end(), affiliation.domain) !=
        t.hashtags.end()) {
      users.insert(t.user_id);
    }
  }
  std::size_t with_profile = 0, matching = 0;
  for (auto user : users) {
    auto it = profiles.find(std::string(user));
    if (it == profiles.end()) continue;
    ++with_profile;
    if (profile_matches(it->second, affiliation)) ++matching;
  }
  if (with_profile == 0) return std::nullopt;
  return static_cast<double>(matching) / static_cast<double>(with_profile);
}

std::vector<InfluenceFinding> detect_hijacks(
    const CorpusIndex& index, const NodeAnnotations& annotations,
    std::span<const AffiliationProfile> affiliations, const ProfileIndex& profiles,
    const HijackConfig& config, const HijackContext& context) {
  std::map<std::string, const AffiliationProfile*> by_domain;
  for (const auto& a : affiliations) by_domain.emplace(a.domain, &a);
  std::map<std::string, std::optional<double>> baselines;
  auto baseline_of = [&](const AffiliationProfile& a) {
    auto it = baselines.find(a.domain);
    if (it != baselines.end()) return it->second;
    std::optional<double> b = a.baseline_rate;
    if (!b) b = affiliation_baseline(context.reference ? *context.reference : index, profiles, a);
    baselines.emplace(a.domain, b);
    return b;
  };
  std::unordered_map<std::string_view, std::uint32_t> community;
  if (context.user_partition) {
    for (std::size_t i = 0; i < context.user_partition->nodes.size(); ++i) {
      community.emplace(context.user_partition->nodes[i],
                        context.user_partition->assignment[i]);
    }
  }

  std::vector<InfluenceFinding> findings;
  for (const auto& t : index.corpus()) {
    if (t.kind == TweetKind::retweet) continue;
    std::vector<std::string> football, political;
    for (const auto& tag : t.hashtags) {
      const auto c = annotations.category(tag);
      if (c == HashtagCategory::football) football.push_back(tag);
      if (c == HashtagCategory::political) political.push_back(tag);
    }
    if (football.empty() || political.empty()) continue;
    const auto retweets = index.retweets_of(t.tweet_id);
    const auto quotes = index.quotes_of(t.tweet_id);
    const std::size_t engagement = retweets.size() + quotes.size();
    if (engagement < config.min_engagement) continue;

    struct Evaluation {
      std::string domain;
      double rate;
      double baseline;
      double ratio;
      bool ok;
    };
    std::optional<Evaluation> chosen;
    for (const auto& tag : football) {
      auto it = by_domain.find(tag);
      if (it == by_domain.end()) continue;
      const auto b = baseline_of(*it->second);
      const auto r = audience_affiliation(t.tweet_id, index, profiles, *it->second);
      if (!b || !r) continue;
      Evaluation e{tag, *r, *b, *b > 0.0 ? *r / *b : (*r > 0.0 ? 2.0 : 0.0),
                   *r <= config.max_affiliation_ratio * *b};
      if (!chosen || (e.ok && !chosen->ok) ||
          (e.ok == chosen->ok && e.ratio < chosen->ratio)) {
        chosen = e;
      }
    }
    const bool evaluated = chosen.has_value();
    const bool satisfied = evaluated && chosen->ok;
    const std::string domain = evaluated ? chosen->domain : football.front();
    const double best_ratio = evaluated ? chosen->ratio : 0.0;
    std::optional<double> rate, baseline;
    if (evaluated) {
      rate = chosen->rate;
      baseline = chosen->baseline;
    }
    if (evaluated && !satisfied) continue;

    std::map<std::string, std::int64_t> repeats;
    std::map<std::string_view, std::int64_t> per_user;
    for (auto pos : retweets) ++per_user[index.corpus()[pos].user_id];
    std::int64_t with_profile = 0, active = 0, active_political = 0, max_repeat = 0;
    for (const auto& [user, n] : per_user) {
      if (n > 1) repeats.emplace(std::string(user), n);
      max_repeat = std::max(max_repeat, n);
      if (profiles.contains(std::string(user))) ++with_profile;
      if (index.by_user(user).size() > 1) {
        ++active;
        auto c = community.find(user);
        if (c != community.end() &&
            std::find(context.political_communities.begin(),
                      context.political_communities.end(),
                      c->second) != context.political_communities.end()) {
          ++active_political;
        }
      }
    }

    InfluenceFinding f;
    f.kind = FindingKind::hijack;
    f.subject = t.tweet_id;
    const double e = static_cast<double>(engagement);
    f.score = evaluated ? e * (1.0 - std::min(best_ratio, 1.0)) : e;
    f.evidence["author"] = t.user_id;
    f.evidence["retweet_count"] = static_cast<std::int64_t>(retweets.size());
    f.evidence["quote_count"] = static_cast<std::int64_t>(quotes.size());
    f.evidence["engagement"] = static_cast<std::int64_t>(engagement);
    f.evidence["domain"] = domain;
    f.evidence["football_hashtags"] = football;
    f.evidence["political_hashtags"] = political;
    f.evidence["affiliation_evaluated"] = evaluated;
    f.evidence["affiliation_rate"] = optional_rate(rate);
    f.evidence["baseline_rate"] = optional_rate(baseline);
    f.evidence["distinct_retweeters"] = static_cast<std::int64_t>(per_user.size());
    f.evidence["retweeters_with_profile"] = with_profile;
    f.evidence["repeat_retweeters"] = std::move(repeats);
    f.evidence["max_repeat_retweets"] = max_repeat;
    f.evidence["active_retweeters"] = active;
    if (context.user_partition && active > 0) {
      f.evidence["active_retweeters_political_share"] =
          static_cast<double>(active_political) / static_cast<double>(active);
    } else {
      f.evidence["active_retweeters_political_share"] = std::monostate{};
    }
    f.thresholds_used = {{"min_engagement", config.min_engagement},
                         {"max_affiliation_ratio", config.max_affiliation_ratio}};
    findings.push_back(std::move(f));
  }
  return findings;
}

std::vector<InfluenceFinding> detect_activist_clusters(
    const WeightedGraph& retweet_graph, const Partition& user_partition,
    const CorpusIndex& index, const ActivismConfig& config) {
  const std::size_t k = user_partition.community_count;
  std::vector<std::uint64_t> tweets(k, 0), retweets(k, 0);
  const auto sizes = user_partition.community_sizes();
  std::uint64_t all_tweets = 0, all_retweets = 0;
  for (std::size_t i = 0; i < user_partition.nodes.size(); ++i) {
    const auto c = user_partition.assignment[i];
    for (auto pos : index.by_user(user_partition.nodes[i])) {
      ++tweets[c];
      if (index.corpus()[pos].kind == TweetKind::retweet) ++retweets[c];
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    all_tweets += tweets[c];
    all_retweets += retweets[c];
  }
  const std::size_t all_users = user_partition.nodes.size();

  std::vector<InfluenceFinding> findings;
  for (std::uint32_t c = 0; c < k; ++c) {
    if (sizes[c] < config.min_cluster_size || tweets[c] == 0) continue;
    const std::uint64_t rest_tweets = all_tweets - tweets[c];
    const std::uint64_t rest_retweets = all_retweets - retweets[c];
    if (rest_tweets == 0) continue;
    const double rate = static_cast<double>(retweets[c]) / static_cast<double>(tweets[c]);
    const double rest_rate =
        static_cast<double>(rest_retweets) / static_cast<double>(rest_tweets);
    const double lift = rate - rest_rate;
    if (lift < config.min_retweet_rate_lift) continue;

    // Cascade roots: in-degree from fellow members.
    std::vector<std::pair<double, std::string>> roots;
    for (std::size_t i = 0; i < user_partition.nodes.size(); ++i) {
      if (user_partition.assignment[i] != c) continue;
      auto v = retweet_graph.find(user_partition.nodes[i]);
      if (!v) continue;
      double in = 0.0;
      for (const auto& nb : retweet_graph.in(*v)) {
        if (user_partition.community_of(retweet_graph.id(nb.node)) == c) in += nb.weight;
      }
      if (in > 0.0) roots.emplace_back(in, user_partition.nodes[i]);
    }
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::string> top_roots;
    for (std::size_t i = 0; i < roots.size() && i < 5; ++i) top_roots.push_back(roots[i].second);

    InfluenceFinding f;
    f.kind = FindingKind::embedded_activism;
    f.subject = "community:" + std::to_string(c);
    f.score = lift;
    f.evidence["community"] = static_cast<std::int64_t>(c);
    f.evidence["size"] = static_cast<std::int64_t>(sizes[c]);
    f.evidence["community_tweets"] = static_cast<std::int64_t>(tweets[c]);
    f.evidence["community_retweet_rate"] = rate;
    f.evidence["network_retweet_rate"] = rest_rate;
    f.evidence["retweet_rate_lift"] = lift;
    f.evidence["community_tweets_per_user"] =
        static_cast<double>(tweets[c]) / static_cast<double>(sizes[c]);
    f.evidence["network_tweets_per_user"] =
        all_users > sizes[c]
            ? static_cast<double>(rest_tweets) / static_cast<double>(all_users - sizes[c])
            : 0.0;
    f.evidence["top_cascade_roots"] = std::move(top_roots);
    f.thresholds_used = {{"min_cluster_size", config.min_cluster_size},
                         {"min_retweet_rate_lift", config.min_retweet_rate_lift}};
    findings.push_back(std::move(f));
  }
  return findings;
}

std::vector<InfluenceFinding> detect_megaphones(const MegaphoneNetworks& networks,
                                                const CorpusIndex& topical,
                                                const NodeAnnotations& annotations,
                                                const MegaphoneConfig& config,
                                                const Partition* user_partition) {
  struct Entry {
    const char* name;
    const WeightedGraph* graph;
    std::vector<double> in_degree;
    std::vector<std::string> top;
  };
  std::array<Entry, 3> entries{{{"quote", networks.quote, {}, {}},
                                {"reply", networks.reply, {}, {}},
                                {"mention", networks.mention, {}, {}}}};
  std::map<std::string, std::vector<std::string>> membership;
  for (auto& e : entries) {
    if (!e.graph) continue;
    e.top = in_degree_top_k(*e.graph, config.top_k_in_degree, e.in_degree);
    for (const auto& node : e.top) membership[node].push_back(e.name);
  }

  std::vector<InfluenceFinding> findings;
  for (const auto& [account, nets] : membership) {
    if (nets.size() < 2) continue;
    std::int64_t topical_posts = 0;
    for (auto pos : topical.by_user(account)) {
      const auto& t = topical.corpus()[pos];
      if (t.kind == TweetKind::retweet) continue;
      if (std::any_of(t.hashtags.begin(), t.hashtags.end(), [&](const std::string& h) {
            return annotations.category(h) == HashtagCategory::football;
          })) {
        ++topical_posts;
      }
    }
    if (topical_posts > static_cast<std::int64_t>(config.max_topical_posts)) continue;

    InfluenceFinding f;
    f.kind = FindingKind::megaphone;
    f.subject = account;
    double total = 0.0;
    for (const auto& e : entries) {
      double d = 0.0;
      if (e.graph) {
        if (auto v = e.graph->find(account)) d = e.in_degree[*v];
      }
      total += d;
      f.evidence[std::string(e.name) + "_in_degree"] = static_cast<std::int64_t>(d);
    }
    f.score = total;
    f.evidence["top_k_networks"] = nets;
    f.evidence["topical_posts"] = topical_posts;

    std::map<std::string, std::int64_t> concentration;
    if (networks.mention) {
      if (auto v = networks.mention->find(account)) {
        for (const auto& nb : networks.mention->in(*v)) {
          const auto& mentioner = networks.mention->id(nb.node);
          std::optional<std::uint32_t> c;
          if (user_partition) c = user_partition->community_of(mentioner);
          ++concentration[c ? std::to_string(*c) : std::string("unassigned")];
        }
      }
    }
    f.evidence["mention_concentration"] = std::move(concentration);
    f.thresholds_used = {{"top_k_in_degree", config.top_k_in_degree},
                         {"max_topical_posts", config.max_topical_posts}};
    findings.push_back(std::move(f));
  }
  return findings;
}

}  // namespace pitchside
