#include "pitchside/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "pitchside/errors.hpp"
#include "pitchside/rng.hpp"
#include "pitchside/text.hpp"

namespace pitchside {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::array<std::string_view, 24> kPoliticalNames = {
    "brexit", "ukip", "trump", "edl", "nhs", "bnp", "maga", "ge2017",
    "ira", "indyref2", "putin", "euref", "snp", "labour", "donaldtrump", "tcot",
    "liberalsunite", "unsc", "toriesout", "voteleave", "strongerin", "libdems",
    "jc4pm", "theresamay"};
constexpr std::array<std::string_view, 20> kFootballNames = {
    "mufc", "lfc", "arsenal", "cfc", "thfc", "mcfc", "efc", "nufc", "avfc", "lufc",
    "wwfc", "saintsfc", "whufc", "lcfc", "nffc", "premierleague", "facup", "coys",
    "ynwa", "matchday"};
constexpr std::array<std::string_view, 12> kLocationNames = {
    "london", "manchester", "liverpool", "glasgow", "scotland", "wales",
    "leeds", "birmingham", "uk", "england", "newcastle", "cardiff"};
constexpr std::array<std::string_view, 12> kOtherNames = {
    "tbt", "fridayfeeling", "music", "news", "love", "photo",
    "weekend", "mondaymotivation", "quiz", "giveaway", "food", "travel"};

constexpr std::array<std::string_view, 8> kKeywords = {
    "brexit", "tory", "corbyn", "labour", "ukip", "libdem", "snp", "sturgeon"};

// Filler words never contain a keyword as a whole word. Several embed one as
// a substring or are near misses on purpose.
constexpr std::array<std::string_view, 40> kFiller = {
    "what", "a", "game", "today", "proper", "scenes", "at", "the", "ground",
    "lads", "great", "result", "history", "vote", "labourer", "corbynista",
    "brexiteers", "victory", "torys", "snps", "again", "never", "in", "doubt",
    "café", "naïve", "señor", "day", "out", "with", "mates", "pitch", "weather",
    "training", "tonight", "kickoff", "referee", "😀", "ünited", "season"};

constexpr std::array<std::string_view, 6> kNeutralBios = {
    "Dad. Pint. Weekend walks.", "Tea enthusiast", "Opinions my own",
    "Runner, reader, coffee", "Living the dream", "Photographer and traveller"};
constexpr std::array<std::string_view, 6> kPoliticalBios = {
    "Politics nerd", "Proud Brit. Leave means leave.", "Remainer and proud",
    "Councillor, opinions mine", "Left of centre", "Small state conservative"};
constexpr std::array<std::string_view, 5> kUsAudienceBios = {
    "MAGA patriot", "Conservative. Christian. American.", "Trump supporter",
    "God, guns and country", "Deplorable and proud"};

const std::vector<std::string>& mufc_keywords() {
  static const std::vector<std::string> k = {"mufc", "man utd", "manchester united", "ggmu"};
  return k;
}

constexpr std::int64_t kStartSeconds = 1469404800;  // 2016-07-25T00:00:00Z
constexpr std::int64_t kEndSeconds = 1509062399;    // 2017-10-26T23:59:59Z

Timestamp at_seconds(std::int64_t s) {
  return Timestamp{std::chrono::seconds{s}};
}

std::string numbered(std::string_view prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, n);
  return std::string(prefix) + buf;
}

class Weighted {
 public:
  void add(double w) {
    total_ += w;
    cum_.push_back(total_);
  }
  bool empty() const { return cum_.empty(); }
  std::size_t draw(Rng& rng) const {
    const double x = rng.uniform() * total_;
    auto it = std::upper_bound(cum_.begin(), cum_.end(), x);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()),
                                 cum_.size() - 1);
  }

 private:
  std::vector<double> cum_;
  double total_ = 0.0;
};

double lognormal(Rng& rng, double sigma) {
  // Box-Muller on the generator's own uniforms.
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return std::exp(sigma * z);
}

template <class C>
const auto& pick(const C& c, Rng& rng) {
  return c[rng.below(c.size())];
}

std::string styled(std::string_view tag, Rng& rng) {
  std::string s(tag);
  switch (rng.below(3)) {
    case 1:
      if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 32);
      break;
    case 2:
      for (auto& ch : s) {
        if (ch >= 'a' && ch <= 'z') ch = static_cast<char>(ch - 32);
      }
      break;
    default:
      break;
  }
  return s;
}

// Token soup with the given keywords, hashtags and mentions.
std::string compose(Rng& rng, const std::vector<std::string>& mentions,
                    const std::vector<std::string_view>& keywords,
                    const std::vector<std::string>& tags) {
  std::vector<std::string> words;
  const auto n = 3 + rng.below(6);
  for (std::uint64_t i = 0; i < n; ++i) words.emplace_back(pick(kFiller, rng));
  for (auto kw : keywords) {
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)),
                 styled(kw, rng));
  }
  std::string out;
  for (const auto& m : mentions) out += "@" + m + " ";
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  for (const auto& t : tags) out += " #" + styled(t, rng);
  return out;
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

struct CategoryMix {
  double political, football, location, other;
};

CategoryMix mix_for(HashtagCategory focus) {
  switch (focus) {
    case HashtagCategory::political: return {0.5, 0.3, 0.1, 0.1};
    case HashtagCategory::football: return {0.1, 0.6, 0.15, 0.15};
    case HashtagCategory::location: return {0.1, 0.3, 0.45, 0.15};
    case HashtagCategory::other: break;
  }
  return {0.1, 0.3, 0.15, 0.45};
}

// Mints hashtags per category: known names first, then numbered tokens.
class TagMinter {
 public:
  std::string next(HashtagCategory c) {
    auto& i = used_[static_cast<std::size_t>(c)];
    auto take = [&](auto const& names, std::string_view prefix) {
      std::string tag = i < names.size() ? std::string(names[i])
                                         : numbered(prefix, i - names.size() + 1, 3);
      ++i;
      return tag;
    };
    switch (c) {
      case HashtagCategory::political: return take(kPoliticalNames, "pol");
      case HashtagCategory::football: return take(kFootballNames, "club");
      case HashtagCategory::location: return take(kLocationNames, "place");
      case HashtagCategory::other: break;
    }
    return take(kOtherNames, "topic");
  }

 private:
  std::array<std::size_t, 4> used_{};
};

struct Community {
  std::string label;
  CommunitySpec spec;
  std::array<std::vector<std::string>, 4> tags;  // by category, rank order
  std::array<Weighted, 4> weights;
  std::vector<std::size_t> members;
  Weighted popularity;
};

struct User {
  std::string id;
  std::size_t community;
  double activity;
  double popularity;
  bool hub;
  std::string favourite;  // club hashtag, empty when unaffiliated
};

std::string club_display(const std::string& tag, Rng& rng) {
  if (tag == "mufc") {
    static constexpr std::array<std::string_view, 3> names = {"MUFC", "Man Utd",
                                                               "Manchester United"};
    return std::string(pick(names, rng));
  }
  return styled(tag, rng);
}

std::string affiliated_bio(const std::string& club, Rng& rng) {
  const auto name = club_display(club, rng);
  switch (rng.below(4)) {
    case 0: return name + " fan";
    case 1: return name + " season ticket holder";
    case 2: return name + " till I die";
    default: return "Lifelong " + name + " supporter";
  }
}

std::size_t total_footprint(const CampaignSpec& spec) {
  std::size_t n = 0;
  for (const auto& [k, c] : campaign_footprint(spec)) n += c;
  return n;
}

void validate_campaign(const CampaignSpec& spec) {
  std::visit(
      [](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HijackCampaign>) {
          if (c.retweets == 0) throw ConfigError("hijack.retweets: must be > 0");
          if (c.repeat_amplifier_retweets == 0 ||
              c.repeat_amplifier_retweets > c.retweets) {
            throw ConfigError("hijack.repeat_amplifier_retweets: must be in [1, retweets]");
          }
          if (!(c.audience_affiliation >= 0.0 && c.audience_affiliation <= 1.0)) {
            throw ConfigError("hijack.audience_affiliation: must be in [0, 1]");
          }
          const std::size_t audience = c.retweets - c.repeat_amplifier_retweets + 1;
          if (c.quotes > audience) {
            throw ConfigError("hijack.quotes: exceeds the distinct retweeter audience");
          }
          if (!text::normalize_hashtag(c.domain)) {
            throw ConfigError("hijack.domain: empty hashtag");
          }
        } else if constexpr (std::is_same_v<T, ActivismCampaign>) {
          if (c.roots == 0) throw ConfigError("activism.roots: must be > 0");
          if (c.cluster_size <= c.roots) {
            throw ConfigError("activism.cluster_size: must exceed roots");
          }
          if (c.tweets_per_member == 0) {
            throw ConfigError("activism.tweets_per_member: must be > 0");
          }
          if (!(c.retweet_rate > 0.0 && c.retweet_rate < 1.0)) {
            throw ConfigError("activism.retweet_rate: must be in (0, 1)");
          }
          const std::size_t total =
              static_cast<std::size_t>(c.cluster_size) * c.tweets_per_member;
          const auto retweets =
              static_cast<std::size_t>(std::llround(c.retweet_rate * static_cast<double>(total)));
          if (total - retweets < c.roots) {
            throw ConfigError("activism.retweet_rate: leaves fewer originals than roots");
          }
        } else {
          if (c.mentions == 0) throw ConfigError("megaphone.mentions: must be > 0");
          if ((c.replies > 0 || c.quotes > 0) && c.own_posts == 0) {
            throw ConfigError("megaphone.own_posts: replies and quotes need a post to target");
          }
        }
      },
      spec);
}

class Builder {
 public:
  Builder(SynthCorpus& corpus, std::uint64_t seed) : corpus_(corpus), rng_(seed) {}

  Rng& rng() { return rng_; }

  TweetRecord& add(std::string id, std::string user, Timestamp ts, TweetKind kind) {
    TweetRecord r;
    r.tweet_id = std::move(id);
    r.user_id = std::move(user);
    r.timestamp = ts;
    r.kind = kind;
    corpus_.records.push_back(std::move(r));
    return corpus_.records.back();
  }

 private:
  SynthCorpus& corpus_;
  Rng rng_;
};

void set_reply_target(TweetRecord& r, const TweetRecord& parent) {
  r.target_tweet_id = parent.tweet_id;
  r.target_user_id = parent.user_id;
}

TweetRecord make_retweet(std::string id, std::string user, Timestamp ts,
                         const TweetRecord& source) {
  TweetRecord r;
  r.tweet_id = std::move(id);
  r.user_id = std::move(user);
  r.timestamp = ts;
  r.kind = TweetKind::retweet;
  r.text = "RT @" + source.user_id + ": " + source.text;
  r.hashtags = source.hashtags;
  set_reply_target(r, source);
  return r;
}

AffiliationProfile affiliation_for(const std::string& club) {
  AffiliationProfile a;
  a.domain = club;
  a.keywords = club == "mufc" ? mufc_keywords() : std::vector<std::string>{club};
  return a;
}

void ensure_affiliation(SynthCorpus& corpus, const std::string& club) {
  for (const auto& a : corpus.affiliations) {
    if (a.domain == club) return;
  }
  corpus.affiliations.push_back(affiliation_for(club));
}

void ensure_political(SynthCorpus& corpus, const std::string& tag) {
  corpus.annotations.set(tag, HashtagCategory::political);
  push_unique(corpus.lexicon.hashtags, tag);
}

std::int64_t event_time(Rng& rng) {
  const std::int64_t span = kEndSeconds - kStartSeconds - 30 * 86400;
  return kStartSeconds + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(span)));
}

std::int64_t after(Rng& rng, std::int64_t t, std::int64_t window) {
  const auto s = t + 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(window)));
  return std::clamp(s, kStartSeconds, kEndSeconds);
}

PlantedCampaign plant_hijack(SynthCorpus& corpus, const HijackCampaign& c,
                             std::size_t index, Rng& rng) {
  const std::string tp = "c" + std::to_string(index) + "t";
  const std::string up = "c" + std::to_string(index) + "u";
  const std::string label = "campaign" + std::to_string(index) + ":hijack";
  const std::string domain = *text::normalize_hashtag(c.domain);
  PlantedCampaign planted;
  planted.kind = FindingKind::hijack;

  corpus.annotations.set(domain, HashtagCategory::football);
  ensure_affiliation(corpus, domain);
  for (const char* tag : {"liberalsunite", "unsc", "maga", "tcot"}) ensure_political(corpus, tag);

  std::size_t tweet_n = 0, user_n = 0;
  auto next_tweet = [&] { return numbered(tp, tweet_n++, 6); };
  auto next_user = [&] {
    auto id = numbered(up, user_n++, 5);
    corpus.truth.user_community[id] = label;
    planted.user_ids.push_back(id);
    return id;
  };

  const auto t0 = event_time(rng);
  const std::string source_user = next_user();
  corpus.profiles.push_back({source_user, std::string(pick(kUsAudienceBios, rng)), false,
                             ActorType::political_user});
  TweetRecord source;
  source.tweet_id = next_tweet();
  source.user_id = source_user;
  source.timestamp = at_seconds(t0);
  source.kind = TweetKind::original;
  source.hashtags = {"liberalsunite", domain, "unsc", "maga", "tcot"};
  source.text = "Greatest accomplishment: the strongest Republican Party. Thank you, Obama.";
  for (const auto& h : source.hashtags) source.text += " #" + styled(h, rng);
  corpus.records.push_back(source);
  corpus.truth.political_tweets.insert(source.tweet_id);
  planted.subjects.push_back(source.tweet_id);
  planted.tweet_ids.push_back(source.tweet_id);

  // Distinct retweeters: the amplifier plus one retweet per other member.
  const std::size_t audience = c.retweets - c.repeat_amplifier_retweets + 1;
  const auto affiliated = static_cast<std::size_t>(
      std::llround(c.audience_affiliation * static_cast<double>(audience)));
  std::vector<std::string> members;
  for (std::size_t i = 0; i < audience; ++i) {
    const auto id = next_user();
    UserProfile p{id, "", false, std::nullopt};
    if (i == 0) {
      // The amplifier bot counts towards the affiliated share when any.
      p.description = affiliated > 0 ? club_display(domain, rng) + " news, every goal, every rumour"
                                     : "Breaking news bot";
      p.annotation = ActorType::fan_news;
    } else if (i < affiliated) {
      p.description = affiliated_bio(domain, rng);
    } else {
      p.description = std::string(pick(kUsAudienceBios, rng));
    }
    corpus.profiles.push_back(std::move(p));
    members.push_back(id);
  }

  auto emit = [&](TweetRecord r) {
    planted.tweet_ids.push_back(r.tweet_id);
    corpus.truth.political_tweets.insert(r.tweet_id);
    corpus.records.push_back(std::move(r));
  };
  for (std::size_t i = 0; i < audience; ++i) {
    const std::size_t times = i == 0 ? c.repeat_amplifier_retweets : 1;
    for (std::size_t k = 0; k < times; ++k) {
      emit(make_retweet(next_tweet(), members[i], at_seconds(after(rng, t0, 7 * 86400)),
                        source));
    }
  }
  for (std::size_t i = 0; i < c.quotes; ++i) {
    TweetRecord q;
    q.tweet_id = next_tweet();
    q.user_id = members[audience - 1 - i];
    q.timestamp = at_seconds(after(rng, t0, 7 * 86400));
    q.kind = TweetKind::quote;
    q.hashtags = {"maga", "tcot"};
    q.text = compose(rng, {}, {}, q.hashtags);
    set_reply_target(q, source);
    emit(std::move(q));
  }
  for (std::size_t i = 0; i < audience; ++i) {
    for (std::size_t k = 0; k < c.audience_posts; ++k) {
      TweetRecord o;
      o.tweet_id = next_tweet();
      o.user_id = members[i];
      o.timestamp = at_seconds(after(rng, t0 - 60 * 86400, 120 * 86400));
      o.kind = TweetKind::original;
      o.hashtags = {rng.bernoulli(0.5) ? "maga" : "tcot"};
      o.text = compose(rng, {}, {}, o.hashtags);
      emit(std::move(o));
    }
  }
  return planted;
}

PlantedCampaign plant_activism(SynthCorpus& corpus, const ActivismCampaign& c,
                               std::size_t index, Rng& rng) {
  const std::string tp = "c" + std::to_string(index) + "t";
  const std::string up = "c" + std::to_string(index) + "u";
  const std::string label = "campaign" + std::to_string(index) + ":activism";
  PlantedCampaign planted;
  planted.kind = FindingKind::embedded_activism;
  const std::vector<std::string> tags_pool = {"labour", "ge2017", "jc4pm"};
  for (const auto& t : tags_pool) ensure_political(corpus, t);

  std::vector<std::string> members;
  for (std::size_t i = 0; i < c.cluster_size; ++i) {
    auto id = numbered(up, i, 5);
    corpus.truth.user_community[id] = label;
    planted.user_ids.push_back(id);
    UserProfile p{id, "", false, std::nullopt};
    if (i < c.roots) {
      p.description = i % 2 == 0 ? "Ethical socialism"
                                 : "Getting Labour's election messages out";
      p.annotation = ActorType::activist_group;
      planted.subjects.push_back(id);
    } else {
      p.description = rng.bernoulli(0.5) ? std::string(pick(kPoliticalBios, rng))
                                         : std::string(pick(kNeutralBios, rng));
    }
    corpus.profiles.push_back(std::move(p));
    members.push_back(std::move(id));
  }

  const std::size_t slots_per = c.tweets_per_member;
  const std::size_t total = members.size() * slots_per;
  const auto retweets =
      static_cast<std::size_t>(std::llround(c.retweet_rate * static_cast<double>(total)));
  std::size_t originals = total - retweets;

  // Original slots: root slots first, then single slots of random members.
  std::vector<std::size_t> original_slots(members.size(), 0);
  for (std::size_t round = 0; round < slots_per && originals > 0; ++round) {
    for (std::size_t r = 0; r < c.roots && originals > 0; ++r) {
      ++original_slots[r];
      --originals;
    }
  }
  std::vector<std::size_t> others(members.size() - c.roots);
  std::iota(others.begin(), others.end(), std::size_t{c.roots});
  rng.shuffle(others.begin(), others.end());
  for (std::size_t i = 0; originals > 0; i = (i + 1) % others.size()) {
    if (original_slots[others[i]] < slots_per) {
      ++original_slots[others[i]];
      --originals;
    }
  }

  const auto t0 = event_time(rng);
  std::size_t tweet_n = 0;
  std::vector<std::size_t> root_posts, all_posts;  // positions in corpus.records
  for (std::size_t m = 0; m < members.size(); ++m) {
    for (std::size_t k = 0; k < original_slots[m]; ++k) {
      TweetRecord o;
      o.tweet_id = numbered(tp, tweet_n++, 6);
      o.user_id = members[m];
      o.timestamp = at_seconds(after(rng, t0, 3600));
      o.kind = TweetKind::original;
      o.hashtags = {tags_pool[rng.below(tags_pool.size())]};
      if (rng.bernoulli(0.5)) push_unique(o.hashtags, tags_pool[rng.below(tags_pool.size())]);
      o.text = compose(rng, {}, {"corbyn"}, o.hashtags);
      planted.tweet_ids.push_back(o.tweet_id);
      corpus.truth.political_tweets.insert(o.tweet_id);
      (m < c.roots ? root_posts : all_posts).push_back(corpus.records.size());
      corpus.records.push_back(std::move(o));
    }
  }
  all_posts.insert(all_posts.end(), root_posts.begin(), root_posts.end());

  for (std::size_t m = 0; m < members.size(); ++m) {
    for (std::size_t k = original_slots[m]; k < slots_per; ++k) {
      const auto& pool = rng.bernoulli(0.85) ? root_posts : all_posts;
      std::size_t pos = pick(pool, rng);
      for (int attempt = 0; corpus.records[pos].user_id == members[m] && attempt < 64; ++attempt) {
        pos = pick(all_posts, rng);
      }
      if (corpus.records[pos].user_id == members[m]) {
        throw ConfigError("activism: a member has no foreign post to retweet");
      }
      const TweetRecord source = corpus.records[pos];
      auto r = make_retweet(numbered(tp, tweet_n++, 6), members[m],
                            at_seconds(after(rng, std::chrono::duration_cast<std::chrono::seconds>(
                                                      source.timestamp.time_since_epoch())
                                                      .count(),
                                             2 * 86400)),
                            source);
      planted.tweet_ids.push_back(r.tweet_id);
      corpus.truth.political_tweets.insert(r.tweet_id);
      corpus.records.push_back(std::move(r));
    }
  }
  return planted;
}

PlantedCampaign plant_megaphone(SynthCorpus& corpus, const MegaphoneCampaign& c,
                                std::size_t index, Rng& rng) {
  const std::string tp = "c" + std::to_string(index) + "t";
  const std::string account = "c" + std::to_string(index) + "u00000";
  PlantedCampaign planted;
  planted.kind = FindingKind::megaphone;
  planted.subjects.push_back(account);
  planted.user_ids.push_back(account);
  corpus.truth.user_community[account] = "campaign" + std::to_string(index) + ":megaphone";
  corpus.profiles.push_back(
      {account, "Leader of the party. Member of Parliament.", true, ActorType::politician_or_party});
  ensure_political(corpus, "labour");
  corpus.annotations.set("arsenal", HashtagCategory::football);

  // Engagers are drawn from base users who already post politically.
  std::set<std::string> political_authors, all_authors;
  for (const auto& r : corpus.records) {
    all_authors.insert(r.user_id);
    if (corpus.truth.political_tweets.contains(r.tweet_id)) political_authors.insert(r.user_id);
  }
  std::vector<std::string> engagers(political_authors.begin(), political_authors.end());
  if (engagers.empty()) engagers.assign(all_authors.begin(), all_authors.end());
  if (engagers.empty()) throw ConfigError("megaphone: base corpus has no users to engage");

  std::size_t tweet_n = 0;
  auto emit = [&](TweetRecord r, bool political) {
    planted.tweet_ids.push_back(r.tweet_id);
    if (political) corpus.truth.political_tweets.insert(r.tweet_id);
    corpus.records.push_back(std::move(r));
  };

  std::vector<TweetRecord> own;
  for (std::size_t i = 0; i < c.own_posts; ++i) {
    TweetRecord o;
    o.tweet_id = numbered(tp, tweet_n++, 6);
    o.user_id = account;
    o.timestamp = at_seconds(event_time(rng));
    o.hashtags = {"labour"};
    o.text = compose(rng, {}, {}, o.hashtags);
    own.push_back(o);
    emit(std::move(o), true);
  }
  for (std::size_t i = 0; i < c.topical_posts; ++i) {
    TweetRecord o;
    o.tweet_id = numbered(tp, tweet_n++, 6);
    o.user_id = account;
    o.timestamp = at_seconds(event_time(rng));
    o.hashtags = {"arsenal", "facup"};
    corpus.annotations.set("facup", HashtagCategory::football);
    o.text = "Well done to the team on a brilliant cup run #Arsenal #FACup";
    emit(std::move(o), false);
  }
  for (std::size_t i = 0; i < c.mentions; ++i) {
    TweetRecord o;
    o.tweet_id = numbered(tp, tweet_n++, 6);
    o.user_id = pick(engagers, rng);
    o.timestamp = at_seconds(event_time(rng));
    o.mentioned_user_ids = {account};
    o.text = compose(rng, o.mentioned_user_ids, {"labour"}, {});
    emit(std::move(o), true);
  }
  auto respond = [&](TweetKind kind, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& parent = pick(own, rng);
      TweetRecord o;
      o.tweet_id = numbered(tp, tweet_n++, 6);
      o.user_id = pick(engagers, rng);
      o.timestamp = at_seconds(after(
          rng,
          std::chrono::duration_cast<std::chrono::seconds>(parent.timestamp.time_since_epoch())
              .count(),
          3 * 86400));
      o.kind = kind;
      o.text = compose(rng, {}, {"corbyn"}, {});
      set_reply_target(o, parent);
      emit(std::move(o), true);
    }
  };
  respond(TweetKind::reply, c.replies);
  respond(TweetKind::quote, c.quotes);
  return planted;
}

}  // namespace

double KindMix::share(TweetKind kind) const {
  switch (kind) {
    case TweetKind::original: return original;
    case TweetKind::retweet: return retweet;
    case TweetKind::quote: return quote;
    case TweetKind::reply: return reply;
  }
  return 0.0;
}

std::map<TweetKind, std::size_t> campaign_footprint(const CampaignSpec& spec) {
  std::map<TweetKind, std::size_t> out{{TweetKind::original, 0},
                                       {TweetKind::retweet, 0},
                                       {TweetKind::quote, 0},
                                       {TweetKind::reply, 0}};
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HijackCampaign>) {
          const std::size_t audience = c.retweets - c.repeat_amplifier_retweets + 1;
          out[TweetKind::original] = 1 + audience * c.audience_posts;
          out[TweetKind::retweet] = c.retweets;
          out[TweetKind::quote] = c.quotes;
        } else if constexpr (std::is_same_v<T, ActivismCampaign>) {
          const std::size_t total = static_cast<std::size_t>(c.cluster_size) * c.tweets_per_member;
          const auto rt = static_cast<std::size_t>(
              std::llround(c.retweet_rate * static_cast<double>(total)));
          out[TweetKind::retweet] = rt;
          out[TweetKind::original] = total - rt;
        } else {
          out[TweetKind::original] = c.own_posts + c.topical_posts + c.mentions;
          out[TweetKind::reply] = c.replies;
          out[TweetKind::quote] = c.quotes;
        }
      },
      spec);
  return out;
}

std::size_t campaign_accounts(const CampaignSpec& spec) {
  return std::visit(
      [](const auto& c) -> std::size_t {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HijackCampaign>) {
          return 1 + (c.retweets - c.repeat_amplifier_retweets + 1);
        } else if constexpr (std::is_same_v<T, ActivismCampaign>) {
          return c.cluster_size;
        } else {
          return 1;
        }
      },
      spec);
}

LexiconLists starter_lexicon() {
  LexiconLists l;
  for (std::size_t i = 0; i < 15; ++i) l.hashtags.emplace_back(kPoliticalNames[i]);
  for (auto k : kKeywords) l.keywords.emplace_back(k);
  l.excluded = {"vote"};
  return l;
}

void SynthConfig::validate() const {
  const double sum = kind_mix.original + kind_mix.retweet + kind_mix.quote + kind_mix.reply;
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("synth.kind_mix: shares must sum to 1");
  for (double s : {kind_mix.original, kind_mix.retweet, kind_mix.quote, kind_mix.reply}) {
    if (s < 0.0) throw ConfigError("synth.kind_mix: shares must be non-negative");
  }
  if (kind_mix.original <= 0.0) throw ConfigError("synth.kind_mix.original: must be > 0");
  if (!(vocab_overlap >= 0.0 && vocab_overlap < 1.0)) {
    throw ConfigError("synth.vocab_overlap: must be in [0, 1)");
  }
  if (n_hashtags < 16) throw ConfigError("synth.n_hashtags: must be >= 16");
  if (n_tweets == 0) throw ConfigError("synth.n_tweets: must be > 0");
  std::size_t accounts = 0;
  for (const auto& c : campaigns) {
    validate_campaign(c);
    accounts += campaign_accounts(c);
  }
  if (accounts > n_users) {
    throw ConfigError("synth.campaigns: need " + std::to_string(accounts) +
                      " accounts but n_users is " + std::to_string(n_users));
  }
  const std::size_t background = n_users - accounts;
  std::size_t sized = 0;
  for (const auto& s : community_spec) {
    if (s.size == 0) throw ConfigError("synth.community_spec: empty community");
    if (!(s.political_fraction >= 0.0 && s.political_fraction <= 1.0)) {
      throw ConfigError("synth.community_spec.political_fraction: must be in [0, 1]");
    }
    sized += s.size;
  }
  if (sized > background) {
    throw ConfigError("synth.community_spec: sizes exceed the users left after campaigns");
  }
  if (background < 16) {
    throw ConfigError("synth.n_users: campaigns leave fewer than 16 background users");
  }
}

PlantedCampaign plant_campaign(SynthCorpus& corpus, const CampaignSpec& spec,
                               std::uint64_t seed) {
  validate_campaign(spec);
  std::unordered_set<std::string_view> population;
  for (const auto& r : corpus.records) population.insert(r.user_id);
  if (population.empty()) throw ConfigError("plant_campaign: base corpus is empty");
  if (campaign_accounts(spec) > population.size()) {
    throw ConfigError("plant_campaign: campaign needs " +
                      std::to_string(campaign_accounts(spec)) + " accounts, population is " +
                      std::to_string(population.size()));
  }
  const std::size_t index = corpus.truth.campaigns.size();
  Rng rng(seed);
  PlantedCampaign planted = std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HijackCampaign>) {
          return plant_hijack(corpus, c, index, rng);
        } else if constexpr (std::is_same_v<T, ActivismCampaign>) {
          return plant_activism(corpus, c, index, rng);
        } else {
          return plant_megaphone(corpus, c, index, rng);
        }
      },
      spec);
  corpus.truth.campaigns.push_back(planted);
  return planted;
}

SynthCorpus generate_corpus(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  SynthCorpus out;

  std::size_t campaign_users = 0, campaign_tweets = 0;
  std::map<TweetKind, std::size_t> footprint;
  for (const auto& c : config.campaigns) {
    campaign_users += campaign_accounts(c);
    for (const auto& [k, n] : campaign_footprint(c)) {
      footprint[k] += n;
      campaign_tweets += n;
    }
  }
  if (campaign_tweets >= config.n_tweets) {
    throw ConfigError("synth.campaigns: footprint of " + std::to_string(campaign_tweets) +
                      " tweets leaves no background within n_tweets");
  }
  const std::size_t background_users = config.n_users - campaign_users;
  const std::size_t background_tweets = config.n_tweets - campaign_tweets;

  // Kind quotas over the whole corpus by largest remainder.
  constexpr std::array<TweetKind, 4> kinds = {TweetKind::original, TweetKind::retweet,
                                              TweetKind::quote, TweetKind::reply};
  std::array<std::size_t, 4> quota{};
  {
    std::array<double, 4> exact{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      exact[i] = config.kind_mix.share(kinds[i]) * static_cast<double>(config.n_tweets);
      quota[i] = static_cast<std::size_t>(std::floor(exact[i]));
      assigned += quota[i];
    }
    std::array<std::size_t, 4> order = {0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return exact[a] - std::floor(exact[a]) > exact[b] - std::floor(exact[b]);
    });
    for (std::size_t i = 0; assigned < config.n_tweets; ++i, ++assigned) ++quota[order[i % 4]];
    for (std::size_t i = 0; i < 4; ++i) {
      if (quota[i] < footprint[kinds[i]]) {
        throw ConfigError("synth.campaigns: " + std::string(to_string(kinds[i])) +
                          " footprint exceeds the kind_mix quota");
      }
      quota[i] -= footprint[kinds[i]];
    }
    if (quota[0] == 0) {
      throw ConfigError("synth.campaigns: no background originals left for responses to target");
    }
  }

  // Communities.
  std::vector<CommunitySpec> specs = config.community_spec;
  if (specs.empty()) {
    const std::array<std::pair<HashtagCategory, double>, 8> layout = {{
        {HashtagCategory::political, 0.8},
        {HashtagCategory::football, 0.15},
        {HashtagCategory::political, 0.8},
        {HashtagCategory::football, 0.15},
        {HashtagCategory::political, 0.7},
        {HashtagCategory::football, 0.1},
        {HashtagCategory::location, 0.25},
        {HashtagCategory::other, 0.2},
    }};
    for (std::size_t i = 0; i < layout.size(); ++i) {
      CommunitySpec s;
      s.size = background_users / layout.size() + (i < background_users % layout.size() ? 1 : 0);
      s.focus = layout[i].first;
      s.political_fraction = layout[i].second;
      specs.push_back(s);
    }
  } else {
    std::size_t sized = 0;
    for (const auto& s : specs) sized += s.size;
    if (sized < background_users) {
      CommunitySpec rest;
      rest.size = background_users - sized;
      rest.political_fraction = 0.2;
      specs.push_back(rest);
    }
  }

  std::vector<Community> comms(specs.size());
  TagMinter minter;
  const std::size_t per_vocab = std::max<std::size_t>(8, config.n_hashtags / specs.size());
  auto note_tag = [&](const std::string& tag, HashtagCategory c) {
    if (c != HashtagCategory::other) out.annotations.set(tag, c);
    if (c == HashtagCategory::political) push_unique(out.lexicon.hashtags, tag);
    if (c == HashtagCategory::football) ensure_affiliation(out, tag);
  };
  // Football communities claim football names first so the big clubs live
  // where the fans are.
  std::vector<std::size_t> mint_order(specs.size());
  std::iota(mint_order.begin(), mint_order.end(), 0);
  std::stable_partition(mint_order.begin(), mint_order.end(), [&](std::size_t i) {
    return specs[i].focus == HashtagCategory::football;
  });
  for (std::size_t ci : mint_order) {
    auto& cm = comms[ci];
    cm.spec = specs[ci];
    cm.label = "c" + std::to_string(ci);
    if (!cm.spec.vocabulary.empty()) {
      for (const auto& raw : cm.spec.vocabulary) {
        auto tag = text::normalize_hashtag(raw);
        if (!tag) throw ConfigError("synth.community_spec.vocabulary: empty hashtag");
        const auto c = out.annotations.category(*tag);
        cm.tags[static_cast<std::size_t>(c)].push_back(*tag);
      }
    } else {
      const auto mix = mix_for(cm.spec.focus);
      const std::array<double, 4> shares = {mix.political, mix.football, mix.location, mix.other};
      for (std::size_t c = 0; c < 4; ++c) {
        const auto n = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(shares[c] * static_cast<double>(per_vocab))));
        for (std::size_t k = 0; k < n; ++k) {
          auto tag = minter.next(static_cast<HashtagCategory>(c));
          note_tag(tag, static_cast<HashtagCategory>(c));
          cm.tags[c].push_back(std::move(tag));
        }
      }
    }
  }
  // Cross-community overlap: swap some non-leading tags for a same-category
  // tag of another community.
  if (comms.size() > 1 && config.vocab_overlap > 0.0) {
    const auto snapshot = comms;
    for (std::size_t ci = 0; ci < comms.size(); ++ci) {
      for (std::size_t c = 0; c < 4; ++c) {
        auto& tags = comms[ci].tags[c];
        for (std::size_t r = 1; r < tags.size(); ++r) {
          if (!rng.bernoulli(config.vocab_overlap)) continue;
          std::size_t other = rng.below(comms.size() - 1);
          if (other >= ci) ++other;
          const auto& pool = snapshot[other].tags[c];
          if (pool.empty()) continue;
          const auto& tag = pick(pool, rng);
          if (std::find(tags.begin(), tags.end(), tag) == tags.end()) tags[r] = tag;
        }
      }
    }
  }
  std::vector<std::string> all_political, all_football;
  for (auto& cm : comms) {
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t r = 0; r < cm.tags[c].size(); ++r) {
        cm.weights[c].add(1.0 / static_cast<double>(r + 1));
      }
    }
    for (const auto& t : cm.tags[0]) push_unique(all_political, t);
    for (const auto& t : cm.tags[1]) push_unique(all_football, t);
  }
  for (const auto& t : all_football) out.annotations.set(t, HashtagCategory::football);
  for (const auto& t : all_political) out.annotations.set(t, HashtagCategory::political);
  {
    auto base = starter_lexicon();
    for (const auto& t : base.hashtags) push_unique(out.lexicon.hashtags, t);
    out.lexicon.keywords = base.keywords;
    out.lexicon.excluded = base.excluded;
  }

  // Users.
  std::vector<User> users;
  constexpr std::size_t kHubsPerCommunity = 4;
  constexpr std::array<ActorType, kHubsPerCommunity> hub_types = {
      ActorType::football_club, ActorType::media, ActorType::football_club, ActorType::fan_news};
  std::size_t next_user = 0;
  for (std::size_t ci = 0; ci < comms.size(); ++ci) {
    auto& cm = comms[ci];
    for (std::size_t k = 0; k < cm.spec.size; ++k) {
      User u;
      u.id = numbered("u", next_user++, 6);
      u.community = ci;
      u.hub = k < kHubsPerCommunity && cm.spec.size >= 4 * kHubsPerCommunity;
      u.activity = u.hub ? 25.0 : lognormal(rng, 0.6);
      u.popularity = u.hub ? 60.0 : 0.5 + rng.uniform();
      double p_fan = 0.15;
      if (cm.spec.focus == HashtagCategory::football) p_fan = 0.5;
      if (cm.spec.focus == HashtagCategory::political) p_fan = 0.1;
      const auto& football = cm.tags[1];
      if (!u.hub && !football.empty() && rng.bernoulli(p_fan)) {
        u.favourite = football[cm.weights[1].draw(rng)];
      }
      UserProfile p{u.id, "", false, std::nullopt};
      if (u.hub) {
        const auto type = hub_types[k];
        p.verified = true;
        p.annotation = type;
        const auto club = football.empty() ? std::string("football") : football[k % football.size()];
        p.description = type == ActorType::media ? "Sport and news desk, " + cm.label
                        : type == ActorType::fan_news ? "Unofficial " + club_display(club, rng) + " news"
                                                      : "Official account of " + club_display(club, rng);
      } else if (!u.favourite.empty()) {
        p.description = affiliated_bio(u.favourite, rng);
      } else if (rng.bernoulli(0.8)) {
        p.description = cm.spec.political_fraction >= 0.5 && rng.bernoulli(0.6)
                            ? std::string(pick(kPoliticalBios, rng))
                            : std::string(pick(kNeutralBios, rng));
        if (cm.spec.focus == HashtagCategory::political && rng.bernoulli(0.5)) {
          p.annotation = ActorType::political_user;
        }
      }
      out.profiles.push_back(std::move(p));
      out.truth.user_community[u.id] = cm.label;
      cm.members.push_back(users.size());
      cm.popularity.add(u.popularity);
      users.push_back(std::move(u));
    }
  }
  Weighted activity, popularity;
  for (const auto& u : users) {
    activity.add(u.activity);
    popularity.add(u.popularity);
  }

  // Background kind sequence; the first posts are originals so that every
  // later response has something to point at.
  std::vector<TweetKind> sequence;
  for (std::size_t i = 0; i < 4; ++i) sequence.insert(sequence.end(), quota[i], kinds[i]);
  rng.shuffle(sequence.begin(), sequence.end());
  {
    std::size_t lead = std::min<std::size_t>(20, quota[0]);
    std::size_t j = 0;
    for (std::size_t i = 0; i < lead; ++i) {
      if (sequence[i] == TweetKind::original) continue;
      j = std::max(j, lead);
      while (sequence[j] != TweetKind::original) ++j;
      std::swap(sequence[i], sequence[j]);
    }
  }
  std::vector<std::int64_t> times(background_tweets);
  for (auto& t : times) {
    t = kStartSeconds +
        static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(kEndSeconds - kStartSeconds)));
  }
  std::sort(times.begin(), times.end());

  std::vector<std::vector<std::size_t>> posts_of(users.size());  // non-retweets
  std::vector<std::size_t> all_posts;
  std::vector<std::size_t> author_of;
  out.records.reserve(config.n_tweets);

  auto draw_target_user = [&](std::size_t self) {
    const auto& cm = comms[users[self].community];
    for (int attempt = 0; attempt < 8; ++attempt) {
      const std::size_t u = rng.bernoulli(0.8) ? cm.members[cm.popularity.draw(rng)]
                                               : popularity.draw(rng);
      if (u != self) return u;
    }
    return self;
  };
  auto draw_parent = [&](std::size_t self) -> std::size_t {
    const std::size_t target = draw_target_user(self);
    if (target != self && !posts_of[target].empty()) return pick(posts_of[target], rng);
    for (int attempt = 0; attempt < 8; ++attempt) {
      const auto pos = pick(all_posts, rng);
      if (author_of[pos] != self) return pos;
    }
    return pick(all_posts, rng);
  };
  auto draw_tag = [&](const Community& cm, HashtagCategory c, const User& u) {
    const auto ci = static_cast<std::size_t>(c);
    if (c == HashtagCategory::football && !u.favourite.empty() && rng.bernoulli(0.6)) {
      return u.favourite;
    }
    if (cm.tags[ci].empty()) {
      return c == HashtagCategory::political ? pick(all_political, rng) : pick(all_football, rng);
    }
    return cm.tags[ci][cm.weights[ci].draw(rng)];
  };
  auto content = [&](TweetRecord& r, const User& u, bool political) {
    const auto& cm = comms[u.community];
    std::vector<std::string_view> keywords;
    if (political) {
      const bool keyword_only = rng.bernoulli(0.2);
      if (!keyword_only) {
        r.hashtags.push_back(draw_tag(cm, HashtagCategory::political, u));
        if (rng.bernoulli(0.4)) push_unique(r.hashtags, draw_tag(cm, HashtagCategory::political, u));
      }
      if (keyword_only || rng.bernoulli(0.4)) keywords.push_back(pick(kKeywords, rng));
    }
    const auto extra = (political ? 0 : 1) + rng.below(2);
    for (std::uint64_t k = 0; k < extra; ++k) {
      const double x = rng.uniform();
      HashtagCategory c = x < 0.55 ? HashtagCategory::football
                          : x < 0.75 ? HashtagCategory::location
                                     : HashtagCategory::other;
      if (cm.spec.focus == HashtagCategory::location && rng.bernoulli(0.5)) c = HashtagCategory::location;
      if (cm.spec.focus == HashtagCategory::other && rng.bernoulli(0.5)) c = HashtagCategory::other;
      auto tag = draw_tag(cm, c, u);
      if (cm.tags[static_cast<std::size_t>(c)].empty() && c != HashtagCategory::football) continue;
      push_unique(r.hashtags, tag);
    }
    if (u.hub && std::none_of(r.hashtags.begin(), r.hashtags.end(), [&](const auto& h) {
          return out.annotations.category(h) == HashtagCategory::football;
        })) {
      r.hashtags.push_back(draw_tag(cm, HashtagCategory::football, u));
    }
    r.text = compose(rng, r.mentioned_user_ids, keywords, r.hashtags);
    if (political) out.truth.political_tweets.insert(r.tweet_id);
  };

  for (std::size_t i = 0; i < background_tweets; ++i) {
    const std::size_t a = activity.draw(rng);
    const auto& u = users[a];
    TweetRecord r;
    r.tweet_id = numbered("t", i, 7);
    r.user_id = u.id;
    r.timestamp = at_seconds(times[i]);
    r.kind = sequence[i];
    if (r.kind == TweetKind::retweet) {
      const auto& src = out.records[draw_parent(a)];
      r = make_retweet(r.tweet_id, r.user_id, r.timestamp, src);
      if (out.truth.political_tweets.contains(src.tweet_id)) {
        out.truth.political_tweets.insert(r.tweet_id);
      }
    } else {
      if (r.kind != TweetKind::original) set_reply_target(r, out.records[draw_parent(a)]);
      if (r.kind != TweetKind::reply && rng.bernoulli(0.25)) {
        const auto m = draw_target_user(a);
        if (m != a) r.mentioned_user_ids.push_back(users[m].id);
      }
      content(r, u, rng.bernoulli(comms[u.community].spec.political_fraction));
      posts_of[a].push_back(out.records.size());
      all_posts.push_back(out.records.size());
    }
    author_of.push_back(a);
    out.records.push_back(std::move(r));
  }

  // Campaigns, each from its own stream so adding one leaves the others
  // unchanged.
  for (std::size_t k = 0; k < config.campaigns.size(); ++k) {
    plant_campaign(out, config.campaigns[k], config.seed ^ (0x9E3779B97F4A7C15ULL * (k + 1)));
  }

  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const TweetRecord& x, const TweetRecord& y) {
                     return x.timestamp != y.timestamp ? x.timestamp < y.timestamp
                                                       : x.tweet_id < y.tweet_id;
                   });
  std::sort(out.profiles.begin(), out.profiles.end(),
            [](const auto& x, const auto& y) { return x.user_id < y.user_id; });
  std::sort(out.affiliations.begin(), out.affiliations.end(),
            [](const auto& x, const auto& y) { return x.domain < y.domain; });
  return out;
}

std::string truth_to_json(const GroundTruth& truth) {
  ojson j;
  j["schema_version"] = 1;
  ojson users = ojson::object();
  for (const auto& [u, c] : truth.user_community) users[u] = c;
  j["user_community"] = std::move(users);
  j["political_tweets"] = truth.political_tweets;
  ojson campaigns = ojson::array();
  for (const auto& c : truth.campaigns) {
    campaigns.push_back({{"kind", std::string(to_string(c.kind))},
                         {"subjects", c.subjects},
                         {"tweet_ids", c.tweet_ids},
                         {"user_ids", c.user_ids}});
  }
  j["campaigns"] = std::move(campaigns);
  return j.dump(2) + "\n";
}

std::string lexicon_to_json(const LexiconLists& lexicon) {
  ojson j;
  j["hashtags"] = lexicon.hashtags;
  j["keywords"] = lexicon.keywords;
  j["excluded"] = lexicon.excluded;
  return j.dump(2) + "\n";
}

std::string annotations_to_json(const NodeAnnotations& annotations) {
  std::map<std::string, HashtagCategory> sorted(annotations.entries().begin(),
                                                annotations.entries().end());
  ojson j = ojson::object();
  for (const auto& [tag, c] : sorted) j[tag] = std::string(to_string(c));
  return j.dump(2) + "\n";
}

std::string affiliations_to_json(const std::vector<AffiliationProfile>& affiliations) {
  ojson j = ojson::array();
  for (const auto& a : affiliations) {
    ojson e;
    e["domain"] = a.domain;
    e["keywords"] = a.keywords;
    if (a.baseline_rate) e["baseline_rate"] = *a.baseline_rate;
    j.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

}  // namespace pitchside
