#include "pitchside/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "pitchside/errors.hpp"
#include "pitchside/text.hpp"

namespace pitchside {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 4> kKindNames = {"original", "retweet",
                                                         "quote", "reply"};
constexpr std::array<std::string_view, 8> kActorNames = {
    "politician_or_party", "media",          "football_club", "fan_news",
    "political_user",      "activist_group", "football_fan",  "other"};

bool parse_digits(std::string_view s, std::size_t pos, std::size_t len,
                  int& out) {
  if (pos + len > s.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    value = value * 10 + (s[i] - '0');
  }
  out = value;
  return true;
}

std::optional<std::string> optional_string(const json& obj, const char* key,
                                           bool& ok) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string() || it->get_ref<const std::string&>().empty()) {
    ok = false;
    return std::nullopt;
  }
  return it->get<std::string>();
}

bool string_array(const json& obj, const char* key, bool required,
                  std::vector<std::string>& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return !required;
  if (!it->is_array()) return false;
  out.clear();
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_string()) return false;
    out.push_back(v.get<std::string>());
  }
  return true;
}

std::string fold_term(std::string_view raw) {
  std::string folded = text::fold(raw);
  const auto first = folded.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = folded.find_last_not_of(" \t\r\n");
  return folded.substr(first, last - first + 1);
}

std::vector<std::string> sorted(const std::unordered_set<std::string>& set) {
  std::vector<std::string> out(set.begin(), set.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::string dump(const ordered_json& j) {
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  if (s.size() != 20 && s.size() != 24) return std::nullopt;
  int y, mo, d, h, mi, se, ms = 0;
  if (!parse_digits(s, 0, 4, y) || s[4] != '-' || !parse_digits(s, 5, 2, mo) ||
      s[7] != '-' || !parse_digits(s, 8, 2, d) || s[10] != 'T' ||
      !parse_digits(s, 11, 2, h) || s[13] != ':' ||
      !parse_digits(s, 14, 2, mi) || s[16] != ':' ||
      !parse_digits(s, 17, 2, se)) {
    return std::nullopt;
  }
  if (s.size() == 24) {
    if (s[19] != '.' || !parse_digits(s, 20, 3, ms) || s[23] != 'Z') {
      return std::nullopt;
    }
  } else if (s[19] != 'Z') {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 59) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{se} +
         milliseconds{ms};
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<milliseconds> tod{t - day_point};
  char buf[32];
  const auto ms = tod.subseconds().count();
  if (ms != 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()),
                  static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()),
                  static_cast<int>(ms));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()),
                  static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
  }
  return buf;
}

std::string_view to_string(TweetKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<TweetKind> parse_tweet_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<TweetKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(ActorType type) {
  return kActorNames[static_cast<std::size_t>(type)];
}

std::optional<ActorType> parse_actor_type(std::string_view s) {
  for (std::size_t i = 0; i < kActorNames.size(); ++i) {
    if (kActorNames[i] == s) return static_cast<ActorType>(i);
  }
  return std::nullopt;
}

std::optional<std::string> normalize_hashtag(std::string_view raw) {
  return text::normalize_hashtag(raw);
}

Lexicon Lexicon::make(std::span<const std::string> hashtags,
                      std::span<const std::string> keywords,
                      std::span<const std::string> excluded) {
  Lexicon lex;
  for (const auto& raw : excluded) {
    auto term = fold_term(raw);
    if (term.empty()) throw ConfigError("lexicon: empty excluded term");
    lex.excluded_terms.insert(std::move(term));
  }
  for (const auto& raw : hashtags) {
    auto tag = text::normalize_hashtag(raw);
    if (!tag) throw ConfigError("lexicon: hashtag '" + raw + "' is empty");
    if (lex.excluded_terms.contains(*tag)) {
      throw ConfigError("lexicon: hashtag '" + *tag + "' is also excluded");
    }
    lex.hashtags.insert(std::move(*tag));
  }
  for (const auto& raw : keywords) {
    auto term = fold_term(raw);
    if (term.empty()) throw ConfigError("lexicon: empty keyword");
    if (lex.excluded_terms.contains(term)) {
      throw ConfigError("lexicon: keyword '" + term + "' is also excluded");
    }
    lex.keywords.insert(std::move(term));
  }
  return lex;
}

std::optional<TweetRecord> parse_record(std::string_view line) {
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;

  TweetRecord r;
  auto str = [&](const char* key, std::string& out, bool allow_empty) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) return false;
    out = it->get<std::string>();
    return allow_empty || !out.empty();
  };
  std::string ts, kind;
  if (!str("tweet_id", r.tweet_id, false) || !str("user_id", r.user_id, false) ||
      !str("timestamp", ts, false) || !str("text", r.text, true) ||
      !str("kind", kind, false)) {
    return std::nullopt;
  }
  auto parsed_ts = parse_timestamp(ts);
  auto parsed_kind = parse_tweet_kind(kind);
  if (!parsed_ts || !parsed_kind) return std::nullopt;
  r.timestamp = *parsed_ts;
  r.kind = *parsed_kind;

  std::vector<std::string> raw_tags;
  if (!string_array(j, "hashtags", true, raw_tags)) return std::nullopt;
  for (const auto& raw : raw_tags) {
    auto tag = text::normalize_hashtag(raw);
    if (!tag) continue;
    if (std::find(r.hashtags.begin(), r.hashtags.end(), *tag) ==
        r.hashtags.end()) {
      r.hashtags.push_back(std::move(*tag));
    }
  }
  if (!string_array(j, "mentioned_user_ids", false, r.mentioned_user_ids)) {
    return std::nullopt;
  }

  bool ok = true;
  r.target_tweet_id = optional_string(j, "target_tweet_id", ok);
  r.target_user_id = optional_string(j, "target_user_id", ok);
  if (!ok) return std::nullopt;
  const bool is_original = r.kind == TweetKind::original;
  if (is_original == r.target_tweet_id.has_value()) return std::nullopt;
  if (is_original && r.target_user_id) return std::nullopt;
  return r;
}

std::string serialize_record(const TweetRecord& r) {
  ordered_json j;
  j["tweet_id"] = r.tweet_id;
  j["user_id"] = r.user_id;
  j["timestamp"] = format_timestamp(r.timestamp);
  j["text"] = r.text;
  j["hashtags"] = r.hashtags;
  j["kind"] = to_string(r.kind);
  if (r.target_tweet_id) j["target_tweet_id"] = *r.target_tweet_id;
  if (r.target_user_id) j["target_user_id"] = *r.target_user_id;
  j["mentioned_user_ids"] = r.mentioned_user_ids;
  return dump(j);
}

ParseResult parse_stream(std::istream& in) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  std::size_t non_blank = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++non_blank;
    if (auto record = parse_record(line)) {
      result.records.push_back(std::move(*record));
    } else {
      ++result.malformed;
      result.malformed_lines.push_back(line_no);
    }
  }
  if (in.bad()) throw IoError("read error while parsing corpus stream");
  if (result.malformed * 2 > non_blank) {
    throw CorpusFormatError(std::to_string(result.malformed) + " of " +
                            std::to_string(non_blank) +
                            " lines are not valid tweet records");
  }
  return result;
}

ParseResult read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  return parse_stream(in);
}

void write_corpus(std::ostream& out, std::span<const TweetRecord> records) {
  for (const auto& r : records) out << serialize_record(r) << '\n';
}

Classification classify_political(const TweetRecord& tweet,
                                  const Lexicon& lexicon) {
  Classification result;
  auto add = [&](const std::string& term) {
    if (std::find(result.matched_terms.begin(), result.matched_terms.end(),
                  term) == result.matched_terms.end()) {
      result.matched_terms.push_back(term);
    }
  };
  for (const auto& tag : tweet.hashtags) {
    if (lexicon.hashtags.contains(tag) && !lexicon.excluded_terms.contains(tag)) {
      add(tag);
    }
  }
  if (!lexicon.keywords.empty()) {
    const std::string folded = text::fold(tweet.text);
    for (const auto& keyword : sorted(lexicon.keywords)) {
      if (lexicon.excluded_terms.contains(keyword)) continue;
      if (text::contains_word(folded, keyword)) add(keyword);
    }
  }
  result.is_political = !result.matched_terms.empty();
  return result;
}

ExtractionResult extract_political_subset(std::span<const TweetRecord> corpus,
                                          const Lexicon& lexicon) {
  ExtractionResult result;
  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(corpus.size());
  std::vector<bool> first_occurrence(corpus.size(), false);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    first_occurrence[i] = index.emplace(corpus[i].tweet_id, i).second;
  }

  std::vector<bool> political(corpus.size(), false);
  std::vector<bool> include(corpus.size(), false);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!first_occurrence[i]) continue;
    political[i] = classify_political(corpus[i], lexicon).is_political;
    include[i] = political[i];
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& t = corpus[i];
    if (!political[i]) continue;
    if (t.kind != TweetKind::quote && t.kind != TweetKind::reply) continue;
    auto it = index.find(*t.target_tweet_id);
    if (it == index.end()) {
      result.missing_parents.push_back(*t.target_tweet_id);
      continue;
    }
    if (!include[it->second]) {
      include[it->second] = true;
      ++result.context_parents;
    }
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!include[i]) continue;
    if (political[i]) ++result.political;
    result.records.push_back(corpus[i]);
  }
  return result;
}

CorpusSummary summarize(std::span<const TweetRecord> corpus,
                        const Lexicon* lexicon, std::size_t top_n) {
  CorpusSummary s;
  s.total_tweets = corpus.size();
  for (auto kind : kAllTweetKinds) {
    s.count_by_kind[kind] = 0;
    s.share_by_kind[kind] = 0.0;
  }
  std::unordered_set<std::string_view> users;
  std::unordered_map<std::string_view, std::size_t> tag_counts;
  for (const auto& t : corpus) {
    users.insert(t.user_id);
    ++s.count_by_kind[t.kind];
    for (const auto& tag : t.hashtags) ++tag_counts[tag];
    if (!s.date_range) {
      s.date_range.emplace(t.timestamp, t.timestamp);
    } else {
      s.date_range->first = std::min(s.date_range->first, t.timestamp);
      s.date_range->second = std::max(s.date_range->second, t.timestamp);
    }
  }
  s.unique_users = users.size();
  s.unique_hashtags = tag_counts.size();
  if (s.total_tweets > 0) {
    for (auto kind : kAllTweetKinds) {
      s.share_by_kind[kind] = static_cast<double>(s.count_by_kind[kind]) /
                              static_cast<double>(s.total_tweets);
    }
  }

  std::vector<std::pair<std::string, std::size_t>> ranked;
  ranked.reserve(tag_counts.size());
  for (const auto& [tag, count] : tag_counts) ranked.emplace_back(tag, count);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  for (const auto& entry : ranked) {
    if (s.top_hashtags.size() < top_n) s.top_hashtags.push_back(entry);
    if (lexicon && lexicon->hashtags.contains(entry.first) &&
        s.top_political_hashtags.size() < top_n) {
      s.top_political_hashtags.push_back(entry);
    }
  }
  if (lexicon) s.political_keywords = sorted(lexicon->keywords);
  return s;
}

std::string summary_to_json(const CorpusSummary& s) {
  auto ranking = [](const auto& list) {
    ordered_json arr = ordered_json::array();
    for (const auto& [tag, count] : list) {
      ordered_json e;
      e["hashtag"] = tag;
      e["count"] = count;
      arr.push_back(std::move(e));
    }
    return arr;
  };
  ordered_json j;
  j["total_tweets"] = s.total_tweets;
  if (s.date_range) {
    j["date_range"] = {{"start", format_timestamp(s.date_range->first)},
                       {"end", format_timestamp(s.date_range->second)}};
  } else {
    j["date_range"] = nullptr;
  }
  j["unique_users"] = s.unique_users;
  ordered_json counts, shares;
  for (auto kind : kAllTweetKinds) {
    const std::string key(to_string(kind));
    counts[key] = s.count_by_kind.at(kind);
    shares[key] = s.share_by_kind.at(kind);
  }
  j["count_by_kind"] = std::move(counts);
  j["share_by_kind"] = std::move(shares);
  j["unique_hashtags"] = s.unique_hashtags;
  j["top_hashtags"] = ranking(s.top_hashtags);
  j["top_political_hashtags"] = ranking(s.top_political_hashtags);
  j["political_keywords"] = s.political_keywords;
  return j.dump(2) + "\n";
}

Lexicon parse_lexicon(std::string_view json_text) {
  json j = json::parse(json_text.begin(), json_text.end(), nullptr, false,
                       /*ignore_comments=*/true);
  if (j.is_discarded() || !j.is_object()) {
    throw ConfigError("lexicon: not a JSON object");
  }
  std::vector<std::string> hashtags, keywords, excluded;
  if (!string_array(j, "hashtags", false, hashtags) ||
      !string_array(j, "keywords", false, keywords) ||
      !string_array(j, "excluded", false, excluded)) {
    throw ConfigError(
        "lexicon: 'hashtags', 'keywords' and 'excluded' must be string arrays");
  }
  return Lexicon::make(hashtags, keywords, excluded);
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open lexicon file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_lexicon(buf.str());
}

std::vector<UserProfile> parse_profiles(std::istream& in) {
  std::vector<UserProfile> profiles;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "profiles line " + std::to_string(line_no);
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("user_id") ||
        !j["user_id"].is_string()) {
      throw ConfigError(where + ": expected an object with a user_id");
    }
    UserProfile p;
    p.user_id = j["user_id"].get<std::string>();
    if (auto it = j.find("description"); it != j.end() && it->is_string()) {
      p.description = it->get<std::string>();
    }
    if (auto it = j.find("verified"); it != j.end() && it->is_boolean()) {
      p.verified = it->get<bool>();
    }
    if (auto it = j.find("annotation"); it != j.end() && !it->is_null()) {
      auto type = it->is_string() ? parse_actor_type(it->get<std::string>())
                                  : std::nullopt;
      if (!type) {
        throw ConfigError(where + ": unknown actor type " + it->dump());
      }
      p.annotation = *type;
    }
    if (!seen.insert(p.user_id).second) {
      throw ConfigError(where + ": duplicate user_id '" + p.user_id + "'");
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

std::vector<UserProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open profile file " + path.string());
  return parse_profiles(in);
}

std::string serialize_profile(const UserProfile& p) {
  ordered_json j;
  j["user_id"] = p.user_id;
  j["description"] = p.description;
  j["verified"] = p.verified;
  if (p.annotation) {
    j["annotation"] = to_string(*p.annotation);
  } else {
    j["annotation"] = nullptr;
  }
  return dump(j);
}

ProfileIndex index_profiles(std::span<const UserProfile> profiles) {
  ProfileIndex index;
  index.reserve(profiles.size());
  for (const auto& p : profiles) index.emplace(p.user_id, p);
  return index;
}

}  // namespace pitchside
