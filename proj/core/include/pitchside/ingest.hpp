#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace pitchside {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// Parses "YYYY-MM-DDTHH:MM:SS[.mmm]Z". Returns nullopt on any deviation.
std::optional<Timestamp> parse_timestamp(std::string_view s);
// Inverse of parse_timestamp; milliseconds are written only when nonzero.
std::string format_timestamp(Timestamp t);

enum class TweetKind { original, retweet, quote, reply };
inline constexpr std::array<TweetKind, 4> kAllTweetKinds = {
    TweetKind::original, TweetKind::retweet, TweetKind::quote,
    TweetKind::reply};

std::string_view to_string(TweetKind kind);
std::optional<TweetKind> parse_tweet_kind(std::string_view s);

struct TweetRecord {
  std::string tweet_id;
  std::string user_id;
  Timestamp timestamp{};
  std::string text;
  std::vector<std::string> hashtags;  // normalized, deduplicated
  TweetKind kind = TweetKind::original;
  std::optional<std::string> target_tweet_id;  // set iff kind != original
  std::optional<std::string> target_user_id;
  std::vector<std::string> mentioned_user_ids;

  bool operator==(const TweetRecord&) const = default;
};

enum class ActorType {
  politician_or_party,
  media,
  football_club,
  fan_news,
  political_user,
  activist_group,
  football_fan,
  other
};
inline constexpr std::array<ActorType, 8> kAllActorTypes = {
    ActorType::politician_or_party, ActorType::media,
    ActorType::football_club,       ActorType::fan_news,
    ActorType::political_user,      ActorType::activist_group,
    ActorType::football_fan,        ActorType::other};

std::string_view to_string(ActorType type);
std::optional<ActorType> parse_actor_type(std::string_view s);

struct UserProfile {
  std::string user_id;
  std::string description;
  bool verified = false;
  std::optional<ActorType> annotation;
};

using ProfileIndex = std::unordered_map<std::string, UserProfile>;

struct Lexicon {
  std::unordered_set<std::string> hashtags;
  std::unordered_set<std::string> keywords;
  std::unordered_set<std::string> excluded_terms;

  // Normalizes every entry and checks the disjointness invariants; throws
  // ConfigError when an entry is empty or also listed as excluded.
  static Lexicon make(std::span<const std::string> hashtags,
                      std::span<const std::string> keywords,
                      std::span<const std::string> excluded);
};

struct CorpusSummary {
  std::size_t total_tweets = 0;
  std::optional<std::pair<Timestamp, Timestamp>> date_range;
  std::size_t unique_users = 0;
  std::map<TweetKind, std::size_t> count_by_kind;
  std::map<TweetKind, double> share_by_kind;
  std::size_t unique_hashtags = 0;
  std::vector<std::pair<std::string, std::size_t>> top_hashtags;
  // Filled only when summarize() is given a lexicon.
  std::vector<std::pair<std::string, std::size_t>> top_political_hashtags;
  std::vector<std::string> political_keywords;
};

struct ParseResult {
  std::vector<TweetRecord> records;
  std::size_t malformed = 0;
  std::vector<std::size_t> malformed_lines;  // 1-based
};

// Parses one JSON line into a record; nullopt when the line violates the
// record schema. Hashtags are normalized and deduplicated on the way in.
std::optional<TweetRecord> parse_record(std::string_view line);
std::string serialize_record(const TweetRecord& record);

// Reads newline-delimited records. Blank lines are ignored. Throws
// CorpusFormatError when more than half of the non-blank lines are malformed.
ParseResult parse_stream(std::istream& in);
ParseResult read_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, std::span<const TweetRecord> records);

std::optional<std::string> normalize_hashtag(std::string_view raw);

struct Classification {
  bool is_political = false;
  std::vector<std::string> matched_terms;
};

Classification classify_political(const TweetRecord& tweet,
                                  const Lexicon& lexicon);

struct ExtractionResult {
  std::vector<TweetRecord> records;  // corpus order, no duplicates
  std::size_t political = 0;
  std::size_t context_parents = 0;
  std::vector<std::string> missing_parents;
};

// Political tweets plus the direct parents of political quotes and replies
// that are present in the corpus.
ExtractionResult extract_political_subset(std::span<const TweetRecord> corpus,
                                          const Lexicon& lexicon);

CorpusSummary summarize(std::span<const TweetRecord> corpus,
                        const Lexicon* lexicon = nullptr,
                        std::size_t top_n = 15);
std::string summary_to_json(const CorpusSummary& summary);

Lexicon load_lexicon(const std::filesystem::path& path);
Lexicon parse_lexicon(std::string_view json_text);

std::vector<UserProfile> parse_profiles(std::istream& in);
std::vector<UserProfile> load_profiles(const std::filesystem::path& path);
std::string serialize_profile(const UserProfile& profile);
ProfileIndex index_profiles(std::span<const UserProfile> profiles);

}  // namespace pitchside
