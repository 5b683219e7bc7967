#include "pitchside/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pitchside/errors.hpp"

namespace pitchside {

namespace {

constexpr std::array<std::string_view, 4> kCategoryNames = {
    "political", "football", "location", "other"};
constexpr std::array<std::string_view, 4> kInteractionNames = {
    "retweet", "quote", "reply", "mention"};

std::optional<InteractionKind> interaction_of(TweetKind kind) {
  switch (kind) {
    case TweetKind::retweet:
      return InteractionKind::retweet;
    case TweetKind::quote:
      return InteractionKind::quote;
    case TweetKind::reply:
      return InteractionKind::reply;
    case TweetKind::original:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(HashtagCategory c) {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<HashtagCategory> parse_category(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == s) return static_cast<HashtagCategory>(i);
  }
  return std::nullopt;
}

std::string_view to_string(InteractionKind kind) {
  return kInteractionNames[static_cast<std::size_t>(kind)];
}

HashtagCategory NodeAnnotations::category(std::string_view id) const {
  auto it = categories_.find(std::string(id));
  return it == categories_.end() ? HashtagCategory::other : it->second;
}

NodeAnnotations parse_annotations(std::string_view json_text) {
  auto j = nlohmann::json::parse(json_text.begin(), json_text.end(), nullptr,
                                 false, true);
  if (j.is_discarded() || !j.is_object()) {
    throw ConfigError("annotations: expected a JSON object of hashtag -> category");
  }
  NodeAnnotations annotations;
  for (const auto& [key, value] : j.items()) {
    auto tag = normalize_hashtag(key);
    auto cat = value.is_string() ? parse_category(value.get<std::string>())
                                 : std::nullopt;
    if (!tag || !cat) {
      throw ConfigError("annotations: bad entry '" + key + "': " + value.dump());
    }
    annotations.set(std::move(*tag), *cat);
  }
  return annotations;
}

NodeAnnotations load_annotations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open annotation file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_annotations(buf.str());
}

WeightedGraph build_hashtag_cooccurrence(std::span<const TweetRecord> corpus) {
  GraphBuilder builder(false);
  std::vector<std::string_view> tags;
  for (const auto& t : corpus) {
    tags.assign(t.hashtags.begin(), t.hashtags.end());
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    for (auto tag : tags) builder.add_node(tag);
    for (std::size_t i = 0; i < tags.size(); ++i) {
      for (std::size_t j = i + 1; j < tags.size(); ++j) {
        builder.add_edge(tags[i], tags[j], 1.0);
      }
    }
  }
  return builder.build();
}

InteractionNetwork build_interaction_network(
    std::span<const TweetRecord> corpus,
    std::optional<InteractionKind> kind_filter) {
  InteractionNetwork result;
  GraphBuilder builder(true);
  auto wanted = [&](InteractionKind k) {
    return !kind_filter || *kind_filter == k;
  };
  auto link = [&](const std::string& src, const std::string& dst) {
    if (!builder.add_edge(src, dst, 1.0)) ++result.self_interactions;
  };
  for (const auto& t : corpus) {
    if (auto k = interaction_of(t.kind); k && wanted(*k)) {
      if (!t.target_user_id) {
        ++result.missing_target;
      } else {
        link(t.user_id, *t.target_user_id);
      }
    }
    if (t.kind != TweetKind::retweet && wanted(InteractionKind::mention)) {
      for (const auto& m : t.mentioned_user_ids) link(t.user_id, m);
    }
  }
  result.graph = builder.build();
  return result;
}

std::uint64_t BipartiteMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : rows) {
    for (const auto& e : row) sum += e.count;
  }
  return sum;
}

std::vector<std::uint64_t> BipartiteMatrix::column_sums() const {
  std::vector<std::uint64_t> sums(hashtags.size(), 0);
  for (const auto& row : rows) {
    for (const auto& e : row) sums[e.col] += e.count;
  }
  return sums;
}

std::vector<std::vector<MatrixEntry>> BipartiteMatrix::columns() const {
  std::vector<std::vector<MatrixEntry>> cols(hashtags.size());
  for (std::uint32_t r = 0; r < rows.size(); ++r) {
    for (const auto& e : rows[r]) cols[e.col].push_back({r, e.count});
  }
  return cols;
}

BipartiteMatrix build_user_hashtag_matrix(std::span<const TweetRecord> corpus,
                                          MatrixFilter filter) {
  // Intern in sorted order so row/column indices are lexicographic.
  std::set<std::string_view> user_set, tag_set;
  for (const auto& t : corpus) {
    if (t.hashtags.empty()) continue;
    user_set.insert(t.user_id);
    for (const auto& h : t.hashtags) tag_set.insert(h);
  }
  std::vector<std::string> users(user_set.begin(), user_set.end());
  std::vector<std::string> tags(tag_set.begin(), tag_set.end());
  std::unordered_map<std::string_view, std::uint32_t> user_idx, tag_idx;
  for (std::uint32_t i = 0; i < users.size(); ++i) user_idx.emplace(users[i], i);
  for (std::uint32_t i = 0; i < tags.size(); ++i) tag_idx.emplace(tags[i], i);

  // Per user, the hashtag sets of their tweets.
  std::vector<std::vector<std::vector<std::uint32_t>>> tweets(users.size());
  for (const auto& t : corpus) {
    if (t.hashtags.empty()) continue;
    std::vector<std::uint32_t> cols;
    for (const auto& h : t.hashtags) cols.push_back(tag_idx.at(h));
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    tweets[user_idx.at(t.user_id)].push_back(std::move(cols));
  }

  std::vector<bool> keep_user(users.size(), true);
  std::vector<bool> keep_tag(tags.size(), true);
  const std::uint32_t min_uses = std::max<std::uint32_t>(filter.min_hashtag_uses, 1);
  const std::uint32_t min_tweets = std::max<std::uint32_t>(filter.min_user_tweets, 1);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::uint64_t> uses(tags.size(), 0);
    for (std::size_t u = 0; u < users.size(); ++u) {
      if (!keep_user[u]) continue;
      for (const auto& cols : tweets[u]) {
        for (auto c : cols) ++uses[c];
      }
    }
    for (std::size_t c = 0; c < tags.size(); ++c) {
      if (keep_tag[c] && uses[c] < min_uses) {
        keep_tag[c] = false;
        changed = true;
      }
    }
    for (std::size_t u = 0; u < users.size(); ++u) {
      if (!keep_user[u]) continue;
      std::uint32_t active = 0;
      for (const auto& cols : tweets[u]) {
        if (std::any_of(cols.begin(), cols.end(),
                        [&](std::uint32_t c) { return keep_tag[c]; })) {
          ++active;
        }
      }
      if (active < min_tweets) {
        keep_user[u] = false;
        changed = true;
      }
    }
  }

  BipartiteMatrix m;
  std::vector<std::uint32_t> col_map(tags.size(), 0);
  for (std::size_t c = 0; c < tags.size(); ++c) {
    if (!keep_tag[c]) continue;
    col_map[c] = static_cast<std::uint32_t>(m.hashtags.size());
    m.hashtags.push_back(tags[c]);
  }
  for (std::size_t u = 0; u < users.size(); ++u) {
    if (!keep_user[u]) continue;
    std::map<std::uint32_t, std::uint32_t> counts;
    for (const auto& cols : tweets[u]) {
      for (auto c : cols) {
        if (keep_tag[c]) ++counts[col_map[c]];
      }
    }
    std::vector<MatrixEntry> row;
    row.reserve(counts.size());
    for (const auto& [c, n] : counts) row.push_back({c, n});
    m.users.push_back(users[u]);
    m.rows.push_back(std::move(row));
  }
  if (m.users.empty() || m.hashtags.empty()) return BipartiteMatrix{};
  return m;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DomainError("cosine_similarity: vectors differ in length");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw DomainError("cosine similarity is undefined for a zero vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

}  // namespace pitchside
