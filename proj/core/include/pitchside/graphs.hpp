#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pitchside/graph.hpp"
#include "pitchside/ingest.hpp"

namespace pitchside {

enum class HashtagCategory { political, football, location, other };
inline constexpr std::array<HashtagCategory, 4> kAllCategories = {
    HashtagCategory::political, HashtagCategory::football,
    HashtagCategory::location, HashtagCategory::other};

std::string_view to_string(HashtagCategory c);
std::optional<HashtagCategory> parse_category(std::string_view s);

// node id -> category; nodes without an entry are "other".
class NodeAnnotations {
 public:
  NodeAnnotations() = default;

  void set(std::string id, HashtagCategory category) {
    categories_[std::move(id)] = category;
  }
  HashtagCategory category(std::string_view id) const;
  std::size_t size() const { return categories_.size(); }
  const std::unordered_map<std::string, HashtagCategory>& entries() const {
    return categories_;
  }

 private:
  std::unordered_map<std::string, HashtagCategory> categories_;
};

// JSON object {"<hashtag>": "<category>", ...}; keys are normalized.
NodeAnnotations parse_annotations(std::string_view json_text);
NodeAnnotations load_annotations(const std::string& path);

WeightedGraph build_hashtag_cooccurrence(std::span<const TweetRecord> corpus);

enum class InteractionKind { retweet, quote, reply, mention };
inline constexpr std::array<InteractionKind, 4> kAllInteractionKinds = {
    InteractionKind::retweet, InteractionKind::quote, InteractionKind::reply,
    InteractionKind::mention};

std::string_view to_string(InteractionKind kind);

struct InteractionNetwork {
  WeightedGraph graph;
  std::size_t missing_target = 0;  // non-original records lacking target_user_id
  std::size_t self_interactions = 0;
};

// Directed user -> user network weighted by interaction counts. With no
// filter the union over all four kinds is built. Mentions are taken from
// original, quote and reply records only.
InteractionNetwork build_interaction_network(
    std::span<const TweetRecord> corpus,
    std::optional<InteractionKind> kind_filter = std::nullopt);

struct MatrixEntry {
  std::uint32_t col;
  std::uint32_t count;
};

// Sparse user x hashtag count matrix. Rows and columns are in lexicographic
// id order; each row is sorted by column.
struct BipartiteMatrix {
  std::vector<std::string> users;
  std::vector<std::string> hashtags;
  std::vector<std::vector<MatrixEntry>> rows;

  bool empty() const { return users.empty() || hashtags.empty(); }
  std::uint64_t total() const;
  std::vector<std::uint64_t> column_sums() const;
  // Column-major copy: per hashtag, (user row, count) sorted by row.
  std::vector<std::vector<MatrixEntry>> columns() const;
};

struct MatrixFilter {
  std::uint32_t min_hashtag_uses = 20;
  std::uint32_t min_user_tweets = 2;
};

// counts[u][h] = number of tweets by u containing h. Hashtags used fewer
// than min_hashtag_uses times and users with fewer than min_user_tweets
// tweets carrying a retained hashtag are removed alternately until neither
// filter removes anything.
BipartiteMatrix build_user_hashtag_matrix(std::span<const TweetRecord> corpus,
                                          MatrixFilter filter = {});

// Throws DomainError when either vector is all zeros.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

enum class ProjectionAxis { user, hashtag };

struct ProjectionConfig {
  ProjectionAxis axis = ProjectionAxis::user;
  double min_similarity = 0.45;
  double alpha = 0.05;
  std::uint32_t permutations = 1000;
  std::uint64_t rng_seed = 1;
  bool binary = false;

  static ProjectionConfig for_users();
  static ProjectionConfig for_hashtags();
  void validate() const;  // throws ConfigError
};

struct ProjectedEdge {
  std::uint32_t a;
  std::uint32_t b;
  double similarity;
  double p_value;
};

struct Projection {
  WeightedGraph graph;  // every axis entity is a node, isolates included
  std::vector<ProjectedEdge> retained;  // indices into the axis id list
  std::size_t candidates = 0;  // pairs above min_similarity before testing
};

// Cosine similarity projection with a row-shuffling permutation null.
//
// Each null draw places every user's nonzero counts on a uniformly random
// set of distinct hashtag columns: for row entry i (column order) the target
// column is the i-th step of a partial Fisher-Yates shuffle of the column
// index range, drawing Rng::below(H - i). Users are processed in row order,
// one full matrix per permutation. A pair is retained iff its observed
// similarity exceeds min_similarity and the fraction of draws whose
// similarity is >= the observed one is below alpha.
Projection project_similarity(const BipartiteMatrix& matrix,
                              const ProjectionConfig& config);

}  // namespace pitchside
