#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pitchside/graph.hpp"
#include "pitchside/graphs.hpp"

namespace pitchside {

struct Partition {
  std::vector<std::string> nodes;          // graph node order
  std::vector<std::uint32_t> assignment;   // community per node, dense from 0
  std::size_t community_count = 0;
  double modularity = 0.0;
  double resolution = 1.0;
  std::uint64_t seed = 0;
  // Modularity of the singleton start followed by one value per
  // local-move/aggregation pass.
  std::vector<double> pass_modularity;

  std::optional<std::uint32_t> community_of(std::string_view node) const;
  std::vector<std::size_t> community_sizes() const;

 private:
  friend Partition make_partition(std::vector<std::string>,
                                  std::vector<std::uint32_t>);
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Renumbers communities densely in order of first appearance and builds the
// lookup index.
Partition make_partition(std::vector<std::string> nodes,
                         std::vector<std::uint32_t> assignment);

// Weighted Newman-Girvan modularity with the null term scaled by
// `resolution`. Directed graphs are symmetrized first. Throws DomainError if
// `assignment` does not cover every node.
double modularity(const WeightedGraph& graph,
                  std::span<const std::uint32_t> assignment,
                  double resolution = 1.0);
double modularity(const WeightedGraph& graph,
                  const std::unordered_map<std::string, std::uint32_t>& assignment,
                  double resolution = 1.0);

// Louvain method: seeded local moves followed by aggregation until a pass
// moves no node. Directed graphs are symmetrized by summing reciprocal
// weights.
Partition louvain(const WeightedGraph& graph, double resolution = 1.0,
                  std::uint64_t seed = 1);

struct CompositionVector {
  std::uint32_t community = 0;
  std::size_t size = 0;
  std::array<double, 4> proportions{};  // indexed by HashtagCategory

  double share(HashtagCategory c) const {
    return proportions[static_cast<std::size_t>(c)];
  }
};

std::vector<CompositionVector> community_composition(
    const Partition& partition, const NodeAnnotations& annotations);

enum class Theme { political, football, uk_location, other };
std::string_view to_string(Theme theme);
Theme theme_for(HashtagCategory category);

struct LinkageStep {
  std::size_t left;   // cluster ids: leaves 0..n-1, merges n, n+1, ...
  std::size_t right;
  double height;      // Ward distance, as in scipy's linkage()
  std::size_t size;
};

struct ThemeAssignment {
  std::vector<std::uint32_t> communities;  // input order
  std::vector<std::uint32_t> cluster;      // per input vector, dense from 0
  std::vector<Theme> cluster_theme;
  std::map<std::uint32_t, Theme> theme_of;
  std::vector<LinkageStep> linkage;        // full dendrogram, n-1 steps
};

// Agglomerative Ward clustering of composition vectors cut at k clusters.
// A cluster takes the category with the highest mean proportion among its
// members; ties resolve to "other". Throws DomainError if k is 0 or exceeds
// the number of vectors.
ThemeAssignment ward_cluster(std::span<const CompositionVector> vectors,
                             std::size_t k = 4);

struct EngagementSector {
  std::uint32_t hashtag_community = 0;
  std::optional<Theme> theme;
  std::uint64_t count = 0;
};

struct EngagementProfile {
  std::uint32_t user_community = 0;
  std::size_t size = 0;
  std::vector<EngagementSector> sectors;  // nonzero only, by hashtag community
};

struct EngagementResult {
  std::vector<EngagementProfile> profiles;
  std::size_t users_not_in_matrix = 0;
  std::size_t hashtags_not_in_matrix = 0;
  std::size_t excluded_communities = 0;
};

EngagementResult engagement_profile(const Partition& user_partition,
                                    const Partition& hashtag_partition,
                                    const BipartiteMatrix& matrix,
                                    const std::map<std::uint32_t, Theme>& themes = {},
                                    std::size_t min_community_size = 10);

}  // namespace pitchside
