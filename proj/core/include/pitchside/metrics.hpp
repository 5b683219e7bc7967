#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pitchside/errors.hpp"
#include "pitchside/graph.hpp"
#include "pitchside/graphs.hpp"
#include "pitchside/ingest.hpp"

namespace pitchside {

struct GlobalMetrics {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double density = 0.0;
  double avg_degree = 0.0;
  double avg_clustering = 0.0;
  std::size_t component_count = 0;
  double giant_component_fraction = 0.0;
  std::size_t giant_component_size = 0;
  // Unweighted, over the giant component's undirected view. Absent when the
  // giant component has fewer than two nodes.
  std::optional<double> avg_path_length;
  std::optional<std::size_t> diameter;
};

// avg_degree is 2m/n for undirected graphs and m/n (mean in- or out-degree)
// for directed ones. Clustering is the mean local coefficient of the
// undirected unweighted view, nodes of degree < 2 counting as 0.
GlobalMetrics global_properties(const WeightedGraph& graph);

enum class PathWeighting {
  unweighted,
  inverse_weight,  // edge length 1 / weight
};

// Exact shortest-path betweenness (Brandes), unnormalized. Directed graphs
// count ordered pairs; undirected graphs count each unordered pair once.
std::vector<double> betweenness(const WeightedGraph& graph,
                                PathWeighting weighting = PathWeighting::unweighted);

struct PageRankOptions {
  double damping = 0.85;
  double tolerance = 1e-9;
  std::size_t max_iters = 200;
};

class PageRankNotConverged : public Error {
 public:
  PageRankNotConverged(std::vector<double> last, double residual)
      : Error("pagerank did not converge (L1 residual " +
              std::to_string(residual) + ")"),
        last_iterate_(std::move(last)),
        residual_(residual) {}

  const std::vector<double>& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }

 private:
  std::vector<double> last_iterate_;
  double residual_;
};

// Weighted PageRank. Out-edge weights are transition proportions; undirected
// edges are followed both ways; dangling mass is spread uniformly.
std::vector<double> pagerank(const WeightedGraph& graph,
                             const PageRankOptions& options = {});

std::vector<double> weighted_in_degree(const WeightedGraph& graph);
std::vector<double> weighted_out_degree(const WeightedGraph& graph);

// Keeps edges with weight strictly greater than min_weight, then drops
// nodes left without edges.
WeightedGraph filter_by_edge_weight(const WeightedGraph& graph, double min_weight);

// Maximal subgraph where every node has at least k neighbors (undirected,
// unweighted view).
WeightedGraph k_core(const WeightedGraph& graph, std::size_t k);
// Core number per node.
std::vector<std::size_t> core_numbers(const WeightedGraph& graph);

enum class CentralityMetric { in_degree, out_degree, betweenness, pagerank };
inline constexpr std::array<CentralityMetric, 4> kAllCentralityMetrics = {
    CentralityMetric::in_degree, CentralityMetric::out_degree,
    CentralityMetric::betweenness, CentralityMetric::pagerank};
std::string_view to_string(CentralityMetric metric);

struct CentralityTable {
  CentralityMetric metric = CentralityMetric::in_degree;
  std::string network;  // e.g. "retweet"
  std::vector<std::string> nodes;
  std::vector<double> scores;
};

CentralityTable compute_centrality(const WeightedGraph& graph,
                                   CentralityMetric metric, std::string network,
                                   const PageRankOptions& options = {});

struct RankedNode {
  std::size_t rank = 0;  // 1-based
  std::string node;
  double score = 0.0;
  ActorType actor_type = ActorType::other;
};

// Top-k by score, ties broken by ascending node id. Actor type comes from
// the profile annotation, "other" when absent.
std::vector<RankedNode> top_influencers(const CentralityTable& table,
                                        const ProfileIndex& profiles,
                                        std::size_t k = 20);

// Actor type x network count table over a set of rankings, keyed by the
// ranking's network name.
std::map<ActorType, std::map<std::string, std::size_t>> actor_type_table(
    const std::map<std::string, std::vector<RankedNode>>& rankings);

}  // namespace pitchside
