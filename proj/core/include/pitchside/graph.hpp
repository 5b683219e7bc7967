#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pitchside {

using NodeIndex = std::uint32_t;

struct Edge {
  NodeIndex src;
  NodeIndex dst;
  double weight;

  bool operator==(const Edge&) const = default;
};

struct Neighbor {
  NodeIndex node;
  double weight;
};

// Immutable weighted graph over string node ids.
//
// Node indices follow lexicographic id order. Undirected edges are stored
// once with src <= dst; both endpoints see each other in neighbors(). For a
// directed graph, out() and in() are the two adjacency directions and
// neighbors() is the undirected view (reciprocal weights summed).
class WeightedGraph {
 public:
  WeightedGraph() = default;

  bool directed() const { return directed_; }
  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return ids_.empty(); }

  std::span<const Edge> edges() const { return edges_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(NodeIndex n) const { return ids_[n]; }
  std::optional<NodeIndex> find(std::string_view id) const;

  std::span<const Neighbor> out(NodeIndex n) const {
    return slice(out_offsets_, out_adj_, n);
  }
  std::span<const Neighbor> in(NodeIndex n) const {
    return directed_ ? slice(in_offsets_, in_adj_, n)
                     : slice(out_offsets_, out_adj_, n);
  }
  std::span<const Neighbor> neighbors(NodeIndex n) const {
    return directed_ ? slice(und_offsets_, und_adj_, n)
                     : slice(out_offsets_, out_adj_, n);
  }

  double total_weight() const;
  // Weight of edge src->dst (either orientation when undirected), 0 if absent.
  double weight(NodeIndex src, NodeIndex dst) const;

  // Subgraph induced by `keep` (indexed by node), re-indexed.
  WeightedGraph induced(const std::vector<bool>& keep) const;

 private:
  friend class GraphBuilder;

  static std::span<const Neighbor> slice(const std::vector<std::size_t>& off,
                                         const std::vector<Neighbor>& adj,
                                         NodeIndex n) {
    return {adj.data() + off[n], off[n + 1] - off[n]};
  }
  void finalize();

  bool directed_ = false;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<Neighbor> out_adj_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<Neighbor> in_adj_;
  std::vector<std::size_t> und_offsets_{0};
  std::vector<Neighbor> und_adj_;
};

// Accumulates node ids and edge weights; repeated edges add up.
class GraphBuilder {
 public:
  explicit GraphBuilder(bool directed) : directed_(directed) {}

  void add_node(std::string_view id);
  // Adds `weight` to edge src->dst. Self-loops are ignored and reported.
  bool add_edge(std::string_view src, std::string_view dst, double weight);

  std::size_t node_count() const { return ids_.size(); }

  WeightedGraph build() const;

 private:
  std::uint32_t intern(std::string_view id);

  bool directed_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::unordered_map<std::uint64_t, double> weights_;
};

// Undirected copy of a directed graph with reciprocal weights summed.
WeightedGraph symmetrize(const WeightedGraph& g);

// Weakly connected components; returns component id per node (dense, ordered
// by smallest member index) and the number of components.
std::pair<std::vector<std::uint32_t>, std::size_t> connected_components(
    const WeightedGraph& g);

}  // namespace pitchside
