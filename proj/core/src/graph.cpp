#include "pitchside/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace pitchside {

namespace {

std::uint64_t pack(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

void build_csr(std::size_t n, const std::vector<Edge>& edges, bool forward,
               bool both, std::vector<std::size_t>& offsets,
               std::vector<Neighbor>& adj) {
  offsets.assign(n + 1, 0);
  for (const auto& e : edges) {
    ++offsets[(forward ? e.src : e.dst) + 1];
    if (both) ++offsets[(forward ? e.dst : e.src) + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  adj.assign(offsets.back(), Neighbor{0, 0.0});
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& e : edges) {
    const NodeIndex from = forward ? e.src : e.dst;
    const NodeIndex to = forward ? e.dst : e.src;
    adj[cursor[from]++] = {to, e.weight};
    if (both) adj[cursor[to]++] = {from, e.weight};
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(adj.begin() + static_cast<std::ptrdiff_t>(offsets[v]),
              adj.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
}

}  // namespace

std::optional<NodeIndex> WeightedGraph::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double WeightedGraph::total_weight() const {
  double total = 0.0;
  for (const auto& e : edges_) total += e.weight;
  return total;
}

double WeightedGraph::weight(NodeIndex src, NodeIndex dst) const {
  for (const auto& nb : out(src)) {
    if (nb.node == dst) return nb.weight;
  }
  return 0.0;
}

void WeightedGraph::finalize() {
  const std::size_t n = ids_.size();
  index_.clear();
  index_.reserve(n);
  for (NodeIndex i = 0; i < n; ++i) index_.emplace(ids_[i], i);
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  if (directed_) {
    build_csr(n, edges_, true, false, out_offsets_, out_adj_);
    build_csr(n, edges_, false, false, in_offsets_, in_adj_);
    // Undirected view: merge reciprocal pairs.
    std::map<std::pair<NodeIndex, NodeIndex>, double> merged;
    for (const auto& e : edges_) {
      merged[{std::min(e.src, e.dst), std::max(e.src, e.dst)}] += e.weight;
    }
    std::vector<Edge> und;
    und.reserve(merged.size());
    for (const auto& [key, w] : merged) und.push_back({key.first, key.second, w});
    build_csr(n, und, true, true, und_offsets_, und_adj_);
  } else {
    build_csr(n, edges_, true, true, out_offsets_, out_adj_);
    in_offsets_ = {0};
    in_adj_.clear();
    und_offsets_ = {0};
    und_adj_.clear();
  }
}

WeightedGraph WeightedGraph::induced(const std::vector<bool>& keep) const {
  WeightedGraph g;
  g.directed_ = directed_;
  std::vector<NodeIndex> remap(ids_.size(), 0);
  for (NodeIndex i = 0; i < ids_.size(); ++i) {
    if (!keep[i]) continue;
    remap[i] = static_cast<NodeIndex>(g.ids_.size());
    g.ids_.push_back(ids_[i]);
  }
  for (const auto& e : edges_) {
    if (keep[e.src] && keep[e.dst]) {
      g.edges_.push_back({remap[e.src], remap[e.dst], e.weight});
    }
  }
  g.finalize();
  return g;
}

void GraphBuilder::add_node(std::string_view id) { intern(id); }

std::uint32_t GraphBuilder::intern(std::string_view id) {
  auto it = index_.find(std::string(id));
  if (it != index_.end()) return it->second;
  const auto idx = static_cast<std::uint32_t>(ids_.size());
  ids_.emplace_back(id);
  index_.emplace(ids_.back(), idx);
  return idx;
}

bool GraphBuilder::add_edge(std::string_view src, std::string_view dst,
                            double weight) {
  if (src == dst) return false;
  std::uint32_t a = intern(src);
  std::uint32_t b = intern(dst);
  if (!directed_ && ids_[b] < ids_[a]) std::swap(a, b);
  weights_[pack(a, b)] += weight;
  return true;
}

WeightedGraph GraphBuilder::build() const {
  WeightedGraph g;
  g.directed_ = directed_;
  std::vector<std::uint32_t> order(ids_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return ids_[a] < ids_[b]; });
  std::vector<NodeIndex> rank(ids_.size());
  g.ids_.reserve(ids_.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    rank[order[i]] = static_cast<NodeIndex>(i);
    g.ids_.push_back(ids_[order[i]]);
  }
  g.edges_.reserve(weights_.size());
  for (const auto& [key, w] : weights_) {
    if (w <= 0.0) continue;
    NodeIndex s = rank[static_cast<std::uint32_t>(key >> 32)];
    NodeIndex d = rank[static_cast<std::uint32_t>(key & 0xffffffffu)];
    if (!directed_ && d < s) std::swap(s, d);
    g.edges_.push_back({s, d, w});
  }
  g.finalize();
  return g;
}

WeightedGraph symmetrize(const WeightedGraph& g) {
  GraphBuilder b(false);
  for (const auto& id : g.ids()) b.add_node(id);
  for (const auto& e : g.edges()) b.add_edge(g.id(e.src), g.id(e.dst), e.weight);
  return b.build();
}

std::pair<std::vector<std::uint32_t>, std::size_t> connected_components(
    const WeightedGraph& g) {
  constexpr auto kUnset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> comp(g.node_count(), kUnset);
  std::uint32_t next = 0;
  std::vector<NodeIndex> stack;
  for (NodeIndex s = 0; s < g.node_count(); ++s) {
    if (comp[s] != kUnset) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeIndex v = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(v)) {
        if (comp[nb.node] == kUnset) {
          comp[nb.node] = next;
          stack.push_back(nb.node);
        }
      }
    }
    ++next;
  }
  return {std::move(comp), next};
}

}  // namespace pitchside
