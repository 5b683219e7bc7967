#include "pitchside/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

namespace pitchside {

namespace {

constexpr std::array<std::string_view, 4> kMetricNames = {
    "in_degree", "out_degree", "betweenness", "pagerank"};

// Triangles through each node of the undirected view. Edges are oriented from
// lower to higher (degree, index) rank so every triangle is found once.
std::vector<std::uint64_t> triangle_counts(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  auto rank_less = [&](NodeIndex a, NodeIndex b) {
    const auto da = g.neighbors(a).size(), db = g.neighbors(b).size();
    return da != db ? da < db : a < b;
  };
  std::vector<std::vector<NodeIndex>> up(n);
  for (NodeIndex v = 0; v < n; ++v) {
    for (const auto& nb : g.neighbors(v)) {
      if (rank_less(v, nb.node)) up[v].push_back(nb.node);
    }
  }
  std::vector<std::uint64_t> tri(n, 0);
  std::vector<char> mark(n, 0);
  for (NodeIndex v = 0; v < n; ++v) {
    for (NodeIndex u : up[v]) mark[u] = 1;
    for (NodeIndex u : up[v]) {
      for (NodeIndex w : up[u]) {
        if (mark[w]) {
          ++tri[v];
          ++tri[u];
          ++tri[w];
        }
      }
    }
    for (NodeIndex u : up[v]) mark[u] = 0;
  }
  return tri;
}

// Sum of shortest-path lengths over ordered pairs inside `members` (one
// connected component) and the longest of them. Runs 64 breadth-first
// searches at once, one bit lane per source.
std::pair<std::uint64_t, std::size_t> component_distances(const WeightedGraph& g,
                                                          const std::vector<NodeIndex>& members) {
  const std::size_t n = g.node_count();
  std::vector<std::uint64_t> visited(n), frontier(n), next(n);
  std::uint64_t total = 0;
  std::size_t diameter = 0;
  for (std::size_t start = 0; start < members.size(); start += 64) {
    const std::size_t lanes = std::min<std::size_t>(64, members.size() - start);
    const std::uint64_t full = lanes == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << lanes) - 1;
    for (NodeIndex v : members) visited[v] = frontier[v] = 0;
    for (std::size_t i = 0; i < lanes; ++i) {
      visited[members[start + i]] = frontier[members[start + i]] = std::uint64_t{1} << i;
    }
    for (std::size_t level = 1;; ++level) {
      bool grew = false;
      for (NodeIndex v : members) {
        std::uint64_t reach = 0;
        if (visited[v] != full) {
          for (const auto& nb : g.neighbors(v)) reach |= frontier[nb.node];
          reach &= ~visited[v];
        }
        next[v] = reach;
        if (reach) {
          grew = true;
          total += level * static_cast<std::uint64_t>(std::popcount(reach));
        }
      }
      if (!grew) break;
      diameter = std::max(diameter, level);
      for (NodeIndex v : members) {
        visited[v] |= next[v];
        frontier[v] = next[v];
      }
    }
  }
  return {total, diameter};
}

std::span<const Neighbor> forward(const WeightedGraph& g, NodeIndex v) {
  return g.directed() ? g.out(v) : g.neighbors(v);
}

}  // namespace

GlobalMetrics global_properties(const WeightedGraph& g) {
  GlobalMetrics m;
  const std::size_t n = g.node_count();
  m.node_count = n;
  m.edge_count = g.edge_count();
  if (n == 0) return m;
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m.edge_count);
  if (n > 1) {
    m.density = g.directed() ? dm / (dn * (dn - 1.0)) : 2.0 * dm / (dn * (dn - 1.0));
  }
  m.avg_degree = g.directed() ? dm / dn : 2.0 * dm / dn;

  const auto tri = triangle_counts(g);
  double clustering = 0.0;
  for (NodeIndex v = 0; v < n; ++v) {
    const double d = static_cast<double>(g.neighbors(v).size());
    if (d >= 2) clustering += 2.0 * static_cast<double>(tri[v]) / (d * (d - 1.0));
  }
  m.avg_clustering = clustering / dn;

  auto [comp, count] = connected_components(g);
  m.component_count = count;
  std::vector<std::size_t> sizes(count, 0);
  for (auto c : comp) ++sizes[c];
  const auto giant = static_cast<std::uint32_t>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  m.giant_component_size = sizes[giant];
  m.giant_component_fraction = static_cast<double>(sizes[giant]) / dn;

  if (sizes[giant] >= 2) {
    std::vector<NodeIndex> members;
    members.reserve(sizes[giant]);
    for (NodeIndex v = 0; v < n; ++v) {
      if (comp[v] == giant) members.push_back(v);
    }
    const auto [total, diameter] = component_distances(g, members);
    const double s = static_cast<double>(sizes[giant]);
    m.avg_path_length = static_cast<double>(total) / (s * (s - 1.0));
    m.diameter = diameter;
  }
  return m;
}

std::vector<double> betweenness(const WeightedGraph& g, PathWeighting weighting) {
  const std::size_t n = g.node_count();
  std::vector<double> score(n, 0.0);
  std::vector<double> sigma(n), delta(n), dist(n);
  std::vector<std::vector<NodeIndex>> preds(n);
  std::vector<NodeIndex> order;
  order.reserve(n);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  for (NodeIndex s = 0; s < n; ++s) {
    order.clear();
    for (std::size_t v = 0; v < n; ++v) {
      preds[v].clear();
      sigma[v] = 0.0;
      delta[v] = 0.0;
      dist[v] = kInf;
    }
    sigma[s] = 1.0;
    dist[s] = 0.0;
    if (weighting == PathWeighting::unweighted) {
      std::size_t head = 0;
      order.push_back(s);
      while (head < order.size()) {
        const NodeIndex v = order[head++];
        for (const auto& nb : forward(g, v)) {
          const NodeIndex w = nb.node;
          if (dist[w] == kInf) {
            dist[w] = dist[v] + 1.0;
            order.push_back(w);
          }
          if (dist[w] == dist[v] + 1.0) {
            sigma[w] += sigma[v];
            preds[w].push_back(v);
          }
        }
      }
    } else {
      using Item = std::pair<double, NodeIndex>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
      std::vector<char> done(n, 0);
      heap.push({0.0, s});
      while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (done[v]) continue;
        done[v] = 1;
        order.push_back(v);
        for (const auto& nb : forward(g, v)) {
          const NodeIndex w = nb.node;
          const double nd = d + 1.0 / nb.weight;
          if (nd < dist[w]) {
            dist[w] = nd;
            sigma[w] = sigma[v];
            preds[w].assign(1, v);
            heap.push({nd, w});
          } else if (nd == dist[w]) {
            sigma[w] += sigma[v];
            preds[w].push_back(v);
          }
        }
      }
    }
    for (std::size_t i = order.size(); i-- > 0;) {
      const NodeIndex w = order[i];
      for (auto v : preds[w]) {
        delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
      if (w != s) score[w] += delta[w];
    }
  }
  if (!g.directed()) {
    for (auto& x : score) x /= 2.0;
  }
  return score;
}

std::vector<double> pagerank(const WeightedGraph& g, const PageRankOptions& opt) {
  const std::size_t n = g.node_count();
  if (n == 0) return {};
  const double dn = static_cast<double>(n);
  std::vector<double> out_weight(n, 0.0);
  for (NodeIndex v = 0; v < n; ++v) {
    for (const auto& nb : forward(g, v)) out_weight[v] += nb.weight;
  }
  std::vector<double> rank(n, 1.0 / dn), next(n);
  double residual = 0.0;
  for (std::size_t iter = 0; iter < opt.max_iters; ++iter) {
    double dangling = 0.0;
    for (NodeIndex v = 0; v < n; ++v) {
      if (out_weight[v] == 0.0) dangling += rank[v];
    }
    const double base = (1.0 - opt.damping) / dn + opt.damping * dangling / dn;
    std::fill(next.begin(), next.end(), base);
    for (NodeIndex v = 0; v < n; ++v) {
      if (out_weight[v] == 0.0) continue;
      const double share = opt.damping * rank[v] / out_weight[v];
      for (const auto& nb : forward(g, v)) next[nb.node] += share * nb.weight;
    }
    residual = 0.0;
    for (NodeIndex v = 0; v < n; ++v) residual += std::abs(next[v] - rank[v]);
    rank.swap(next);
    if (residual < opt.tolerance) {
      const double total = std::accumulate(rank.begin(), rank.end(), 0.0);
      for (auto& r : rank) r /= total;
      return rank;
    }
  }
  throw PageRankNotConverged(std::move(rank), residual);
}

std::vector<double> weighted_in_degree(const WeightedGraph& g) {
  std::vector<double> deg(g.node_count(), 0.0);
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    for (const auto& nb : g.in(v)) deg[v] += nb.weight;
  }
  return deg;
}

std::vector<double> weighted_out_degree(const WeightedGraph& g) {
  std::vector<double> deg(g.node_count(), 0.0);
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    for (const auto& nb : g.out(v)) deg[v] += nb.weight;
  }
  return deg;
}

WeightedGraph filter_by_edge_weight(const WeightedGraph& g, double min_weight) {
  GraphBuilder b(g.directed());
  for (const auto& e : g.edges()) {
    if (e.weight > min_weight) b.add_edge(g.id(e.src), g.id(e.dst), e.weight);
  }
  return b.build();
}

WeightedGraph k_core(const WeightedGraph& g, std::size_t k) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> degree(n);
  std::vector<bool> keep(n, true);
  std::vector<NodeIndex> queue;
  for (NodeIndex v = 0; v < n; ++v) {
    degree[v] = g.neighbors(v).size();
    if (degree[v] < k) {
      keep[v] = false;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const NodeIndex v = queue.back();
    queue.pop_back();
    for (const auto& nb : g.neighbors(v)) {
      if (keep[nb.node] && --degree[nb.node] < k) {
        keep[nb.node] = false;
        queue.push_back(nb.node);
      }
    }
  }
  return g.induced(keep);
}

std::vector<std::size_t> core_numbers(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> degree(n), core(n, 0);
  std::set<std::pair<std::size_t, NodeIndex>> pending;
  for (NodeIndex v = 0; v < n; ++v) {
    degree[v] = g.neighbors(v).size();
    pending.insert({degree[v], v});
  }
  std::vector<bool> removed(n, false);
  std::size_t current = 0;
  while (!pending.empty()) {
    auto [d, v] = *pending.begin();
    pending.erase(pending.begin());
    current = std::max(current, d);
    core[v] = current;
    removed[v] = true;
    for (const auto& nb : g.neighbors(v)) {
      if (removed[nb.node]) continue;
      pending.erase({degree[nb.node], nb.node});
      --degree[nb.node];
      pending.insert({degree[nb.node], nb.node});
    }
  }
  return core;
}

std::string_view to_string(CentralityMetric metric) {
  return kMetricNames[static_cast<std::size_t>(metric)];
}

CentralityTable compute_centrality(const WeightedGraph& g, CentralityMetric metric,
                                   std::string network,
                                   const PageRankOptions& options) {
  CentralityTable t;
  t.metric = metric;
  t.network = std::move(network);
  t.nodes = g.ids();
  switch (metric) {
    case CentralityMetric::in_degree:
      t.scores = weighted_in_degree(g);
      break;
    case CentralityMetric::out_degree:
      t.scores = weighted_out_degree(g);
      break;
    case CentralityMetric::betweenness:
      t.scores = betweenness(g);
      break;
    case CentralityMetric::pagerank:
      t.scores = pagerank(g, options);
      break;
  }
  return t;
}

std::vector<RankedNode> top_influencers(const CentralityTable& table,
                                        const ProfileIndex& profiles,
                                        std::size_t k) {
  std::vector<std::size_t> order(table.nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (table.scores[a] != table.scores[b]) return table.scores[a] > table.scores[b];
    return table.nodes[a] < table.nodes[b];
  });
  std::vector<RankedNode> ranking;
  for (std::size_t i = 0; i < order.size() && i < k; ++i) {
    RankedNode r;
    r.rank = i + 1;
    r.node = table.nodes[order[i]];
    r.score = table.scores[order[i]];
    if (auto it = profiles.find(r.node); it != profiles.end() && it->second.annotation) {
      r.actor_type = *it->second.annotation;
    }
    ranking.push_back(std::move(r));
  }
  return ranking;
}

std::map<ActorType, std::map<std::string, std::size_t>> actor_type_table(
    const std::map<std::string, std::vector<RankedNode>>& rankings) {
  std::map<ActorType, std::map<std::string, std::size_t>> table;
  for (const auto& [network, ranking] : rankings) {
    for (const auto& r : ranking) ++table[r.actor_type][network];
  }
  return table;
}

}  // namespace pitchside
