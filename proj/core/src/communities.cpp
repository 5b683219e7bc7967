#include "pitchside/communities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pitchside/errors.hpp"
#include "pitchside/rng.hpp"

namespace pitchside {

namespace {

constexpr std::array<std::string_view, 4> kThemeNames = {
    "political", "football", "uk_location", "other"};

// Undirected weighted graph used at each Louvain level. Every edge appears
// in both endpoint lists; `loop` holds internal weight folded into a node.
struct LevelGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> loop;
  std::vector<double> degree;  // sum of incident weights + 2 * loop
  double m2 = 0.0;             // sum of degrees (twice the total weight)

  std::size_t size() const { return adj.size(); }
};

LevelGraph level_from(const WeightedGraph& g) {
  LevelGraph lg;
  const std::size_t n = g.node_count();
  lg.adj.resize(n);
  lg.loop.assign(n, 0.0);
  lg.degree.assign(n, 0.0);
  for (NodeIndex v = 0; v < n; ++v) {
    for (const auto& nb : g.neighbors(v)) {
      lg.adj[v].push_back({nb.node, nb.weight});
      lg.degree[v] += nb.weight;
    }
  }
  lg.m2 = std::accumulate(lg.degree.begin(), lg.degree.end(), 0.0);
  return lg;
}

double level_modularity(const LevelGraph& lg, std::span<const std::uint32_t> comm,
                        double resolution) {
  if (lg.m2 == 0.0) return 0.0;
  const std::size_t k = comm.empty() ? 0 : *std::max_element(comm.begin(), comm.end()) + 1;
  std::vector<double> internal(k, 0.0), total(k, 0.0);
  for (std::size_t v = 0; v < lg.size(); ++v) {
    total[comm[v]] += lg.degree[v];
    internal[comm[v]] += 2.0 * lg.loop[v];
    for (const auto& [u, w] : lg.adj[v]) {
      if (comm[u] == comm[v]) internal[comm[v]] += w;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double frac = total[c] / lg.m2;
    q += internal[c] / lg.m2 - resolution * frac * frac;
  }
  return q;
}

// One round of local moves. Returns true if any node changed community.
bool local_moves(const LevelGraph& lg, std::vector<std::uint32_t>& comm,
                 double resolution, Rng& rng) {
  const std::size_t n = lg.size();
  std::vector<double> tot(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) tot[comm[v]] += lg.degree[v];
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(order.begin(), order.end());

  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> seen;
  bool any_move = false;
  for (bool moved = true; moved;) {
    moved = false;
    for (auto v : order) {
      const std::uint32_t current = comm[v];
      const double k = lg.degree[v];
      seen.clear();
      for (const auto& [u, w] : lg.adj[v]) {
        if (u == v) continue;
        const auto c = comm[u];
        if (link[c] == 0.0) seen.push_back(c);
        link[c] += w;
      }
      tot[current] -= k;
      std::uint32_t best = current;
      double best_gain = link[current] - resolution * tot[current] * k / lg.m2;
      for (auto c : seen) {
        const double gain = link[c] - resolution * tot[c] * k / lg.m2;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += k;
      for (auto c : seen) link[c] = 0.0;
      link[current] = 0.0;
      if (best != current) {
        comm[v] = best;
        moved = true;
        any_move = true;
      }
    }
  }
  return any_move;
}

// Renumbers in order of first appearance; returns the community count.
std::size_t renumber(std::vector<std::uint32_t>& comm) {
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t next = 0;
  const bool compact = std::all_of(comm.begin(), comm.end(),
                                   [n = comm.size()](std::uint32_t c) { return c < n; });
  if (!compact) {
    // Labels supplied by callers may be arbitrary.
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    for (auto& c : comm) {
      auto [it, inserted] = remap.try_emplace(c, next);
      if (inserted) ++next;
      c = it->second;
    }
    return next;
  }
  std::vector<std::uint32_t> remap(comm.size(), kUnset);
  for (auto& c : comm) {
    if (remap[c] == kUnset) remap[c] = next++;
    c = remap[c];
  }
  return next;
}

LevelGraph aggregate(const LevelGraph& lg, std::span<const std::uint32_t> comm,
                     std::size_t count) {
  LevelGraph next;
  next.adj.resize(count);
  next.loop.assign(count, 0.0);
  next.degree.assign(count, 0.0);
  std::vector<std::map<std::uint32_t, double>> merged(count);
  for (std::size_t v = 0; v < lg.size(); ++v) {
    const auto c = comm[v];
    next.loop[c] += lg.loop[v];
    next.degree[c] += lg.degree[v];
    for (const auto& [u, w] : lg.adj[v]) {
      if (comm[u] == c) {
        next.loop[c] += w / 2.0;
      } else {
        merged[c][comm[u]] += w;
      }
    }
  }
  for (std::size_t c = 0; c < count; ++c) {
    next.adj[c].assign(merged[c].begin(), merged[c].end());
  }
  next.m2 = lg.m2;
  return next;
}

}  // namespace

std::optional<std::uint32_t> Partition::community_of(std::string_view node) const {
  auto it = index_.find(std::string(node));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> Partition::community_sizes() const {
  std::vector<std::size_t> sizes(community_count, 0);
  for (auto c : assignment) ++sizes[c];
  return sizes;
}

Partition make_partition(std::vector<std::string> nodes,
                         std::vector<std::uint32_t> assignment) {
  Partition p;
  p.community_count = renumber(assignment);
  p.nodes = std::move(nodes);
  p.assignment = std::move(assignment);
  p.index_.reserve(p.nodes.size());
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    p.index_.emplace(p.nodes[i], p.assignment[i]);
  }
  return p;
}

double modularity(const WeightedGraph& graph,
                  std::span<const std::uint32_t> assignment, double resolution) {
  if (assignment.size() != graph.node_count()) {
    throw DomainError("modularity: assignment does not cover every node");
  }
  const WeightedGraph und = graph.directed() ? symmetrize(graph) : WeightedGraph{};
  const WeightedGraph& g = graph.directed() ? und : graph;
  std::vector<std::uint32_t> comm(assignment.begin(), assignment.end());
  renumber(comm);
  return level_modularity(level_from(g), comm, resolution);
}

double modularity(const WeightedGraph& graph,
                  const std::unordered_map<std::string, std::uint32_t>& assignment,
                  double resolution) {
  std::vector<std::uint32_t> comm(graph.node_count());
  for (NodeIndex v = 0; v < graph.node_count(); ++v) {
    auto it = assignment.find(graph.id(v));
    if (it == assignment.end()) {
      throw DomainError("modularity: node '" + graph.id(v) + "' has no community");
    }
    comm[v] = it->second;
  }
  return modularity(graph, comm, resolution);
}

Partition louvain(const WeightedGraph& graph, double resolution, std::uint64_t seed) {
  const WeightedGraph und = graph.directed() ? symmetrize(graph) : WeightedGraph{};
  const WeightedGraph& g = graph.directed() ? und : graph;
  const std::size_t n = g.node_count();

  const LevelGraph base = level_from(g);
  std::vector<std::uint32_t> membership(n);
  std::iota(membership.begin(), membership.end(), 0u);
  std::vector<double> passes{level_modularity(base, membership, resolution)};

  Rng rng(seed);
  LevelGraph level = base;
  while (level.size() > 0) {
    std::vector<std::uint32_t> comm(level.size());
    std::iota(comm.begin(), comm.end(), 0u);
    if (!local_moves(level, comm, resolution, rng)) break;
    const std::size_t count = renumber(comm);
    for (auto& m : membership) m = comm[m];
    passes.push_back(level_modularity(base, membership, resolution));
    if (count == level.size()) break;
    level = aggregate(level, comm, count);
  }

  Partition p = make_partition(g.ids(), membership);
  p.resolution = resolution;
  p.seed = seed;
  p.modularity = level_modularity(base, p.assignment, resolution);
  p.pass_modularity = std::move(passes);
  return p;
}

std::vector<CompositionVector> community_composition(
    const Partition& partition, const NodeAnnotations& annotations) {
  std::vector<CompositionVector> out(partition.community_count);
  for (std::uint32_t c = 0; c < out.size(); ++c) out[c].community = c;
  for (std::size_t i = 0; i < partition.nodes.size(); ++i) {
    auto& v = out[partition.assignment[i]];
    ++v.size;
    v.proportions[static_cast<std::size_t>(annotations.category(partition.nodes[i]))] += 1.0;
  }
  for (auto& v : out) {
    if (v.size == 0) continue;
    for (auto& p : v.proportions) p /= static_cast<double>(v.size);
  }
  return out;
}

std::string_view to_string(Theme theme) {
  return kThemeNames[static_cast<std::size_t>(theme)];
}

Theme theme_for(HashtagCategory category) {
  switch (category) {
    case HashtagCategory::political:
      return Theme::political;
    case HashtagCategory::football:
      return Theme::football;
    case HashtagCategory::location:
      return Theme::uk_location;
    case HashtagCategory::other:
      return Theme::other;
  }
  return Theme::other;
}

ThemeAssignment ward_cluster(std::span<const CompositionVector> vectors, std::size_t k) {
  const std::size_t n = vectors.size();
  if (k == 0 || n < k) {
    throw DomainError("ward_cluster: need at least k=" + std::to_string(k) +
                      " vectors, got " + std::to_string(n));
  }
  ThemeAssignment out;
  for (const auto& v : vectors) out.communities.push_back(v.community);

  // Euclidean distances between active clusters, updated by Lance-Williams.
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < 4; ++c) {
        const double d = vectors[i].proportions[c] - vectors[j].proportions[c];
        s += d * d;
      }
      dist[i][j] = dist[j][i] = std::sqrt(s);
    }
  }
  std::vector<std::size_t> size(n, 1), cluster_id(n);
  std::iota(cluster_id.begin(), cluster_id.end(), 0);
  std::vector<bool> active(n, true);
  std::vector<std::size_t> label(n);  // slot holding each input vector
  std::iota(label.begin(), label.end(), 0);
  std::vector<std::size_t> cut_label;

  for (std::size_t step = 0; step + 1 < n; ++step) {
    if (n - step == k) cut_label = label;
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (active[j] && dist[i][j] < best) {
          best = dist[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    const double ni = static_cast<double>(size[bi]);
    const double nj = static_cast<double>(size[bj]);
    for (std::size_t x = 0; x < n; ++x) {
      if (!active[x] || x == bi || x == bj) continue;
      const double nx = static_cast<double>(size[x]);
      const double d2 = ((ni + nx) * dist[bi][x] * dist[bi][x] +
                         (nj + nx) * dist[bj][x] * dist[bj][x] -
                         nx * best * best) /
                        (ni + nj + nx);
      dist[bi][x] = dist[x][bi] = std::sqrt(std::max(d2, 0.0));
    }
    out.linkage.push_back({std::min(cluster_id[bi], cluster_id[bj]),
                           std::max(cluster_id[bi], cluster_id[bj]), best,
                           size[bi] + size[bj]});
    size[bi] += size[bj];
    active[bj] = false;
    cluster_id[bi] = n + step;
    for (auto& l : label) {
      if (l == bj) l = bi;
    }
  }
  if (cut_label.empty()) cut_label = label;  // k == 1

  // Dense cluster ids in order of first member.
  std::map<std::size_t, std::uint32_t> dense;
  out.cluster.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] =
        dense.emplace(cut_label[i], static_cast<std::uint32_t>(dense.size()));
    out.cluster[i] = it->second;
  }
  const std::size_t clusters = dense.size();
  std::vector<std::array<double, 4>> mean(clusters, std::array<double, 4>{});
  std::vector<std::size_t> members(clusters, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++members[out.cluster[i]];
    for (std::size_t c = 0; c < 4; ++c) {
      mean[out.cluster[i]][c] += vectors[i].proportions[c];
    }
  }
  out.cluster_theme.resize(clusters, Theme::other);
  for (std::size_t c = 0; c < clusters; ++c) {
    std::size_t arg = 3;
    double top = -1.0;
    bool tie = false;
    for (std::size_t cat = 0; cat < 4; ++cat) {
      const double m = mean[c][cat] / static_cast<double>(members[c]);
      if (m > top + 1e-12) {
        top = m;
        arg = cat;
        tie = false;
      } else if (std::abs(m - top) <= 1e-12) {
        tie = true;
      }
    }
    out.cluster_theme[c] =
        tie ? Theme::other : theme_for(static_cast<HashtagCategory>(arg));
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.theme_of[out.communities[i]] = out.cluster_theme[out.cluster[i]];
  }
  return out;
}

EngagementResult engagement_profile(const Partition& user_partition,
                                    const Partition& hashtag_partition,
                                    const BipartiteMatrix& matrix,
                                    const std::map<std::uint32_t, Theme>& themes,
                                    std::size_t min_community_size) {
  EngagementResult result;
  if (matrix.empty()) return result;

  std::unordered_map<std::string_view, std::size_t> user_row, tag_col;
  for (std::size_t r = 0; r < matrix.users.size(); ++r) user_row.emplace(matrix.users[r], r);
  for (std::size_t c = 0; c < matrix.hashtags.size(); ++c) {
    tag_col.emplace(matrix.hashtags[c], c);
  }
  for (const auto& node : user_partition.nodes) {
    if (!user_row.contains(node)) ++result.users_not_in_matrix;
  }
  std::vector<std::optional<std::uint32_t>> col_comm(matrix.hashtags.size());
  for (std::size_t i = 0; i < hashtag_partition.nodes.size(); ++i) {
    auto it = tag_col.find(hashtag_partition.nodes[i]);
    if (it == tag_col.end()) {
      ++result.hashtags_not_in_matrix;
      continue;
    }
    col_comm[it->second] = hashtag_partition.assignment[i];
  }

  const auto sizes = user_partition.community_sizes();
  std::vector<std::map<std::uint32_t, std::uint64_t>> counts(sizes.size());
  for (std::size_t i = 0; i < user_partition.nodes.size(); ++i) {
    auto it = user_row.find(user_partition.nodes[i]);
    if (it == user_row.end()) continue;
    const auto uc = user_partition.assignment[i];
    for (const auto& e : matrix.rows[it->second]) {
      if (col_comm[e.col]) counts[uc][*col_comm[e.col]] += e.count;
    }
  }
  for (std::uint32_t uc = 0; uc < sizes.size(); ++uc) {
    if (sizes[uc] < min_community_size) {
      ++result.excluded_communities;
      continue;
    }
    EngagementProfile profile;
    profile.user_community = uc;
    profile.size = sizes[uc];
    for (const auto& [hc, count] : counts[uc]) {
      if (count == 0) continue;
      EngagementSector sector;
      sector.hashtag_community = hc;
      sector.count = count;
      if (auto t = themes.find(hc); t != themes.end()) sector.theme = t->second;
      profile.sectors.push_back(sector);
    }
    result.profiles.push_back(std::move(profile));
  }
  return result;
}

}  // namespace pitchside
