// Brute-force reference implementations used by the unit and acceptance
// tests. They favour obviousness over speed and share no code with the
// library algorithms they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pitchside/graph.hpp"
#include "pitchside/graphs.hpp"
#include "pitchside/rng.hpp"

namespace oracle {

using pitchside::BipartiteMatrix;
using pitchside::GraphBuilder;
using pitchside::Rng;
using pitchside::WeightedGraph;

// ---- random inputs ----------------------------------------------------------

inline std::string node_name(std::size_t i) {
  std::string digits = std::to_string(i);
  return "n" + std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') + digits;
}

// Erdos-Renyi graph on n nodes with edge probability p and weights in
// {1, ..., max_weight}.
inline WeightedGraph random_graph(Rng& rng, std::size_t n, double p, bool directed,
                                  std::uint32_t max_weight = 1) {
  GraphBuilder b(directed);
  for (std::size_t i = 0; i < n; ++i) b.add_node(node_name(i));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = directed ? 0 : i + 1; j < n; ++j) {
      if (i == j || !rng.bernoulli(p)) continue;
      b.add_edge(node_name(i), node_name(j), 1.0 + static_cast<double>(rng.below(max_weight)));
    }
  }
  return b.build();
}

// Random user x hashtag count matrix; every user keeps at least one entry.
inline BipartiteMatrix random_matrix(Rng& rng, std::size_t users, std::size_t hashtags,
                                     double fill) {
  BipartiteMatrix m;
  for (std::size_t u = 0; u < users; ++u) {
    m.users.push_back("u" + std::string(u < 10 ? "00" : u < 100 ? "0" : "") + std::to_string(u));
  }
  for (std::size_t h = 0; h < hashtags; ++h) {
    m.hashtags.push_back("h" + std::string(h < 10 ? "00" : h < 100 ? "0" : "") + std::to_string(h));
  }
  m.rows.resize(users);
  for (std::size_t u = 0; u < users; ++u) {
    for (std::uint32_t h = 0; h < hashtags; ++h) {
      if (rng.bernoulli(fill)) m.rows[u].push_back({h, 1 + static_cast<std::uint32_t>(rng.below(5))});
    }
    if (m.rows[u].empty()) {
      m.rows[u].push_back({static_cast<std::uint32_t>(rng.below(hashtags)), 1});
    }
  }
  return m;
}

// ---- projection ------------------------------------------------------------

using Dense = std::vector<std::vector<double>>;

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

inline Dense transpose(const Dense& m) {
  if (m.empty()) return {};
  Dense t(m[0].size(), std::vector<double>(m.size(), 0.0));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  }
  return t;
}

// Retained pairs (a < b, axis indices) of the permutation-null projection,
// computed over dense matrices. The null re-places each user's nonzero
// counts (in column order) onto fresh partial Fisher-Yates draws of the
// column range, one full matrix per permutation.
inline std::set<std::pair<std::uint32_t, std::uint32_t>> projection(
    const BipartiteMatrix& m, const pitchside::ProjectionConfig& cfg) {
  const bool users = cfg.axis == pitchside::ProjectionAxis::user;
  const std::size_t H = m.hashtags.size();
  Dense counts(m.users.size(), std::vector<double>(H, 0.0));
  for (std::size_t u = 0; u < m.users.size(); ++u) {
    for (const auto& e : m.rows[u]) counts[u][e.col] = cfg.binary ? 1.0 : e.count;
  }
  const Dense observed = users ? counts : transpose(counts);
  const std::size_t n = observed.size();

  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> pairs;
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      const double s = cosine(observed[a], observed[b]);
      if (s > cfg.min_similarity) pairs.emplace_back(a, b, s);
    }
  }
  std::vector<std::uint32_t> hits(pairs.size(), 0);
  if (!pairs.empty()) {
    Rng rng(cfg.rng_seed);
    for (std::uint32_t p = 0; p < cfg.permutations; ++p) {
      Dense shuffled(m.users.size(), std::vector<double>(H, 0.0));
      for (std::size_t u = 0; u < m.users.size(); ++u) {
        std::vector<std::uint32_t> cols(H);
        std::iota(cols.begin(), cols.end(), 0u);
        std::size_t i = 0;
        for (std::uint32_t c = 0; c < H; ++c) {
          if (counts[u][c] == 0.0) continue;
          const std::size_t j = i + rng.below(H - i);
          std::swap(cols[i], cols[j]);
          shuffled[u][cols[i]] = counts[u][c];
          ++i;
        }
      }
      const Dense null = users ? shuffled : transpose(shuffled);
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& [a, b, s] = pairs[k];
        if (cosine(null[a], null[b]) >= s - 1e-12) ++hits[k];
      }
    }
  }
  std::set<std::pair<std::uint32_t, std::uint32_t>> kept;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double pval = static_cast<double>(hits[k]) / cfg.permutations;
    if (pval < cfg.alpha) kept.insert({std::get<0>(pairs[k]), std::get<1>(pairs[k])});
  }
  return kept;
}

// ---- shortest paths ----------------------------------------------------------

// Hop distances and shortest-path counts from every source, following out
// edges (both directions for undirected graphs).
struct AllPairs {
  std::vector<std::vector<long>> dist;     // -1 when unreachable
  std::vector<std::vector<double>> count;  // number of shortest paths
};

inline AllPairs all_pairs_bfs(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : g.edges()) {
    adj[e.src].push_back(e.dst);
    if (!g.directed()) adj[e.dst].push_back(e.src);
  }
  AllPairs ap{std::vector<std::vector<long>>(n, std::vector<long>(n, -1)),
              std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0))};
  for (std::size_t s = 0; s < n; ++s) {
    auto& d = ap.dist[s];
    auto& c = ap.count[s];
    d[s] = 0;
    c[s] = 1;
    std::vector<std::size_t> level{s};
    while (!level.empty()) {
      std::vector<std::size_t> next;
      for (auto v : level) {
        for (auto w : adj[v]) {
          if (d[w] < 0) {
            d[w] = d[v] + 1;
            next.push_back(w);
          }
          if (d[w] == d[v] + 1) c[w] += c[v];
        }
      }
      level = std::move(next);
    }
  }
  return ap;
}

// Betweenness from the pair-dependency definition: for every pair (s, t) the
// fraction of shortest s-t paths through v. Undirected graphs count each
// unordered pair once.
inline std::vector<double> betweenness(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  const auto ap = all_pairs_bfs(g);
  std::vector<double> bc(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t || ap.dist[s][t] <= 0) continue;
      if (!g.directed() && t < s) continue;
      for (std::size_t v = 0; v < n; ++v) {
        if (v == s || v == t || ap.dist[s][v] < 0 || ap.dist[v][t] < 0) continue;
        if (ap.dist[s][v] + ap.dist[v][t] != ap.dist[s][t]) continue;
        bc[v] += ap.count[s][v] * ap.count[v][t] / ap.count[s][t];
      }
    }
  }
  return bc;
}

// ---- k-core -------------------------------------------------------------------

// Repeatedly deletes any node with fewer than k remaining neighbours.
inline std::set<std::string> k_core_nodes(const WeightedGraph& g, std::size_t k) {
  const std::size_t n = g.node_count();
  std::vector<std::set<std::size_t>> adj(n);
  for (const auto& e : g.edges()) {
    adj[e.src].insert(e.dst);
    adj[e.dst].insert(e.src);
  }
  std::vector<bool> alive(n, true);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      std::size_t deg = 0;
      for (auto w : adj[v]) deg += alive[w] ? 1 : 0;
      if (deg < k) {
        alive[v] = false;
        changed = true;
      }
    }
  }
  std::set<std::string> out;
  for (std::size_t v = 0; v < n; ++v) {
    if (alive[v] && (k == 0 || !adj[v].empty())) out.insert(g.id(v));
  }
  return out;
}

// ---- partitions -----------------------------------------------------------------

// Normalized mutual information, arithmetic-mean normalization. Two
// single-cluster labelings count as identical (1.0).
inline double nmi(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  const double n = static_cast<double>(a.size());
  std::map<std::uint32_t, double> ca, cb;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca[a[i]] += 1;
    cb[b[i]] += 1;
    joint[{a[i], b[i]}] += 1;
  }
  auto entropy = [n](const std::map<std::uint32_t, double>& c) {
    double h = 0.0;
    for (const auto& [k, v] : c) h -= v / n * std::log(v / n);
    return h;
  };
  double mi = 0.0;
  for (const auto& [k, v] : joint) {
    mi += v / n * std::log(v * n / (ca[k.first] * cb[k.second]));
  }
  const double ha = entropy(ca), hb = entropy(cb);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  return 2.0 * mi / (ha + hb);
}

// Planted partition: `groups` blocks of `size` nodes, in-block edge
// probability p_in and cross-block p_out. Returns the graph and the block of
// every node in graph order.
inline std::pair<WeightedGraph, std::vector<std::uint32_t>> planted_partition(
    Rng& rng, std::size_t groups, std::size_t size, double p_in, double p_out) {
  const std::size_t n = groups * size;
  GraphBuilder b(false);
  for (std::size_t i = 0; i < n; ++i) b.add_node(node_name(i));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool same = i / size == j / size;
      if (rng.bernoulli(same ? p_in : p_out)) b.add_edge(node_name(i), node_name(j), 1.0);
    }
  }
  auto g = b.build();
  std::vector<std::uint32_t> truth(n);
  for (std::size_t v = 0; v < n; ++v) {
    truth[v] = static_cast<std::uint32_t>(std::stoul(g.id(v).substr(1)) / size);
  }
  return {std::move(g), truth};
}

// ---- files ------------------------------------------------------------------------

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Relative path -> content for every regular file under `root`.
inline std::map<std::string, std::string> tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[std::filesystem::relative(e.path(), root).generic_string()] = slurp(e.path());
    }
  }
  return out;
}

}  // namespace oracle
