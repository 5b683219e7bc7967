#include <algorithm>
#include <cmath>
#include <numeric>

#include "pitchside/errors.hpp"
#include "pitchside/graphs.hpp"
#include "pitchside/rng.hpp"

namespace pitchside {

namespace {

// Sparse vector: (index, value) sorted by index.
struct SparseEntry {
  std::uint32_t index;
  double value;
};
using SparseVector = std::vector<SparseEntry>;

double squared_norm(const SparseVector& v) {
  double s = 0.0;
  for (const auto& e : v) s += e.value * e.value;
  return s;
}

double similarity(double dot, double sq_a, double sq_b) {
  if (sq_a == 0.0 || sq_b == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(sq_a) * std::sqrt(sq_b)), 0.0, 1.0);
}

struct Candidate {
  std::uint32_t a;
  std::uint32_t b;
  double observed;
  std::uint32_t at_least = 0;
};

// Pairs (a < b) of vectors sharing support whose similarity exceeds the
// threshold. `vectors` are the axis entities, `dims` their dimension.
std::vector<Candidate> find_candidates(const std::vector<SparseVector>& vectors,
                                       std::size_t dims, double threshold) {
  std::vector<std::vector<SparseEntry>> postings(dims);
  for (std::uint32_t v = 0; v < vectors.size(); ++v) {
    for (const auto& e : vectors[v]) postings[e.index].push_back({v, e.value});
  }
  std::vector<double> norms(vectors.size());
  for (std::size_t v = 0; v < vectors.size(); ++v) norms[v] = squared_norm(vectors[v]);

  std::vector<Candidate> out;
  std::vector<double> acc(vectors.size(), 0.0);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t a = 0; a < vectors.size(); ++a) {
    for (const auto& e : vectors[a]) {
      for (const auto& p : postings[e.index]) {
        if (p.index <= a) continue;
        if (acc[p.index] == 0.0) touched.push_back(p.index);
        acc[p.index] += e.value * p.value;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (auto b : touched) {
      const double sim = similarity(acc[b], norms[a], norms[b]);
      if (sim > threshold) out.push_back({a, b, sim});
      acc[b] = 0.0;
    }
    touched.clear();
  }
  return out;
}

}  // namespace

ProjectionConfig ProjectionConfig::for_users() {
  ProjectionConfig c;
  c.axis = ProjectionAxis::user;
  c.min_similarity = 0.45;
  return c;
}

ProjectionConfig ProjectionConfig::for_hashtags() {
  ProjectionConfig c;
  c.axis = ProjectionAxis::hashtag;
  c.min_similarity = 0.1;
  return c;
}

void ProjectionConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("projection.alpha must lie in (0, 1)");
  }
  if (permutations < 100) {
    throw ConfigError("projection.permutations must be at least 100");
  }
  if (!(min_similarity >= 0.0 && min_similarity <= 1.0)) {
    throw ConfigError("projection.min_similarity must lie in [0, 1]");
  }
}

Projection project_similarity(const BipartiteMatrix& matrix,
                              const ProjectionConfig& config) {
  config.validate();
  Projection result;
  const bool user_axis = config.axis == ProjectionAxis::user;
  const auto& axis_ids = user_axis ? matrix.users : matrix.hashtags;

  GraphBuilder builder(false);
  for (const auto& id : axis_ids) builder.add_node(id);
  if (matrix.empty()) {
    result.graph = builder.build();
    return result;
  }

  const std::size_t n_rows = matrix.users.size();
  const std::size_t n_cols = matrix.hashtags.size();
  auto value_of = [&](std::uint32_t count) {
    return config.binary ? 1.0 : static_cast<double>(count);
  };

  std::vector<SparseVector> rows(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (const auto& e : matrix.rows[r]) rows[r].push_back({e.col, value_of(e.count)});
  }
  std::vector<SparseVector> vectors;
  if (user_axis) {
    vectors = rows;
  } else {
    vectors.resize(n_cols);
    for (std::uint32_t r = 0; r < n_rows; ++r) {
      for (const auto& e : rows[r]) vectors[e.index].push_back({r, e.value});
    }
  }
  const std::size_t dims = user_axis ? n_cols : n_rows;

  auto candidates = find_candidates(vectors, dims, config.min_similarity);
  result.candidates = candidates.size();

  if (!candidates.empty()) {
    Rng rng(config.rng_seed);
    // Identity permutation of column slots, restored after each row.
    std::vector<std::uint32_t> slot(n_cols);
    std::iota(slot.begin(), slot.end(), 0u);
    std::vector<SparseVector> permuted(user_axis ? n_rows : n_cols);
    std::vector<std::uint32_t> touched;
    std::vector<double> dense(dims, 0.0);
    std::vector<double> norms(permuted.size(), 0.0);
    if (user_axis) {
      for (std::size_t r = 0; r < n_rows; ++r) norms[r] = squared_norm(rows[r]);
    }

    for (std::uint32_t p = 0; p < config.permutations; ++p) {
      for (auto& v : permuted) v.clear();
      for (std::uint32_t r = 0; r < n_rows; ++r) {
        const auto& row = rows[r];
        for (std::size_t i = 0; i < row.size(); ++i) {
          const std::size_t j = i + rng.below(n_cols - i);
          std::swap(slot[i], slot[j]);
          touched.push_back(static_cast<std::uint32_t>(i));
          touched.push_back(static_cast<std::uint32_t>(j));
          if (user_axis) {
            permuted[r].push_back({slot[i], row[i].value});
          } else {
            permuted[slot[i]].push_back({r, row[i].value});
          }
        }
        for (auto t : touched) slot[t] = t;
        touched.clear();
      }
      if (!user_axis) {
        for (std::size_t c = 0; c < n_cols; ++c) norms[c] = squared_norm(permuted[c]);
      }
      std::uint32_t current = static_cast<std::uint32_t>(-1);
      for (auto& cand : candidates) {
        if (cand.a != current) {
          if (current != static_cast<std::uint32_t>(-1)) {
            for (const auto& e : permuted[current]) dense[e.index] = 0.0;
          }
          current = cand.a;
          for (const auto& e : permuted[current]) dense[e.index] = e.value;
        }
        double dot = 0.0;
        for (const auto& e : permuted[cand.b]) dot += dense[e.index] * e.value;
        const double sim = similarity(dot, norms[cand.a], norms[cand.b]);
        if (sim >= cand.observed - 1e-12) ++cand.at_least;
      }
      if (current != static_cast<std::uint32_t>(-1)) {
        for (const auto& e : permuted[current]) dense[e.index] = 0.0;
      }
    }
  }

  for (const auto& cand : candidates) {
    const double p = static_cast<double>(cand.at_least) /
                     static_cast<double>(config.permutations);
    if (p < config.alpha) {
      result.retained.push_back({cand.a, cand.b, cand.observed, p});
      builder.add_edge(axis_ids[cand.a], axis_ids[cand.b], cand.observed);
    }
  }
  result.graph = builder.build();
  return result;
}

}  // namespace pitchside
