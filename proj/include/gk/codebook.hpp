#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gk/error.hpp"
#include "gk/features.hpp"
#include "gk/rand.hpp"

namespace gk {

/// K cluster centroids over training gesturelets, row-major K x dim.
struct Codebook {
  int k = 0;
  int dim = 0;
  std::vector<double> centroids;
  std::uint64_t seed = 0;
  std::string config_digest;  // binds the codebook to its layout + GestureletConfig

  const double* centroid(int c) const { return centroids.data() + static_cast<std::size_t>(c) * dim; }
};

/// m (cluster, weight) pairs, weights positive and summing to 1,
/// ordered by increasing distance (ties by lower cluster id).
struct SoftAssignment {
  struct Entry {
    int cluster = 0;
    double weight = 0.0;
  };
  std::vector<Entry> entries;
};

namespace detail {

inline double sq_dist(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline std::size_t count_distinct_rows(const std::vector<const double*>& rows, int dim) {
  std::vector<const double*> sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [dim](const double* a, const double* b) {
    return std::lexicographical_compare(a, a + dim, b, b + dim);
  });
  std::size_t distinct = sorted.empty() ? 0 : 1;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (!std::equal(sorted[i], sorted[i] + dim, sorted[i - 1])) ++distinct;
  return distinct;
}

}  // namespace detail

struct KMeansOptions {
  int max_iters = 100;
  double rel_tol = 1e-4;  // stop when relative inertia improvement falls below
};

/// Seeded k-means++ over raw descriptor vectors. Deterministic given
/// (points, k, seed, options). Throws TooFewSamples when the number of
/// distinct points is below k.
inline Codebook build_codebook_from_vectors(const std::vector<std::vector<double>>& points, int k,
                                            std::uint64_t seed, const KMeansOptions& opts = {}) {
  require(k >= 2, ErrorCode::InvalidArgument, "codebook needs k >= 2");
  require(!points.empty(), ErrorCode::EmptyInput, "no points to cluster");
  const int dim = static_cast<int>(points.front().size());
  const std::size_t n = points.size();
  std::vector<const double*> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(static_cast<int>(points[i].size()) == dim, ErrorCode::DimensionMismatch,
            "inconsistent point dimensions");
    rows[i] = points[i].data();
  }
  require(detail::count_distinct_rows(rows, dim) >= static_cast<std::size_t>(k),
          ErrorCode::TooFewSamples, "fewer distinct points than clusters");

  std::mt19937_64 rng(seed);
  std::vector<double> centroids(static_cast<std::size_t>(k) * dim);

  // k-means++ seeding: first pick uniform, then proportional to squared distance.
  std::vector<double> min_sq(n, 0.0);
  {
    const std::size_t first = static_cast<std::size_t>(detail::uniform01(rng) * static_cast<double>(n));
    std::copy(rows[std::min(first, n - 1)], rows[std::min(first, n - 1)] + dim, centroids.begin());
    for (std::size_t i = 0; i < n; ++i) min_sq[i] = detail::sq_dist(rows[i], centroids.data(), dim);
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (double v : min_sq) total += v;
      std::size_t pick = 0;
      if (total > 0.0) {
        double target = detail::uniform01(rng) * total;
        double acc = 0.0;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          acc += min_sq[i];
          if (acc >= target) {
            pick = i;
            break;
          }
        }
      }
      double* dst = centroids.data() + static_cast<std::size_t>(c) * dim;
      std::copy(rows[pick], rows[pick] + dim, dst);
      for (std::size_t i = 0; i < n; ++i)
        min_sq[i] = std::min(min_sq[i], detail::sq_dist(rows[i], dst, dim));
    }
  }

  std::vector<int> labels(n, 0);
  std::vector<double> sums(static_cast<std::size_t>(k) * dim);
  std::vector<std::int64_t> counts(k);
  double prev_inertia = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d = detail::sq_dist(rows[i], centroids.data() + static_cast<std::size_t>(c) * dim, dim);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      labels[i] = best_c;
      inertia += best;
    }
    // Inertia is non-increasing across iterations (up to roundoff).
    assert(inertia <= prev_inertia * (1.0 + 1e-9) + 1e-12);

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      double* dst = sums.data() + static_cast<std::size_t>(labels[i]) * dim;
      for (int ax = 0; ax < dim; ++ax) dst[ax] += rows[i][ax];
      ++counts[labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed an empty cluster at the point farthest from its centroid.
        std::size_t far_i = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d =
              detail::sq_dist(rows[i], centroids.data() + static_cast<std::size_t>(labels[i]) * dim, dim);
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        double* dst = centroids.data() + static_cast<std::size_t>(c) * dim;
        std::copy(rows[far_i], rows[far_i] + dim, dst);
        labels[far_i] = c;
        continue;
      }
      double* dst = centroids.data() + static_cast<std::size_t>(c) * dim;
      const double inv = 1.0 / static_cast<double>(counts[c]);
      for (int ax = 0; ax < dim; ++ax) dst[ax] = sums[static_cast<std::size_t>(c) * dim + ax] * inv;
    }

    if (prev_inertia < std::numeric_limits<double>::infinity()) {
      const double denom = std::max(prev_inertia, 1e-300);
      if ((prev_inertia - inertia) / denom < opts.rel_tol) {
        prev_inertia = inertia;
        break;
      }
    }
    prev_inertia = inertia;
  }

  Codebook cb;
  cb.k = k;
  cb.dim = dim;
  cb.centroids = std::move(centroids);
  cb.seed = seed;
  return cb;
}

inline Codebook build_codebook(const std::vector<Gesturelet>& gesturelets, int k, std::uint64_t seed,
                               const KMeansOptions& opts = {}) {
  std::vector<std::vector<double>> points;
  points.reserve(gesturelets.size());
  for (const auto& g : gesturelets) points.push_back(g.vector);
  return build_codebook_from_vectors(points, k, seed, opts);
}

/// Soft-bin a descriptor to its m nearest centroids (exact linear scan).
/// Weight_i = (1/(d_i+eps)) / sum_j (1/(d_j+eps)), eps = 1e-12; distance ties
/// break toward the lower cluster id.
inline SoftAssignment assign(const std::vector<double>& g, const Codebook& cb, int m) {
  require(static_cast<int>(g.size()) == cb.dim, ErrorCode::DimensionMismatch,
          "descriptor length does not match centroid length");
  require(m >= 1 && m <= cb.k, ErrorCode::InvalidArgument, "m must be in [1, k]");
  constexpr double kEps = 1e-12;

  // Partial selection of the m nearest: (distance, id) pairs, ascending.
  std::vector<std::pair<double, int>> best;
  best.reserve(static_cast<std::size_t>(m) + 1);
  for (int c = 0; c < cb.k; ++c) {
    const double d = detail::sq_dist(g.data(), cb.centroid(c), cb.dim);
    if (static_cast<int>(best.size()) == m && d >= best.back().first) continue;
    const std::pair<double, int> cand{d, c};
    auto it = std::lower_bound(best.begin(), best.end(), cand);
    best.insert(it, cand);
    if (static_cast<int>(best.size()) > m) best.pop_back();
  }

  SoftAssignment out;
  out.entries.reserve(best.size());
  double total = 0.0;
  for (const auto& [sq, id] : best) {
    const double inv = 1.0 / (std::sqrt(sq) + kEps);
    out.entries.push_back({id, inv});
    total += inv;
  }
  for (auto& e : out.entries) e.weight /= total;
  return out;
}

inline SoftAssignment assign(const Gesturelet& g, const Codebook& cb, int m) {
  return assign(g.vector, cb, m);
}

/// Accumulate soft-assignment weights into K bins and L1-normalize to sum 1.
inline std::vector<double> sequence_histogram(const std::vector<SoftAssignment>& assignments, int k) {
  require(!assignments.empty(), ErrorCode::EmptyInput, "sequence_histogram needs at least one assignment");
  std::vector<double> h(k, 0.0);
  double total = 0.0;
  for (const auto& a : assignments) {
    for (const auto& e : a.entries) {
      require(e.cluster >= 0 && e.cluster < k, ErrorCode::OutOfRange, "cluster id out of range");
      h[e.cluster] += e.weight;
      total += e.weight;
    }
  }
  if (total > 0.0)
    for (double& v : h) v /= total;
  return h;
}

}  // namespace gk
