#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "dermakit/dataset.hpp"
#include "dermakit/error.hpp"
#include "dermakit/matrix.hpp"
#include "dermakit/parallel.hpp"
#include "dermakit/rng.hpp"

namespace dermakit {

/// Row-major (row, column, channel) flattening, scaled to [0, 1].
inline std::vector<double> flatten(std::span<const std::uint8_t> image) {
  std::vector<double> out(image.size());
  for (std::size_t i = 0; i < image.size(); ++i)
    out[i] = static_cast<double>(image[i]) / 255.0;
  return out;
}

inline Matrix flatten_images(const ImageSet& set) {
  Matrix m(set.count(), static_cast<std::int64_t>(set.image_bytes()));
  for (std::int64_t i = 0; i < set.count(); ++i) {
    const auto img = set.image(i);
    double* row = m.row(i);
    for (std::size_t p = 0; p < img.size(); ++p)
      row[p] = static_cast<double>(img[p]) / 255.0;
  }
  return m;
}

enum class KMeansInit { kmeanspp, random_points };

struct KMeansConfig {
  int k = 1;
  int max_iter = 100;
  double tol = 1e-4;  // relative inertia-improvement stop threshold
  std::uint64_t seed = 0;
  KMeansInit init = KMeansInit::kmeanspp;
};

struct KMeansResult {
  Matrix centroids;              // k x d
  std::vector<int> assignments;  // n cluster ids
  double inertia = 0;
  int iterations_run = 0;
  std::vector<double> inertia_history;  // one value per assignment pass
  int reseeds = 0;                      // empty-cluster rescues performed
};

namespace kmeans_detail {

inline void assign_points(const Matrix& points, const Matrix& centroids,
                          std::vector<int>& assignments,
                          std::vector<double>& dists) {
  const std::int64_t n = points.rows;
  const std::int64_t k = centroids.rows;
  const std::int64_t d = points.cols;
  parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const double* p = points.row(i);
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::int64_t c = 0; c < k; ++c) {
        const double dist = sq_dist(p, centroids.row(c), d);
        if (dist < best_d) {  // ties keep the lowest centroid id
          best_d = dist;
          best = static_cast<int>(c);
        }
      }
      assignments[static_cast<std::size_t>(i)] = best;
      dists[static_cast<std::size_t>(i)] = best_d;
    }
  }, /*grain=*/8);
}

inline Matrix seed_kmeanspp(const Matrix& points, int k, Rng& rng) {
  const std::int64_t n = points.rows;
  const std::int64_t d = points.cols;
  Matrix centroids(k, d);
  std::vector<double> dist_sq(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());

  auto first = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
  std::copy_n(points.row(first), d, centroids.row(0));

  for (int c = 1; c < k; ++c) {
    const double* prev = centroids.row(c - 1);
    double total = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double dd = sq_dist(points.row(i), prev, d);
      auto& cur = dist_sq[static_cast<std::size_t>(i)];
      cur = std::min(cur, dd);
      total += cur;
    }
    std::int64_t pick = -1;
    if (total > 0) {
      const double target = rng.uniform() * total;
      double acc = 0;
      for (std::int64_t i = 0; i < n; ++i) {
        acc += dist_sq[static_cast<std::size_t>(i)];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;
    } else {
      // All remaining mass is zero (duplicate-heavy data): fall back to
      // the lowest-index point, keeping the run deterministic.
      pick = 0;
      for (std::int64_t i = 0; i < n; ++i)
        if (dist_sq[static_cast<std::size_t>(i)] > 0) {
          pick = i;
          break;
        }
    }
    std::copy_n(points.row(pick), d, centroids.row(c));
  }
  return centroids;
}

inline Matrix seed_random_points(const Matrix& points, int k, Rng& rng) {
  const std::int64_t n = points.rows;
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first k slots are a uniform sample without
  // replacement.
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::int64_t>(
                           rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  Matrix centroids(k, points.cols);
  for (int c = 0; c < k; ++c)
    std::copy_n(points.row(idx[static_cast<std::size_t>(c)]), points.cols,
                centroids.row(c));
  return centroids;
}

}  // namespace kmeans_detail

/// Lloyd iterations from a seeded kmeans++ (or random-points) start.
/// Stops when the relative inertia improvement drops below cfg.tol or
/// max_iter is reached. Empty clusters are reseeded to the point farthest
/// from its assigned centroid.
inline KMeansResult kmeans(const Matrix& points, const KMeansConfig& cfg) {
  const std::int64_t n = points.rows;
  const std::int64_t d = points.cols;
  if (cfg.k < 1) fail(ErrorKind::InvalidArgument, "k must be >= 1");
  if (n < cfg.k)
    fail(ErrorKind::TooFewPoints, std::to_string(n) + " points for k=" +
                                      std::to_string(cfg.k));

  Rng rng(Rng::derive(cfg.seed, "kmeans-init"));
  KMeansResult res;
  res.centroids = cfg.init == KMeansInit::kmeanspp
                      ? kmeans_detail::seed_kmeanspp(points, cfg.k, rng)
                      : kmeans_detail::seed_random_points(points, cfg.k, rng);
  res.assignments.assign(static_cast<std::size_t>(n), 0);

  std::vector<double> dists(static_cast<std::size_t>(n), 0.0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(cfg.k), 0);
  double prev_inertia = std::numeric_limits<double>::infinity();
  bool converged = false;

  for (int iter = 0; iter < cfg.max_iter && !converged; ++iter) {
    kmeans_detail::assign_points(points, res.centroids, res.assignments, dists);

    // Rescue empty clusters before accepting this pass. Each rescue moves
    // the centroid onto a real point, so a re-assignment follows to keep
    // every assignment an argmin.
    for (int round = 0; round < cfg.k; ++round) {
      std::fill(counts.begin(), counts.end(), 0);
      for (auto a : res.assignments) counts[static_cast<std::size_t>(a)] += 1;
      bool any_rescued = false;
      for (int c = 0; c < cfg.k; ++c) {
        if (counts[static_cast<std::size_t>(c)] != 0) continue;
        std::int64_t farthest = -1;
        double far_d = -1;
        for (std::int64_t i = 0; i < n; ++i) {
          const auto owner = static_cast<std::size_t>(
              res.assignments[static_cast<std::size_t>(i)]);
          if (counts[owner] <= 1) continue;  // never orphan a singleton
          if (dists[static_cast<std::size_t>(i)] > far_d) {
            far_d = dists[static_cast<std::size_t>(i)];
            farthest = i;
          }
        }
        if (farthest < 0) continue;
        counts[static_cast<std::size_t>(
            res.assignments[static_cast<std::size_t>(farthest)])] -= 1;
        res.assignments[static_cast<std::size_t>(farthest)] = c;
        counts[static_cast<std::size_t>(c)] += 1;
        std::copy_n(points.row(farthest), d, res.centroids.row(c));
        dists[static_cast<std::size_t>(farthest)] = 0.0;
        res.reseeds += 1;
        any_rescued = true;
      }
      if (!any_rescued) break;
      kmeans_detail::assign_points(points, res.centroids, res.assignments, dists);
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (auto a : res.assignments) counts[static_cast<std::size_t>(a)] += 1;

    double inertia = 0;
    for (std::int64_t i = 0; i < n; ++i)
      inertia += dists[static_cast<std::size_t>(i)];
    res.inertia_history.push_back(inertia);
    res.inertia = inertia;
    res.iterations_run = iter + 1;

    if (std::isfinite(prev_inertia)) {
      const double improvement = prev_inertia - inertia;
      if (improvement <= cfg.tol * prev_inertia) {
        converged = true;
        break;  // assignments already match the current centroids
      }
    }
    if (inertia == 0.0) {
      converged = true;
      break;
    }
    prev_inertia = inertia;

    // Mean update.
    std::fill(res.centroids.data.begin(), res.centroids.data.end(), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
      const double* p = points.row(i);
      double* c = res.centroids.row(res.assignments[static_cast<std::size_t>(i)]);
      for (std::int64_t j = 0; j < d; ++j) c[j] += p[j];
    }
    for (int c = 0; c < cfg.k; ++c) {
      const auto cnt = counts[static_cast<std::size_t>(c)];
      if (cnt == 0) continue;
      double* row = res.centroids.row(c);
      for (std::int64_t j = 0; j < d; ++j) row[j] /= static_cast<double>(cnt);
    }
  }

  if (!converged) {
    // max_iter exhausted after a mean update: re-sync assignments and
    // inertia with the final centroids.
    kmeans_detail::assign_points(points, res.centroids, res.assignments, dists);
    double inertia = 0;
    for (std::int64_t i = 0; i < n; ++i)
      inertia += dists[static_cast<std::size_t>(i)];
    res.inertia_history.push_back(inertia);
    res.inertia = inertia;
  }
  return res;
}

/// For each centroid in ascending id order, the closest not-yet-selected
/// point (Euclidean, ties to the lowest point index). Returns exactly k
/// distinct indices.
inline std::vector<std::int64_t> nearest_to_centroids(const Matrix& points,
                                                      const Matrix& centroids) {
  const std::int64_t n = points.rows;
  const std::int64_t k = centroids.rows;
  if (n < k)
    fail(ErrorKind::TooFewPoints,
         std::to_string(n) + " points for " + std::to_string(k) + " centroids");

  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> selected;
  selected.reserve(static_cast<std::size_t>(k));
  for (std::int64_t c = 0; c < k; ++c) {
    const double* cent = centroids.row(c);
    std::int64_t best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const double dist = sq_dist(points.row(i), cent, points.cols);
      if (dist < best_d) {
        best_d = dist;
        best = i;
      }
    }
    taken[static_cast<std::size_t>(best)] = 1;
    selected.push_back(best);
  }
  return selected;
}

}  // namespace dermakit
