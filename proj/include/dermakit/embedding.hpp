#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dermakit/error.hpp"
#include "dermakit/matrix.hpp"
#include "dermakit/parallel.hpp"

namespace dermakit {

/// Low-dimensional embedding with the labels carried through for plotting.
/// diagnostic holds the final KL divergence (t-SNE) or the residual
/// variance (Isomap).
struct Embedding {
  Matrix coords;                       // kept points x output_dim
  std::vector<std::uint8_t> labels;    // one per kept point
  std::vector<std::int64_t> indices;   // input-local index per kept point
  std::vector<std::int64_t> dropped;   // inputs outside the embedded set
  std::string method;
  double diagnostic = 0.0;
  std::vector<std::pair<int, double>> diagnostic_history;  // (iteration, value)
};

/// Symmetric squared-Euclidean distance matrix with a zero diagonal.
inline Matrix pairwise_sq_dists(const Matrix& points) {
  const std::int64_t n = points.rows;
  if (n < 2) fail(ErrorKind::TooFewPoints, "need at least 2 points");
  Matrix d(n, n);
  parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i)
      for (std::int64_t j = 0; j < n; ++j)
        d.at(i, j) = j == i ? 0.0 : sq_dist(points.row(i), points.row(j), points.cols);
  }, /*grain=*/4);
  return d;
}

}  // namespace dermakit
