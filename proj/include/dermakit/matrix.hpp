#pragma once

#include <cstdint>
#include <vector>

namespace dermakit {

/// Dense row-major matrix of doubles. All clustering and embedding math in
/// the toolkit runs in 64-bit.
struct Matrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::int64_t r, std::int64_t c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r * c), 0.0) {}

  double* row(std::int64_t i) {
    return data.data() + static_cast<std::size_t>(i * cols);
  }
  const double* row(std::int64_t i) const {
    return data.data() + static_cast<std::size_t>(i * cols);
  }

  double& at(std::int64_t i, std::int64_t j) {
    return data[static_cast<std::size_t>(i * cols + j)];
  }
  double at(std::int64_t i, std::int64_t j) const {
    return data[static_cast<std::size_t>(i * cols + j)];
  }

  bool operator==(const Matrix&) const = default;
};

/// Squared Euclidean distance with four-way unrolled accumulation; the
/// fixed summation order keeps results reproducible while still letting
/// the compiler vectorize.
inline double sq_dist(const double* a, const double* b, std::int64_t d) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::int64_t i = 0;
  for (; i + 4 <= d; i += 4) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; i < d; ++i) {
    const double dd = a[i] - b[i];
    s0 += dd * dd;
  }
  return (s0 + s1) + (s2 + s3);
}

}  // namespace dermakit
