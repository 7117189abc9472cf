#pragma once

// Synthetic data builders shared by the test suites. The image generator
// mimics the structure of the real archive: seven classes with distinct
// base colors and patterns, a shared per-image brightness factor, and
// green/blue channels that track each other closely.

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "dermakit/dataset.hpp"
#include "dermakit/matrix.hpp"
#include "dermakit/npy.hpp"
#include "dermakit/rng.hpp"

namespace testsupport {

inline std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

inline void render_image(std::uint8_t* px, int cls, dermakit::Rng& rng) {
  const double base_r = 40.0 + 30.0 * cls;
  const double base_g = 200.0 - 22.0 * cls;
  const double base_b = base_g + 10.0;
  const double brightness = 0.75 + 0.5 * rng.uniform();
  const int pattern = 3 + 2 * cls;  // class-dependent inverted square

  for (int i = 0; i < dermakit::kImageSize; ++i) {
    for (int j = 0; j < dermakit::kImageSize; ++j) {
      const double n1 = rng.uniform(-12.0, 12.0);
      const double n2 = rng.uniform(-12.0, 12.0);
      const double n3 = rng.uniform(-12.0, 12.0);
      double r = brightness * base_r + n1;
      double g = brightness * base_g + n2;
      double b = brightness * base_b + 0.9 * n2 + 0.1 * n3;
      if (i >= 6 && i < 6 + pattern && j >= 6 && j < 6 + pattern) {
        r = 255.0 - r;
        g = 255.0 - g;
        b = 255.0 - b;
      }
      const std::size_t off = static_cast<std::size_t>((i * 28 + j) * 3);
      px[off] = clamp_u8(r);
      px[off + 1] = clamp_u8(g);
      px[off + 2] = clamp_u8(b);
    }
  }
}

inline dermakit::ImageSet make_set(const std::array<std::int64_t, 7>& counts,
                                   std::uint64_t seed,
                                   dermakit::Split split = dermakit::Split::train) {
  dermakit::Rng rng(seed);
  std::vector<std::uint8_t> order;
  for (int c = 0; c < 7; ++c)
    for (std::int64_t i = 0; i < counts[static_cast<std::size_t>(c)]; ++i)
      order.push_back(static_cast<std::uint8_t>(c));
  rng.shuffle(order);

  dermakit::ImageSet set;
  set.split = split;
  set.channels = 3;
  set.labels = order;
  set.pixels.resize(order.size() * 28 * 28 * 3);
  for (std::size_t i = 0; i < order.size(); ++i)
    render_image(set.pixels.data() + i * 28 * 28 * 3, order[i], rng);
  return set;
}

inline std::vector<std::pair<std::string, dermakit::NdArray>> set_to_entries(
    const dermakit::ImageSet& set, const std::string& prefix) {
  return dermakit::imageset_to_arrays(set, prefix);
}

/// A full three-split archive as serialized bytes.
inline std::vector<std::uint8_t> make_archive_bytes(
    const std::array<std::int64_t, 7>& train_counts,
    const std::array<std::int64_t, 7>& val_counts,
    const std::array<std::int64_t, 7>& test_counts, std::uint64_t seed) {
  std::vector<std::pair<std::string, dermakit::NdArray>> entries;
  auto add = [&](const dermakit::ImageSet& s, const std::string& p) {
    for (auto& e : set_to_entries(s, p)) entries.push_back(std::move(e));
  };
  add(make_set(train_counts, seed, dermakit::Split::train), "train");
  add(make_set(val_counts, seed + 1, dermakit::Split::val), "val");
  add(make_set(test_counts, seed + 2, dermakit::Split::test), "test");
  return dermakit::write_npz(entries);
}

inline std::vector<std::uint8_t> make_default_archive_bytes(
    std::uint64_t seed = 7) {
  return make_archive_bytes({30, 40, 80, 12, 60, 150, 15},
                            {8, 8, 8, 8, 8, 8, 8}, {10, 10, 10, 10, 10, 10, 10},
                            seed);
}

/// Isotropic Gaussian blobs for clustering/embedding tests.
inline std::pair<dermakit::Matrix, std::vector<int>> make_blobs(
    std::int64_t per_blob, const std::vector<std::vector<double>>& centers,
    double sigma, std::uint64_t seed) {
  const auto dim = static_cast<std::int64_t>(centers.front().size());
  dermakit::Matrix points(per_blob * static_cast<std::int64_t>(centers.size()),
                          dim);
  std::vector<int> labels;
  dermakit::Rng rng(seed);
  std::int64_t row = 0;
  for (std::size_t b = 0; b < centers.size(); ++b) {
    for (std::int64_t i = 0; i < per_blob; ++i, ++row) {
      for (std::int64_t d = 0; d < dim; ++d)
        points.at(row, d) =
            centers[b][static_cast<std::size_t>(d)] + sigma * rng.normal();
      labels.push_back(static_cast<int>(b));
    }
  }
  return {std::move(points), std::move(labels)};
}

}  // namespace testsupport
