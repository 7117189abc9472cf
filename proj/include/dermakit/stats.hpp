#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dermakit/dataset.hpp"
#include "dermakit/error.hpp"

namespace dermakit {

struct ClassHistogram {
  std::array<std::int64_t, kNumClasses> counts{};

  std::int64_t total() const {
    std::int64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

inline ClassHistogram class_histogram(const ImageSet& set) {
  ClassHistogram hist;
  for (auto l : set.labels) hist.counts[l] += 1;
  return hist;
}

/// Ratio of the smallest to the largest class count, in (0, 1].
inline double imbalance_index(const ClassHistogram& hist) {
  std::int64_t lo = hist.counts[0], hi = hist.counts[0];
  for (auto c : hist.counts) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  if (lo == 0)
    fail(ErrorKind::EmptyClass, "imbalance index undefined with an empty class");
  return static_cast<double>(lo) / static_cast<double>(hi);
}

struct ChannelMeans {
  double r = 0, g = 0, b = 0;
};

/// Mean of the 784 pixels per channel of one 28x28x3 image. Pixel sums fit
/// in int64 exactly, so the result is independent of summation order.
inline ChannelMeans channel_means(std::span<const std::uint8_t> image) {
  constexpr std::int64_t kPixels = kImageSize * kImageSize;
  std::int64_t sum[3] = {0, 0, 0};
  for (std::int64_t p = 0; p < kPixels; ++p) {
    sum[0] += image[static_cast<std::size_t>(3 * p)];
    sum[1] += image[static_cast<std::size_t>(3 * p + 1)];
    sum[2] += image[static_cast<std::size_t>(3 * p + 2)];
  }
  return {static_cast<double>(sum[0]) / kPixels,
          static_cast<double>(sum[1]) / kPixels,
          static_cast<double>(sum[2]) / kPixels};
}

inline std::vector<ChannelMeans> per_image_channel_means(const ImageSet& set) {
  if (set.channels != 3)
    fail(ErrorKind::ShapeMismatch, "channel means need 3-channel images");
  std::vector<ChannelMeans> out(static_cast<std::size_t>(set.count()));
  for (std::int64_t i = 0; i < set.count(); ++i)
    out[static_cast<std::size_t>(i)] = channel_means(set.image(i));
  return out;
}

struct BoxStats {
  double q1 = 0, median = 0, q3 = 0;
  double whisker_low = 0, whisker_high = 0;
  std::vector<double> outliers;
};

namespace stats_detail {
// Quantile by linear interpolation on the sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}
}  // namespace stats_detail

/// Tukey box-plot statistics: interpolated quartiles, whiskers at the most
/// extreme points within 1.5 IQR of the quartiles, the rest flagged outliers.
inline BoxStats box_stats(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::EmptyInput, "box_stats on empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  BoxStats bs;
  bs.q1 = stats_detail::quantile_sorted(sorted, 0.25);
  bs.median = stats_detail::quantile_sorted(sorted, 0.50);
  bs.q3 = stats_detail::quantile_sorted(sorted, 0.75);
  const double iqr = bs.q3 - bs.q1;
  const double fence_low = bs.q1 - 1.5 * iqr;
  const double fence_high = bs.q3 + 1.5 * iqr;

  bs.whisker_low = bs.q1;
  bs.whisker_high = bs.q3;
  bool any_inside = false;
  for (double v : sorted) {
    if (v < fence_low || v > fence_high) {
      bs.outliers.push_back(v);
    } else {
      if (!any_inside) {
        bs.whisker_low = v;
        bs.whisker_high = v;
        any_inside = true;
      } else {
        bs.whisker_low = std::min(bs.whisker_low, v);
        bs.whisker_high = std::max(bs.whisker_high, v);
      }
    }
  }
  return bs;
}

/// Sample Pearson correlation, clamped to [-1, 1] against rounding.
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    fail(ErrorKind::LengthMismatch, std::to_string(xs.size()) + " vs " +
                                        std::to_string(ys.size()));
  const std::size_t n = xs.size();
  if (n < 2) fail(ErrorKind::LengthMismatch, "need at least 2 samples");

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    fail(ErrorKind::ConstantInput, "correlation undefined for constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct CorrelationMatrix {
  std::array<std::array<double, 3>, 3> m{};
};

/// Pairwise Pearson over the per-image channel-mean features.
inline CorrelationMatrix correlation_matrix(const ImageSet& set) {
  if (set.count() < 2)
    fail(ErrorKind::LengthMismatch, "need at least 2 images");
  const auto means = per_image_channel_means(set);
  std::array<std::vector<double>, 3> cols;
  for (auto& c : cols) c.reserve(means.size());
  for (const auto& cm : means) {
    cols[0].push_back(cm.r);
    cols[1].push_back(cm.g);
    cols[2].push_back(cm.b);
  }
  CorrelationMatrix out;
  for (int i = 0; i < 3; ++i) {
    out.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    for (int j = i + 1; j < 3; ++j) {
      const double r = pearson(cols[static_cast<std::size_t>(i)],
                               cols[static_cast<std::size_t>(j)]);
      out.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = r;
      out.m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = r;
    }
  }
  return out;
}

/// Histogram of per-image channel means for one class, over [0, 255] with
/// an inclusive upper edge on the last bin.
inline std::vector<std::int64_t> intensity_distribution(const ImageSet& set,
                                                        int class_id,
                                                        int channel,
                                                        int bins) {
  if (class_id < 0 || class_id >= kNumClasses)
    fail(ErrorKind::UnknownClass, "class " + std::to_string(class_id));
  if (channel < 0 || channel > 2)
    fail(ErrorKind::InvalidArgument, "channel " + std::to_string(channel));
  if (bins < 1) fail(ErrorKind::InvalidArgument, "bins must be >= 1");

  std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
  const auto means = per_image_channel_means(set);
  for (std::int64_t i = 0; i < set.count(); ++i) {
    if (set.labels[static_cast<std::size_t>(i)] != class_id) continue;
    const auto& cm = means[static_cast<std::size_t>(i)];
    const double v = channel == 0 ? cm.r : channel == 1 ? cm.g : cm.b;
    auto bin = static_cast<std::int64_t>(v / 255.0 * bins);
    bin = std::clamp<std::int64_t>(bin, 0, bins - 1);
    counts[static_cast<std::size_t>(bin)] += 1;
  }
  return counts;
}

}  // namespace dermakit
