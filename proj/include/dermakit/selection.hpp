#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dermakit/dataset.hpp"
#include "dermakit/error.hpp"
#include "dermakit/kmeans.hpp"

namespace dermakit {

enum class ChannelConfig { RGB, RG, RB };

inline int channel_count(ChannelConfig cfg) {
  return cfg == ChannelConfig::RGB ? 3 : 2;
}

inline const char* channel_config_name(ChannelConfig cfg) {
  switch (cfg) {
    case ChannelConfig::RGB: return "rgb";
    case ChannelConfig::RG: return "rg";
    case ChannelConfig::RB: return "rb";
  }
  return "";
}

inline ChannelConfig channel_config_from_name(const std::string& name) {
  if (name == "rgb") return ChannelConfig::RGB;
  if (name == "rg") return ChannelConfig::RG;
  if (name == "rb") return ChannelConfig::RB;
  fail(ErrorKind::InvalidArgument, "unknown channel config '" + name + "'");
}

/// The eight exact symmetries of a square image:
/// 0 identity, 1 rot90, 2 rot180, 3 rot270, 4 hflip, 5 vflip,
/// 6 transpose, 7 anti-transpose. Pure pixel permutations, so augmented
/// images carry no interpolation artifacts.
inline constexpr int kDihedralCodes = 8;

inline std::vector<std::uint8_t> apply_transform(
    std::span<const std::uint8_t> image, int channels, int code) {
  if (code < 0 || code >= kDihedralCodes)
    fail(ErrorKind::InvalidArgument, "dihedral code " + std::to_string(code));
  const int n = kImageSize;
  std::vector<std::uint8_t> out(image.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int si = 0, sj = 0;
      switch (code) {
        case 0: si = i; sj = j; break;
        case 1: si = j; sj = n - 1 - i; break;  // rot90
        case 2: si = n - 1 - i; sj = n - 1 - j; break;
        case 3: si = n - 1 - j; sj = i; break;  // rot270
        case 4: si = i; sj = n - 1 - j; break;  // hflip
        case 5: si = n - 1 - i; sj = j; break;  // vflip
        case 6: si = j; sj = i; break;          // transpose
        case 7: si = n - 1 - j; sj = n - 1 - i; break;
      }
      const std::size_t dst = static_cast<std::size_t>((i * n + j) * channels);
      const std::size_t src = static_cast<std::size_t>((si * n + sj) * channels);
      for (int c = 0; c < channels; ++c) out[dst + static_cast<std::size_t>(c)] =
          image[src + static_cast<std::size_t>(c)];
    }
  }
  return out;
}

/// RGB is the identity; RG keeps channels (0,1); RB keeps (0,2).
inline std::vector<std::uint8_t> drop_channels(
    std::span<const std::uint8_t> image, ChannelConfig cfg) {
  if (cfg == ChannelConfig::RGB) return {image.begin(), image.end()};
  const std::size_t pixels = image.size() / 3;
  const std::size_t keep2 = cfg == ChannelConfig::RG ? 1 : 2;
  std::vector<std::uint8_t> out(pixels * 2);
  for (std::size_t p = 0; p < pixels; ++p) {
    out[2 * p] = image[3 * p];
    out[2 * p + 1] = image[3 * p + keep2];
  }
  return out;
}

struct AugDirective {
  std::int64_t source = 0;  // original index in the training split
  int code = 0;             // non-identity dihedral code 1..7

  bool operator==(const AugDirective&) const = default;
};

/// Per-class kept indices plus augmentation directives; together with a
/// channel config this fully determines the reduced training set.
struct SelectionPlan {
  std::array<std::vector<std::int64_t>, kNumClasses> kept;
  std::array<std::vector<AugDirective>, kNumClasses> augment;
  ChannelConfig channel_config = ChannelConfig::RGB;

  std::int64_t class_size(int c) const {
    return static_cast<std::int64_t>(kept[static_cast<std::size_t>(c)].size() +
                                     augment[static_cast<std::size_t>(c)].size());
  }

  std::int64_t total_size() const {
    std::int64_t t = 0;
    for (int c = 0; c < kNumClasses; ++c) t += class_size(c);
    return t;
  }

  bool operator==(const SelectionPlan&) const = default;
};

inline constexpr int kMajorityClass = 5;                       // MN
inline constexpr std::array<int, 2> kAugmentedClasses{3, 6};   // DF, VL

/// Reduces the majority class to the k nearest-to-centroid instances and
/// schedules dihedral augmentation for the two smallest classes, cycling
/// codes 1..7 over the source images in index order until aug_target or
/// the 8x ceiling is reached.
inline SelectionPlan build_selection_plan(const ImageSet& train,
                                          const KMeansConfig& cfg,
                                          std::int64_t aug_target,
                                          ChannelConfig channels) {
  if (train.channels != 3)
    fail(ErrorKind::ShapeMismatch, "selection expects the raw 3-channel split");

  SelectionPlan plan;
  plan.channel_config = channels;
  for (std::int64_t i = 0; i < train.count(); ++i)
    plan.kept[train.labels[static_cast<std::size_t>(i)]].push_back(i);

  auto& majority = plan.kept[kMajorityClass];
  if (static_cast<std::int64_t>(majority.size()) < cfg.k)
    fail(ErrorKind::ClassTooSmall,
         "class " + std::to_string(kMajorityClass) + " has " +
             std::to_string(majority.size()) + " members, k=" +
             std::to_string(cfg.k));

  // k-means over the flattened majority-class images in [0,1].
  Matrix points(static_cast<std::int64_t>(majority.size()),
                static_cast<std::int64_t>(train.image_bytes()));
  for (std::size_t r = 0; r < majority.size(); ++r) {
    const auto img = train.image(majority[r]);
    double* row = points.row(static_cast<std::int64_t>(r));
    for (std::size_t p = 0; p < img.size(); ++p)
      row[p] = static_cast<double>(img[p]) / 255.0;
  }
  const KMeansResult km = kmeans(points, cfg);
  const auto local = nearest_to_centroids(points, km.centroids);
  std::vector<std::int64_t> reduced;
  reduced.reserve(local.size());
  for (auto li : local) reduced.push_back(majority[static_cast<std::size_t>(li)]);
  majority = std::move(reduced);

  for (int c : kAugmentedClasses) {
    const auto& sources = plan.kept[static_cast<std::size_t>(c)];
    const auto current = static_cast<std::int64_t>(sources.size());
    const std::int64_t ceiling = current * kDihedralCodes;
    const std::int64_t target = std::min(aug_target, ceiling);
    std::int64_t needed = target - current;
    auto& directives = plan.augment[static_cast<std::size_t>(c)];
    for (int code = 1; code < kDihedralCodes && needed > 0; ++code) {
      for (std::int64_t s = 0; s < current && needed > 0; ++s, --needed)
        directives.push_back({sources[static_cast<std::size_t>(s)], code});
    }
  }
  return plan;
}

/// Applies a plan: classes in ascending order, kept originals before
/// augmented images, plan order preserved, channel dropping last.
inline ImageSet materialize(const ImageSet& train, const SelectionPlan& plan) {
  ImageSet out;
  out.split = train.split;
  out.channels = channel_count(plan.channel_config);
  out.pixels.reserve(static_cast<std::size_t>(plan.total_size()) *
                     static_cast<std::size_t>(out.image_bytes()));
  out.labels.reserve(static_cast<std::size_t>(plan.total_size()));

  auto fetch = [&](std::int64_t idx, int expected_class)
      -> std::span<const std::uint8_t> {
    if (idx < 0 || idx >= train.count())
      fail(ErrorKind::IndexOutOfRange, "plan index " + std::to_string(idx));
    if (train.labels[static_cast<std::size_t>(idx)] != expected_class)
      fail(ErrorKind::InvalidArgument,
           "plan lists index " + std::to_string(idx) + " under class " +
               std::to_string(expected_class));
    return train.image(idx);
  };

  auto push = [&](std::span<const std::uint8_t> img, int cls) {
    const auto dropped = drop_channels(img, plan.channel_config);
    out.pixels.insert(out.pixels.end(), dropped.begin(), dropped.end());
    out.labels.push_back(static_cast<std::uint8_t>(cls));
  };

  for (int c = 0; c < kNumClasses; ++c) {
    for (auto idx : plan.kept[static_cast<std::size_t>(c)])
      push(fetch(idx, c), c);
    for (const auto& dir : plan.augment[static_cast<std::size_t>(c)]) {
      const auto src = fetch(dir.source, c);
      push(apply_transform(src, train.channels, dir.code), c);
    }
  }
  out.validate();
  return out;
}

inline nlohmann::json plan_to_json(const SelectionPlan& plan) {
  nlohmann::json j;
  j["channel_config"] = channel_config_name(plan.channel_config);
  nlohmann::json classes = nlohmann::json::array();
  for (int c = 0; c < kNumClasses; ++c) {
    nlohmann::json cls;
    cls["class"] = c;
    cls["acronym"] = kClasses[static_cast<std::size_t>(c)].acronym;
    cls["kept"] = plan.kept[static_cast<std::size_t>(c)];
    nlohmann::json aug = nlohmann::json::array();
    for (const auto& d : plan.augment[static_cast<std::size_t>(c)])
      aug.push_back({d.source, d.code});
    cls["augment"] = std::move(aug);
    cls["size"] = plan.class_size(c);
    classes.push_back(std::move(cls));
  }
  j["classes"] = std::move(classes);
  j["total_size"] = plan.total_size();
  return j;
}

inline SelectionPlan plan_from_json(const nlohmann::json& j) {
  SelectionPlan plan;
  plan.channel_config =
      channel_config_from_name(j.at("channel_config").get<std::string>());
  for (const auto& cls : j.at("classes")) {
    const int c = cls.at("class").get<int>();
    if (c < 0 || c >= kNumClasses)
      fail(ErrorKind::UnknownClass, "class " + std::to_string(c));
    plan.kept[static_cast<std::size_t>(c)] =
        cls.at("kept").get<std::vector<std::int64_t>>();
    for (const auto& d : cls.at("augment"))
      plan.augment[static_cast<std::size_t>(c)].push_back(
          {d.at(0).get<std::int64_t>(), d.at(1).get<int>()});
  }
  return plan;
}

}  // namespace dermakit
