#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "dermakit/selection.hpp"
#include "support/fixtures.hpp"

using namespace dermakit;

namespace {

std::vector<std::uint8_t> random_image(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> img(28 * 28 * 3);
  for (auto& p : img) p = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

const std::array<std::int64_t, 7> kCounts{30, 40, 80, 12, 60, 150, 15};

SelectionPlan default_plan(const ImageSet& train, int k = 50,
                           std::int64_t aug_target = 40,
                           ChannelConfig ch = ChannelConfig::RGB) {
  KMeansConfig cfg;
  cfg.k = k;
  cfg.seed = 11;
  cfg.max_iter = 25;
  return build_selection_plan(train, cfg, aug_target, ch);
}

}  // namespace

TEST(ApplyTransform, HflipIsInvolution) {
  const auto img = random_image(1);
  const auto once = apply_transform(img, 3, 4);
  const auto twice = apply_transform(once, 3, 4);
  EXPECT_NE(once, img);
  EXPECT_EQ(twice, img);
}

TEST(ApplyTransform, Rot90FourTimesIsIdentity) {
  const auto img = random_image(2);
  auto cur = img;
  for (int i = 0; i < 4; ++i) cur = apply_transform(cur, 3, 1);
  EXPECT_EQ(cur, img);
}

TEST(ApplyTransform, Rot180Definition) {
  const auto img = random_image(3);
  const auto rot = apply_transform(img, 3, 2);
  for (int i = 0; i < 28; ++i)
    for (int j = 0; j < 28; ++j)
      for (int c = 0; c < 3; ++c)
        EXPECT_EQ(rot[static_cast<std::size_t>((i * 28 + j) * 3 + c)],
                  img[static_cast<std::size_t>(((27 - i) * 28 + (27 - j)) * 3 + c)]);
}

TEST(ApplyTransform, AllCodesArePixelPermutations) {
  const auto img = random_image(4);
  auto sorted_ref = img;
  std::sort(sorted_ref.begin(), sorted_ref.end());
  for (int code = 0; code < kDihedralCodes; ++code) {
    auto t = apply_transform(img, 3, code);
    std::sort(t.begin(), t.end());
    EXPECT_EQ(t, sorted_ref) << "code " << code;
  }
}

TEST(ApplyTransform, IdentityCode) {
  const auto img = random_image(5);
  EXPECT_EQ(apply_transform(img, 3, 0), img);
}

TEST(DropChannels, RgbIsIdentity) {
  const auto img = random_image(6);
  EXPECT_EQ(drop_channels(img, ChannelConfig::RGB), img);
}

TEST(DropChannels, PixelSelection) {
  std::vector<std::uint8_t> img(28 * 28 * 3);
  for (std::size_t p = 0; p < 28 * 28; ++p) {
    img[3 * p] = 10;
    img[3 * p + 1] = 20;
    img[3 * p + 2] = 30;
  }
  const auto rg = drop_channels(img, ChannelConfig::RG);
  const auto rb = drop_channels(img, ChannelConfig::RB);
  ASSERT_EQ(rg.size(), 28u * 28u * 2u);
  EXPECT_EQ(rg[0], 10);
  EXPECT_EQ(rg[1], 20);
  EXPECT_EQ(rb[0], 10);
  EXPECT_EQ(rb[1], 30);
}

TEST(BuildSelectionPlan, ClassSizesFollowTheRule) {
  const auto train = testsupport::make_set(kCounts, 7);
  const auto plan = default_plan(train);  // k=50, aug_target=40

  EXPECT_EQ(plan.kept[5].size(), 50u);                       // reduced
  EXPECT_EQ(plan.class_size(0), 30);                         // untouched
  EXPECT_EQ(plan.class_size(1), 40);
  EXPECT_EQ(plan.class_size(2), 80);
  EXPECT_EQ(plan.class_size(4), 60);
  EXPECT_EQ(plan.class_size(3), 40);                         // 12 + 28 augmented
  EXPECT_EQ(plan.augment[3].size(), 28u);
  EXPECT_EQ(plan.class_size(6), 40);                         // 15 + 25 augmented
  EXPECT_EQ(plan.augment[6].size(), 25u);
  EXPECT_EQ(plan.total_size(), 50 + 30 + 40 + 80 + 60 + 40 + 40);

  // Classes 0-4 keep every original index in order.
  for (int c : {0, 1, 2, 4}) {
    std::vector<std::int64_t> expected;
    for (std::int64_t i = 0; i < train.count(); ++i)
      if (train.labels[static_cast<std::size_t>(i)] == c) expected.push_back(i);
    EXPECT_EQ(plan.kept[static_cast<std::size_t>(c)], expected);
  }
}

TEST(BuildSelectionPlan, DirectiveCyclingOrder) {
  const auto train = testsupport::make_set(kCounts, 7);
  const auto plan = default_plan(train);
  const auto& sources = plan.kept[3];  // 12 originals
  const auto& dirs = plan.augment[3];  // 28 directives
  ASSERT_EQ(dirs.size(), 28u);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    EXPECT_EQ(dirs[i].code, static_cast<int>(i / sources.size()) + 1);
    EXPECT_EQ(dirs[i].source, sources[i % sources.size()]);
  }
  std::set<std::pair<std::int64_t, int>> unique;
  for (const auto& d : dirs) unique.insert({d.source, d.code});
  EXPECT_EQ(unique.size(), dirs.size());
}

TEST(BuildSelectionPlan, AugTargetBelowSizeMakesNoDirectives) {
  const auto train = testsupport::make_set(kCounts, 7);
  const auto plan = default_plan(train, 50, 10);
  EXPECT_TRUE(plan.augment[3].empty());
  EXPECT_TRUE(plan.augment[6].empty());
}

TEST(BuildSelectionPlan, DihedralCeiling) {
  const auto train = testsupport::make_set(kCounts, 7);
  // Class 3 has 12 members; 8x ceiling is 96 -> exactly 84 directives.
  const auto plan = default_plan(train, 50, 96);
  EXPECT_EQ(plan.augment[3].size(), 84u);
  // And requesting beyond the ceiling changes nothing.
  const auto plan2 = default_plan(train, 50, 5000);
  EXPECT_EQ(plan2.augment[3].size(), 84u);
  std::set<std::pair<std::int64_t, int>> unique;
  for (const auto& d : plan2.augment[3]) unique.insert({d.source, d.code});
  EXPECT_EQ(unique.size(), 84u);
}

TEST(BuildSelectionPlan, MajorityClassTooSmall) {
  const auto train = testsupport::make_set({5, 5, 5, 5, 5, 5, 5}, 7);
  KMeansConfig cfg;
  cfg.k = 50;
  try {
    build_selection_plan(train, cfg, 40, ChannelConfig::RGB);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ClassTooSmall);
  }
}

TEST(BuildSelectionPlan, DeterministicForFixedSeed) {
  const auto train = testsupport::make_set(kCounts, 7);
  const auto a = default_plan(train);
  const auto b = default_plan(train);
  EXPECT_EQ(a, b);
}

TEST(Materialize, OrderAndSizes) {
  const auto train = testsupport::make_set(kCounts, 7);
  const auto plan = default_plan(train);
  const auto out = materialize(train, plan);

  EXPECT_EQ(out.count(), plan.total_size());
  EXPECT_EQ(out.channels, 3);
  EXPECT_TRUE(std::is_sorted(out.labels.begin(), out.labels.end()));

  // Class 0 block: kept originals in plan order, bit-identical pixels.
  for (std::size_t i = 0; i < plan.kept[0].size(); ++i) {
    const auto orig = train.image(plan.kept[0][i]);
    const auto got = out.image(static_cast<std::int64_t>(i));
    EXPECT_TRUE(std::equal(orig.begin(), orig.end(), got.begin()));
  }

  // Augmented images equal the dihedral transform of their source.
  std::int64_t base = 0;
  for (int c = 0; c < 3; ++c) base += plan.class_size(c);
  const auto& dirs = plan.augment[3];
  const std::int64_t aug_start =
      base + static_cast<std::int64_t>(plan.kept[3].size());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const auto expect =
        apply_transform(train.image(dirs[i].source), 3, dirs[i].code);
    const auto got = out.image(aug_start + static_cast<std::int64_t>(i));
    EXPECT_TRUE(std::equal(expect.begin(), expect.end(), got.begin()));
    EXPECT_EQ(out.labels[static_cast<std::size_t>(
                  aug_start + static_cast<std::int64_t>(i))],
              3);
  }
}

TEST(Materialize, FullPassThroughIsAReordering) {
  const auto train = testsupport::make_set({4, 4, 4, 4, 4, 150, 4}, 9);
  SelectionPlan plan = default_plan(train, 150, 0);
  EXPECT_TRUE(plan.augment[3].empty());
  const auto out = materialize(train, plan);
  EXPECT_EQ(out.count(), train.count());
  auto sorted_a = train.pixels;
  auto sorted_b = out.pixels;
  std::sort(sorted_a.begin(), sorted_a.end());
  std::sort(sorted_b.begin(), sorted_b.end());
  EXPECT_EQ(sorted_a, sorted_b);
}

TEST(Materialize, ChannelDropApplied) {
  const auto train = testsupport::make_set(kCounts, 7);
  const auto plan = default_plan(train, 50, 40, ChannelConfig::RG);
  const auto out = materialize(train, plan);
  EXPECT_EQ(out.channels, 2);
  EXPECT_EQ(out.image_bytes(), 28u * 28u * 2u);
  const auto first = drop_channels(train.image(plan.kept[0][0]), ChannelConfig::RG);
  const auto got = out.image(0);
  EXPECT_TRUE(std::equal(first.begin(), first.end(), got.begin()));
}

TEST(Materialize, CorruptPlanRejected) {
  const auto train = testsupport::make_set(kCounts, 7);
  auto plan = default_plan(train);
  plan.kept[0][0] = train.count() + 5;
  try {
    materialize(train, plan);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
  }
}

TEST(SelectionPlanJson, RoundTrip) {
  const auto train = testsupport::make_set(kCounts, 7);
  const auto plan = default_plan(train, 50, 40, ChannelConfig::RB);
  const auto j = plan_to_json(plan);
  EXPECT_EQ(j.at("classes").size(), 7u);
  EXPECT_EQ(j.at("channel_config"), "rb");
  const auto back = plan_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back, plan);
}
