#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "assignflow/features.hpp"

using namespace assignflow;
using Vec = std::vector<double>;

namespace {

FeatureImage scalar_image(std::size_t h, std::size_t w, const Vec& values) {
  FeatureImage img(h, w, 1);
  img.values = values;
  return img;
}

}  // namespace

TEST(VectorDistance, ScaledL1KnownValue) {
  EXPECT_NEAR(scaled_l1_distance(Vec{1, 0, 0}, Vec{0, 1, 0}), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(scaled_l1_distance(Vec{0.3, 0.4}, Vec{0.3, 0.4}), 0.0);
  EXPECT_THROW(scaled_l1_distance(Vec{1, 0}, Vec{1}), DimensionError);
}

TEST(VectorDistance, HalfL1IsDiscreteMetricOnOneHot) {
  EXPECT_EQ(half_l1_distance(Vec{0, 1, 0}, Vec{0, 1, 0}), 0.0);
  EXPECT_EQ(half_l1_distance(Vec{0, 1, 0}, Vec{0, 0, 1}), 1.0);
}

TEST(VectorDistance, DistanceMatrixScalesAndSkipsMissing) {
  FeatureImage img(1, 3, 1);
  img.values = {0.0, 0.5, 1.0};
  img.missing = {0, 1, 0};
  PriorSet p;
  p.items = {{0.0}, {1.0}};
  const auto D = build_distance_matrix(img, p, scaled_l1_distance, 0.5);
  EXPECT_EQ(D(0, 0), 0.0);
  EXPECT_EQ(D(0, 1), 2.0);
  EXPECT_EQ(D(1, 0), 0.0);
  EXPECT_EQ(D(1, 1), 0.0);
  EXPECT_EQ(D(2, 0), 2.0);
  EXPECT_THROW(build_distance_matrix(img, p, scaled_l1_distance, 0.0), DomainError);
  PriorSet bad;
  bad.items = {{0.0}, {1.0, 2.0}};
  EXPECT_THROW(build_distance_matrix(img, bad, scaled_l1_distance, 1.0), DimensionError);
}

TEST(ColorCube, SizeAndOrdering) {
  const auto p = color_cube_priors(6);
  ASSERT_EQ(p.size(), 216u);
  EXPECT_EQ(p.items[0], (Vec{0, 0, 0}));
  EXPECT_NEAR(p.items[1][2], 0.2, 1e-15);
  EXPECT_NEAR(p.items[6][1], 0.2, 1e-15);
  EXPECT_NEAR(p.items[36][0], 0.2, 1e-15);
  EXPECT_EQ(p.items[215], (Vec{1, 1, 1}));
  EXPECT_THROW(color_cube_priors(1), DomainError);
}

TEST(Patches, ExtractionFlagsOutsideOffsets) {
  const auto img = scalar_image(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto c = extract_patch(img, 4, 1);
  EXPECT_EQ(c.values, (Vec{1, 2, 3, 4, 5, 6, 7, 8, 9}));
  EXPECT_EQ(c.valid_count(), 9u);
  const auto corner = extract_patch(img, 0, 1);
  EXPECT_EQ(corner.valid, (std::vector<std::uint8_t>{0, 0, 0, 0, 1, 1, 0, 1, 1}));
  EXPECT_EQ(corner.values, (Vec{0, 0, 0, 0, 1, 2, 0, 4, 5}));
}

TEST(Patches, L1AveragesOverClippedSupport) {
  const auto img = scalar_image(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto corner = extract_patch(img, 0, 1);
  const Vec prior(9, 3.0);
  EXPECT_NEAR(patch_l1_distance(corner, prior), (2.0 + 1.0 + 1.0 + 2.0) / 4.0, 1e-15);
  EXPECT_NEAR(patch_l1_distance(extract_patch(img, 4, 1), prior), (2 + 1 + 0 + 1 + 2 + 3 + 4 + 5 + 6) / 9.0, 1e-15);
  EXPECT_THROW(patch_l1_distance(corner, Vec(4, 0.0)), DimensionError);
}

TEST(Patches, L1OverChannelsDividesByValueCount) {
  FeatureImage img(1, 1, 2);
  img.values = {0.2, 0.6};
  const auto p = extract_patch(img, 0, 0);
  EXPECT_NEAR(patch_l1_distance(p, Vec{0.0, 0.0}), 0.4, 1e-15);
}

TEST(Patches, TwoValueLevels) {
  const auto p = make_patch({0.1, 0.2, 0.15, 0.9, 0.8, 0.85, 0.7, 0.95, 0.9}, 1, 1);
  // median 0.8; below: {0.1, 0.2, 0.15, 0.7} -> 0.175; at or above: {0.9, 0.8, 0.85, 0.95, 0.9} -> 0.9
  const auto lv = two_value_levels(p);
  EXPECT_NEAR(lv.low, 0.175, 1e-15);
  EXPECT_NEAR(lv.high, 0.9, 1e-15);
  const Vec templ{0, 0, 0, 1, 1, 1, 1, 1, 1};
  const auto adapted = adapt_two_value_template(templ, lv);
  EXPECT_EQ(adapted[0], lv.low);
  EXPECT_EQ(adapted[8], lv.high);
  double oracle = 0.0;
  for (std::size_t k = 0; k < 9; ++k) oracle += std::abs(p.values[k] - adapted[k]);
  EXPECT_NEAR(two_value_adapted_distance(p, templ), oracle / 9.0, 1e-15);
}

TEST(Patches, TwoValueOnConstantPatch) {
  const auto p = make_patch(Vec(9, 0.4), 1, 1);
  const auto lv = two_value_levels(p);
  EXPECT_EQ(lv.low, 0.4);
  EXPECT_EQ(lv.high, 0.4);
  EXPECT_EQ(two_value_adapted_distance(p, Vec{0, 1, 0, 1, 0, 1, 0, 1, 0}), 0.0);
}

TEST(Patches, TwoValueLevelsOnClippedPatch) {
  const auto img = scalar_image(2, 2, {0, 1, 0, 1});
  const auto lv = two_value_levels(extract_patch(img, 0, 1));
  EXPECT_EQ(lv.low, 0.0);
  EXPECT_EQ(lv.high, 1.0);
}

TEST(Patches, TwoValueIsInvariantToContrast) {
  const Vec templ{0, 1, 1, 0, 1, 1, 0, 1, 0};
  Vec vals(9);
  for (std::size_t k = 0; k < 9; ++k) vals[k] = templ[k] > 0.5 ? 0.7 : 0.3;
  EXPECT_EQ(two_value_adapted_distance(make_patch(vals, 1, 1), templ), 0.0);
  for (double& v : vals) v = 0.1 + 0.5 * v;
  EXPECT_EQ(two_value_adapted_distance(make_patch(vals, 1, 1), templ), 0.0);
}

TEST(Patches, FingerprintConstantLevel) {
  const auto dark = make_patch({0.1, 0.2, 0.3, 0.2, 0.1, 0.9, 0.2, 0.3, 0.2}, 1, 1);
  EXPECT_EQ(fingerprint_level(dark, 0.2, 0.8), 0.2);
  const auto bright = make_patch(Vec(9, 0.7), 1, 1);
  EXPECT_EQ(fingerprint_level(bright, 0.2, 0.8), 0.8);
  EXPECT_NEAR(fingerprint_constant_distance(bright, 0.2, 0.8), 0.1, 1e-15);
  EXPECT_THROW(fingerprint_constant_distance(bright, 0.8, 0.2), DomainError);
}

TEST(Patches, EffectivePriorPerAdaptation) {
  const auto p = make_patch(Vec(9, 0.7), 1, 1);
  const Vec constant(9, 0.5), edge{0, 0, 1, 0, 0, 1, 0, 0, 1};
  PatchDistanceOptions none;
  EXPECT_EQ(effective_prior(p, constant, none), constant);
  PatchDistanceOptions fp{PatchAdaptation::fingerprint, 0.2, 0.8};
  EXPECT_EQ(effective_prior(p, constant, fp), Vec(9, 0.8));
  EXPECT_EQ(effective_prior(p, edge, fp), edge);
  PatchDistanceOptions tv{PatchAdaptation::two_value};
  EXPECT_EQ(effective_prior(p, edge, tv), Vec(9, 0.7));
}

TEST(Patches, ClassDistanceTakesMemberMinimum) {
  PriorSet priors;
  priors.patch_radius = 0;
  priors.channels = 1;
  priors.items = {{0.0}, {0.5}, {0.5}, {1.0}};
  priors.class_of = {0, 1, 1, 0};
  const auto p = make_patch({0.9}, 0, 1);
  const auto c0 = class_distance(p, priors, 0);
  EXPECT_NEAR(c0.distance, 0.1, 1e-15);
  EXPECT_EQ(c0.item, 3u);
  const auto c1 = class_distance(p, priors, 1);
  EXPECT_NEAR(c1.distance, 0.4, 1e-15);
  EXPECT_EQ(c1.item, 1u);
}

TEST(Patches, DistanceMatrixBruteForce) {
  std::mt19937_64 rng(30);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FeatureImage img(5, 4, 1);
  for (double& v : img.values) v = u(rng);
  PriorSet priors;
  priors.patch_radius = 1;
  priors.channels = 1;
  for (int k = 0; k < 6; ++k) {
    Vec item(9);
    for (double& v : item) v = u(rng);
    priors.items.push_back(item);
  }
  priors.class_of = {0, 1, 0, 2, 1, 2};
  const auto pd = build_patch_distance_matrix(img, priors, {}, 0.25);
  ASSERT_EQ(pd.D.cols(), 3u);
  for (std::size_t i = 0; i < img.pixels(); ++i) {
    const long y = static_cast<long>(i / 4), x = static_cast<long>(i % 4);
    for (std::size_t c = 0; c < 3; ++c) {
      double best = 1e300;
      for (std::size_t k = 0; k < 6; ++k) {
        if (priors.class_of[k] != c) continue;
        double s = 0.0;
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (y + dy < 0 || y + dy >= 5 || x + dx < 0 || x + dx >= 4) continue;
            s += std::abs(img.values[(y + dy) * 4 + x + dx] - priors.items[k][(dy + 1) * 3 + dx + 1]);
            ++n;
          }
        best = std::min(best, s / n);
      }
      EXPECT_NEAR(pd.D(i, c), best / 0.25, 1e-13);
      EXPECT_EQ(priors.class_of[pd.representative[i * 3 + c]], c);
    }
  }
}

TEST(Patches, PriorSetValidation) {
  PriorSet p;
  EXPECT_THROW(p.validate(), DomainError);
  p.items = {{0.0, 1.0}};
  p.patch_radius = 1;
  p.channels = 1;
  EXPECT_THROW(p.validate(), DimensionError);
  p.patch_radius = -1;
  p.items = {{0.0}, {1.0}};
  p.class_of = {0, 2};
  EXPECT_THROW(p.validate(), DomainError);
}
