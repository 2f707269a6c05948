// Copyright 2026 The ttakit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "ttakit/augment.hpp"
#include "ttakit/eigen3.hpp"

using ttakit::EnhancementKind;
using ttakit::Image;

namespace {

struct Scripted {
  std::vector<double> values;
  std::size_t next = 0;
  double next_uniform() { return values.at(next++); }
};

/// Correlated RGB sample: mean + M z with z standard normal.
std::vector<ttakit::Vec3> correlated_pixels(std::mt19937_64& g, int n) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> m(-40.0, 40.0);
  std::uniform_real_distribution<double> mean(60.0, 190.0);
  ttakit::Mat3 mix{};
  for (auto& row : mix) {
    for (auto& v : row) v = m(g);
  }
  const ttakit::Vec3 mu{mean(g), mean(g), mean(g)};
  std::vector<ttakit::Vec3> out(static_cast<std::size_t>(n));
  for (auto& p : out) {
    const ttakit::Vec3 e{z(g), z(g), z(g)};
    for (int i = 0; i < 3; ++i) p[i] = mu[i] + mix[i][0] * e[0] + mix[i][1] * e[1] + mix[i][2] * e[2];
  }
  return out;
}


}  // namespace

TEST(Enhance, FactorOneIsIdentity) {
  std::mt19937_64 g(11);
  for (int i = 0; i < 20; ++i) {
    const Image img = oracle::random_image(g, 3 + i, 2 + i % 5);
    for (const auto k : ttakit::kEnhancementKinds) EXPECT_EQ(ttakit::enhance(img, k, 1.0), img);
  }
}

TEST(Enhance, FactorZeroEndpoints) {
  std::mt19937_64 g(12);
  const Image img = oracle::random_image(g, 8, 6);

  const Image black = ttakit::enhance(img, EnhancementKind::Brightness, 0.0);
  for (const auto v : black.samples()) EXPECT_EQ(v, 0);

  const Image gray = ttakit::enhance(img, EnhancementKind::Color, 0.0);
  long luma_sum = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double l = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
      const int expected = static_cast<int>(std::floor(l + 0.5));
      luma_sum += expected;
      for (int c = 0; c < 3; ++c) EXPECT_EQ(gray.at(x, y, c), expected);
    }
  }

  const Image flat = ttakit::enhance(img, EnhancementKind::Contrast, 0.0);
  const int mean = static_cast<int>(std::floor(double(luma_sum) / (img.width() * img.height()) + 0.5));
  for (const auto v : flat.samples()) EXPECT_EQ(v, mean);
}

TEST(Enhance, ColorZeroKnownPixel) {
  Image img(1, 1);
  img.at(0, 0, 0) = 100;
  img.at(0, 0, 1) = 150;
  img.at(0, 0, 2) = 200;
  const Image out = ttakit::enhance(img, EnhancementKind::Color, 0.0);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(out.at(0, 0, c), 141);
}

TEST(Enhance, BlendAndClamp) {
  Image img(1, 1, 200);
  EXPECT_EQ(ttakit::enhance(img, EnhancementKind::Brightness, 1.5).at(0, 0, 0), 255);
  EXPECT_EQ(ttakit::enhance(img, EnhancementKind::Brightness, 0.5).at(0, 0, 0), 100);
  EXPECT_THROW(ttakit::enhance(img, EnhancementKind::Color, -0.1), ttakit::InvalidArgument);
}

TEST(Enhance, KindNames) {
  for (const auto k : ttakit::kEnhancementKinds) {
    EXPECT_EQ(ttakit::enhancement_from_string(ttakit::to_string(k)), k);
  }
  EXPECT_THROW(ttakit::enhancement_from_string("sharpness"), ttakit::FormatError);
}

TEST(Eigen3, MatchesClosedFormOracle) {
  std::mt19937_64 g(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto px = correlated_pixels(g, 200);
    const auto model = ttakit::fit_lighting_model(px, 0.1);
    const auto ref = oracle::eigen_symmetric(oracle::covariance(px));
    for (int k = 0; k < 3; ++k) {
      ASSERT_NEAR(model.eigenvalues[k], ref.values[k], 1e-8) << "trial " << trial;
      for (int i = 0; i < 3; ++i) ASSERT_NEAR(model.eigenvectors[i][k], ref.vectors[i][k], 1e-8);
    }
  }
}

TEST(Eigen3, DiagonalAndDegenerate) {
  const auto d = ttakit::jacobi_eigen3({{{2, 0, 0}, {0, 5, 0}, {0, 0, 3}}});
  EXPECT_EQ(d.values, (ttakit::Vec3{5, 3, 2}));
  EXPECT_EQ(d.sweeps, 0);
  const auto iso = ttakit::jacobi_eigen3({{{4, 0, 0}, {0, 4, 0}, {0, 0, 4}}});
  for (const double v : iso.values) EXPECT_DOUBLE_EQ(v, 4.0);
  const auto r1 = ttakit::jacobi_eigen3({{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}});
  EXPECT_NEAR(r1.values[0], 3.0, 1e-12);
  EXPECT_NEAR(r1.values[1], 0.0, 1e-12);
  EXPECT_NEAR(r1.values[2], 0.0, 1e-12);
}

TEST(Eigen3, ReconstructsInput) {
  std::mt19937_64 g(14);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    ttakit::Mat3 a{};
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) a[i][j] = a[j][i] = u(g);
    }
    const auto e = ttakit::jacobi_eigen3(a);
    EXPECT_LT(e.sweeps, 64);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double r = 0.0;
        for (int k = 0; k < 3; ++k) r += e.vectors[i][k] * e.values[k] * e.vectors[j][k];
        ASSERT_NEAR(r, a[i][j], 1e-10);
      }
    }
  }
}

TEST(Lighting, FitRequiresTwoPixels) {
  const std::vector<ttakit::Vec3> one{{1, 2, 3}};
  EXPECT_THROW(ttakit::fit_lighting_model(one, 0.1), ttakit::InvalidArgument);
}

TEST(Lighting, ZeroAlphaIsIdentity) {
  std::mt19937_64 g(15);
  const auto model = ttakit::fit_lighting_model(correlated_pixels(g, 100), 0.1);
  model.validate();
  for (int i = 0; i < 10; ++i) {
    const Image img = oracle::random_image(g, 5, 7);
    EXPECT_EQ(ttakit::apply_lighting_noise(img, model, {0, 0, 0}), img);
  }
}

TEST(Lighting, DeltaIsEigenbasisCombination) {
  ttakit::LightingModel m;
  m.eigenvalues = {4.0, 2.0, 1.0};
  const auto d = ttakit::lighting_delta(m, {0.5, -1.0, 3.0});
  EXPECT_DOUBLE_EQ(d[0], 2.0);
  EXPECT_DOUBLE_EQ(d[1], -2.0);
  EXPECT_DOUBLE_EQ(d[2], 3.0);
  Image img(2, 1, 100);
  const Image out = ttakit::apply_lighting_noise(img, m, {0.5, -1.0, 3.0});
  EXPECT_EQ(out.at(1, 0, 0), 102);
  EXPECT_EQ(out.at(1, 0, 1), 98);
  EXPECT_EQ(out.at(1, 0, 2), 103);
}

TEST(Lighting, ValidateRejectsBadModels) {
  ttakit::LightingModel m;
  m.eigenvalues = {1.0, 2.0, 0.0};
  EXPECT_THROW(m.validate(), ttakit::InvalidArgument);
  m.eigenvalues = {2.0, 1.0, 0.0};
  m.eigenvectors[0][1] = 1.0;
  EXPECT_THROW(m.validate(), ttakit::InvalidArgument);
}

TEST(Jitter, ScriptedDrawOrder) {
  ttakit::LightingModel m;
  m.sigma = 1.0;
  // i = 2: floor(0.9 * 3) = 2 (no swap); i = 1: floor(0.1 * 2) = 0 (swap 0, 1).
  Scripted s{{0.9, 0.1, 0.0, 0.25, 0.99, 0.5, 0.0, 0.5, 0.5, 0.5, 0.25}};
  const auto d = ttakit::draw_color_jitter(s, m);
  EXPECT_EQ(s.next, 11u);
  EXPECT_EQ(d.order[0], EnhancementKind::Brightness);
  EXPECT_EQ(d.order[1], EnhancementKind::Contrast);
  EXPECT_EQ(d.order[2], EnhancementKind::Color);
  EXPECT_DOUBLE_EQ(d.factors[0], 0.5);
  EXPECT_DOUBLE_EQ(d.factors[1], 0.75);
  EXPECT_DOUBLE_EQ(d.factors[2], 1.49);
  EXPECT_DOUBLE_EQ(d.alphas[0], std::sqrt(-2.0 * std::log(0.5)));
  EXPECT_DOUBLE_EQ(d.alphas[1], -std::sqrt(-2.0 * std::log(0.5)));
  EXPECT_NEAR(d.alphas[2], 0.0, 1e-15);
}

TEST(Jitter, FactorsInRangeAndPermutationValid) {
  ttakit::LightingModel m;
  ttakit::RngStream s = ttakit::derive_stream(5, "jitter");
  std::map<std::array<EnhancementKind, 3>, int> seen;
  for (int i = 0; i < 600; ++i) {
    const auto d = ttakit::draw_color_jitter(s, m);
    for (const double f : d.factors) {
      ASSERT_GE(f, 0.5);
      ASSERT_LT(f, 1.5);
    }
    auto sorted = d.order;
    std::sort(sorted.begin(), sorted.end());
    ASSERT_EQ(sorted, ttakit::kEnhancementKinds);
    ++seen[d.order];
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(TrainPatch, OffsetsCoverWholeImageAndReplay) {
  std::mt19937_64 g(16);
  const Image img = oracle::random_image(g, 300, 256);
  ttakit::RngStream s = ttakit::derive_stream(1, "patch");
  int min_x = 1000, max_x = -1, min_y = 1000, max_y = -1, flips = 0;
  for (int i = 0; i < 4000; ++i) {
    auto [patch, rec] = ttakit::sample_train_patch(img, s);
    ASSERT_EQ(patch.width(), 224);
    ASSERT_EQ(patch.height(), 224);
    min_x = std::min(min_x, rec.crop_x);
    max_x = std::max(max_x, rec.crop_x);
    min_y = std::min(min_y, rec.crop_y);
    max_y = std::max(max_y, rec.crop_y);
    flips += rec.flipped;
    if (i < 5) {
      ASSERT_EQ(ttakit::render_train_patch(img, rec, 224), patch);
    }
  }
  EXPECT_EQ(min_x, 0);
  EXPECT_EQ(max_x, 76);
  EXPECT_EQ(min_y, 0);
  EXPECT_EQ(max_y, 32);
  EXPECT_NEAR(flips / 4000.0, 0.5, 0.03);
}

TEST(TrainPatch, ScriptedCropAndFlip) {
  std::mt19937_64 g(17);
  const Image img = oracle::random_image(g, 256, 256);
  Scripted s{{0.999, 0.0, 0.3}};
  auto [patch, rec] = ttakit::sample_train_patch(img, s);
  EXPECT_EQ(rec.crop_x, 32);
  EXPECT_EQ(rec.crop_y, 0);
  EXPECT_TRUE(rec.flipped);
  EXPECT_EQ(patch, ttakit::hflip(ttakit::crop(img, {32, 0, 224, 224})));
}

TEST(TrainPatch, AugmentReplaysFromRecord) {
  std::mt19937_64 g(18);
  const Image img = oracle::random_image(g, 200, 320);
  ttakit::LightingModel m;
  m.eigenvalues = {0.2, 0.02, 0.002};
  ttakit::RngStream a = ttakit::derive_stream(9, "aug");
  ttakit::RngStream b = ttakit::derive_stream(9, "aug");
  for (int i = 0; i < 3; ++i) {
    auto [out, rec] = ttakit::augment_example(img, a, m);
    auto [out2, rec2] = ttakit::augment_example(img, b, m);
    EXPECT_EQ(out, out2);
    EXPECT_EQ(ttakit::replay_augment(img, rec, m), out);
    const nlohmann::json j = rec;
    const auto back = j.get<ttakit::AugmentRecord>();
    EXPECT_EQ(ttakit::replay_augment(img, back, m), out);
  }
}

TEST(TrainPatch, RejectsBadConfig) {
  Image img(256, 256);
  ttakit::RngStream s(0);
  EXPECT_THROW(ttakit::sample_train_patch(img, s, {256, 300}), ttakit::InvalidArgument);
}

TEST(LightingJson, RoundTrip) {
  ttakit::LightingModel m;
  m.eigenvalues = {3.5, 1.25, 0.125};
  m.sigma = 0.2;
  const nlohmann::json j = m;
  const auto back = j.get<ttakit::LightingModel>();
  EXPECT_EQ(back.eigenvalues, m.eigenvalues);
  EXPECT_EQ(back.eigenvectors, m.eigenvectors);
  EXPECT_EQ(back.sigma, m.sigma);
}
