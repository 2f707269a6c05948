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
#include <sstream>

#include "oracles.hpp"
#include "ttakit/image.hpp"
#include "ttakit/ppm.hpp"

using ttakit::Image;

namespace {

Image gray_pattern(int w, int h, const std::vector<int>& values) {
  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<std::uint8_t>(values[y * w + x]);
    }
  }
  return img;
}

}  // namespace

TEST(Image, RejectsNonPositiveDims) {
  EXPECT_THROW(Image(0, 3), ttakit::InvalidArgument);
  EXPECT_THROW(Image(3, -1), ttakit::InvalidArgument);
  EXPECT_THROW(Image(2, 2, std::vector<std::uint8_t>(5)), ttakit::InvalidArgument);
  EXPECT_TRUE(Image().empty());
}

TEST(Image, ToSampleRoundsHalfUpAndSaturates) {
  EXPECT_EQ(ttakit::to_sample(0.5), 1);
  EXPECT_EQ(ttakit::to_sample(1.49), 1);
  EXPECT_EQ(ttakit::to_sample(254.5), 255);
  EXPECT_EQ(ttakit::to_sample(-3.0), 0);
  EXPECT_EQ(ttakit::to_sample(300.0), 255);
}

TEST(Image, CropCopiesWindowAndChecksBounds) {
  std::mt19937_64 g(1);
  const Image img = oracle::random_image(g, 7, 5);
  const Image c = ttakit::crop(img, {2, 1, 3, 4});
  ASSERT_EQ(c.width(), 3);
  ASSERT_EQ(c.height(), 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 3; ++x) {
      for (int ch = 0; ch < 3; ++ch) EXPECT_EQ(c.at(x, y, ch), img.at(x + 2, y + 1, ch));
    }
  }
  EXPECT_THROW(ttakit::crop(img, {5, 0, 3, 1}), ttakit::OutOfBounds);
  EXPECT_THROW(ttakit::crop(img, {-1, 0, 1, 1}), ttakit::OutOfBounds);
  EXPECT_THROW(ttakit::crop(img, {0, 0, 0, 1}), ttakit::OutOfBounds);
}

TEST(Image, HflipMirrorsAndIsInvolution) {
  std::mt19937_64 g(2);
  const Image img = oracle::random_image(g, 9, 4);
  const Image f = ttakit::hflip(img);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 9; ++x) {
      for (int c = 0; c < 3; ++c) EXPECT_EQ(f.at(x, y, c), img.at(8 - x, y, c));
    }
  }
  EXPECT_EQ(ttakit::hflip(f), img);
}

TEST(Resize, CheckerboardUpscaleMatchesFrozenValues) {
  const Image board = gray_pattern(2, 2, {0, 255, 255, 0});
  const Image expected = gray_pattern(4, 4, {0, 41, 214, 255,       //
                                             41, 83, 172, 214,      //
                                             214, 172, 83, 41,      //
                                             255, 214, 41, 0});
  EXPECT_EQ(ttakit::resize_bicubic(board, 4, 4), expected);
}

TEST(Resize, KernelValues) {
  EXPECT_DOUBLE_EQ(ttakit::detail::cubic_kernel(0.0), 1.0);
  EXPECT_DOUBLE_EQ(ttakit::detail::cubic_kernel(1.0), 0.0);
  EXPECT_DOUBLE_EQ(ttakit::detail::cubic_kernel(2.0), 0.0);
  EXPECT_DOUBLE_EQ(ttakit::detail::cubic_kernel(0.5), 0.5625);
  EXPECT_DOUBLE_EQ(ttakit::detail::cubic_kernel(-1.5), -0.0625);
}

TEST(Resize, SameSizeIsIdentity) {
  std::mt19937_64 g(3);
  for (int i = 0; i < 5; ++i) {
    const Image img = oracle::random_image(g, 5 + i * 7, 3 + i * 5);
    EXPECT_EQ(ttakit::resize_bicubic(img, img.width(), img.height()), img);
  }
}

TEST(Resize, ConstantImageIsFixedPoint) {
  std::mt19937_64 g(4);
  std::uniform_int_distribution<int> size(1, 64);
  for (int i = 0; i < 10; ++i) {
    const Image img(size(g), size(g), static_cast<std::uint8_t>(17 * i + 3));
    const Image out = ttakit::resize_bicubic(img, size(g), size(g));
    for (const auto v : out.samples()) ASSERT_EQ(v, img.samples()[0]);
  }
}

TEST(Resize, MatchesScalarOracleWithinOne) {
  std::mt19937_64 g(5);
  std::uniform_int_distribution<int> size(1, 24);
  for (int i = 0; i < 20; ++i) {
    const Image img = oracle::random_image(g, size(g), size(g));
    const int ow = size(g), oh = size(g);
    const Image a = ttakit::resize_bicubic(img, ow, oh);
    const Image b = oracle::bicubic(img, ow, oh);
    for (std::size_t k = 0; k < a.sample_count(); ++k) {
      ASSERT_LE(std::abs(int(a.samples()[k]) - int(b.samples()[k])), 1);
    }
  }
}

TEST(Resize, RejectsNonPositiveTarget) {
  const Image img(4, 4);
  EXPECT_THROW(ttakit::resize_bicubic(img, 0, 4), ttakit::InvalidArgument);
}

TEST(ScaleSmallestSide, RoundsLongSideHalfUp) {
  EXPECT_EQ(ttakit::scale_smallest_side(Image(300, 200), 256).width(), 384);
  const Image p = ttakit::scale_smallest_side(Image(500, 333), 256);
  EXPECT_EQ(p.height(), 256);
  EXPECT_EQ(p.width(), 384);
  // 3 * 1 / 2 = 1.5 -> 2
  const Image q = ttakit::scale_smallest_side(Image(3, 2), 1);
  EXPECT_EQ(q.width(), 2);
  EXPECT_EQ(q.height(), 1);
  const Image r = ttakit::scale_smallest_side(Image(5, 10), 2);
  EXPECT_EQ(r.width(), 2);
  EXPECT_EQ(r.height(), 4);
}

TEST(ScaleSmallestSide, NoOpAtTarget) {
  std::mt19937_64 g(6);
  const Image img = oracle::random_image(g, 256, 300);
  EXPECT_EQ(ttakit::scale_smallest_side(img, 256), img);
}

TEST(Ppm, RoundTripAndComments) {
  std::mt19937_64 g(7);
  const Image img = oracle::random_image(g, 6, 3);
  std::stringstream ss;
  ttakit::write_ppm(ss, img);
  EXPECT_EQ(ttakit::read_ppm(ss), img);

  std::stringstream commented;
  commented << "P6\n# a comment\n2 1 # trailing\n255\n";
  commented.write("\x01\x02\x03\x04\x05\x06", 6);
  const Image c = ttakit::read_ppm(commented);
  EXPECT_EQ(c.width(), 2);
  EXPECT_EQ(c.at(1, 0, 2), 6);
}

TEST(Ppm, RejectsMalformedInput) {
  std::stringstream p3("P3\n1 1\n255\n0 0 0\n");
  EXPECT_THROW(ttakit::read_ppm(p3), ttakit::FormatError);
  std::stringstream maxval("P6\n1 1\n65535\n");
  EXPECT_THROW(ttakit::read_ppm(maxval), ttakit::FormatError);
  std::stringstream truncated("P6\n2 2\n255\n\x01\x02");
  EXPECT_THROW(ttakit::read_ppm(truncated), ttakit::FormatError);
  EXPECT_THROW(ttakit::read_ppm_file("/nonexistent/x.ppm"), ttakit::IoError);
}
