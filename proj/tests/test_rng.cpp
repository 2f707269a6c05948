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

#include <cmath>

#include "ttakit/rng.hpp"

using ttakit::RngStream;

namespace {

/// Replays a fixed list of uniforms.
struct Scripted {
  std::vector<double> values;
  std::size_t next = 0;
  double next_uniform() { return values.at(next++); }
};

}  // namespace

TEST(Rng, Fnv1aKnownValues) {
  EXPECT_EQ(ttakit::fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(ttakit::fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Rng, DerivedStreamsMatchFrozenValues) {
  RngStream s = ttakit::derive_stream(0, "");
  EXPECT_EQ(s.state(), 0xc3817c016ba4ff30ull);
  RngStream u = s;
  EXPECT_EQ(s.next_u64(), 0x21fa69a58f3d62f5ull);
  EXPECT_EQ(s.next_u64(), 0xbc78bed6e022d134ull);
  EXPECT_EQ(s.next_u64(), 0xb42a8fa96d1c00b4ull);
  EXPECT_DOUBLE_EQ(u.next_uniform(), 0.1327272443006584);
  EXPECT_DOUBLE_EQ(u.next_uniform(), 0.7362174295996156);
  EXPECT_DOUBLE_EQ(u.next_uniform(), 0.7037744320524411);
  EXPECT_EQ(ttakit::derive_stream(42, "img_0001").state(), 0xb109013d6409416aull);
}

TEST(Rng, GaussianFrozenValue) {
  RngStream s = ttakit::derive_stream(0, "");
  EXPECT_NEAR(ttakit::next_gaussian(s, 0.0, 1.0), -0.1738199652946275, 1e-15);
}

TEST(Rng, GaussianConsumesTwoUniformsAndGuardsZero) {
  Scripted s{{0.0, 0.0, 0.25, 0.5}};
  const double z = ttakit::next_gaussian(s, 1.0, 2.0);
  EXPECT_EQ(s.next, 2u);
  EXPECT_DOUBLE_EQ(z, 1.0 + 2.0 * std::sqrt(-2.0 * std::log(0x1.0p-53)));
  EXPECT_DOUBLE_EQ(ttakit::next_gaussian(s, 0.0, 1.0), std::sqrt(-2.0 * std::log(0.25)) * -1.0);
}

TEST(Rng, SameSeedSameSequence) {
  RngStream a = ttakit::derive_stream(7, "x");
  RngStream b = ttakit::derive_stream(7, "x");
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(ttakit::derive_stream(7, "x").state(), ttakit::derive_stream(7, "y").state());
  EXPECT_NE(ttakit::derive_stream(7, "x").state(), ttakit::derive_stream(8, "x").state());
}

TEST(Rng, UniformRangeAndMoments) {
  RngStream s = ttakit::derive_stream(123, "moments");
  constexpr int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.01);

  double gs = 0.0, gs2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = ttakit::next_gaussian(s, 0.0, 1.0);
    gs += z;
    gs2 += z * z;
  }
  const double mean = gs / n;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(gs2 / n - mean * mean, 1.0, 0.03);
}

TEST(Rng, Constexpr) {
  static_assert(ttakit::fnv1a64("") == 0xcbf29ce484222325ull);
  static_assert(ttakit::derive_stream(0, "").state() == 0xc3817c016ba4ff30ull);
}
