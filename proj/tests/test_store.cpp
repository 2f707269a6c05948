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

#include <cstring>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ttakit/store.hpp"

using ttakit::PredictionStore;

namespace {

std::string bytes(std::initializer_list<int> values) {
  std::string s;
  for (const int v : values) s.push_back(static_cast<char>(v));
  return s;
}

// 2 images ("a1", "b2"), 2 transforms, 3 classes.
std::string known_file() {
  std::string f = "TTAP";
  f += bytes({1, 0});
  f += bytes({2, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0});
  f += bytes({2, 0}) + "a1" + bytes({2, 0}) + "b2";
  const std::string one = bytes({0, 0, 0x80, 0x3f});
  const std::string half = bytes({0, 0, 0, 0x3f});
  const std::string quarter = bytes({0, 0, 0x80, 0x3e});
  const std::string zero = bytes({0, 0, 0, 0});
  f += one + zero + zero;
  f += half + half + zero;
  f += quarter + quarter + half;
  f += zero + zero + one;
  return f;
}

}  // namespace

TEST(Store, ParsesHandWrittenFile) {
  std::istringstream in(known_file());
  const PredictionStore s = ttakit::read_store(in);
  ASSERT_EQ(s.image_count(), 2u);
  ASSERT_EQ(s.transform_count(), 2u);
  ASSERT_EQ(s.class_count(), 3u);
  EXPECT_EQ(s.image_ids(), (std::vector<std::string>{"a1", "b2"}));
  const std::vector<float> expected{1, 0, 0, 0.5f, 0.5f, 0, 0.25f, 0.25f, 0.5f, 0, 0, 1};
  EXPECT_TRUE(std::equal(s.probs().begin(), s.probs().end(), expected.begin(), expected.end()));
  EXPECT_FLOAT_EQ(s.row(1, 0)[2], 0.5f);

  std::ostringstream out;
  ttakit::write_store(out, s);
  EXPECT_EQ(out.str(), known_file());
}

TEST(Store, RandomRoundTripIsBitExact) {
  std::mt19937_64 g(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> labels;
    const auto s = oracle::random_store(g, 1 + trial % 7, 1 + trial % 5, 2 + trial % 4, labels);
    std::stringstream ss;
    ttakit::write_store(ss, s);
    const auto back = ttakit::read_store(ss);
    EXPECT_EQ(back, s);
    ASSERT_EQ(back.probs().size(), s.probs().size());
    EXPECT_EQ(std::memcmp(back.probs().data(), s.probs().data(), s.probs().size_bytes()), 0);
  }
}

TEST(Store, UnicodeIdsSurvive) {
  PredictionStore s({"caf\xc3\xa9", ""}, 1, 2);
  std::stringstream ss;
  ttakit::write_store(ss, s);
  EXPECT_EQ(ttakit::read_store(ss).image_ids(), s.image_ids());
}

TEST(Store, RejectsCorruptFiles) {
  const std::string good = known_file();
  {
    std::istringstream in("TTAQ" + good.substr(4));
    EXPECT_THROW(ttakit::read_store(in), ttakit::FormatError);
  }
  {
    std::string v2 = good;
    v2[4] = 2;
    std::istringstream in(v2);
    EXPECT_THROW(ttakit::read_store(in), ttakit::FormatError);
  }
  {
    std::istringstream in(good.substr(0, good.size() - 1));
    EXPECT_THROW(ttakit::read_store(in), ttakit::FormatError);
  }
  {
    std::istringstream in(good + "x");
    EXPECT_THROW(ttakit::read_store(in), ttakit::FormatError);
  }
  {
    std::string bad = good;
    bad[bad.size() - 1] = 0x40;  // last probability becomes 4.0
    std::istringstream in(bad);
    EXPECT_THROW(ttakit::read_store(in), ttakit::NormalizationError);
  }
}

TEST(Store, RowValidation) {
  PredictionStore s({"x"}, 2, 3);
  EXPECT_FLOAT_EQ(s.row(0, 1)[0], 1.0f / 3.0f);
  const std::vector<float> ok{0.2f, 0.3f, 0.5f};
  s.set_row(0, 1, ok);
  EXPECT_FLOAT_EQ(s.row(0, 1)[2], 0.5f);
  const std::vector<float> bad_sum{0.2f, 0.3f, 0.6f};
  EXPECT_THROW(s.set_row(0, 0, bad_sum), ttakit::NormalizationError);
  const std::vector<float> negative{-0.1f, 0.6f, 0.5f};
  EXPECT_THROW(s.set_row(0, 0, negative), ttakit::NormalizationError);
  const std::vector<float> nan{std::nanf(""), 0.5f, 0.5f};
  EXPECT_THROW(s.set_row(0, 0, nan), ttakit::NormalizationError);
  const std::vector<float> short_row{0.5f, 0.5f};
  EXPECT_THROW(s.set_row(0, 0, short_row), ttakit::InvalidArgument);
  EXPECT_THROW(s.row(1, 0), ttakit::OutOfBounds);
  EXPECT_THROW(s.row(0, 2), ttakit::OutOfBounds);
  EXPECT_THROW(PredictionStore({"x"}, 0, 3), ttakit::InvalidArgument);
  EXPECT_THROW(PredictionStore({"x"}, 1, 2, {0.5f}), ttakit::InvalidArgument);
}

TEST(Store, FileIo) {
  const auto path = std::filesystem::temp_directory_path() / "ttakit_store_test.ttap";
  std::mt19937_64 g(32);
  std::vector<int> labels;
  const auto s = oracle::random_store(g, 4, 3, 5, labels);
  ttakit::write_store_file(path, s);
  EXPECT_EQ(ttakit::read_store_file(path), s);
  std::filesystem::remove(path);
  EXPECT_THROW(ttakit::read_store_file(path), ttakit::IoError);
}
