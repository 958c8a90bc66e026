// Copyright 2026 The lurescan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "lurescan/bk_tree.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lurescan/imaging.h"

namespace lurescan {
namespace {

std::vector<uint32_t> Ids(std::vector<BkTree::Match> matches) {
  std::vector<uint32_t> ids;
  for (const auto& m : matches) ids.push_back(m.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

TEST(BkTreeTest, EmptyTree) {
  BkTree tree;
  EXPECT_TRUE(tree.empty());
  EXPECT_TRUE(tree.Query(0, 64).empty());
}

TEST(BkTreeTest, DuplicatesShareANode) {
  BkTree tree;
  tree.Insert(42, 0);
  tree.Insert(42, 1);
  tree.Insert(43, 2);
  EXPECT_EQ(tree.size(), 3u);
  EXPECT_EQ(tree.node_count(), 2u);
  EXPECT_EQ(Ids(tree.Query(42, 0)), (std::vector<uint32_t>{0, 1}));
}

TEST(BkTreeTest, RadiusSixtyFourReturnsEverything) {
  BkTree tree;
  std::mt19937_64 rng(1);
  for (uint32_t i = 0; i < 300; ++i) tree.Insert(rng(), i);
  EXPECT_EQ(tree.Query(rng(), 64).size(), 300u);
  tree.Clear();
  EXPECT_TRUE(tree.empty());
}

TEST(BkTreeTest, MatchesLinearScanForAllRadii) {
  std::mt19937_64 rng(2024);
  std::vector<uint64_t> hashes;
  for (int i = 0; i < 1000; ++i) {
    // Mix independent hashes with near neighbours so small radii are populated.
    if (i > 0 && i % 4 == 0) {
      uint64_t h = hashes[rng() % hashes.size()];
      for (int k = 0, n = static_cast<int>(rng() % 6); k < n; ++k) h ^= uint64_t{1} << (rng() % 64);
      hashes.push_back(h);
    } else {
      hashes.push_back(rng());
    }
  }
  BkTree tree;
  for (uint32_t i = 0; i < hashes.size(); ++i) tree.Insert(hashes[i], i);
  for (int q = 0; q < 100; ++q) {
    uint64_t query = q % 2 ? hashes[rng() % hashes.size()] : rng();
    for (int r = 0; r <= 16; ++r) {
      std::vector<uint32_t> expected;
      for (uint32_t i = 0; i < hashes.size(); ++i) {
        if (HammingBits(hashes[i], query) <= r) expected.push_back(i);
      }
      auto got = tree.Query(query, r);
      for (const auto& m : got) EXPECT_EQ(m.distance, HammingBits(hashes[m.id], query));
      EXPECT_EQ(Ids(got), expected) << "radius " << r;
    }
  }
}

}  // namespace
}  // namespace lurescan
