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
// BK-tree over 64-bit hashes under Hamming distance.

#ifndef LURESCAN_BK_TREE_H_
#define LURESCAN_BK_TREE_H_

#include <cstdint>
#include <utility>
#include <vector>

namespace lurescan {

class BkTree {
 public:
  struct Match {
    uint32_t id;
    int distance;

    friend bool operator==(const Match&, const Match&) = default;
  };

  // Equal hashes share a node; every inserted id is kept.
  void Insert(uint64_t hash, uint32_t id);

  // All ids whose hash lies within `radius` of `query`, in no particular
  // order. Children outside [d - r, d + r] are pruned by the triangle
  // inequality.
  std::vector<Match> Query(uint64_t query, int radius) const;

  size_t size() const { return size_; }
  size_t node_count() const { return nodes_.size(); }
  bool empty() const { return size_ == 0; }
  void Clear();

 private:
  struct Node {
    uint64_t hash;
    std::vector<uint32_t> ids;
    std::vector<std::pair<uint8_t, uint32_t>> children;  // (distance, node index)
  };
  std::vector<Node> nodes_;
  size_t size_ = 0;
};

}  // namespace lurescan

#endif  // LURESCAN_BK_TREE_H_
