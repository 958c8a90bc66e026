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

#include "lurescan/imaging.h"

namespace lurescan {

void BkTree::Insert(uint64_t hash, uint32_t id) {
  ++size_;
  if (nodes_.empty()) {
    nodes_.push_back({hash, {id}, {}});
    return;
  }
  uint32_t at = 0;
  for (;;) {
    int d = HammingBits(nodes_[at].hash, hash);
    if (d == 0) {
      nodes_[at].ids.push_back(id);
      return;
    }
    uint32_t next = UINT32_MAX;
    for (const auto& [dist, child] : nodes_[at].children) {
      if (dist == d) {
        next = child;
        break;
      }
    }
    if (next == UINT32_MAX) {
      uint32_t index = static_cast<uint32_t>(nodes_.size());
      nodes_[at].children.emplace_back(static_cast<uint8_t>(d), index);
      nodes_.push_back({hash, {id}, {}});
      return;
    }
    at = next;
  }
}

std::vector<BkTree::Match> BkTree::Query(uint64_t query, int radius) const {
  std::vector<Match> out;
  if (nodes_.empty() || radius < 0) return out;
  std::vector<uint32_t> stack = {0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    int d = HammingBits(node.hash, query);
    if (d <= radius) {
      for (uint32_t id : node.ids) out.push_back({id, d});
    }
    for (const auto& [dist, child] : node.children) {
      if (dist >= d - radius && dist <= d + radius) stack.push_back(child);
    }
  }
  return out;
}

void BkTree::Clear() {
  nodes_.clear();
  size_ = 0;
}

}  // namespace lurescan
