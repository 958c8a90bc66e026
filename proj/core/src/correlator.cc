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
#include "lurescan/correlator.h"

#include <algorithm>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "lurescan/bk_tree.h"
#include "lurescan/strings.h"

namespace lurescan {
namespace {

using Json = nlohmann::ordered_json;

// Union-find with path halving.
class DisjointSets {
 public:
  explicit DisjointSets(size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  size_t Find(size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void Union(size_t a, size_t b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<size_t> parent_;
};

// Per-key sample counts per family, families indexed into `families`.
std::map<std::string, std::map<size_t, int64_t>> FamilyCounts(const std::vector<CorpusSample>& corpus,
                                                              std::vector<std::string>* families) {
  std::set<std::string> names;
  for (const CorpusSample& s : corpus) {
    if (s.family) names.insert(*s.family);
  }
  families->assign(names.begin(), names.end());
  std::map<std::string, std::map<size_t, int64_t>> counts;
  for (const CorpusSample& s : corpus) {
    if (!s.family) continue;
    size_t f = static_cast<size_t>(std::lower_bound(families->begin(), families->end(), *s.family) -
                                   families->begin());
    for (const std::string& k : s.keys) ++counts[k][f];
  }
  return counts;
}

Json MatrixJson(const Matrix& m) {
  Json rows = Json::array();
  for (const auto& row : m) rows.push_back(row);
  return rows;
}

}  // namespace

std::string KeySpec::Name() const {
  switch (kind) {
    case Kind::kSha256: return "sha256";
    case Kind::kPhashExact: return "phash_exact";
    case Kind::kPhashRadius: return Cat("phash_radius(", radius, ")");
  }
  return "sha256";
}

std::map<uint64_t, uint64_t> ClusterHashes(const std::vector<uint64_t>& hashes, int radius) {
  std::vector<uint64_t> distinct = hashes;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  DisjointSets sets(distinct.size());
  BkTree tree;
  for (size_t i = 0; i < distinct.size(); ++i) tree.Insert(distinct[i], static_cast<uint32_t>(i));
  for (size_t i = 0; i < distinct.size(); ++i) {
    for (const BkTree::Match& m : tree.Query(distinct[i], radius)) sets.Union(i, m.id);
  }
  // Roots are the smallest index, hence the smallest hash, of each cluster.
  std::map<uint64_t, uint64_t> label;
  for (size_t i = 0; i < distinct.size(); ++i) label[distinct[i]] = distinct[sets.Find(i)];
  return label;
}

std::vector<CorpusSample> BuildCorpus(const std::vector<SampleRecord>& samples,
                                      const std::vector<ImageRecord>& images, const KeySpec& key) {
  std::map<std::string, const ImageRecord*> by_sha;
  for (const ImageRecord& r : images) by_sha[r.sha256] = &r;

  std::map<uint64_t, uint64_t> clusters;
  if (key.kind == KeySpec::Kind::kPhashRadius) {
    std::vector<uint64_t> all;
    for (const ImageRecord& r : images) all.push_back(r.phash.bits);
    clusters = ClusterHashes(all, key.radius);
  }

  std::vector<CorpusSample> corpus;
  corpus.reserve(samples.size());
  for (const SampleRecord& s : samples) {
    CorpusSample c{s.file_sha256, s.family, {}};
    std::set<std::string> keys;
    for (const std::string& sha : s.image_ids) {
      if (key.kind == KeySpec::Kind::kSha256) {
        keys.insert(sha);
        continue;
      }
      auto it = by_sha.find(sha);
      if (it == by_sha.end()) continue;
      uint64_t bits = it->second->phash.bits;
      if (key.kind == KeySpec::Kind::kPhashRadius) bits = clusters.at(bits);
      keys.insert(HashBitsToHex(bits));
    }
    c.keys.assign(keys.begin(), keys.end());
    corpus.push_back(std::move(c));
  }
  return corpus;
}

std::vector<CorpusSample> BuildCorpus(const SignatureDb& db, const KeySpec& key) {
  return BuildCorpus(db.Samples(), db.Images(), key);
}

Distribution FrequencyDistribution(const std::vector<CorpusSample>& corpus) {
  Distribution d;
  for (const CorpusSample& s : corpus) {
    for (const std::string& k : s.keys) ++d[k];
  }
  return d;
}

Matrix UniqueSharedMatrix(const std::vector<CorpusSample>& corpus, std::vector<std::string>* families,
                          int64_t* shared_hash_count) {
  auto counts = FamilyCounts(corpus, families);
  const size_t n = families->size();
  Matrix m(n, std::vector<int64_t>(n, 0));
  int64_t shared = 0;
  for (const auto& [key, per_family] : counts) {
    if (per_family.size() >= 2) ++shared;
    for (auto a = per_family.begin(); a != per_family.end(); ++a) {
      for (auto b = std::next(a); b != per_family.end(); ++b) {
        ++m[a->first][b->first];
        ++m[b->first][a->first];
      }
    }
  }
  if (shared_hash_count) *shared_hash_count = shared;
  return m;
}

Matrix CooccurrenceCounts(const std::vector<CorpusSample>& corpus, std::vector<std::string>* families) {
  auto counts = FamilyCounts(corpus, families);
  const size_t n = families->size();
  Matrix m(n, std::vector<int64_t>(n, 0));
  for (const auto& [key, per_family] : counts) {
    for (auto a = per_family.begin(); a != per_family.end(); ++a) {
      for (auto b = std::next(a); b != per_family.end(); ++b) {
        int64_t w = a->second + b->second;
        m[a->first][b->first] += w;
        m[b->first][a->first] += w;
      }
    }
  }
  return m;
}

CooccurrenceMatrix BuildCooccurrence(const std::vector<CorpusSample>& corpus, const KeySpec& key) {
  CooccurrenceMatrix out;
  out.key = key;
  out.unique_shared = UniqueSharedMatrix(corpus, &out.families, &out.shared_hash_count);
  std::vector<std::string> same;
  out.weighted = CooccurrenceCounts(corpus, &same);
  return out;
}

std::optional<size_t> CooccurrenceMatrix::IndexOf(std::string_view family) const {
  auto it = std::lower_bound(families.begin(), families.end(), family);
  if (it == families.end() || *it != family) return std::nullopt;
  return static_cast<size_t>(it - families.begin());
}

int64_t CooccurrenceMatrix::UniqueShared(std::string_view a, std::string_view b) const {
  auto i = IndexOf(a), j = IndexOf(b);
  return (i && j) ? unique_shared[*i][*j] : 0;
}

int64_t CooccurrenceMatrix::Weighted(std::string_view a, std::string_view b) const {
  auto i = IndexOf(a), j = IndexOf(b);
  return (i && j) ? weighted[*i][*j] : 0;
}

std::string CsvField(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string EmitDistribution(const Distribution& distribution, const KeySpec& key, ReportFormat format) {
  std::vector<std::pair<std::string, int64_t>> rows(distribution.begin(), distribution.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (format == ReportFormat::kCsv) {
    std::string out = "key,count\n";
    for (const auto& [k, n] : rows) out += Cat(CsvField(k), ",", n, "\n");
    return out;
  }
  Json doc;
  doc["key_kind"] = key.Name();
  doc["entries"] = Json::array();
  for (const auto& [k, n] : rows) doc["entries"].push_back({{"key", k}, {"count", n}});
  return doc.dump(2) + "\n";
}

std::string EmitMatrix(const CooccurrenceMatrix& matrix, ReportFormat format, MatrixChoice csv_matrix) {
  if (format == ReportFormat::kCsv) {
    const Matrix& m = csv_matrix == MatrixChoice::kUniqueShared ? matrix.unique_shared : matrix.weighted;
    std::string out = "family";
    for (const std::string& f : matrix.families) out += "," + CsvField(f);
    out += "\n";
    for (size_t i = 0; i < matrix.families.size(); ++i) {
      out += CsvField(matrix.families[i]);
      for (int64_t v : m[i]) out += Cat(",", v);
      out += "\n";
    }
    return out;
  }
  Json doc;
  doc["key_kind"] = matrix.key.Name();
  doc["families"] = matrix.families;
  doc["shared_hash_count"] = matrix.shared_hash_count;
  doc["unique_shared"] = MatrixJson(matrix.unique_shared);
  doc["weighted"] = MatrixJson(matrix.weighted);
  return doc.dump(2) + "\n";
}

}  // namespace lurescan
