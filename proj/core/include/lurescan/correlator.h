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
// Cross-family image reuse analytics: frequency distributions, unique
// shared-hash matrices and sample-weighted co-occurrence counts.

#ifndef LURESCAN_CORRELATOR_H_
#define LURESCAN_CORRELATOR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "lurescan/sigdb.h"

namespace lurescan {

struct KeySpec {
  enum class Kind { kSha256, kPhashExact, kPhashRadius };
  Kind kind = Kind::kSha256;
  int radius = 0;  // kPhashRadius only

  static KeySpec Sha256() { return {Kind::kSha256, 0}; }
  static KeySpec PhashExact() { return {Kind::kPhashExact, 0}; }
  static KeySpec PhashRadius(int r) { return {Kind::kPhashRadius, r}; }

  // "sha256", "phash_exact", "phash_radius(4)".
  std::string Name() const;
};

// Sample-level view of the database used by every analysis.
struct CorpusSample {
  std::string id;
  std::optional<std::string> family;
  std::vector<std::string> keys;  // deduplicated per sample
};

// Maps each sample's images to keys. Under kPhashRadius, distinct hash
// values are grouped by single-linkage clustering at the radius and each
// cluster is named by its smallest member (hex).
std::vector<CorpusSample> BuildCorpus(const SignatureDb& db, const KeySpec& key);
std::vector<CorpusSample> BuildCorpus(const std::vector<SampleRecord>& samples,
                                      const std::vector<ImageRecord>& images, const KeySpec& key);

// Cluster label per distinct hash value (single linkage at `radius`).
std::map<uint64_t, uint64_t> ClusterHashes(const std::vector<uint64_t>& hashes, int radius);

using Distribution = std::map<std::string, int64_t>;

// Number of samples containing each key.
Distribution FrequencyDistribution(const std::vector<CorpusSample>& corpus);

using Matrix = std::vector<std::vector<int64_t>>;

struct CooccurrenceMatrix {
  std::vector<std::string> families;  // sorted
  Matrix unique_shared;
  Matrix weighted;
  KeySpec key;
  int64_t shared_hash_count = 0;  // keys present in two or more families

  int64_t UniqueShared(std::string_view a, std::string_view b) const;
  int64_t Weighted(std::string_view a, std::string_view b) const;
  std::optional<size_t> IndexOf(std::string_view family) const;
};

// Families are taken from labeled samples; unlabeled samples are ignored.
// Diagonals stay 0 (self-pairs excluded).
CooccurrenceMatrix BuildCooccurrence(const std::vector<CorpusSample>& corpus, const KeySpec& key);
Matrix UniqueSharedMatrix(const std::vector<CorpusSample>& corpus, std::vector<std::string>* families,
                          int64_t* shared_hash_count = nullptr);
Matrix CooccurrenceCounts(const std::vector<CorpusSample>& corpus, std::vector<std::string>* families);

enum class ReportFormat { kJson, kCsv };
enum class MatrixChoice { kUniqueShared, kWeighted };

std::string EmitDistribution(const Distribution& distribution, const KeySpec& key, ReportFormat format);
// CSV carries one matrix (families as header row and first column); JSON
// carries both.
std::string EmitMatrix(const CooccurrenceMatrix& matrix, ReportFormat format,
                       MatrixChoice csv_matrix = MatrixChoice::kWeighted);

// RFC 4180 field quoting.
std::string CsvField(std::string_view value);

}  // namespace lurescan

#endif  // LURESCAN_CORRELATOR_H_
