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
// Signature database: sample and image records in an append-only JSON-lines
// journal, indexed in memory by SHA-256 and by a BK-tree over perceptual
// hashes.

#ifndef LURESCAN_SIGDB_H_
#define LURESCAN_SIGDB_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "lurescan/bk_tree.h"
#include "lurescan/container.h"
#include "lurescan/imaging.h"

namespace lurescan {

struct ImageRecord {
  std::string sha256;
  PerceptualHash phash;
  int width = 0;
  int height = 0;
  std::string format;
  std::optional<bool> labeled_malicious;
};

struct SampleRecord {
  std::string file_sha256;
  ContainerKind container_kind = ContainerKind::kUnknown;
  std::optional<std::string> family;
  MacroEvidence macro_evidence;
  std::vector<std::string> image_ids;  // image SHA-256 values
  std::string first_seen;              // UTC, ISO-8601 ("2021-03-01T12:00:00Z")
  std::string source_path;
};

// Current UTC time in the first_seen format.
std::string UtcNowIso8601();

struct PhashMatch {
  ImageRecord image;
  int distance = 0;
};

struct DbStats {
  size_t sample_count = 0;
  size_t unique_image_count = 0;
  size_t unique_phash_count = 0;
  size_t singleton_sha_count = 0;    // images referenced by exactly one sample
  size_t singleton_phash_count = 0;  // phash values referenced by exactly one sample
  size_t unlabeled_sample_count = 0;
  std::map<std::string, size_t> per_family_counts;

  friend bool operator==(const DbStats&, const DbStats&) = default;
};

struct IngestResult {
  bool sample_added = false;
  std::vector<std::string> images_added;
};

class SignatureDb {
 public:
  enum class Mode { kReadOnly, kReadWrite };

  // Replays the journal. Read-write handles take an advisory lock on
  // "<path>.lock" for their lifetime. Errors: IoFailure.
  static absl::StatusOr<std::unique_ptr<SignatureDb>> Open(const std::filesystem::path& path, Mode mode);
  // Volatile database (tests, one-shot scans without --db).
  static std::unique_ptr<SignatureDb> InMemory();

  ~SignatureDb();
  SignatureDb(const SignatureDb&) = delete;
  SignatureDb& operator=(const SignatureDb&) = delete;

  // Idempotent per file_sha256; images are deduplicated by sha256. A new
  // family or malicious label on a known record is journaled as a label.
  // Errors: IoFailure, AlgorithmMismatch, InvalidArgument.
  absl::StatusOr<IngestResult> Ingest(const SampleRecord& sample, const std::vector<ImageRecord>& images);

  absl::Status LabelSample(const std::string& file_sha256, const std::string& family);
  absl::Status LabelImage(const std::string& image_sha256, bool malicious);

  // Reloads records appended by another writer since open.
  absl::Status Refresh();

  std::optional<SampleRecord> FindSample(const std::string& file_sha256) const;
  std::optional<ImageRecord> FindImage(const std::string& sha256) const;
  std::vector<SampleRecord> SamplesByFamily(const std::string& family) const;
  std::vector<SampleRecord> Samples() const;
  std::vector<ImageRecord> Images() const;
  // Families of the samples that contain this image, sorted.
  std::vector<std::string> FamiliesForImage(const std::string& sha256) const;

  // Sorted by distance, then sha256. Errors: AlgorithmMismatch,
  // InvalidArgument for max_dist outside 0..64.
  absl::StatusOr<std::vector<PhashMatch>> FindByPhash(const PerceptualHash& query, int max_dist) const;

  DbStats Stats() const;
  std::optional<HashAlgorithm> phash_algorithm() const;
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  SignatureDb() = default;

  absl::Status Append(const std::string& line);
  void ApplyLine(std::string_view line, size_t line_no);
  void ApplySample(SampleRecord sample);
  void ApplyImage(ImageRecord image);
  void ApplySampleLabel(const std::string& sha, const std::string& family);
  void ApplyImageLabel(const std::string& sha, bool malicious);

  std::filesystem::path path_;
  bool persistent_ = false;
  bool writable_ = true;
  int lock_fd_ = -1;
  int journal_fd_ = -1;
  uint64_t journal_offset_ = 0;

  mutable std::shared_mutex mu_;
  std::vector<SampleRecord> samples_;
  std::unordered_map<std::string, size_t> sample_index_;
  std::vector<ImageRecord> images_;
  std::unordered_map<std::string, size_t> image_index_;
  std::unordered_map<std::string, std::set<size_t>> samples_by_image_;
  BkTree tree_;
  std::vector<std::string> warnings_;
};

}  // namespace lurescan

#endif  // LURESCAN_SIGDB_H_
