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
#include "lurescan/sigdb.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <ctime>
#include <mutex>

#include "lurescan/error.h"
#include "lurescan/json_codec.h"
#include "lurescan/strings.h"

namespace lurescan {
namespace {

absl::Status Errno(std::string_view what, const std::filesystem::path& path) {
  return MakeError(ErrorCode::kIoFailure, Cat(what, " ", path.string(), ": ", std::strerror(errno)));
}

absl::Status WriteAll(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      return MakeError(ErrorCode::kIoFailure, Cat("journal write failed: ", std::strerror(errno)));
    }
    data.remove_prefix(static_cast<size_t>(n));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadFrom(const std::filesystem::path& path, uint64_t offset) {
  int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) {
    if (errno == ENOENT) return std::string();
    return Errno("cannot open", path);
  }
  std::string out;
  if (::lseek(fd, static_cast<off_t>(offset), SEEK_SET) < 0) {
    ::close(fd);
    return Errno("cannot seek", path);
  }
  char buf[1 << 16];
  for (;;) {
    ssize_t n = ::read(fd, buf, sizeof(buf));
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) {
      ::close(fd);
      return Errno("cannot read", path);
    }
    if (n == 0) break;
    out.append(buf, static_cast<size_t>(n));
  }
  ::close(fd);
  return out;
}

}  // namespace

std::string UtcNowIso8601() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

absl::StatusOr<std::unique_ptr<SignatureDb>> SignatureDb::Open(const std::filesystem::path& path, Mode mode) {
  std::unique_ptr<SignatureDb> db(new SignatureDb());
  db->path_ = path;
  db->persistent_ = true;
  db->writable_ = mode == Mode::kReadWrite;
  if (db->writable_) {
    std::filesystem::path lock = path;
    lock += ".lock";
    db->lock_fd_ = ::open(lock.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (db->lock_fd_ < 0) return Errno("cannot create lock file", lock);
    if (::flock(db->lock_fd_, LOCK_EX | LOCK_NB) != 0) {
      return MakeError(ErrorCode::kIoFailure, Cat("database ", path.string(), " is locked by another writer"));
    }
    db->journal_fd_ = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (db->journal_fd_ < 0) return Errno("cannot open journal", path);
  } else if (!std::filesystem::exists(path)) {
    return MakeError(ErrorCode::kIoFailure, Cat("no database at ", path.string()));
  }
  if (absl::Status s = db->Refresh(); !s.ok()) return s;
  // A torn final line from a crashed writer must not merge with the next
  // record.
  if (db->writable_) {
    auto tail = ReadFrom(path, db->journal_offset_);
    if (tail.ok() && !tail->empty()) {
      LURESCAN_RETURN_IF_ERROR(WriteAll(db->journal_fd_, "\n"));
      db->journal_offset_ += tail->size() + 1;
    }
  }
  return db;
}

std::unique_ptr<SignatureDb> SignatureDb::InMemory() { return std::unique_ptr<SignatureDb>(new SignatureDb()); }

SignatureDb::~SignatureDb() {
  if (journal_fd_ >= 0) ::close(journal_fd_);
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

absl::Status SignatureDb::Refresh() {
  if (!persistent_) return absl::OkStatus();
  std::unique_lock lock(mu_);
  LURESCAN_ASSIGN_OR_RETURN(std::string data, ReadFrom(path_, journal_offset_));
  size_t consumed = 0;
  size_t line_no = 0;
  while (consumed < data.size()) {
    size_t nl = data.find('\n', consumed);
    if (nl == std::string::npos) {
      warnings_.push_back("journal ends with an incomplete record; ignored");
      break;
    }
    ApplyLine(std::string_view(data).substr(consumed, nl - consumed), ++line_no);
    consumed = nl + 1;
  }
  journal_offset_ += consumed;
  return absl::OkStatus();
}

void SignatureDb::ApplyLine(std::string_view line, size_t line_no) {
  line = StripAsciiWhitespace(line);
  if (line.empty()) return;
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    warnings_.push_back(Cat("journal line ", line_no, ": not a JSON object"));
    return;
  }
  std::string kind = j.value("kind", "");
  if (kind == "sample") {
    auto s = SampleRecordFromJson(j);
    if (s.ok()) {
      ApplySample(*std::move(s));
      return;
    }
    warnings_.push_back(Cat("journal line ", line_no, ": ", s.status().message()));
  } else if (kind == "image") {
    auto r = ImageRecordFromJson(j);
    if (r.ok()) {
      ApplyImage(*std::move(r));
      return;
    }
    warnings_.push_back(Cat("journal line ", line_no, ": ", r.status().message()));
  } else if (kind == "label") {
    if (j.contains("file_sha256") && j.contains("family") && j["family"].is_string()) {
      ApplySampleLabel(j["file_sha256"].get<std::string>(), j["family"].get<std::string>());
    } else if (j.contains("image_sha256") && j.contains("labeled_malicious") &&
               j["labeled_malicious"].is_boolean()) {
      ApplyImageLabel(j["image_sha256"].get<std::string>(), j["labeled_malicious"].get<bool>());
    } else {
      warnings_.push_back(Cat("journal line ", line_no, ": unusable label record"));
    }
  }
  // Unknown kinds come from newer writers; skip them.
}

void SignatureDb::ApplySample(SampleRecord sample) {
  if (sample_index_.count(sample.file_sha256)) return;
  size_t index = samples_.size();
  sample_index_[sample.file_sha256] = index;
  for (const std::string& sha : sample.image_ids) samples_by_image_[sha].insert(index);
  samples_.push_back(std::move(sample));
}

void SignatureDb::ApplyImage(ImageRecord image) {
  if (image_index_.count(image.sha256)) return;
  size_t index = images_.size();
  image_index_[image.sha256] = index;
  tree_.Insert(image.phash.bits, static_cast<uint32_t>(index));
  images_.push_back(std::move(image));
}

void SignatureDb::ApplySampleLabel(const std::string& sha, const std::string& family) {
  auto it = sample_index_.find(sha);
  if (it != sample_index_.end()) samples_[it->second].family = family;
}

void SignatureDb::ApplyImageLabel(const std::string& sha, bool malicious) {
  auto it = image_index_.find(sha);
  if (it != image_index_.end()) images_[it->second].labeled_malicious = malicious;
}

absl::Status SignatureDb::Append(const std::string& line) {
  if (!persistent_) return absl::OkStatus();
  if (!writable_) return MakeError(ErrorCode::kIoFailure, "database opened read-only");
  std::string record = line + "\n";
  LURESCAN_RETURN_IF_ERROR(WriteAll(journal_fd_, record));
  journal_offset_ += record.size();
  return absl::OkStatus();
}

absl::StatusOr<IngestResult> SignatureDb::Ingest(const SampleRecord& sample,
                                                 const std::vector<ImageRecord>& images) {
  if (sample.file_sha256.empty()) return MakeError(ErrorCode::kInvalidArgument, "sample without file_sha256");
  std::unique_lock lock(mu_);
  std::optional<HashAlgorithm> algorithm;
  if (!images_.empty()) algorithm = images_.front().phash.algorithm;
  for (const ImageRecord& img : images) {
    if (algorithm && img.phash.algorithm != *algorithm) {
      return MakeError(ErrorCode::kAlgorithmMismatch,
                       Cat("database holds ", HashAlgorithmName(*algorithm), " hashes, got ",
                           HashAlgorithmName(img.phash.algorithm)));
    }
    algorithm = img.phash.algorithm;
  }
  for (const std::string& id : sample.image_ids) {
    bool provided = std::any_of(images.begin(), images.end(), [&](const ImageRecord& r) { return r.sha256 == id; });
    if (!provided && !image_index_.count(id)) {
      return MakeError(ErrorCode::kInvalidArgument, Cat("sample references unknown image ", id));
    }
  }

  IngestResult result;
  for (const ImageRecord& img : images) {
    auto it = image_index_.find(img.sha256);
    if (it == image_index_.end()) {
      Json j = {{"kind", "image"}};
      j.update(ToJson(img));
      LURESCAN_RETURN_IF_ERROR(Append(j.dump()));
      ApplyImage(img);
      result.images_added.push_back(img.sha256);
    } else if (img.labeled_malicious && images_[it->second].labeled_malicious != img.labeled_malicious) {
      Json j = {{"kind", "label"}, {"image_sha256", img.sha256}, {"labeled_malicious", *img.labeled_malicious}};
      LURESCAN_RETURN_IF_ERROR(Append(j.dump()));
      ApplyImageLabel(img.sha256, *img.labeled_malicious);
    }
  }
  auto existing = sample_index_.find(sample.file_sha256);
  if (existing == sample_index_.end()) {
    Json j = {{"kind", "sample"}};
    j.update(ToJson(sample));
    LURESCAN_RETURN_IF_ERROR(Append(j.dump()));
    ApplySample(sample);
    result.sample_added = true;
  } else if (sample.family && samples_[existing->second].family != sample.family) {
    Json j = {{"kind", "label"}, {"file_sha256", sample.file_sha256}, {"family", *sample.family}};
    LURESCAN_RETURN_IF_ERROR(Append(j.dump()));
    ApplySampleLabel(sample.file_sha256, *sample.family);
  }
  return result;
}

absl::Status SignatureDb::LabelSample(const std::string& file_sha256, const std::string& family) {
  std::unique_lock lock(mu_);
  if (!sample_index_.count(file_sha256)) return MakeError(ErrorCode::kNotFound, Cat("no sample ", file_sha256));
  Json j = {{"kind", "label"}, {"file_sha256", file_sha256}, {"family", family}};
  LURESCAN_RETURN_IF_ERROR(Append(j.dump()));
  ApplySampleLabel(file_sha256, family);
  return absl::OkStatus();
}

absl::Status SignatureDb::LabelImage(const std::string& image_sha256, bool malicious) {
  std::unique_lock lock(mu_);
  if (!image_index_.count(image_sha256)) return MakeError(ErrorCode::kNotFound, Cat("no image ", image_sha256));
  Json j = {{"kind", "label"}, {"image_sha256", image_sha256}, {"labeled_malicious", malicious}};
  LURESCAN_RETURN_IF_ERROR(Append(j.dump()));
  ApplyImageLabel(image_sha256, malicious);
  return absl::OkStatus();
}

std::optional<SampleRecord> SignatureDb::FindSample(const std::string& file_sha256) const {
  std::shared_lock lock(mu_);
  auto it = sample_index_.find(file_sha256);
  if (it == sample_index_.end()) return std::nullopt;
  return samples_[it->second];
}

std::optional<ImageRecord> SignatureDb::FindImage(const std::string& sha256) const {
  std::shared_lock lock(mu_);
  auto it = image_index_.find(sha256);
  if (it == image_index_.end()) return std::nullopt;
  return images_[it->second];
}

std::vector<SampleRecord> SignatureDb::SamplesByFamily(const std::string& family) const {
  std::shared_lock lock(mu_);
  std::vector<SampleRecord> out;
  for (const SampleRecord& s : samples_) {
    if (s.family == family) out.push_back(s);
  }
  return out;
}

std::vector<SampleRecord> SignatureDb::Samples() const {
  std::shared_lock lock(mu_);
  return samples_;
}

std::vector<ImageRecord> SignatureDb::Images() const {
  std::shared_lock lock(mu_);
  return images_;
}

std::vector<std::string> SignatureDb::FamiliesForImage(const std::string& sha256) const {
  std::shared_lock lock(mu_);
  std::set<std::string> families;
  auto it = samples_by_image_.find(sha256);
  if (it != samples_by_image_.end()) {
    for (size_t index : it->second) {
      if (samples_[index].family) families.insert(*samples_[index].family);
    }
  }
  return {families.begin(), families.end()};
}

absl::StatusOr<std::vector<PhashMatch>> SignatureDb::FindByPhash(const PerceptualHash& query, int max_dist) const {
  if (max_dist < 0 || max_dist > 64) {
    return MakeError(ErrorCode::kInvalidArgument, Cat("max_dist ", max_dist, " outside 0..64"));
  }
  std::shared_lock lock(mu_);
  if (!images_.empty() && images_.front().phash.algorithm != query.algorithm) {
    return MakeError(ErrorCode::kAlgorithmMismatch,
                     Cat("database holds ", HashAlgorithmName(images_.front().phash.algorithm),
                         " hashes, query is ", HashAlgorithmName(query.algorithm)));
  }
  std::vector<PhashMatch> out;
  for (const BkTree::Match& m : tree_.Query(query.bits, max_dist)) out.push_back({images_[m.id], m.distance});
  std::sort(out.begin(), out.end(), [](const PhashMatch& a, const PhashMatch& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.image.sha256 < b.image.sha256;
  });
  return out;
}

DbStats SignatureDb::Stats() const {
  std::shared_lock lock(mu_);
  DbStats stats;
  stats.sample_count = samples_.size();
  stats.unique_image_count = images_.size();
  std::map<uint64_t, std::set<size_t>> samples_by_phash;
  for (const ImageRecord& img : images_) {
    std::set<size_t>& owners = samples_by_phash[img.phash.bits];
    auto it = samples_by_image_.find(img.sha256);
    if (it == samples_by_image_.end()) continue;
    owners.insert(it->second.begin(), it->second.end());
    if (it->second.size() == 1) ++stats.singleton_sha_count;
  }
  stats.unique_phash_count = samples_by_phash.size();
  for (const auto& [bits, owners] : samples_by_phash) {
    if (owners.size() == 1) ++stats.singleton_phash_count;
  }
  for (const SampleRecord& s : samples_) {
    if (s.family) {
      ++stats.per_family_counts[*s.family];
    } else {
      ++stats.unlabeled_sample_count;
    }
  }
  return stats;
}

std::optional<HashAlgorithm> SignatureDb::phash_algorithm() const {
  std::shared_lock lock(mu_);
  if (images_.empty()) return std::nullopt;
  return images_.front().phash.algorithm;
}

}  // namespace lurescan
