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
#include "lurescan/triage.h"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include "lurescan/cfbf.h"
#include "lurescan/error.h"
#include "lurescan/image_codec.h"
#include "lurescan/offcrypto.h"
#include "lurescan/ovba.h"
#include "lurescan/strings.h"
#include "lurescan/zip_archive.h"

namespace lurescan {
namespace {

// Decoded rasters stay out of DocumentAnalysis; the keyword layer needs them.
struct Analysis {
  DocumentAnalysis doc;
  std::map<std::string, Raster> rasters;  // by image sha256
};

std::optional<VbaProjectReport> ReportFromZip(const ZipArchive& archive, std::vector<std::string>& warnings) {
  std::optional<std::string> part = FindVbaProjectPart(archive);
  if (!part) return std::nullopt;
  auto bytes = archive.Read(*part);
  if (!bytes.ok()) {
    warnings.push_back(Cat(*part, ": ", bytes.status().message()));
    return std::nullopt;
  }
  auto modules = ParseProject(*bytes);
  if (!modules.ok()) {
    warnings.push_back(Cat(*part, ": ", modules.status().message()));
    return std::nullopt;
  }
  return SummarizeProject(*std::move(modules));
}

void HashImages(const ZipArchive& archive, const ScanConfig& config, Analysis& out) {
  MediaListing media = ListMedia(archive);
  for (std::string& w : media.warnings) out.doc.warnings.push_back(std::move(w));
  std::set<std::string> seen;
  for (const PartEntry& part : media.parts) {
    ScannedImage img;
    img.part_path = part.path;
    img.sha256 = Sha256Hex(part.bytes);
    ImageFormat format = SniffImageFormat(part.bytes);
    img.format = std::string(ImageFormatName(format));
    if (IsVectorFormat(format)) {
      img.unhashable_visual = true;
    } else if (auto raster = DecodeImage(part.bytes); raster.ok()) {
      ImageRecord record;
      record.sha256 = img.sha256;
      record.phash = ComputeHash(*raster, config.algorithm);
      record.width = raster->width;
      record.height = raster->height;
      record.format = img.format;
      img.record = std::move(record);
      if (seen.insert(img.sha256).second) out.doc.sample.image_ids.push_back(img.sha256);
      out.rasters.emplace(img.sha256, *std::move(raster));
    } else {
      out.doc.warnings.push_back(Cat(part.path, ": ", raster.status().message()));
    }
    out.doc.images.push_back(std::move(img));
  }
}

void AnalyzeZip(ByteView data, const ScanConfig& config, Analysis& out) {
  auto archive = ZipArchive::Open(Bytes(data.begin(), data.end()));
  if (!archive.ok()) {
    out.doc.container_error = Cat(ErrorCodeName(GetErrorCode(archive.status()).value_or(ErrorCode::kCorruptArchive)),
                                  ": ", archive.status().message());
    return;
  }
  for (const std::string& w : archive->warnings()) out.doc.warnings.push_back(w);
  std::optional<VbaProjectReport> report = ReportFromZip(*archive, out.doc.warnings);
  out.doc.sample.macro_evidence = MacroIndicators(*archive, report ? &*report : nullptr);
  HashImages(*archive, config, out);
}

void AnalyzeCfbf(ByteView data, Analysis& out) {
  auto file = CompoundFile::Open(data);
  if (!file.ok()) {
    out.doc.container_error = Cat(ErrorCodeName(GetErrorCode(file.status()).value_or(ErrorCode::kCorruptArchive)),
                                  ": ", file.status().message());
    return;
  }
  std::optional<VbaProjectReport> report;
  if (std::optional<std::string> storage = FindVbaStorage(*file)) {
    auto modules = ParseProject(*file, *storage, &out.doc.warnings);
    if (modules.ok()) {
      report = SummarizeProject(*std::move(modules));
    } else {
      out.doc.warnings.push_back(Cat(*storage, ": ", modules.status().message()));
    }
  }
  out.doc.sample.macro_evidence = MacroIndicators(*file, report ? &*report : nullptr);
}

absl::StatusOr<Analysis> Analyze(ByteView data, const std::string& source_path, const ScanConfig& config) {
  Analysis out;
  SampleRecord& sample = out.doc.sample;
  sample.file_sha256 = Sha256Hex(data);
  sample.source_path = source_path;
  sample.first_seen = UtcNowIso8601();
  sample.container_kind = DetectContainerKind(data);
  switch (sample.container_kind) {
    case ContainerKind::kOoxmlZip:
      AnalyzeZip(data, config, out);
      break;
    case ContainerKind::kCfbf:
      AnalyzeCfbf(data, out);
      break;
    case ContainerKind::kEncryptedOoxml: {
      auto decrypted = DecryptOoxml(data, config.passwords);
      if (!decrypted.ok()) {
        if (HasErrorCode(decrypted.status(), ErrorCode::kUnsupportedEncryption)) return decrypted.status();
        out.doc.container_error =
            Cat(ErrorCodeName(GetErrorCode(decrypted.status()).value_or(ErrorCode::kDecryptionFailed)), ": ",
                decrypted.status().message());
        break;
      }
      out.doc.decrypted_with = decrypted->password;
      AnalyzeZip(decrypted->plaintext, config, out);
      break;
    }
    case ContainerKind::kUnknown:
      out.doc.container_error = "UnsupportedFormat: not an OOXML package or compound file";
      break;
  }
  for (const std::string& w : sample.macro_evidence.warnings) out.doc.warnings.push_back(w);
  return out;
}

std::vector<std::string> IndicatorEvidence(const MacroEvidence& ev) {
  std::vector<std::string> out;
  if (ev.has_vba) out.push_back("macro:vba");
  if (ev.has_xlm) out.push_back("macro:xlm");
  if (ev.has_pcode_only) out.push_back("macro:pcode_only");
  if (ev.has_dde) out.push_back("macro:dde");
  for (const std::string& t : ev.triggers) out.push_back(Cat("trigger:", t));
  if (ev.silent_builder) out.push_back("builder:silent");
  return out;
}

struct HashCandidate {
  int distance = 0;
  std::optional<std::string> family;
  std::string db_sha;
  std::string image_sha;

  bool operator<(const HashCandidate& o) const {
    if (distance != o.distance) return distance < o.distance;
    // A named family outranks an unnamed one at the same distance.
    if (family.has_value() != o.family.has_value()) return family.has_value();
    if (family != o.family) return family < o.family;
    return std::tie(db_sha, image_sha) < std::tie(o.db_sha, o.image_sha);
  }
};

absl::StatusOr<std::optional<HashCandidate>> HashLayer(const DocumentAnalysis& doc, const SignatureDb& db,
                                                       int radius) {
  std::optional<HashCandidate> best;
  for (const ScannedImage& img : doc.images) {
    if (!img.record) continue;
    LURESCAN_ASSIGN_OR_RETURN(std::vector<PhashMatch> matches, db.FindByPhash(img.record->phash, radius));
    for (const PhashMatch& m : matches) {
      if (m.image.labeled_malicious != true) continue;
      std::vector<std::string> families = db.FamiliesForImage(m.image.sha256);
      HashCandidate c{m.distance, std::nullopt, m.image.sha256, img.sha256};
      if (!families.empty()) c.family = families.front();
      if (!best || c < *best) best = c;
    }
  }
  return best;
}

}  // namespace

std::string_view OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kBenign: return "Benign";
    case Outcome::kSuspicious: return "Suspicious";
    case Outcome::kMalicious: return "Malicious";
  }
  return "Benign";
}

std::string_view LayerName(Layer layer) { return layer == Layer::kHashMatch ? "HashMatch" : "KeywordMatch"; }

absl::StatusOr<DocumentAnalysis> AnalyzeDocument(ByteView data, const std::string& source_path,
                                                 const ScanConfig& config) {
  LURESCAN_ASSIGN_OR_RETURN(Analysis a, Analyze(data, source_path, config));
  return std::move(a.doc);
}

absl::StatusOr<ScanReport> ScanBytes(ByteView data, const std::string& source_path, const SignatureDb* db,
                                     const ScanConfig& config) {
  if (config.radius < 0 || config.radius > 64) {
    return MakeError(ErrorCode::kInvalidArgument, Cat("radius ", config.radius, " outside 0..64"));
  }
  LURESCAN_ASSIGN_OR_RETURN(Analysis a, Analyze(data, source_path, config));
  ScanReport report;
  report.path = source_path;
  Verdict& v = report.verdict;
  const MacroEvidence& ev = a.doc.sample.macro_evidence;

  auto classify = [&]() {
    if (config.engine == nullptr) return;
    std::map<std::string, ImageThreat> cache;
    for (ScannedImage& img : a.doc.images) {
      auto raster = a.rasters.find(img.sha256);
      if (raster == a.rasters.end()) continue;
      if (auto hit = cache.find(img.sha256); hit != cache.end()) {
        img.threat = hit->second;
        continue;
      }
      auto threat = ClassifyImage(raster->second, *config.engine, config.rules, img.sha256, config.translator);
      if (!threat.ok()) {
        a.doc.warnings.push_back(Cat(img.part_path, ": ", threat.status().message()));
        continue;
      }
      cache.emplace(img.sha256, *threat);
      img.threat = *std::move(threat);
    }
  };

  if (a.doc.container_error) {
    v.outcome = Outcome::kSuspicious;
    v.evidence.push_back(Cat("container:", *a.doc.container_error));
  } else if (!ev.any_active_content()) {
    v.outcome = Outcome::kBenign;
    if (config.analyze_benign_images) classify();
  } else {
    v.evidence = IndicatorEvidence(ev);
    std::optional<HashCandidate> match;
    if (db != nullptr) {
      LURESCAN_ASSIGN_OR_RETURN(match, HashLayer(a.doc, *db, config.radius));
    }
    if (match) {
      v.outcome = Outcome::kMalicious;
      v.layer = Layer::kHashMatch;
      v.attributed_family = match->family;
      v.evidence.push_back(Cat("hash:", match->image_sha, " matches ", match->db_sha, " distance ", match->distance,
                               match->family ? Cat(" family ", *match->family) : std::string()));
    } else {
      classify();
      for (const ScannedImage& img : a.doc.images) {
        if (!img.threat || !img.threat->is_malicious) continue;
        v.outcome = Outcome::kMalicious;
        v.layer = Layer::kKeywordMatch;
        for (const KeywordHit& h : img.threat->hits) {
          v.evidence.push_back(Cat("keyword:", h.phrase, " [", h.language, "] matched \"", h.matched_span,
                                   "\" distance ", h.edit_distance, " in ", img.sha256));
        }
      }
      if (!v.layer) {
        v.outcome = Outcome::kSuspicious;
        v.evidence.push_back(Cat("images:", a.doc.sample.image_ids.size(), " unrecognized"));
      }
    }
  }
  report.analysis = std::move(a.doc);
  return report;
}

absl::StatusOr<ScanReport> ScanFile(const std::filesystem::path& path, const SignatureDb* db,
                                    const ScanConfig& config) {
  LURESCAN_ASSIGN_OR_RETURN(Bytes data, ReadFileBytes(path));
  return ScanBytes(data, path.string(), db, config);
}

void ScanBatch(const std::vector<std::filesystem::path>& paths, const SignatureDb* db, const ScanConfig& config,
               int jobs, const ScanCallback& on_result) {
  size_t workers = static_cast<size_t>(std::clamp(jobs, 1, 256));
  workers = std::min(workers, std::max<size_t>(paths.size(), 1));
  std::atomic<size_t> next{0};
  std::mutex out_mu;
  auto work = [&] {
    for (size_t i = next++; i < paths.size(); i = next++) {
      absl::StatusOr<ScanReport> result = ScanFile(paths[i], db, config);
      std::lock_guard lock(out_mu);
      on_result(paths[i], result);
    }
  };
  if (workers == 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
}

}  // namespace lurescan
