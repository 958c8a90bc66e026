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
// lurescan: command-line front end. Every command writes one JSON document
// (scan writes JSON lines) to standard output. Exit status is 0 on success,
// 1 on an operational error and 2 on a usage error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lurescan/correlator.h"
#include "lurescan/error.h"
#include "lurescan/image_codec.h"
#include "lurescan/imaging.h"
#include "lurescan/json_codec.h"
#include "lurescan/metrics.h"
#include "lurescan/ocr_engine.h"
#include "lurescan/sigdb.h"
#include "lurescan/strings.h"
#include "lurescan/textline.h"
#include "lurescan/triage.h"

namespace lurescan {
namespace {

constexpr int kExitError = 1;

int Fail(const absl::Status& status) {
  std::cout << ErrorJson(status).dump() << "\n";
  return kExitError;
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return absl::OkStatus();
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) return MakeError(ErrorCode::kIoFailure, Cat("cannot write ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadText(const std::string& path) {
  LURESCAN_ASSIGN_OR_RETURN(Bytes data, ReadFileBytes(path));
  return std::string(data.begin(), data.end());
}

struct OcrOptions {
  std::string command;
  std::string fixture;  // JSON object: image sha256 -> text
};

void AddOcrOptions(CLI::App* cmd, OcrOptions& opts) {
  cmd->add_option("--ocr-cmd", opts.command, "OCR command template ({} is the image path); default $MDL_OCR_CMD");
  cmd->add_option("--ocr-fixture", opts.fixture, "JSON map of image SHA-256 to canned OCR text")
      ->check(CLI::ExistingFile);
}

absl::StatusOr<std::unique_ptr<OcrEngine>> MakeEngine(const OcrOptions& opts) {
  if (!opts.fixture.empty()) {
    LURESCAN_ASSIGN_OR_RETURN(std::string text, ReadText(opts.fixture));
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      return MakeError(ErrorCode::kInvalidArgument, Cat(opts.fixture, ": expected a JSON object"));
    }
    auto engine = std::make_unique<FixtureOcrEngine>();
    for (const auto& [sha, value] : j.items()) {
      if (value.is_string()) engine->Add(sha, value.get<std::string>());
    }
    return std::unique_ptr<OcrEngine>(std::move(engine));
  }
  std::string command = opts.command.empty() ? CommandOcrEngine::CommandFromEnvironment() : opts.command;
  if (command.empty()) return std::unique_ptr<OcrEngine>();
  return std::unique_ptr<OcrEngine>(std::make_unique<CommandOcrEngine>(command));
}

absl::StatusOr<KeywordRuleSet> LoadRules(const std::string& path) {
  if (path.empty()) return KeywordRuleSet::Defaults();
  return KeywordRuleSet::Load(path);
}

// scan -----------------------------------------------------------------

struct ScanArgs {
  std::vector<std::string> paths;
  std::string db;
  std::string rules;
  OcrOptions ocr;
  int radius = 10;
  int jobs = 1;
  std::string json_out;
  std::string algorithm = "dct_phash";
};

int RunScan(const ScanArgs& args) {
  ScanConfig config;
  config.radius = args.radius;
  config.algorithm = *ParseHashAlgorithm(args.algorithm);
  auto rules = LoadRules(args.rules);
  if (!rules.ok()) return Fail(rules.status());
  config.rules = *std::move(rules);
  auto engine = MakeEngine(args.ocr);
  if (!engine.ok()) return Fail(engine.status());
  config.engine = engine->get();
  if (config.engine == nullptr) std::cerr << "lurescan: no OCR engine configured; keyword layer disabled\n";

  auto db = SignatureDb::Open(args.db, SignatureDb::Mode::kReadOnly);
  if (!db.ok()) return Fail(db.status());
  for (const std::string& w : (*db)->warnings()) std::cerr << "lurescan: " << w << "\n";
  if (auto algo = (*db)->phash_algorithm()) config.algorithm = *algo;

  std::unique_ptr<std::ofstream> file;
  std::ostream* out = &std::cout;
  if (!args.json_out.empty() && args.json_out != "-") {
    file = std::make_unique<std::ofstream>(args.json_out, std::ios::trunc);
    if (!*file) return Fail(MakeError(ErrorCode::kIoFailure, Cat("cannot write ", args.json_out)));
    out = file.get();
  }
  std::vector<std::filesystem::path> paths(args.paths.begin(), args.paths.end());
  bool any_error = false;
  ScanBatch(paths, db->get(), config, args.jobs,
            [&](const std::filesystem::path& path, const absl::StatusOr<ScanReport>& result) {
              Json line;
              if (result.ok()) {
                line = ToJson(*result);
              } else {
                any_error = true;
                line = ErrorJson(result.status());
                line["path"] = path.string();
              }
              *out << line.dump() << "\n";
              out->flush();
            });
  return any_error ? kExitError : 0;
}

// ingest ---------------------------------------------------------------

struct IngestArgs {
  std::vector<std::string> paths;
  std::string db;
  std::string family;
  std::string first_seen;
  std::string algorithm = "dct_phash";
};

int RunIngest(const IngestArgs& args) {
  auto db = SignatureDb::Open(args.db, SignatureDb::Mode::kReadWrite);
  if (!db.ok()) return Fail(db.status());
  ScanConfig config;
  config.algorithm = *ParseHashAlgorithm(args.algorithm);
  if (auto algo = (*db)->phash_algorithm()) config.algorithm = *algo;
  Json ingested = Json::array();
  for (const std::string& path : args.paths) {
    auto data = ReadFileBytes(path);
    if (!data.ok()) return Fail(data.status());
    auto analysis = AnalyzeDocument(*data, path, config);
    if (!analysis.ok()) return Fail(analysis.status());
    SampleRecord sample = analysis->sample;
    if (!args.family.empty()) sample.family = args.family;
    if (!args.first_seen.empty()) sample.first_seen = args.first_seen;
    std::vector<ImageRecord> images;
    for (const ScannedImage& img : analysis->images) {
      if (!img.record) continue;
      ImageRecord record = *img.record;
      // Images from a family-labeled sample become malicious signatures.
      if (!args.family.empty()) record.labeled_malicious = true;
      images.push_back(std::move(record));
    }
    auto result = (*db)->Ingest(sample, images);
    if (!result.ok()) return Fail(result.status());
    Json entry = {{"path", path},
                  {"file_sha256", sample.file_sha256},
                  {"container_kind", ContainerKindName(sample.container_kind)},
                  {"sample_added", result->sample_added},
                  {"images_added", result->images_added},
                  {"warnings", analysis->warnings}};
    if (analysis->container_error) entry["container_error"] = *analysis->container_error;
    ingested.push_back(std::move(entry));
  }
  Json out = {{"ingested", ingested}, {"stats", ToJson((*db)->Stats())}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

// correlate ------------------------------------------------------------

struct CorrelateArgs {
  std::string db;
  std::string by = "sha256";
  int radius = 0;
  std::string out;
  std::string format = "json";
  std::string report = "matrix";
  std::string matrix = "weighted";
};

int RunCorrelate(const CorrelateArgs& args) {
  auto db = SignatureDb::Open(args.db, SignatureDb::Mode::kReadOnly);
  if (!db.ok()) return Fail(db.status());
  KeySpec key = args.by == "sha256" ? KeySpec::Sha256()
                : args.radius == 0  ? KeySpec::PhashExact()
                                    : KeySpec::PhashRadius(args.radius);
  ReportFormat format = args.format == "csv" ? ReportFormat::kCsv : ReportFormat::kJson;
  std::vector<CorpusSample> corpus = BuildCorpus(**db, key);
  std::string text;
  if (args.report == "distribution") {
    text = EmitDistribution(FrequencyDistribution(corpus), key, format);
  } else {
    MatrixChoice choice = args.matrix == "unique" ? MatrixChoice::kUniqueShared : MatrixChoice::kWeighted;
    text = EmitMatrix(BuildCooccurrence(corpus, key), format, choice);
  }
  if (absl::Status s = WriteText(args.out, text); !s.ok()) return Fail(s);
  return 0;
}

// classify-image -------------------------------------------------------

struct ClassifyArgs {
  std::string image;
  std::string rules;
  OcrOptions ocr;
};

int RunClassify(const ClassifyArgs& args) {
  auto rules = LoadRules(args.rules);
  if (!rules.ok()) return Fail(rules.status());
  auto engine = MakeEngine(args.ocr);
  if (!engine.ok()) return Fail(engine.status());
  if (*engine == nullptr) {
    return Fail(MakeError(ErrorCode::kEngineUnavailable,
                          Cat("no OCR engine: pass --ocr-cmd or set ", kOcrCommandEnv)));
  }
  auto bytes = ReadFileBytes(args.image);
  if (!bytes.ok()) return Fail(bytes.status());
  auto raster = DecodeImage(*bytes);
  if (!raster.ok()) return Fail(raster.status());
  auto threat = ClassifyImage(*raster, **engine, *rules, Sha256Hex(*bytes));
  if (!threat.ok()) return Fail(threat.status());
  std::cout << ToJson(*threat).dump(2) << "\n";
  return 0;
}

// stats / evaluate -----------------------------------------------------

int RunStats(const std::string& db_path) {
  auto db = SignatureDb::Open(db_path, SignatureDb::Mode::kReadOnly);
  if (!db.ok()) return Fail(db.status());
  Json out = ToJson((*db)->Stats());
  if (!(*db)->warnings().empty()) out["warnings"] = (*db)->warnings();
  std::cout << out.dump(2) << "\n";
  return 0;
}

int RunEvaluate(const std::string& pred_path, const std::string& truth_path) {
  auto pred_text = ReadText(pred_path);
  if (!pred_text.ok()) return Fail(pred_text.status());
  auto truth_text = ReadText(truth_path);
  if (!truth_text.ok()) return Fail(truth_text.status());
  auto pred = ParseLabels(*pred_text);
  if (!pred.ok()) return Fail(pred.status());
  auto truth = ParseLabels(*truth_text);
  if (!truth.ok()) return Fail(truth.status());
  auto metrics = Evaluate(*pred, *truth);
  if (!metrics.ok()) return Fail(metrics.status());
  std::cout << ToJson(*metrics).dump(2) << "\n";
  return 0;
}

}  // namespace
}  // namespace lurescan

int main(int argc, char** argv) {
  using namespace lurescan;
  CLI::App app{"Static triage for weaponized Office documents", "lurescan"};
  app.require_subcommand(1);
  const std::vector<std::string> algorithms = {"dct_phash", "ahash", "dhash"};

  ScanArgs scan;
  CLI::App* scan_cmd = app.add_subcommand("scan", "Run the two-layer filter over documents");
  scan_cmd->add_option("paths", scan.paths, "Documents to scan")->required()->check(CLI::ExistingFile);
  scan_cmd->add_option("--db", scan.db, "Signature database")->required();
  scan_cmd->add_option("--rules", scan.rules, "Keyword rule set (JSON)")->check(CLI::ExistingFile);
  AddOcrOptions(scan_cmd, scan.ocr);
  scan_cmd->add_option("--radius", scan.radius, "Hash-match Hamming radius")->check(CLI::Range(0, 64));
  scan_cmd->add_option("--jobs", scan.jobs, "Parallel scans")->check(CLI::Range(1, 256));
  scan_cmd->add_option("--json", scan.json_out, "Write JSON lines here instead of stdout");
  scan_cmd->add_option("--hash", scan.algorithm, "Hash algorithm for an empty database")
      ->check(CLI::IsMember(algorithms));

  IngestArgs ingest;
  CLI::App* ingest_cmd = app.add_subcommand("ingest", "Add documents and their images to the database");
  ingest_cmd->add_option("paths", ingest.paths, "Documents to ingest")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--db", ingest.db, "Signature database")->required();
  ingest_cmd->add_option("--family", ingest.family, "Malware family label (marks images malicious)");
  ingest_cmd->add_option("--first-seen", ingest.first_seen, "ISO-8601 UTC timestamp to record");
  ingest_cmd->add_option("--hash", ingest.algorithm, "Hash algorithm for a new database")
      ->check(CLI::IsMember(algorithms));

  CorrelateArgs corr;
  CLI::App* corr_cmd = app.add_subcommand("correlate", "Cross-family image reuse reports");
  corr_cmd->add_option("--db", corr.db, "Signature database")->required();
  corr_cmd->add_option("--by", corr.by, "Grouping key")->check(CLI::IsMember({"sha256", "phash"}));
  corr_cmd->add_option("--radius", corr.radius, "Perceptual-hash clustering radius")->check(CLI::Range(0, 64));
  corr_cmd->add_option("--out", corr.out, "Output file (default stdout)");
  corr_cmd->add_option("--format", corr.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  corr_cmd->add_option("--report", corr.report, "Report kind")->check(CLI::IsMember({"matrix", "distribution"}));
  corr_cmd->add_option("--matrix", corr.matrix, "Matrix written to CSV")
      ->check(CLI::IsMember({"unique", "weighted"}));

  ClassifyArgs classify;
  CLI::App* classify_cmd = app.add_subcommand("classify-image", "OCR an image and match lure keywords");
  classify_cmd->add_option("image", classify.image, "Image file")->required()->check(CLI::ExistingFile);
  classify_cmd->add_option("--rules", classify.rules, "Keyword rule set (JSON)")->check(CLI::ExistingFile);
  AddOcrOptions(classify_cmd, classify.ocr);

  std::string stats_db;
  CLI::App* stats_cmd = app.add_subcommand("stats", "Database summary");
  stats_cmd->add_option("--db", stats_db, "Signature database")->required();

  std::string pred, truth;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Confusion metrics for predictions against labels");
  eval_cmd->add_option("--pred", pred, "Predictions file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--truth", truth, "Ground-truth file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*scan_cmd) return RunScan(scan);
  if (*ingest_cmd) return RunIngest(ingest);
  if (*corr_cmd) return RunCorrelate(corr);
  if (*classify_cmd) return RunClassify(classify);
  if (*stats_cmd) return RunStats(stats_db);
  if (*eval_cmd) return RunEvaluate(pred, truth);
  return 2;
}
