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
#include <sys/wait.h>

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lurescan/imaging.h"
#include "lurescan/ocr_engine.h"
#include "support/test_support.h"

namespace lurescan {
namespace {

using testing::DataPath;
using testing::TempDir;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult RunCli(const std::string& args) {
  std::string cmd = ShellQuote(LURESCAN_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Data(std::string_view name) { return ShellQuote(DataPath(name).string()); }

std::vector<Json> JsonLines(const std::string& text) {
  std::vector<Json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(Json::parse(line));
  }
  return out;
}

TEST(CliTest, IngestThenStats) {
  TempDir dir;
  std::string db = ShellQuote((dir / "db.jsonl").string());
  RunResult ingest = RunCli("ingest --db " + db + " --family Emotet --first-seen 2021-03-01T12:00:00Z " +
                         Data("lure.xlsm") + " " + Data("logo.xlsm") + " " + Data("two_media.xlsx"));
  ASSERT_EQ(ingest.exit_code, 0) << ingest.out;
  Json doc = Json::parse(ingest.out);
  EXPECT_EQ(doc["ingested"].size(), 3u);
  EXPECT_EQ(doc["stats"]["sample_count"], 3);

  RunResult stats = RunCli("stats --db " + db);
  ASSERT_EQ(stats.exit_code, 0);
  EXPECT_EQ(Json::parse(stats.out)["sample_count"], 3);

  // Re-ingest is a no-op.
  RunCli("ingest --db " + db + " " + Data("lure.xlsm"));
  EXPECT_EQ(Json::parse(RunCli("stats --db " + db).out)["sample_count"], 3);
}

TEST(CliTest, ScanAfterIngest) {
  TempDir dir;
  std::string db = ShellQuote((dir / "db.jsonl").string());
  ASSERT_EQ(RunCli("ingest --db " + db + " --family Qbot " + Data("logo.xlsm")).exit_code, 0);
  RunResult scan = RunCli("scan --db " + db + " " + Data("logo.xlsm") + " " + Data("plain.docx"));
  ASSERT_EQ(scan.exit_code, 0) << scan.out;
  auto lines = JsonLines(scan.out);
  ASSERT_EQ(lines.size(), 2u);
  std::map<std::string, Json> by_name;
  for (const Json& j : lines) by_name[std::filesystem::path(j["path"].get<std::string>()).filename()] = j;
  EXPECT_EQ(by_name["logo.xlsm"]["verdict"]["outcome"], "Malicious");
  EXPECT_EQ(by_name["logo.xlsm"]["verdict"]["layer"], "HashMatch");
  EXPECT_EQ(by_name["logo.xlsm"]["verdict"]["attributed_family"], "Qbot");
  EXPECT_EQ(by_name["plain.docx"]["verdict"]["outcome"], "Benign");
}

TEST(CliTest, ScanWithFixtureOcr) {
  TempDir dir;
  std::string db = ShellQuote((dir / "db.jsonl").string());
  ASSERT_EQ(RunCli("ingest --db " + db + " " + Data("plain.docx")).exit_code, 0);
  Json fixture = {{Sha256Hex(testing::ReadData("lure.png")), "Enable Content"}};
  testing::WriteFile(dir / "ocr.json", fixture.dump());
  std::string json_out = (dir / "out.jsonl").string();
  RunResult scan = RunCli("scan --db " + db + " --ocr-fixture " + ShellQuote((dir / "ocr.json").string()) +
                       " --json " + ShellQuote(json_out) + " " + Data("lure.xlsm"));
  ASSERT_EQ(scan.exit_code, 0);
  std::ifstream in(json_out);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto lines = JsonLines(text);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0]["verdict"]["layer"], "KeywordMatch");
}

TEST(CliTest, ErrorsAndUsage) {
  EXPECT_EQ(RunCli("").exit_code, 2);
  EXPECT_EQ(RunCli("scan").exit_code, 2);
  EXPECT_EQ(RunCli("scan --db x --radius 99 " + Data("lure.xlsm")).exit_code, 2);
  EXPECT_EQ(RunCli("frobnicate").exit_code, 2);

  TempDir dir;
  std::string db = ShellQuote((dir / "db.jsonl").string());
  RunResult missing_db = RunCli("stats --db " + db);
  EXPECT_EQ(missing_db.exit_code, 1);
  EXPECT_EQ(Json::parse(missing_db.out)["error"]["code"], "IoFailure");

  ASSERT_EQ(RunCli("ingest --db " + db + " " + Data("plain.docx")).exit_code, 0);
  RunResult agile = RunCli("scan --db " + db + " " + Data("encrypted_agile.xlsx"));
  EXPECT_EQ(agile.exit_code, 1);
  auto lines = JsonLines(agile.out);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0]["error"]["code"], "UnsupportedEncryption");
}

TEST(CliTest, Evaluate) {
  TempDir dir;
  testing::WriteFile(dir / "pred.csv", "id,label\na,1\nb,1\nc,0\nd,0\n");
  testing::WriteFile(dir / "truth.json", R"([{"id":"a","malicious":true},{"id":"b","malicious":false},
                                            {"id":"c","malicious":true},{"id":"d","malicious":false}])");
  RunResult r = RunCli("evaluate --pred " + ShellQuote((dir / "pred.csv").string()) + " --truth " +
                    ShellQuote((dir / "truth.json").string()));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  Json m = Json::parse(r.out);
  EXPECT_EQ(m["tp"], 1);
  EXPECT_EQ(m["fp"], 1);
  EXPECT_EQ(m["fn"], 1);
  EXPECT_EQ(m["tn"], 1);
  EXPECT_DOUBLE_EQ(m["precision"].get<double>(), 0.5);

  testing::WriteFile(dir / "short.csv", "a,1\n");
  EXPECT_EQ(RunCli("evaluate --pred " + ShellQuote((dir / "short.csv").string()) + " --truth " +
                ShellQuote((dir / "truth.json").string()))
                .exit_code,
            1);
}

TEST(CliTest, CorrelateCsv) {
  TempDir dir;
  std::string db = ShellQuote((dir / "db.jsonl").string());
  ASSERT_EQ(RunCli("ingest --db " + db + " --family Emotet " + Data("two_media.xlsx")).exit_code, 0);
  ASSERT_EQ(RunCli("ingest --db " + db + " --family Dridex " + Data("one_media.docx")).exit_code, 0);
  RunResult r = RunCli("correlate --db " + db + " --by sha256 --format csv");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, "family,Dridex,Emotet\nDridex,0,2\nEmotet,2,0\n");
  RunResult u = RunCli("correlate --db " + db + " --by sha256 --format csv --matrix unique");
  EXPECT_EQ(u.out, "family,Dridex,Emotet\nDridex,0,1\nEmotet,1,0\n");
  RunResult j = RunCli("correlate --db " + db + " --by phash --radius 2");
  ASSERT_EQ(j.exit_code, 0);
  EXPECT_EQ(Json::parse(j.out)["key_kind"], "phash_radius(2)");
  RunResult d = RunCli("correlate --db " + db + " --report distribution --format csv");
  EXPECT_EQ(d.out.rfind("key,count\n", 0), 0u);
}

TEST(CliTest, ClassifyImage) {
  TempDir dir;
  Json fixture = {{Sha256Hex(testing::ReadData("lure.png")), "Click ENABLE CONTENT above"}};
  testing::WriteFile(dir / "ocr.json", fixture.dump());
  RunResult r = RunCli("classify-image --ocr-fixture " + ShellQuote((dir / "ocr.json").string()) + " " +
                    Data("lure.png"));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  EXPECT_TRUE(Json::parse(r.out)["is_malicious"].get<bool>());
  RunResult blank = RunCli("classify-image --ocr-fixture " + ShellQuote((dir / "ocr.json").string()) + " " +
                        Data("logo.png"));
  EXPECT_FALSE(Json::parse(blank.out)["is_malicious"].get<bool>());
}

}  // namespace
}  // namespace lurescan
