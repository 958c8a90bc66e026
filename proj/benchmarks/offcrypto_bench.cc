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
#include <benchmark/benchmark.h>

#include "lurescan/bytes.h"
#include "lurescan/offcrypto.h"

namespace lurescan {
namespace {

void BM_DeriveKey(benchmark::State& state) {
  Bytes salt(16, 0x5a);
  for (auto _ : state) benchmark::DoNotOptimize(DeriveKey(kVelvetSweatshop, salt, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_DeriveKey)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_DecryptFixture(benchmark::State& state) {
  auto data = ReadFileBytes(std::string(LURESCAN_TEST_DATA_DIR) + "/encrypted_lure.xlsm");
  if (!data.ok()) {
    state.SkipWithError("fixture missing");
    return;
  }
  for (auto _ : state) benchmark::DoNotOptimize(DecryptOoxml(*data));
}
BENCHMARK(BM_DecryptFixture)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace lurescan
