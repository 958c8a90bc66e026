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
// Cryptographic and perceptual fingerprints of extracted images.

#ifndef LURESCAN_IMAGING_H_
#define LURESCAN_IMAGING_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "lurescan/bytes.h"
#include "lurescan/image_codec.h"

namespace lurescan {

enum class HashAlgorithm { kDctPhash, kAverageHash, kDifferenceHash };

std::string_view HashAlgorithmName(HashAlgorithm algorithm);
std::optional<HashAlgorithm> ParseHashAlgorithm(std::string_view name);

struct PerceptualHash {
  uint64_t bits = 0;
  HashAlgorithm algorithm = HashAlgorithm::kDctPhash;

  friend bool operator==(const PerceptualHash&, const PerceptualHash&) = default;
};

// Lowercase hex SHA-256.
std::string Sha256Hex(ByteView bytes);

// 16 lowercase hex digits, most significant first.
std::string HashBitsToHex(uint64_t bits);
std::optional<uint64_t> HexToHashBits(std::string_view hex);

// Grayscale plane in [0, 255] (not quantized).
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
};

// Alpha composited onto white, then BT.601 luma.
GrayImage ToGray(const Raster& raster);

// Separable triangle-filter resampling. When shrinking, the filter support
// widens with the scale factor so every source pixel contributes.
GrayImage ResizeBilinear(const GrayImage& in, int width, int height);

// 64-bit DCT hash: 32x32 gray, orthonormal 2-D DCT-II, top-left 8x8 block,
// bit k (row-major, MSB first) set iff coefficient k > median.
PerceptualHash PhashDct(const Raster& raster);
// 8x8 gray (quantized to 8 bits), bit set iff pixel > mean.
PerceptualHash AverageHash(const Raster& raster);
// 9x8 gray (quantized to 8 bits), bit set iff pixel[x] > pixel[x + 1].
PerceptualHash DifferenceHash(const Raster& raster);

PerceptualHash ComputeHash(const Raster& raster, HashAlgorithm algorithm);

inline int HammingBits(uint64_t a, uint64_t b) { return __builtin_popcountll(a ^ b); }

// Errors: AlgorithmMismatch.
absl::StatusOr<int> Hamming(const PerceptualHash& a, const PerceptualHash& b);

}  // namespace lurescan

#endif  // LURESCAN_IMAGING_H_
