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
#include "lurescan/imaging.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <openssl/evp.h>

#include "lurescan/strings.h"
#include "lurescan/error.h"

namespace lurescan {
namespace {

constexpr int kDctSize = 32;
constexpr int kBlock = 8;

// Contribution weights of source samples to each destination sample.
struct Taps {
  std::vector<int> first;
  std::vector<std::vector<double>> weights;
};

Taps ComputeTaps(int in_size, int out_size) {
  Taps taps;
  taps.first.resize(out_size);
  taps.weights.resize(out_size);
  const double scale = static_cast<double>(in_size) / out_size;
  const double filter_scale = std::max(scale, 1.0);
  const double support = filter_scale;
  for (int i = 0; i < out_size; ++i) {
    double center = (i + 0.5) * scale;
    int lo = std::max(0, static_cast<int>(center - support + 0.5));
    int hi = std::min(in_size, static_cast<int>(center + support + 0.5));
    std::vector<double>& w = taps.weights[i];
    double total = 0;
    for (int x = lo; x < hi; ++x) {
      double t = std::abs((x - center + 0.5) / filter_scale);
      double v = t < 1.0 ? 1.0 - t : 0.0;
      w.push_back(v);
      total += v;
    }
    if (total > 0) {
      for (double& v : w) v /= total;
    }
    taps.first[i] = lo;
  }
  return taps;
}

GrayImage GrayFor(const Raster& raster, int w, int h) { return ResizeBilinear(ToGray(raster), w, h); }

std::vector<int> Quantize(const GrayImage& g) {
  std::vector<int> out(g.pixels.size());
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<int>(std::clamp(std::lround(g.pixels[i]), 0L, 255L));
  }
  return out;
}

}  // namespace

std::string_view HashAlgorithmName(HashAlgorithm algorithm) {
  switch (algorithm) {
    case HashAlgorithm::kDctPhash: return "dct_phash";
    case HashAlgorithm::kAverageHash: return "ahash";
    case HashAlgorithm::kDifferenceHash: return "dhash";
  }
  return "dct_phash";
}

std::optional<HashAlgorithm> ParseHashAlgorithm(std::string_view name) {
  for (HashAlgorithm a : {HashAlgorithm::kDctPhash, HashAlgorithm::kAverageHash,
                          HashAlgorithm::kDifferenceHash}) {
    if (HashAlgorithmName(a) == name) return a;
  }
  return std::nullopt;
}

std::string Sha256Hex(ByteView bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  return HexEncode(ByteView(digest, len));
}

std::string HashBitsToHex(uint64_t bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, bits >>= 4) out[i] = kDigits[bits & 0xF];
  return out;
}

std::optional<uint64_t> HexToHashBits(std::string_view hex) {
  if (hex.size() != 16) return std::nullopt;
  uint64_t v = 0;
  for (char c : hex) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else return std::nullopt;
    v = (v << 4) | static_cast<uint64_t>(d);
  }
  return v;
}

GrayImage ToGray(const Raster& raster) {
  GrayImage g{raster.width, raster.height, {}};
  g.pixels.resize(static_cast<size_t>(raster.width) * raster.height);
  for (size_t i = 0; i < g.pixels.size(); ++i) {
    const uint8_t* p = &raster.rgba[i * 4];
    double a = p[3] / 255.0;
    double r = p[0] * a + 255.0 * (1 - a);
    double gr = p[1] * a + 255.0 * (1 - a);
    double b = p[2] * a + 255.0 * (1 - a);
    g.pixels[i] = 0.299 * r + 0.587 * gr + 0.114 * b;
  }
  return g;
}

GrayImage ResizeBilinear(const GrayImage& in, int width, int height) {
  Taps tx = ComputeTaps(in.width, width);
  Taps ty = ComputeTaps(in.height, height);
  // Horizontal pass, then vertical.
  std::vector<double> mid(static_cast<size_t>(width) * in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0;
      const auto& w = tx.weights[x];
      for (size_t k = 0; k < w.size(); ++k) acc += w[k] * in.at(tx.first[x] + static_cast<int>(k), y);
      mid[static_cast<size_t>(y) * width + x] = acc;
    }
  }
  GrayImage out{width, height, std::vector<double>(static_cast<size_t>(width) * height)};
  for (int y = 0; y < height; ++y) {
    const auto& w = ty.weights[y];
    for (int x = 0; x < width; ++x) {
      double acc = 0;
      for (size_t k = 0; k < w.size(); ++k) {
        acc += w[k] * mid[static_cast<size_t>(ty.first[y] + static_cast<int>(k)) * width + x];
      }
      out.pixels[static_cast<size_t>(y) * width + x] = acc;
    }
  }
  return out;
}

PerceptualHash PhashDct(const Raster& raster) {
  static const auto kBasis = [] {
    // Orthonormal DCT-II rows 0..7 over 32 samples.
    std::array<std::array<double, kDctSize>, kBlock> basis{};
    for (int u = 0; u < kBlock; ++u) {
      double scale = std::sqrt((u == 0 ? 1.0 : 2.0) / kDctSize);
      for (int x = 0; x < kDctSize; ++x) {
        basis[u][x] = scale * std::cos(std::numbers::pi * (2 * x + 1) * u / (2.0 * kDctSize));
      }
    }
    return basis;
  }();

  GrayImage g = GrayFor(raster, kDctSize, kDctSize);
  // Rows first: tmp[y][v] = sum_x g[y][x] * basis[v][x].
  std::array<std::array<double, kBlock>, kDctSize> tmp{};
  for (int y = 0; y < kDctSize; ++y) {
    for (int v = 0; v < kBlock; ++v) {
      double acc = 0;
      for (int x = 0; x < kDctSize; ++x) acc += g.at(x, y) * kBasis[v][x];
      tmp[y][v] = acc;
    }
  }
  std::array<double, kBlock * kBlock> coeffs{};
  for (int u = 0; u < kBlock; ++u) {
    for (int v = 0; v < kBlock; ++v) {
      double acc = 0;
      for (int y = 0; y < kDctSize; ++y) acc += tmp[y][v] * kBasis[u][y];
      // Floating-point residue of exactly-zero coefficients must not
      // decide a bit; a flat image has all AC terms equal to 0.
      coeffs[u * kBlock + v] = std::abs(acc) < 1e-6 ? 0.0 : acc;
    }
  }
  std::array<double, kBlock * kBlock> sorted = coeffs;
  std::sort(sorted.begin(), sorted.end());
  double median = (sorted[31] + sorted[32]) / 2.0;
  uint64_t bits = 0;
  for (int k = 0; k < kBlock * kBlock; ++k) {
    if (coeffs[k] > median) bits |= uint64_t{1} << (63 - k);
  }
  return {bits, HashAlgorithm::kDctPhash};
}

PerceptualHash AverageHash(const Raster& raster) {
  std::vector<int> px = Quantize(GrayFor(raster, 8, 8));
  long sum = 0;
  for (int v : px) sum += v;
  uint64_t bits = 0;
  for (int k = 0; k < 64; ++k) {
    if (static_cast<long>(px[k]) * 64 > sum) bits |= uint64_t{1} << (63 - k);
  }
  return {bits, HashAlgorithm::kAverageHash};
}

PerceptualHash DifferenceHash(const Raster& raster) {
  std::vector<int> px = Quantize(GrayFor(raster, 9, 8));
  uint64_t bits = 0;
  int k = 0;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x, ++k) {
      if (px[y * 9 + x] > px[y * 9 + x + 1]) bits |= uint64_t{1} << (63 - k);
    }
  }
  return {bits, HashAlgorithm::kDifferenceHash};
}

PerceptualHash ComputeHash(const Raster& raster, HashAlgorithm algorithm) {
  switch (algorithm) {
    case HashAlgorithm::kAverageHash: return AverageHash(raster);
    case HashAlgorithm::kDifferenceHash: return DifferenceHash(raster);
    case HashAlgorithm::kDctPhash: break;
  }
  return PhashDct(raster);
}

absl::StatusOr<int> Hamming(const PerceptualHash& a, const PerceptualHash& b) {
  if (a.algorithm != b.algorithm) {
    return MakeError(ErrorCode::kAlgorithmMismatch,
                     Cat("cannot compare ", HashAlgorithmName(a.algorithm), " with ",
                                  HashAlgorithmName(b.algorithm)));
  }
  return HammingBits(a.bits, b.bits);
}

}  // namespace lurescan
