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
// Raster decoding and lossless/lossy encoding of extracted media parts.

#ifndef LURESCAN_IMAGE_CODEC_H_
#define LURESCAN_IMAGE_CODEC_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "lurescan/bytes.h"

namespace lurescan {

// Row-major RGBA, 8 bits per channel.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgba;

  Raster() = default;
  Raster(int w, int h) : width(w), height(h), rgba(static_cast<size_t>(w) * h * 4, 0) {}

  uint8_t* at(int x, int y) { return &rgba[(static_cast<size_t>(y) * width + x) * 4]; }
  const uint8_t* at(int x, int y) const { return &rgba[(static_cast<size_t>(y) * width + x) * 4]; }
  bool valid() const {
    return width >= 1 && height >= 1 && rgba.size() == static_cast<size_t>(width) * height * 4;
  }
};

enum class ImageFormat { kPng, kJpeg, kGif, kBmp, kTiff, kEmf, kWmf, kUnknown };

std::string_view ImageFormatName(ImageFormat format);
ImageFormat SniffImageFormat(ByteView bytes);
// EMF/WMF: catalogued by SHA-256 only, never rasterized.
bool IsVectorFormat(ImageFormat format);

// Largest raster accepted from a media part (pixels).
inline constexpr uint64_t kMaxRasterPixels = uint64_t{64} << 20;

// Decodes PNG, JPEG, GIF (first frame), BMP and TIFF. Vector formats and
// unrecognized payloads fail with UnsupportedFormat.
absl::StatusOr<Raster> DecodeImage(ByteView bytes);

// Hand-written GIF decoder (first frame composited onto the logical screen).
absl::StatusOr<Raster> DecodeGif(ByteView bytes);

absl::StatusOr<Bytes> EncodePng(const Raster& raster);
absl::StatusOr<Bytes> EncodeJpeg(const Raster& raster, int quality);

}  // namespace lurescan

#endif  // LURESCAN_IMAGE_CODEC_H_
