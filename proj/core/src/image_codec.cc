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
#include "lurescan/image_codec.h"

#include <cstring>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "lurescan/strings.h"
#include "lurescan/error.h"

namespace lurescan {
namespace {

bool HasPrefix(ByteView b, std::initializer_list<uint8_t> magic) {
  return b.size() >= magic.size() && std::equal(magic.begin(), magic.end(), b.begin());
}

cv::Mat ToBgra8(const cv::Mat& in) {
  cv::Mat m = in;
  if (m.depth() == CV_16U) {
    m.convertTo(m, CV_8U, 1.0 / 257.0);
  } else if (m.depth() != CV_8U) {
    m.convertTo(m, CV_8U);
  }
  cv::Mat out;
  switch (m.channels()) {
    case 1: cv::cvtColor(m, out, cv::COLOR_GRAY2BGRA); break;
    case 3: cv::cvtColor(m, out, cv::COLOR_BGR2BGRA); break;
    case 4: out = m; break;
    default: break;
  }
  return out;
}

cv::Mat RasterToBgra(const Raster& r) {
  cv::Mat rgba(r.height, r.width, CV_8UC4, const_cast<uint8_t*>(r.rgba.data()));
  cv::Mat bgra;
  cv::cvtColor(rgba, bgra, cv::COLOR_RGBA2BGRA);
  return bgra;
}

absl::StatusOr<Bytes> Encode(const std::string& ext, const cv::Mat& mat, const std::vector<int>& params) {
  std::vector<uint8_t> buf;
  try {
    if (!cv::imencode(ext, mat, buf, params)) {
      return MakeError(ErrorCode::kUnsupportedFormat, Cat("encoder ", ext, " failed"));
    }
  } catch (const cv::Exception& e) {
    return MakeError(ErrorCode::kUnsupportedFormat, e.what());
  }
  return Bytes(buf.begin(), buf.end());
}

}  // namespace

std::string_view ImageFormatName(ImageFormat format) {
  switch (format) {
    case ImageFormat::kPng: return "png";
    case ImageFormat::kJpeg: return "jpeg";
    case ImageFormat::kGif: return "gif";
    case ImageFormat::kBmp: return "bmp";
    case ImageFormat::kTiff: return "tiff";
    case ImageFormat::kEmf: return "emf";
    case ImageFormat::kWmf: return "wmf";
    case ImageFormat::kUnknown: return "unknown";
  }
  return "unknown";
}

ImageFormat SniffImageFormat(ByteView b) {
  if (HasPrefix(b, {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A})) return ImageFormat::kPng;
  if (HasPrefix(b, {0xFF, 0xD8, 0xFF})) return ImageFormat::kJpeg;
  if (HasPrefix(b, {'G', 'I', 'F', '8'})) return ImageFormat::kGif;
  if (HasPrefix(b, {'B', 'M'})) return ImageFormat::kBmp;
  if (HasPrefix(b, {'I', 'I', 0x2A, 0x00}) || HasPrefix(b, {'M', 'M', 0x00, 0x2A})) {
    return ImageFormat::kTiff;
  }
  // EMF: EMR_HEADER record type 1 with " EMF" signature at offset 40.
  if (b.size() >= 44 && LoadLe32(b, 0) == 1 && std::memcmp(b.data() + 40, " EMF", 4) == 0) {
    return ImageFormat::kEmf;
  }
  // WMF: placeable header key, or a standard header (type 1|2, size 9).
  if (HasPrefix(b, {0xD7, 0xCD, 0xC6, 0x9A})) return ImageFormat::kWmf;
  if (b.size() >= 6 && (LoadLe16(b, 0) == 1 || LoadLe16(b, 0) == 2) && LoadLe16(b, 2) == 9 &&
      (LoadLe16(b, 4) == 0x0100 || LoadLe16(b, 4) == 0x0300)) {
    return ImageFormat::kWmf;
  }
  return ImageFormat::kUnknown;
}

bool IsVectorFormat(ImageFormat format) {
  return format == ImageFormat::kEmf || format == ImageFormat::kWmf;
}

absl::StatusOr<Raster> DecodeImage(ByteView bytes) {
  ImageFormat format = SniffImageFormat(bytes);
  if (format == ImageFormat::kGif) return DecodeGif(bytes);
  if (format == ImageFormat::kUnknown || IsVectorFormat(format)) {
    return MakeError(ErrorCode::kUnsupportedFormat,
                     Cat("cannot rasterize ", ImageFormatName(format), " payload"));
  }
  cv::Mat decoded;
  try {
    cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<uint8_t*>(bytes.data()));
    decoded = cv::imdecode(buf, cv::IMREAD_UNCHANGED | cv::IMREAD_IGNORE_ORIENTATION);
  } catch (const cv::Exception& e) {
    return MakeError(ErrorCode::kUnsupportedFormat, e.what());
  }
  if (decoded.empty()) {
    return MakeError(ErrorCode::kUnsupportedFormat,
                     Cat("undecodable ", ImageFormatName(format), " payload"));
  }
  if (static_cast<uint64_t>(decoded.rows) * decoded.cols > kMaxRasterPixels) {
    return MakeError(ErrorCode::kUnsupportedFormat, "raster exceeds pixel limit");
  }
  cv::Mat bgra = ToBgra8(decoded);
  if (bgra.empty()) return MakeError(ErrorCode::kUnsupportedFormat, "unexpected channel layout");
  Raster out(bgra.cols, bgra.rows);
  cv::Mat rgba(out.height, out.width, CV_8UC4, out.rgba.data());
  cv::cvtColor(bgra, rgba, cv::COLOR_BGRA2RGBA);
  return out;
}

absl::StatusOr<Bytes> EncodePng(const Raster& raster) {
  if (!raster.valid()) return MakeError(ErrorCode::kInvalidArgument, "empty raster");
  return Encode(".png", RasterToBgra(raster), {cv::IMWRITE_PNG_COMPRESSION, 3});
}

absl::StatusOr<Bytes> EncodeJpeg(const Raster& raster, int quality) {
  if (!raster.valid()) return MakeError(ErrorCode::kInvalidArgument, "empty raster");
  // JPEG has no alpha channel; composite onto white first.
  Raster flat = raster;
  for (size_t i = 0; i < flat.rgba.size(); i += 4) {
    int a = flat.rgba[i + 3];
    for (int c = 0; c < 3; ++c) {
      flat.rgba[i + c] = static_cast<uint8_t>((flat.rgba[i + c] * a + 255 * (255 - a) + 127) / 255);
    }
    flat.rgba[i + 3] = 255;
  }
  cv::Mat bgr;
  cv::cvtColor(RasterToBgra(flat), bgr, cv::COLOR_BGRA2BGR);
  return Encode(".jpg", bgr, {cv::IMWRITE_JPEG_QUALITY, quality});
}

}  // namespace lurescan
