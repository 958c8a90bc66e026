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
// GIF87a/89a decoding of the first image frame: LZW with variable code
// width, interlaced row order, and graphic-control transparency.

#include <array>
#include <optional>

#include "lurescan/strings.h"
#include "lurescan/error.h"
#include "lurescan/image_codec.h"

namespace lurescan {
namespace {

constexpr int kMaxCodeBits = 12;

using Palette = std::vector<std::array<uint8_t, 3>>;

absl::Status Corrupt(std::string_view what) {
  return MakeError(ErrorCode::kUnsupportedFormat, Cat("gif: ", what));
}

bool ReadPalette(ByteReader& r, int entries, Palette* out) {
  ByteView raw;
  if (!r.ReadSpan(static_cast<size_t>(entries) * 3, &raw)) return false;
  out->resize(entries);
  for (int i = 0; i < entries; ++i) (*out)[i] = {raw[i * 3], raw[i * 3 + 1], raw[i * 3 + 2]};
  return true;
}

// Concatenates data sub-blocks up to the zero-length terminator.
bool ReadSubBlocks(ByteReader& r, Bytes* out) {
  for (;;) {
    uint8_t len;
    if (!r.ReadU8(&len)) return false;
    if (len == 0) return true;
    ByteView block;
    if (!r.ReadSpan(len, &block)) return false;
    if (out) out->insert(out->end(), block.begin(), block.end());
  }
}

// Decodes up to `pixel_count` palette indices. Truncated streams leave the
// remainder at index 0, matching lenient browser behaviour.
absl::StatusOr<Bytes> LzwDecode(ByteView data, int min_code_size, size_t pixel_count) {
  if (min_code_size < 2 || min_code_size > 8) return Corrupt("bad LZW minimum code size");
  const int clear = 1 << min_code_size;
  const int end = clear + 1;

  std::vector<uint16_t> prefix(1 << kMaxCodeBits);
  std::vector<uint8_t> suffix(1 << kMaxCodeBits);
  std::vector<uint8_t> stack;
  stack.reserve(1 << kMaxCodeBits);
  for (int i = 0; i < clear; ++i) suffix[i] = static_cast<uint8_t>(i);

  Bytes out;
  out.reserve(pixel_count);
  int code_size = min_code_size + 1;
  int next = end + 1;
  int prev = -1;
  uint8_t first = 0;
  uint32_t bits = 0;
  int nbits = 0;
  size_t pos = 0;

  while (out.size() < pixel_count) {
    while (nbits < code_size && pos < data.size()) {
      bits |= static_cast<uint32_t>(data[pos++]) << nbits;
      nbits += 8;
    }
    if (nbits < code_size) break;
    int code = static_cast<int>(bits & ((1u << code_size) - 1));
    bits >>= code_size;
    nbits -= code_size;

    if (code == clear) {
      code_size = min_code_size + 1;
      next = end + 1;
      prev = -1;
      continue;
    }
    if (code == end) break;
    if (prev == -1) {
      if (code >= clear) return Corrupt("first code after clear is not a literal");
      out.push_back(static_cast<uint8_t>(code));
      first = static_cast<uint8_t>(code);
      prev = code;
      continue;
    }
    int cur = code;
    stack.clear();
    if (code >= next) {
      if (code > next) return Corrupt("LZW code out of range");
      stack.push_back(first);  // KwKwK case
      cur = prev;
    }
    while (cur >= clear) {
      stack.push_back(suffix[cur]);
      cur = prefix[cur];
    }
    stack.push_back(static_cast<uint8_t>(cur));
    first = static_cast<uint8_t>(cur);
    for (auto it = stack.rbegin(); it != stack.rend() && out.size() < pixel_count; ++it) out.push_back(*it);

    if (next < (1 << kMaxCodeBits)) {
      prefix[next] = static_cast<uint16_t>(prev);
      suffix[next] = first;
      ++next;
      if (next == (1 << code_size) && code_size < kMaxCodeBits) ++code_size;
    }
    prev = code;
  }
  out.resize(pixel_count, 0);
  return out;
}

// Destination rows for interlaced storage order (passes 8/8/4/2).
std::vector<int> InterlacedRows(int height) {
  std::vector<int> rows;
  rows.reserve(height);
  constexpr int kStart[] = {0, 4, 2, 1};
  constexpr int kStep[] = {8, 8, 4, 2};
  for (int pass = 0; pass < 4; ++pass) {
    for (int y = kStart[pass]; y < height; y += kStep[pass]) rows.push_back(y);
  }
  return rows;
}

}  // namespace

absl::StatusOr<Raster> DecodeGif(ByteView bytes) {
  ByteReader r(bytes);
  ByteView signature;
  if (!r.ReadSpan(6, &signature)) return Corrupt("truncated header");
  std::string_view sig = AsChars(signature);
  if (sig != "GIF87a" && sig != "GIF89a") return Corrupt("bad signature");

  uint16_t screen_w, screen_h;
  uint8_t packed, background, aspect;
  if (!r.ReadU16(&screen_w) || !r.ReadU16(&screen_h) || !r.ReadU8(&packed) ||
      !r.ReadU8(&background) || !r.ReadU8(&aspect)) {
    return Corrupt("truncated screen descriptor");
  }
  Palette global;
  if (packed & 0x80) {
    if (!ReadPalette(r, 2 << (packed & 0x07), &global)) return Corrupt("truncated global palette");
  }

  std::optional<int> transparent;
  for (;;) {
    uint8_t introducer;
    if (!r.ReadU8(&introducer)) return Corrupt("no image descriptor");
    if (introducer == 0x3B) return Corrupt("no image frame");
    if (introducer == 0x21) {
      uint8_t label;
      if (!r.ReadU8(&label)) return Corrupt("truncated extension");
      if (label == 0xF9) {
        Bytes gce;
        if (!ReadSubBlocks(r, &gce)) return Corrupt("truncated graphic control");
        if (gce.size() >= 4 && (gce[0] & 0x01)) transparent = gce[3];
      } else if (!ReadSubBlocks(r, nullptr)) {
        return Corrupt("truncated extension");
      }
      continue;
    }
    if (introducer != 0x2C) return Corrupt(Cat("unexpected block 0x", HexNumber(introducer)));

    uint16_t left, top, w, h;
    uint8_t flags;
    if (!r.ReadU16(&left) || !r.ReadU16(&top) || !r.ReadU16(&w) || !r.ReadU16(&h) || !r.ReadU8(&flags)) {
      return Corrupt("truncated image descriptor");
    }
    Palette local;
    if (flags & 0x80) {
      if (!ReadPalette(r, 2 << (flags & 0x07), &local)) return Corrupt("truncated local palette");
    }
    const Palette& palette = local.empty() ? global : local;
    if (palette.empty()) return Corrupt("no color table");
    uint8_t min_code_size;
    Bytes lzw;
    if (!r.ReadU8(&min_code_size) || !ReadSubBlocks(r, &lzw)) return Corrupt("truncated image data");

    int canvas_w = screen_w > 0 ? screen_w : w;
    int canvas_h = screen_h > 0 ? screen_h : h;
    if (canvas_w < 1 || canvas_h < 1 || w < 1 || h < 1) return Corrupt("zero-sized image");
    if (static_cast<uint64_t>(canvas_w) * canvas_h > kMaxRasterPixels) return Corrupt("too large");

    LURESCAN_ASSIGN_OR_RETURN(Bytes indices, LzwDecode(lzw, min_code_size, size_t{w} * h));
    std::vector<int> rows(h);
    if (flags & 0x40) {
      rows = InterlacedRows(h);
    } else {
      for (int y = 0; y < h; ++y) rows[y] = y;
    }

    Raster out(canvas_w, canvas_h);  // transparent black outside the frame
    for (int sy = 0; sy < h; ++sy) {
      int y = top + rows[sy];
      if (y >= canvas_h) continue;
      for (int x = 0; x < w; ++x) {
        int dx = left + x;
        if (dx >= canvas_w) continue;
        uint8_t index = indices[static_cast<size_t>(sy) * w + x];
        uint8_t* px = out.at(dx, y);
        if (index < palette.size()) {
          px[0] = palette[index][0];
          px[1] = palette[index][1];
          px[2] = palette[index][2];
        }
        px[3] = (transparent && *transparent == index) ? 0 : 255;
      }
    }
    return out;
  }
}

}  // namespace lurescan
