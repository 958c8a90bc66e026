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
#include "lurescan/text.h"

#include <unicode/ucnv.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <memory>

#include "lurescan/strings.h"

namespace lurescan {

std::string Utf16LeToUtf8(ByteView utf16le) {
  icu::UnicodeString u;
  for (size_t i = 0; i + 1 < utf16le.size(); i += 2) {
    u.append(static_cast<char16_t>(LoadLe16(utf16le, i)));
  }
  std::string out;
  u.toUTF8String(out);
  return out;
}

Bytes Utf8ToUtf16Le(std::string_view utf8) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  Bytes out;
  out.reserve(static_cast<size_t>(u.length()) * 2);
  for (int32_t i = 0; i < u.length(); ++i) {
    char16_t c = u.charAt(i);
    out.push_back(static_cast<uint8_t>(c & 0xFF));
    out.push_back(static_cast<uint8_t>(c >> 8));
  }
  return out;
}

std::string DecodeLatin1(ByteView bytes) {
  std::string out;
  out.reserve(bytes.size());
  for (uint8_t b : bytes) {
    if (b < 0x80) {
      out.push_back(static_cast<char>(b));
    } else {
      out.push_back(static_cast<char>(0xC0 | (b >> 6)));
      out.push_back(static_cast<char>(0x80 | (b & 0x3F)));
    }
  }
  return out;
}

std::string DecodeCodePage(ByteView bytes, int code_page) {
  if (code_page == 65001) {
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(
        icu::StringPiece(reinterpret_cast<const char*>(bytes.data()),
                         static_cast<int32_t>(bytes.size())));
    std::string out;
    u.toUTF8String(out);
    return out;
  }
  if (code_page <= 0 || code_page == 28591) return DecodeLatin1(bytes);

  UErrorCode err = U_ZERO_ERROR;
  std::string name = Cat("windows-", code_page);
  UConverter* conv = ucnv_open(name.c_str(), &err);
  if (U_FAILURE(err)) {
    err = U_ZERO_ERROR;
    name = Cat("cp", code_page);
    conv = ucnv_open(name.c_str(), &err);
  }
  if (U_FAILURE(err) || conv == nullptr) return DecodeLatin1(bytes);
  std::unique_ptr<UConverter, void (*)(UConverter*)> guard(conv, ucnv_close);

  icu::UnicodeString u(reinterpret_cast<const char*>(bytes.data()),
                       static_cast<int32_t>(bytes.size()), conv, err);
  if (U_FAILURE(err)) return DecodeLatin1(bytes);
  std::string out;
  u.toUTF8String(out);
  return out;
}

std::u32string Utf8ToUtf32(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  int32_t length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
  }
  return out;
}

std::string Utf32ToUtf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    uint8_t buf[4];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, 4, static_cast<UChar32>(c), error);
    if (error) {
      out += "\xEF\xBF\xBD";
    } else {
      out.append(reinterpret_cast<const char*>(buf), static_cast<size_t>(n));
    }
  }
  return out;
}


}  // namespace lurescan
