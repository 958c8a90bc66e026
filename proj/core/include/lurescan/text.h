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
// Character-set conversions used by the binary parsers.

#ifndef LURESCAN_TEXT_H_
#define LURESCAN_TEXT_H_

#include <string>
#include <string_view>

#include "lurescan/bytes.h"
#include "lurescan/strings.h"

namespace lurescan {

// Decodes UTF-16LE (an odd trailing byte is dropped, unpaired surrogates
// become U+FFFD) to UTF-8.
std::string Utf16LeToUtf8(ByteView utf16le);
Bytes Utf8ToUtf16Le(std::string_view utf8);

// Decodes single/multi-byte text in a Windows code page. Unknown code pages
// fall back to Latin-1 so decoding never fails.
std::string DecodeCodePage(ByteView bytes, int code_page);
std::string DecodeLatin1(ByteView bytes);

std::u32string Utf8ToUtf32(std::string_view utf8);
std::string Utf32ToUtf8(std::u32string_view text);

}  // namespace lurescan

#endif  // LURESCAN_TEXT_H_
