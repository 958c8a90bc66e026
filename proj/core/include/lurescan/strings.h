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
// Small string helpers over std::string_view.

#ifndef LURESCAN_STRINGS_H_
#define LURESCAN_STRINGS_H_

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace lurescan {

// Concatenates the stream representations of its arguments. Byte-sized
// integers print as numbers.
template <typename... Args>
std::string Cat(const Args&... args) {
  std::ostringstream out;
  auto put = [&out](const auto& v) {
    using T = std::decay_t<decltype(v)>;
    if constexpr (std::is_same_v<T, uint8_t> || std::is_same_v<T, int8_t>) {
      out << static_cast<int>(v);
    } else {
      out << v;
    }
  };
  (put(args), ...);
  return out.str();
}

// "0x1a2b" style rendering for diagnostics.
std::string HexNumber(uint64_t value);

std::string AsciiLower(std::string_view s);
std::string AsciiUpper(std::string_view s);
bool EqualsIgnoreAsciiCase(std::string_view a, std::string_view b);
bool StartsWithIgnoreCase(std::string_view s, std::string_view prefix);
bool EndsWithIgnoreCase(std::string_view s, std::string_view suffix);
bool ContainsIgnoreCase(std::string_view s, std::string_view needle);

std::string_view StripAsciiWhitespace(std::string_view s);
std::vector<std::string_view> Split(std::string_view s, char sep);
std::string Join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace lurescan

#endif  // LURESCAN_STRINGS_H_
