// Copyright 2026 The weld Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>

namespace weld::unicode {

// Thin wrappers over ICU character properties. Invalid UTF-8 sequences decode
// to U+FFFD.
bool is_punctuation(char32_t cp) noexcept;
bool is_space(char32_t cp) noexcept;
char32_t to_lower(char32_t cp) noexcept;

void append_utf8(std::string& out, char32_t cp);

template <typename Fn>
void for_each_code_point(std::string_view text, Fn&& fn);

char32_t decode_at(std::string_view text, std::size_t& offset) noexcept;

template <typename Fn>
void for_each_code_point(std::string_view text, Fn&& fn) {
  std::size_t offset = 0;
  while (offset < text.size()) fn(decode_at(text, offset));
}

}  // namespace weld::unicode
