// Copyright 2026 The ULTRA Authors.
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

#ifndef ULTRA_TEXT_HPP_
#define ULTRA_TEXT_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ultra {

inline constexpr std::string_view kNotAvailable = "N/A";

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);

// Dedup normalizer: case-fold, collapse internal whitespace, strip
// surrounding quotes and terminal punctuation.
std::string normalize_dedup(std::string_view s);

// Empty generations and anything normalizing to "n/a" count as N/A.
bool is_not_available(std::string_view s);

// Character offset of the first case-insensitive, whitespace-insensitive
// occurrence of needle in haystack (needle is dedup-normalized first).
std::optional<std::size_t> find_normalized(std::string_view haystack,
                                           std::string_view needle);

// Whitespace-word token proxy: ceil(words * 1.3).
std::size_t approx_tokens(std::string_view text);

// Longest prefix of text whose approx_tokens is within budget, cut at a
// word boundary.
std::string truncate_to_tokens(std::string_view text, std::size_t budget);

// Straight or curly quote character at pos; width receives its byte length.
bool is_quote_at(std::string_view s, std::size_t pos, std::size_t* width);

}  // namespace ultra

#endif  // ULTRA_TEXT_HPP_
