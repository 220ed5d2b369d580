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

#ifndef ULTRA_CHUNKER_HPP_
#define ULTRA_CHUNKER_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "ultra/corpus.hpp"

namespace ultra {

inline constexpr std::size_t kBaseWindow = 5;
inline constexpr std::size_t kLongWindow = 15;

// A run of consecutive sentences; start and end are inclusive.
struct Window {
  std::string doc_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;
  std::size_t char_base = 0;

  std::size_t size() const { return end - start + 1; }
  bool operator==(const Window&) const = default;
};

// Overlapping k-sentence windows with step floor(k/2). Starts are 0, s,
// 2s, ... and generation stops at the first window that reaches the last
// sentence, so the final window may be shorter than k.
std::vector<Window> split_windows(const Document& doc, std::size_t k);

// Window count without materializing the text.
std::size_t window_count(std::size_t sentences, std::size_t k);

}  // namespace ultra

#endif  // ULTRA_CHUNKER_HPP_
