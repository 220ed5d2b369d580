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

#include "ultra/chunker.hpp"

#include <algorithm>

#include "ultra/errors.hpp"

namespace ultra {

std::size_t window_count(std::size_t sentences, std::size_t k) {
  if (k < 2) fail(ErrorKind::kValidation, "window size k must be >= 2");
  if (sentences == 0) return 0;
  const std::size_t step = k / 2;
  std::size_t count = 0;
  for (std::size_t start = 0;; start += step) {
    ++count;
    if (start + k >= sentences) break;
  }
  return count;
}

std::vector<Window> split_windows(const Document& doc, std::size_t k) {
  if (k < 2) fail(ErrorKind::kValidation, "window size k must be >= 2");
  const std::size_t n = doc.sentences.size();
  if (n == 0) fail(ErrorKind::kValidation, "document '" + doc.id + "' has no sentences");

  const auto offsets = doc.sentence_offsets();
  const std::size_t step = k / 2;
  std::vector<Window> windows;
  for (std::size_t start = 0;; start += step) {
    Window w;
    w.doc_id = doc.id;
    w.start = start;
    w.end = std::min(start + k, n) - 1;
    w.char_base = offsets[start];
    for (std::size_t i = w.start; i <= w.end; ++i) {
      if (i > w.start) w.text += ' ';
      w.text += doc.sentences[i];
    }
    windows.push_back(std::move(w));
    if (start + k >= n) break;
  }
  return windows;
}

}  // namespace ultra
