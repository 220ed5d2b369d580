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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ultra/errors.hpp"

namespace ultra {
namespace {

using testing::numbered_doc;
using testing::reference_windows;

TEST(ChunkerTest, MatchesReferenceLayoutOverGrid) {
  for (std::size_t n = 1; n <= 40; ++n) {
    const Document doc = numbered_doc("d", n);
    for (std::size_t k = 2; k <= 21; ++k) {
      const auto windows = split_windows(doc, k);
      const auto ref = reference_windows(n, k);
      ASSERT_EQ(windows.size(), ref.size()) << "n=" << n << " k=" << k;
      EXPECT_EQ(window_count(n, k), ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) {
        EXPECT_EQ(windows[i].start, ref[i].first);
        EXPECT_EQ(windows[i].end, ref[i].second);
      }
    }
  }
}

TEST(ChunkerTest, CoverageOverlapAndStopRule) {
  for (std::size_t n = 1; n <= 40; ++n) {
    const Document doc = numbered_doc("d", n);
    for (std::size_t k = 2; k <= 21; ++k) {
      const auto w = split_windows(doc, k);
      std::vector<bool> seen(n, false);
      for (const auto& x : w) {
        EXPECT_LE(x.size(), k);
        for (std::size_t i = x.start; i <= x.end; ++i) seen[i] = true;
      }
      for (std::size_t i = 0; i < n; ++i) EXPECT_TRUE(seen[i]) << "n=" << n << " k=" << k;
      for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        ASSERT_EQ(w[i].size(), k);
        EXPECT_GE(w[i].end + 1, w[i + 1].start);
        if (w[i + 1].size() == k) {
          EXPECT_EQ(w[i].end + 1 - w[i + 1].start, k - k / 2);
        }
        EXPECT_LT(w[i].start + k, n);  // only the last window may reach the end
      }
      EXPECT_EQ(w.back().end, n - 1);
    }
  }
}

TEST(ChunkerTest, TextAndOffsetsMatchFullText) {
  Document doc = numbered_doc("d", 7);
  const std::string full = doc.full_text();
  for (const auto& w : split_windows(doc, 4)) {
    EXPECT_EQ(full.substr(w.char_base, w.text.size()), w.text);
    EXPECT_EQ(w.doc_id, "d");
  }
}

TEST(ChunkerTest, ShortDocumentIsOneWindow) {
  const auto w = split_windows(numbered_doc("d", 3), kBaseWindow);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].start, 0u);
  EXPECT_EQ(w[0].end, 2u);
}

TEST(ChunkerTest, OddWindowStridesByFloorHalf) {
  const auto w = split_windows(numbered_doc("d", 12), kBaseWindow);
  std::vector<std::size_t> starts;
  for (const auto& x : w) starts.push_back(x.start);
  EXPECT_EQ(starts, (std::vector<std::size_t>{0, 2, 4, 6, 8}));
}

TEST(ChunkerTest, RejectsBadInput) {
  EXPECT_THROW(split_windows(numbered_doc("d", 3), 1), Error);
  EXPECT_THROW(window_count(3, 0), Error);
  Document empty;
  empty.id = "e";
  EXPECT_THROW(split_windows(empty, 5), Error);
  EXPECT_EQ(window_count(0, 5), 0u);
}

}  // namespace
}  // namespace ultra
