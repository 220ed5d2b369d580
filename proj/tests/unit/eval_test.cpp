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


#include "ultra/eval.hpp"

#include <algorithm>

#include <gtest/gtest.h>

#include "ultra/errors.hpp"

namespace ultra {
namespace {

const std::string kRivers = "Willamette, Grande Ronde, John Day and along the North coast";

TEST(StopWordsTest, SortedUniqueLowercase) {
  const auto words = stop_words();
  EXPECT_EQ(words.size(), 135u);
  EXPECT_TRUE(std::is_sorted(words.begin(), words.end()));
  EXPECT_EQ(std::adjacent_find(words.begin(), words.end()), words.end());
  EXPECT_TRUE(is_stop_word("the"));
  EXPECT_TRUE(is_stop_word("between"));
  EXPECT_FALSE(is_stop_word("drought"));
}

TEST(EmTest, IgnoresCaseStopWordsAndPunctuation) {
  EXPECT_EQ(normalize_em("The Willamette, Grande-Ronde!"),
            (std::vector<std::string>{"willamette", "granderonde"}));
  EXPECT_TRUE(em_match("the " + kRivers, kRivers));
  EXPECT_FALSE(em_match("March and May", "between March and May this year"));
  // Stop-word-only spans fall back to a verbatim comparison.
  EXPECT_FALSE(em_match("the", "a"));
  EXPECT_TRUE(em_match("Here.", "here"));
  EXPECT_FALSE(em_match("", ""));
}

TEST(HmTest, HeadsAndFallback) {
  EXPECT_EQ(head_words("the dry spring and summer"), (std::set<std::string>{"spring", "summer"}));
  EXPECT_TRUE(hm_match("March and May", "between March and May this year"));
  EXPECT_TRUE(hm_match("Grande Ronde", kRivers));
  EXPECT_FALSE(hm_match("Oregon", "Washington"));
  EXPECT_FALSE(hm_match("Oregon", kRivers));
}

TEST(HmTest, ExactMatchImpliesHeadMatch) {
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"the " + kRivers, kRivers}, {"rain in May", "rain May"}, {"Oregon.", "oregon"}};
  for (const auto& [a, b] : pairs) {
    ASSERT_TRUE(em_match(a, b)) << a;
    EXPECT_TRUE(hm_match(a, b)) << a;
  }
}

TEST(MatchTest, OneToOne) {
  const std::vector<std::string> preds = {"Oregon", "oregon"};
  const std::vector<std::string> golds = {"Oregon"};
  EXPECT_EQ(count_matches(preds, golds, em_match), 1u);
}

TEST(ScoreTest, CaseAnalysisRoles) {
  SpanMap preds, golds;
  preds[{"oregon", "Related Rivers or Lakes"}] = {"the " + kRivers};
  golds[{"oregon", "Related Rivers or Lakes"}] = {kRivers};
  preds[{"oregon", "Cause"}] = {"fewer seasons of abundant rain and snow"};
  golds[{"oregon", "Cause"}] = {"The dry spring and summer", "fewer seasons of abundant rain and snow"};
  preds[{"oregon", "Areas Affected"}] = {"Oregon"};
  golds[{"oregon", "Areas Affected"}] = {kRivers, "Washington"};
  const auto r = score(preds, golds);
  EXPECT_EQ(r.per_role.at("Related Rivers or Lakes").em.matched, 1u);
  EXPECT_DOUBLE_EQ(r.per_role.at("Cause").em.precision(), 1.0);
  EXPECT_DOUBLE_EQ(r.per_role.at("Cause").em.recall(), 0.5);
  EXPECT_EQ(r.per_role.at("Areas Affected").em.matched, 0u);
  EXPECT_EQ(r.per_role.at("Areas Affected").hm.matched, 0u);
}

TEST(ScoreTest, MicroAverageAndEmptyConventions) {
  SpanMap preds, golds;
  preds[{"a", "R"}] = {"x", "y"};
  golds[{"a", "R"}] = {"x"};
  preds[{"b", "R"}] = {};
  golds[{"b", "R"}] = {"z"};
  preds[{"c", "S"}] = {};
  golds[{"c", "S"}] = {};
  const auto r = score(preds, golds);
  EXPECT_EQ(r.instances, 3u);
  EXPECT_NEAR(r.overall.em.precision(), 0.5, 1e-12);
  EXPECT_NEAR(r.overall.em.recall(), 0.5, 1e-12);
  const Prf empty;
  EXPECT_EQ(empty.precision(), 0.0);
  EXPECT_EQ(empty.f1(), 0.0);
}

TEST(ScoreTest, KeySetsMustAgree) {
  SpanMap preds, golds;
  preds[{"a", "R"}] = {"x"};
  EXPECT_THROW(score(preds, golds), Error);
  golds[{"a", "R"}] = {"x"};
  golds[{"a", "S"}] = {"y"};
  EXPECT_THROW(score(preds, golds), Error);
}

TEST(ReportTest, JsonAndTable) {
  SpanMap preds, golds;
  preds[{"a", "Cause"}] = {"x"};
  golds[{"a", "Cause"}] = {"x", "y"};
  const auto r = score(preds, golds);
  const auto j = r.to_json();
  EXPECT_NEAR(j["em"]["recall"].get<double>(), 0.5, 1e-12);
  const std::string table = r.to_table();
  EXPECT_NE(table.find("overall"), std::string::npos);
  EXPECT_NE(table.find("50.0"), std::string::npos);
  EXPECT_NE(table.find("66.7"), std::string::npos);
}

}  // namespace
}  // namespace ultra
