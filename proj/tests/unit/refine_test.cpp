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


#include "ultra/refine.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ultra/errors.hpp"

namespace ultra {
namespace {

using testing::reference_final_size;

std::unique_ptr<Gateway> scripted(const nlohmann::json& script) {
  return std::make_unique<Gateway>(BackendConfig{},
                                   std::make_shared<MockBackend>(MockScript::from_json(script)));
}

CandidateSet candidates(std::size_t n) {
  CandidateSet cs{Question{"Droughts", "Date"}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    cs.candidates.push_back(Candidate{"c" + std::to_string(i), "Date", {i}, i * 10});
  }
  return cs;
}

Document doc_for(const CandidateSet& cs) {
  Document d;
  d.id = "d";
  d.event_type = "Droughts";
  for (const auto& c : cs.candidates) d.sentences.push_back("Mentions " + c.text + ".");
  return d;
}

TEST(FinalSizeTest, MatchesBitCount) {
  for (std::size_t n = 1; n <= 64; ++n) EXPECT_EQ(final_size(n), reference_final_size(n)) << n;
  EXPECT_EQ(final_size(4), 3u);
  EXPECT_EQ(final_size(5), 3u);
  EXPECT_EQ(final_size(8), 4u);
  EXPECT_THROW(final_size(0), Error);
}

TEST(PruneTest, KeepsEarliest) {
  auto cs = candidates(8);
  std::swap(cs.candidates[0], cs.candidates[7]);
  const auto p = prune_earliest(cs, 5);
  // The five earliest survive in their input order.
  EXPECT_EQ(p.texts(), (std::vector<std::string>{"c1", "c2", "c3", "c4", "c0"}));
  EXPECT_EQ(prune_earliest(candidates(3), 5).candidates.size(), 3u);
}

TEST(CalibrateTest, AdditiveAndMultiplicative) {
  auto p = calibrate({0.7, 0.3}, {0.5, 0.5}, Calibration::kAdditive);
  EXPECT_NEAR(p[0], testing::sigmoid_diff(0.2, -0.2), 1e-12);
  EXPECT_NEAR(p[0], 0.5987, 1e-4);
  auto m = calibrate({0.7, 0.3}, {0.5, 0.5}, Calibration::kMultiplicative);
  EXPECT_NEAR(m[0], testing::sigmoid_diff(1.4, 0.6), 1e-12);
  auto same = calibrate({0.62, 0.38}, {0.62, 0.38}, Calibration::kAdditive);
  EXPECT_NEAR(same[0], 0.5, 1e-12);
  EXPECT_THROW(calibrate({0.7, 0.3}, {0.0, 1.0}, Calibration::kMultiplicative), Error);
}

TEST(CalibrateTest, NamesRoundTrip) {
  for (auto g : {Calibration::kAdditive, Calibration::kMultiplicative}) {
    EXPECT_EQ(calibration_from_string(to_string(g)), g);
  }
  EXPECT_THROW(calibration_from_string("exp"), Error);
}

TEST(CalibratedPairTest, PositionBiasCancels) {
  // Every prompt prefers the first slot, with and without the article.
  auto gw = scripted({{"default_choice", {0.7, 0.3}}});
  const auto cs = candidates(2);
  RefineOptions opts;
  const auto s = calibrated_pair(*gw, PromptTemplates::defaults(), doc_for(cs), cs.question, "c0",
                                 "c1", opts);
  EXPECT_NEAR(s.p_a, 0.5, 1e-9);
  EXPECT_NEAR(s.p_b, 0.5, 1e-9);
}

TEST(CalibratedPairTest, BothOrdersAverage) {
  // Raw preference follows candidate identity; prior is uniform.
  auto gw = scripted({{"preferences", {{"c0", 3.0}, {"c1", 1.0}}}});
  const auto cs = candidates(2);
  RefineOptions opts;
  const auto s = calibrated_pair(*gw, PromptTemplates::defaults(), doc_for(cs), cs.question, "c0",
                                 "c1", opts);
  const double one = testing::sigmoid_diff(0.25, -0.25);  // raw 0.75 vs prior 0.5
  EXPECT_NEAR(s.p_a, one, 1e-12);
  opts.both_orders = false;
  const auto t = calibrated_pair(*gw, PromptTemplates::defaults(), doc_for(cs), cs.question, "c0",
                                 "c1", opts);
  EXPECT_NEAR(t.p_a, one, 1e-12);
}

TEST(CalibratedPairTest, PriorCacheSharesPriors) {
  auto gw = scripted({{"preferences", {{"c0", 3.0}, {"c1", 1.0}}}});
  const auto cs = candidates(2);
  PriorCache cache;
  calibrated_pair(*gw, PromptTemplates::defaults(), doc_for(cs), cs.question, "c0", "c1", {}, &cache);
  EXPECT_EQ(cache.size(), 2u);
  EXPECT_EQ(gw->stats().choices, 4u);
  calibrated_pair(*gw, PromptTemplates::defaults(), doc_for(cs), cs.question, "c0", "c1", {}, &cache);
  EXPECT_EQ(gw->stats().choices, 6u);
}

TEST(RankTest, BordaOrderAndFinalSize) {
  auto gw = scripted({{"preferences", {{"c0", 1.0}, {"c1", 4.0}, {"c2", 2.0}, {"c3", 3.0}}}});
  const auto cs = candidates(4);
  const auto r = rank_and_filter(*gw, PromptTemplates::defaults(), doc_for(cs), cs, {});
  std::vector<std::string> order;
  for (const auto& x : r.ranked) order.push_back(x.candidate.text);
  EXPECT_EQ(order, (std::vector<std::string>{"c1", "c3", "c2", "c0"}));
  EXPECT_EQ(r.final_texts(), (std::vector<std::string>{"c1", "c3", "c2"}));
  double total = 0.0;
  for (const auto& x : r.ranked) total += x.score;
  EXPECT_NEAR(total, 6.0, 1e-9);  // one unit per pair
}

TEST(RankTest, TiesBreakByEarliness) {
  auto gw = scripted(nlohmann::json::object());
  const auto cs = candidates(3);
  const auto r = rank_and_filter(*gw, PromptTemplates::defaults(), doc_for(cs), cs, {});
  EXPECT_EQ(r.final_texts(), (std::vector<std::string>{"c0", "c1"}));
}

TEST(RankTest, PruneCapBoundsCalls) {
  auto gw = scripted(nlohmann::json::object());
  const auto cs = candidates(8);
  const auto r = rank_and_filter(*gw, PromptTemplates::defaults(), doc_for(cs), cs, {});
  EXPECT_EQ(r.ranked.size(), 5u);
  EXPECT_EQ(r.final.size(), 3u);
  EXPECT_LE(gw->stats().choices, 40u);
}

TEST(RankTest, SingleCandidatePassesWithoutCalls) {
  auto gw = scripted(nlohmann::json::object());
  const auto cs = candidates(1);
  EXPECT_EQ(rank_and_filter(*gw, PromptTemplates::defaults(), doc_for(cs), cs, {}).final_texts(),
            (std::vector<std::string>{"c0"}));
  EXPECT_TRUE(rank_and_filter(*gw, PromptTemplates::defaults(), doc_for(cs), candidates(0), {})
                  .final.empty());
  EXPECT_EQ(gw->stats().choices, 0u);
}

class DownBackend : public Backend {
 public:
  explicit DownBackend(ErrorKind kind, std::string bad = "") : kind_(kind), bad_(std::move(bad)) {}
  std::string generate(const GenerationRequest&) override { return "N/A"; }
  std::vector<double> score_options(const ChoiceRequest& r) override {
    const auto& p = r.tag.parts;
    if (bad_.empty() || std::find(p.begin(), p.end(), bad_) != p.end()) fail(kind_, "down");
    return {0.0, 0.0};
  }

 private:
  ErrorKind kind_;
  std::string bad_;
};

TEST(RankTest, FailedPairsScoreHalf) {
  Gateway gw(BackendConfig{}, std::make_shared<DownBackend>(ErrorKind::kTransport, "c2"));
  const auto cs = candidates(3);
  const auto r = rank_and_filter(gw, PromptTemplates::defaults(), doc_for(cs), cs, {});
  for (const auto& x : r.ranked) EXPECT_NEAR(x.score, 1.0, 1e-12);
}

TEST(RankTest, AllPairsFailingIsFatal) {
  Gateway gw(BackendConfig{}, std::make_shared<DownBackend>(ErrorKind::kBackend));
  const auto cs = candidates(3);
  try {
    rank_and_filter(gw, PromptTemplates::defaults(), doc_for(cs), cs, {});
    FAIL() << "expected transport error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTransport);
  }
  Gateway cap(BackendConfig{}, std::make_shared<DownBackend>(ErrorKind::kCapability));
  try {
    rank_and_filter(cap, PromptTemplates::defaults(), doc_for(cs), cs, {});
    FAIL() << "expected capability error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCapability);
  }
}

TEST(RankTest, PassthroughKeepsEverything) {
  const auto cs = candidates(4);
  EXPECT_EQ(passthrough(cs).final_texts(), cs.texts());
}

}  // namespace
}  // namespace ultra
