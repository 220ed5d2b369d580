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


#include "ultra/extractor.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ultra/errors.hpp"

namespace ultra {
namespace {

const std::filesystem::path kData = ULTRA_TEST_DATA;

struct Kenya : ::testing::Test {
  Document doc = load_corpus(kData / "droughts.jsonl")[0];
  Question date{"Droughts", "Date"};
  PromptTemplates templates = PromptTemplates::defaults();
};

std::unique_ptr<Gateway> mock_gateway(const std::filesystem::path& script) {
  BackendConfig cfg;
  cfg.kind = BackendKind::kMock;
  cfg.mock_script = script;
  return Gateway::from_config(cfg);
}

// Throws a transport error for the listed window starts.
class FlakyBackend : public Backend {
 public:
  explicit FlakyBackend(std::set<std::string> bad) : bad_(std::move(bad)) {}
  std::string generate(const GenerationRequest& r) override {
    if (bad_.count(r.tag.parts.at(2))) fail(ErrorKind::kTransport, "connection refused");
    return "July";
  }
  std::vector<double> score_options(const ChoiceRequest& r) override {
    return std::vector<double>(r.options.size(), 0.0);
  }

 private:
  std::set<std::string> bad_;
};

TEST_F(Kenya, ExtractsDedupsAndOrdersByOffset) {
  auto gw = mock_gateway(kData / "kenya_mock.json");
  const auto cs = extract_candidates(*gw, templates, doc, date, 2);
  EXPECT_EQ(cs.texts(), (std::vector<std::string>{"Wed 15 Sep 2021", "March and May", "July"}));
  EXPECT_EQ(cs.candidates[1].source_windows, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(cs.candidates[1].first_offset, doc.full_text().find("March and May"));
  EXPECT_EQ(cs.candidates[2].first_offset, doc.full_text().find("July"));
  EXPECT_EQ(gw->stats().completions, testing::reference_windows(5, 2).size());
}

TEST_F(Kenya, AbstainingWindowsYieldNothing) {
  auto gw = mock_gateway("");
  EXPECT_TRUE(extract_candidates(*gw, templates, doc, date, 2).candidates.empty());
}

TEST_F(Kenya, AssembleIsPureAndMergesSurfaceVariants) {
  const auto windows = split_windows(doc, 2);
  std::vector<std::optional<std::string>> outputs = {"July", "\"july.\"", std::nullopt, "N/A"};
  const auto cs = assemble_candidates(doc, date, windows, outputs);
  ASSERT_EQ(cs.candidates.size(), 1u);
  EXPECT_EQ(cs.candidates[0].text, "July");
  EXPECT_EQ(cs.candidates[0].source_windows, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(assemble_candidates(doc, date, windows, outputs), cs);
  outputs.pop_back();
  EXPECT_THROW(assemble_candidates(doc, date, windows, outputs), Error);
}

TEST_F(Kenya, UnlocatableSpanFallsBackToWindowStart) {
  const auto offsets = doc.sentence_offsets();
  const std::vector<std::size_t> w = {3, 2};
  EXPECT_EQ(locate_candidate(doc, "not in the text", w), offsets[2]);
  EXPECT_EQ(locate_candidate(doc, "not in the text", {}), 0u);
}

TEST_F(Kenya, ToleratesMinorityOfFailedWindows) {
  BackendConfig cfg;
  Gateway gw(cfg, std::make_shared<FlakyBackend>(std::set<std::string>{"1"}));
  EXPECT_EQ(extract_candidates(gw, templates, doc, date, 2).texts(),
            (std::vector<std::string>{"July"}));
}

TEST_F(Kenya, MajorityFailureIsTransportError) {
  BackendConfig cfg;
  Gateway gw(cfg, std::make_shared<FlakyBackend>(std::set<std::string>{"0", "1", "2"}));
  try {
    extract_candidates(gw, templates, doc, date, 2);
    FAIL() << "expected transport error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTransport);
  }
}

TEST(DedupTest, KeepsFirstSurfaceFormAndUnionsWindows) {
  std::vector<Candidate> cands = {{"B", "r", {4}, 40}, {"a", "r", {2}, 10}, {"A.", "r", {0}, 10}};
  const auto out = dedup_candidates(cands);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].text, "a");
  EXPECT_EQ(out[0].source_windows, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(out[1].text, "B");
}

TEST(CandidateJsonTest, Fields) {
  Candidate c{"July", "Date", {3}, 812};
  EXPECT_EQ(candidate_to_json("k", c).dump(),
            R"({"doc":"k","role":"Date","text":"July","windows":[3],"offset":812})");
}

}  // namespace
}  // namespace ultra
