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


#include "ultra/pipeline.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "synthetic.hpp"
#include "ultra/errors.hpp"

namespace ultra {
namespace {

const std::filesystem::path kData = ULTRA_TEST_DATA;

struct KenyaReplay : ::testing::Test {
  std::vector<Document> corpus = {load_corpus(kData / "droughts.jsonl")[0]};
  Ontology onto = Ontology(std::map<std::string, std::vector<std::string>>{{"Droughts", {"Date"}}});
  PipelineConfig cfg = [] {
    PipelineConfig c;
    c.window_k = 2;
    c.trace = true;
    c.leafer = LeaferMode::kBackend;
    return c;
  }();
  std::unique_ptr<Gateway> gw = mock_gateway("kenya_mock.json");
  std::unique_ptr<Gateway> judge = mock_gateway("kenya_judge.json");

  static std::unique_ptr<Gateway> mock_gateway(const char* file) {
    BackendConfig b;
    b.mock_script = kData / file;
    return Gateway::from_config(b);
  }
};

TEST_F(KenyaReplay, StageByStage) {
  Pipeline p(cfg, *gw, judge.get(), PromptTemplates::defaults());
  const auto out = p.run_question(corpus[0], Question{"Droughts", "Date"});
  ASSERT_TRUE(out.trace.has_value());
  EXPECT_EQ(out.trace->layer1, (std::vector<std::string>{"Wed 15 Sep 2021", "March and May", "July"}));
  EXPECT_EQ(out.trace->leafer,
            (std::vector<std::string>{"Wed 15 Sep 2021", "between March and May this year", "July"}));
  EXPECT_EQ(out.final_args,
            (std::vector<std::string>{"between March and May this year", "Wed 15 Sep 2021"}));
}

TEST_F(KenyaReplay, Layer1OnlyAndOracleModes) {
  cfg.leafer = LeaferMode::kOff;
  cfg.layer2 = false;
  Pipeline plain(cfg, *gw, nullptr, PromptTemplates::defaults());
  EXPECT_EQ(plain.run(corpus, onto).outputs[0].final_args.size(), 3u);

  // With gold in hand the spurious window answers are dropped.
  cfg.leafer = LeaferMode::kOracle;
  Pipeline oracle(cfg, *gw, nullptr, PromptTemplates::defaults());
  EXPECT_EQ(oracle.run(corpus, onto).outputs[0].final_args,
            (std::vector<std::string>{"between March and May this year"}));
  corpus[0].gold.reset();
  Pipeline no_gold(cfg, *gw, nullptr, PromptTemplates::defaults());
  EXPECT_THROW(no_gold.run(corpus, onto), Error);
}

TEST_F(KenyaReplay, EnsembleAddsDocumentLevelSpans) {
  auto script = MockScript::load(kData / "kenya_mock.json");
  script.completions["doclevel|kenya-drought|Date"] = "Wed 15 Sep 2021; October to December";
  Gateway eg(BackendConfig{}, std::make_shared<MockBackend>(script));
  cfg.ensemble = true;
  Pipeline p(cfg, eg, judge.get(), PromptTemplates::defaults());
  const auto out = p.run(corpus, onto).outputs.at(0);
  EXPECT_EQ(out.final_args, (std::vector<std::string>{"between March and May this year",
                                                      "Wed 15 Sep 2021", "October to December"}));
  EXPECT_EQ(out.trace->layer2.size(), 2u);
}

TEST_F(KenyaReplay, UnparseableJudgmentKeepsCandidate) {
  auto script = MockScript::load(kData / "kenya_judge.json");
  script.default_completion = "hmm";
  Gateway jg(BackendConfig{}, std::make_shared<MockBackend>(script));
  Pipeline p(cfg, *gw, &jg, PromptTemplates::defaults());
  const auto out = p.run_question(corpus[0], Question{"Droughts", "Date"});
  EXPECT_EQ(out.trace->leafer.size(), 3u);
}

TEST(PipelineTest, OutputsFollowCorpusThenRoleOrder) {
  const auto syn = testing::make_synthetic(4);
  Gateway gw(BackendConfig{}, std::make_shared<MockBackend>(syn.script));
  PipelineConfig cfg;
  cfg.workers = 3;
  Pipeline p(cfg, gw, nullptr, PromptTemplates::defaults());
  const auto r = p.run(syn.corpus, syn.ontology);
  ASSERT_EQ(r.outputs.size(), 12u);
  EXPECT_EQ(r.outputs[0].doc_id, "flood-0");
  EXPECT_EQ(r.outputs[2].role, "Cause");
  EXPECT_EQ(r.outputs[11].doc_id, "flood-3");
  for (const auto& o : r.outputs) {
    if (o.candidates.empty()) continue;
    EXPECT_LE(o.final_args.size(), final_size(std::min<std::size_t>(o.candidates.size(), 5)));
  }
}

TEST(PipelineTest, RunsAreIdenticalAcrossWorkerCounts) {
  const auto syn = testing::make_synthetic(6);
  auto run = [&](std::size_t workers) {
    Gateway gw(BackendConfig{}, std::make_shared<MockBackend>(syn.script));
    PipelineConfig cfg;
    cfg.workers = workers;
    cfg.trace = true;
    Pipeline p(cfg, gw, nullptr, PromptTemplates::defaults());
    std::stringstream out;
    write_outputs(out, p.run(syn.corpus, syn.ontology).outputs);
    return out.str();
  };
  const auto one = run(1);
  EXPECT_EQ(run(8), one);
  EXPECT_EQ(run(3), one);
}

// Fails every call about one document.
class DocDown : public Backend {
 public:
  DocDown(std::shared_ptr<Backend> inner, std::string doc) : inner_(std::move(inner)), doc_(std::move(doc)) {}
  std::string generate(const GenerationRequest& r) override {
    if (r.tag.parts.size() > 1 && r.tag.parts[1] == doc_) fail(ErrorKind::kTransport, "refused");
    return inner_->generate(r);
  }
  std::vector<double> score_options(const ChoiceRequest& r) override { return inner_->score_options(r); }

 private:
  std::shared_ptr<Backend> inner_;
  std::string doc_;
};

TEST(PipelineTest, FailedDocumentsAreReportedNotFatal) {
  const auto syn = testing::make_synthetic(3);
  auto inner = std::make_shared<MockBackend>(syn.script);
  Gateway gw(BackendConfig{}, std::make_shared<DocDown>(inner, "flood-1"));
  Pipeline p(PipelineConfig{}, gw, nullptr, PromptTemplates::defaults());
  const auto r = p.run(syn.corpus, syn.ontology);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].doc_id, "flood-1");
  EXPECT_EQ(r.outputs.size(), 6u);

  std::vector<Document> only = {syn.corpus[1]};
  EXPECT_THROW(p.run(only, syn.ontology), Error);
}

TEST(PipelineTest, UnknownEventTypeFailsThatDocument) {
  auto syn = testing::make_synthetic(2);
  syn.corpus[0].event_type = "Volcanoes";
  Gateway gw(BackendConfig{}, std::make_shared<MockBackend>(syn.script));
  Pipeline p(PipelineConfig{}, gw, nullptr, PromptTemplates::defaults());
  const auto r = p.run(syn.corpus, syn.ontology);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].doc_id, "flood-0");
}

TEST(PipelineTest, ConfigValidation) {
  PipelineConfig cfg;
  cfg.window_k = 1;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = PipelineConfig{};
  cfg.workers = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = PipelineConfig{};
  cfg.refine.prune_cap = 0;
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_EQ(leafer_mode_from_string("oracle"), LeaferMode::kOracle);
  EXPECT_THROW(leafer_mode_from_string("on"), Error);
}

TEST(OutputsTest, JsonlRoundTrip) {
  ExtractionOutput o{"d", "Date", {"July", "May"}, StageTrace{{"a"}, {"b"}, {"c"}, {"d"}}, {}};
  std::stringstream buf;
  write_outputs(buf, {o});
  EXPECT_EQ(buf.str(),
            "{\"doc\":\"d\",\"role\":\"Date\",\"arguments\":[\"July\",\"May\"],\"layer1\":[\"a\"],"
            "\"leafer\":[\"b\"],\"layer2\":[\"c\"],\"merged\":[\"d\"]}\n");
  const auto back = read_outputs(buf);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].final_args, o.final_args);
  std::stringstream bad("{\"doc\":\"d\"}\n");
  EXPECT_THROW(read_outputs(bad), Error);
}

TEST(ParallelForTest, VisitsEachIndexAndRethrowsLowest) {
  std::vector<int> hits(50, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  try {
    parallel_for(10, 4, [](std::size_t i) {
      if (i == 3 || i == 7) fail(ErrorKind::kNumeric, std::to_string(i));
    });
    FAIL() << "expected rethrow";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "3");
  }
}

}  // namespace
}  // namespace ultra
