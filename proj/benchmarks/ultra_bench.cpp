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


#include <benchmark/benchmark.h>

#include "oracles.hpp"
#include "synthetic.hpp"
#include "ultra/chunker.hpp"
#include "ultra/eval.hpp"
#include "ultra/pipeline.hpp"
#include "ultra/refine.hpp"

namespace {

using namespace ultra;

void BM_SplitWindows(benchmark::State& state) {
  const auto doc = testing::numbered_doc("d", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(split_windows(doc, kBaseWindow));
}
BENCHMARK(BM_SplitWindows)->Arg(16)->Arg(128)->Arg(1024);

void BM_FinalSize(benchmark::State& state) {
  std::size_t n = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(final_size(n));
    n = n % 4096 + 1;
  }
}
BENCHMARK(BM_FinalSize);

void BM_RankAndFilter(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Document doc = testing::numbered_doc("d", n);
  CandidateSet cs{Question{"Droughts", "Date"}, {}};
  MockScript script;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string text = "candidate " + std::to_string(i);
    cs.candidates.push_back(Candidate{text, "Date", {i}, i * 24});
    script.preferences[text] = 1.0 + static_cast<double>(i % 7);
  }
  Gateway gw(BackendConfig{}, std::make_shared<MockBackend>(script));
  RefineOptions opts;
  opts.prune_cap = n;
  const auto templates = PromptTemplates::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(rank_and_filter(gw, templates, doc, cs, opts));
}
BENCHMARK(BM_RankAndFilter)->Arg(5)->Arg(15);

void BM_Score(benchmark::State& state) {
  SpanMap preds, golds;
  for (int d = 0; d < state.range(0); ++d) {
    const std::string id = "doc" + std::to_string(d);
    preds[{id, "Cause"}] = {"the heavy rain in May", "a burst dam", "storm"};
    golds[{id, "Cause"}] = {"heavy rain", "the burst dam near the river"};
  }
  for (auto _ : state) benchmark::DoNotOptimize(score(preds, golds));
}
BENCHMARK(BM_Score)->Arg(100)->Arg(1000);

void BM_PipelineMock(benchmark::State& state) {
  const auto syn = testing::make_synthetic(10);
  const auto templates = PromptTemplates::defaults();
  PipelineConfig cfg;
  cfg.workers = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Gateway gw(BackendConfig{}, std::make_shared<MockBackend>(syn.script));
    Pipeline p(cfg, gw, nullptr, templates);
    benchmark::DoNotOptimize(p.run(syn.corpus, syn.ontology));
  }
}
BENCHMARK(BM_PipelineMock)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
