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

#ifndef ULTRA_PIPELINE_HPP_
#define ULTRA_PIPELINE_HPP_

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ultra/chunker.hpp"
#include "ultra/corpus.hpp"
#include "ultra/extractor.hpp"
#include "ultra/gateway.hpp"
#include "ultra/prompts.hpp"
#include "ultra/refine.hpp"

namespace ultra {

enum class LeaferMode { kOff, kOracle, kBackend };

std::string_view to_string(LeaferMode m);
LeaferMode leafer_mode_from_string(std::string_view s);

struct PipelineConfig {
  std::size_t window_k = kBaseWindow;
  RefineOptions refine;
  bool layer2 = true;  // false emits the LEAFER output directly
  bool ensemble = false;
  LeaferMode leafer = LeaferMode::kOff;
  bool trace = false;
  std::size_t workers = 8;
  BackendConfig backend;
  std::optional<BackendConfig> judge_backend;

  void validate() const;
};

struct StageTrace {
  std::vector<std::string> layer1;  // {a}
  std::vector<std::string> leafer;  // {a'}
  std::vector<std::string> layer2;  // {a^f}
  std::vector<std::string> merged;
};

struct ExtractionOutput {
  std::string doc_id;
  std::string role;
  std::vector<std::string> final_args;
  std::optional<StageTrace> trace;
  std::vector<Candidate> candidates;  // layer-1 set, for --emit-candidates
};

struct DocumentFailure {
  std::string doc_id;
  std::string message;
};

struct RunResult {
  std::vector<ExtractionOutput> outputs;  // corpus order, then role order
  std::vector<DocumentFailure> failures;
};

class Pipeline {
 public:
  // judge may be null; backend-mode LEAFER then asks gw.
  Pipeline(PipelineConfig cfg, Gateway& gw, Gateway* judge,
           PromptTemplates templates);

  // Failed documents are collected; throws only when every document fails.
  RunResult run(const std::vector<Document>& corpus, const Ontology& ontology);

  // One (document, question) unit, stage by stage.
  ExtractionOutput run_question(const Document& doc, const Question& q);

  const PipelineConfig& config() const { return cfg_; }

 private:
  CandidateSet apply_leafer(const Document& doc, const CandidateSet& cs);

  PipelineConfig cfg_;
  Gateway& gw_;
  Gateway* judge_;
  PromptTemplates templates_;
  PriorCache priors_;
};

nlohmann::ordered_json to_json(const ExtractionOutput& out);
ExtractionOutput output_from_json(const nlohmann::json& j);
void write_outputs(std::ostream& out, const std::vector<ExtractionOutput>& outputs);
std::vector<ExtractionOutput> read_outputs(std::istream& in);

// Runs fn(i) for i in [0, n) on up to workers threads. Exceptions are
// rethrown after all workers finish (lowest index first).
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace ultra

#endif  // ULTRA_PIPELINE_HPP_
