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


#ifndef ULTRA_TOOLS_CLI_HPP_
#define ULTRA_TOOLS_CLI_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ultra/corpus.hpp"
#include "ultra/eval.hpp"
#include "ultra/pipeline.hpp"

namespace ultra::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kBackendFailure = 2 };

struct CliConfig {
  PipelineConfig pipeline;
  std::optional<std::filesystem::path> templates;
};

// Reads the TOML subset used for run configuration: top-level keys plus
// [backend] and [judge] tables. An empty path yields defaults. Unknown
// keys are rejected with the list of valid ones. Environment variables
// ULTRA_API_KEY and ULTRA_ENDPOINT fill the backend secrets/endpoint.
CliConfig load_config(const std::filesystem::path& path);
CliConfig parse_config(std::string_view text);
void apply_environment(CliConfig& cfg);

// (doc, role) prediction and gold maps over the same key set. With an
// ontology the keys are every role of every document; without, the union
// of predicted and annotated keys.
std::pair<SpanMap, SpanMap> eval_maps(const std::vector<Document>& corpus,
                                      const std::vector<ExtractionOutput>& outputs,
                                      const Ontology* ontology);

// Entry point minus process plumbing; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ultra::cli

#endif  // ULTRA_TOOLS_CLI_HPP_
