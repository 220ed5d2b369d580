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

#ifndef ULTRA_ENSEMBLE_HPP_
#define ULTRA_ENSEMBLE_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ultra/corpus.hpp"
#include "ultra/gateway.hpp"
#include "ultra/prompts.hpp"
#include "ultra/refine.hpp"

namespace ultra {

struct EnsembleResult {
  Question question;
  std::vector<std::string> ultra_args;
  std::vector<std::string> doc_args;
  std::vector<std::string> merged;
};

// Splits on ';' and newlines, trims, drops N/A and duplicates.
std::vector<std::string> split_doclevel_output(std::string_view text);

RequestTag doclevel_tag(const Document& doc, const Question& q);

std::vector<std::string> extract_doclevel(Gateway& gw,
                                          const PromptTemplates& templates,
                                          const Document& doc,
                                          const Question& q);

// Union under the dedup normalizer. ultra spans come first in their given
// order and win collisions; new document-level spans follow ordered by
// offset in the document.
std::vector<std::string> merge_spans(const Document& doc,
                                     std::span<const std::string> ultra,
                                     std::span<const std::string> doc_args);

// Throws kValidation when the two sides answer different questions.
EnsembleResult merge(const Document& doc, const RankedArgumentSet& ultra,
                     const Question& doc_question,
                     std::span<const std::string> doc_args);

}  // namespace ultra

#endif  // ULTRA_ENSEMBLE_HPP_
