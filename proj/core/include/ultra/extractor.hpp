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

#ifndef ULTRA_EXTRACTOR_HPP_
#define ULTRA_EXTRACTOR_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ultra/chunker.hpp"
#include "ultra/corpus.hpp"
#include "ultra/gateway.hpp"
#include "ultra/prompts.hpp"

namespace ultra {

struct Candidate {
  std::string text;  // first-seen surface form
  std::string role;
  std::vector<std::size_t> source_windows;  // window starts, sorted
  std::size_t first_offset = 0;

  bool operator==(const Candidate&) const = default;
};

struct CandidateSet {
  Question question;
  std::vector<Candidate> candidates;

  std::vector<std::string> texts() const;
  bool operator==(const CandidateSet&) const = default;
};

// Earliest occurrence of text in the document, or the char_base of the
// earliest source window when the span is not in the document verbatim.
std::size_t locate_candidate(const Document& doc, std::string_view text,
                             std::span<const std::size_t> source_windows);

// Order by first_offset, then earliest source window, then text.
void sort_candidates(std::vector<Candidate>& cands);

// Merges candidates that are equal under the dedup normalizer. Earlier
// entries keep their surface form; windows are unioned and the smallest
// offset wins. Result is sorted.
std::vector<Candidate> dedup_candidates(std::vector<Candidate> cands);

RequestTag local_tag(const Window& w, const Question& q);

// The generated span for one window, or nullopt for N/A.
std::optional<std::string> extract_window(Gateway& gw,
                                          const PromptTemplates& templates,
                                          const Window& w, const Question& q);

// Pure aggregation of per-window outputs (indexed like windows).
CandidateSet assemble_candidates(
    const Document& doc, const Question& q, std::span<const Window> windows,
    std::span<const std::optional<std::string>> outputs);

// Layer-1 over every window of the document. Isolated call failures are
// logged and skipped; more than half failing raises kTransport.
CandidateSet extract_candidates(Gateway& gw, const PromptTemplates& templates,
                                const Document& doc, const Question& q,
                                std::size_t k);

// One JSON line per candidate for --emit-candidates.
nlohmann::ordered_json candidate_to_json(const std::string& doc_id,
                                         const Candidate& c);

}  // namespace ultra

#endif  // ULTRA_EXTRACTOR_HPP_
