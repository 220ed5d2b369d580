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

#ifndef ULTRA_LEAFER_HPP_
#define ULTRA_LEAFER_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ultra/chunker.hpp"
#include "ultra/corpus.hpp"
#include "ultra/extractor.hpp"
#include "ultra/gateway.hpp"
#include "ultra/prompts.hpp"

namespace ultra {

enum class JudgmentClass { kBothNa, kSpurious, kMissed, kExact, kBoundary, kWrong };

std::string_view to_string(JudgmentClass c);

// Content-token Jaccard at or above this is a boundary error, below it the
// extraction is simply wrong.
inline constexpr double kBoundaryJaccard = 0.5;

struct Judgment {
  JudgmentClass kind = JudgmentClass::kBothNa;
  std::string text;
  // Replacement span: absent for both_na/exact, "N/A" for spurious.
  std::optional<std::string> corrected;

  bool operator==(const Judgment&) const = default;
};

// nullopt (or an N/A string) means "no answer" on either side.
JudgmentClass classify_pair(std::optional<std::string_view> extraction,
                            std::optional<std::string_view> gold);

// Renders the template text for kind with gold substituted for [GT].
Judgment render_judgment(JudgmentClass kind, std::optional<std::string_view> gold);

// Classify and render in one step.
Judgment make_judgment(std::optional<std::string_view> extraction,
                       std::optional<std::string_view> gold);

// Reads free text produced by a judge. extraction_present separates the
// two pairs of classes that share a template. Accepts straight or curly
// quotes. Throws kParse carrying the raw text.
Judgment parse_judgment(std::string_view text, bool extraction_present);

double content_jaccard(std::string_view a, std::string_view b);

// Gold span for a window: a span whose normalized text occurs in the window;
// with several, the one closest to the extraction.
std::optional<std::string> gold_for_window(const Document& doc,
                                           const Window& w,
                                           std::string_view role,
                                           std::optional<std::string_view> extraction);

struct LeaferBankRecord {
  std::string doc_id;
  std::size_t window_start = 0;
  std::string window_text;
  Question question;
  std::string extraction;  // "N/A" when the extractor abstained
  std::string gold;        // "N/A" when no gold span falls in the window
  Judgment judgment;
};

// Judge input: the layer-1 prompt followed by the machine extraction.
std::string judge_input(const PromptTemplates& templates, const Window& w,
                        const Question& q, std::string_view extraction);

RequestTag judge_tag(const Window& w, const Question& q,
                     std::string_view extraction);

// One record per (window, question) of every training document.
std::vector<LeaferBankRecord> build_bank(Gateway& gw,
                                         const PromptTemplates& templates,
                                         const std::vector<Document>& train,
                                         const Ontology& ontology,
                                         std::size_t k);

// Fine-tuning format: {"input": ..., "target": ...}.
nlohmann::ordered_json bank_record_to_json(const PromptTemplates& templates,
                                           const LeaferBankRecord& r);
void write_bank(std::ostream& out, const PromptTemplates& templates,
                std::span<const LeaferBankRecord> records);

// Asks the judge backend about one extraction.
Judgment judge(Gateway& gw, const PromptTemplates& templates, const Window& w,
               const Question& q, std::string_view extraction);

// Applies one judgment per candidate. Spurious drops, boundary/wrong/missed
// replace the text, the rest keep. The result is re-deduplicated.
CandidateSet rectify(const Document& doc, const CandidateSet& cs,
                     std::span<const Judgment> judgments);

// Window of doc starting at the candidate's earliest source window.
Window judgment_window(const Document& doc, std::span<const Window> windows,
                       const Candidate& c);

}  // namespace ultra

#endif  // ULTRA_LEAFER_HPP_
