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


#include "ultra/ensemble.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "ultra/errors.hpp"
#include "ultra/text.hpp"

namespace ultra {

namespace {

constexpr std::size_t kDoclevelMaxNewTokens = 128;

}  // namespace

std::vector<std::string> split_doclevel_output(std::string_view text) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] != ';' && text[i] != '\n') continue;
    std::string span = trim(text.substr(begin, i - begin));
    begin = i + 1;
    if (is_not_available(span)) continue;
    if (seen.insert(normalize_dedup(span)).second) out.push_back(std::move(span));
  }
  return out;
}

RequestTag doclevel_tag(const Document& doc, const Question& q) {
  return RequestTag{{"doclevel", doc.id, q.role}};
}

std::vector<std::string> extract_doclevel(Gateway& gw, const PromptTemplates& templates,
                                          const Document& doc, const Question& q) {
  GenerationRequest req;
  req.prompt = templates.render_doclevel(doc, q, gw.config().token_budget);
  req.max_new_tokens = kDoclevelMaxNewTokens;
  req.tag = doclevel_tag(doc, q);
  try {
    return split_doclevel_output(gw.complete(req));
  } catch (const Error& e) {
    throw e.with_context("document-level extraction for '" + doc.id + "' role '" + q.role + "'");
  }
}

std::vector<std::string> merge_spans(const Document& doc, std::span<const std::string> ultra,
                                     std::span<const std::string> doc_args) {
  std::vector<std::string> merged;
  std::set<std::string> seen;
  for (const auto& s : ultra) {
    if (seen.insert(normalize_dedup(s)).second) merged.push_back(s);
  }
  const std::string text = doc.full_text();
  std::vector<std::pair<std::size_t, std::string>> added;
  for (const auto& s : doc_args) {
    if (!seen.insert(normalize_dedup(s)).second) continue;
    auto pos = find_normalized(text, s);
    added.emplace_back(pos.value_or(std::numeric_limits<std::size_t>::max()), s);
  }
  std::stable_sort(added.begin(), added.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [_, s] : added) merged.push_back(std::move(s));
  return merged;
}

EnsembleResult merge(const Document& doc, const RankedArgumentSet& ultra,
                     const Question& doc_question, std::span<const std::string> doc_args) {
  if (!(ultra.question == doc_question)) {
    fail(ErrorKind::kValidation, "cannot merge answers to different questions ('" +
                                     ultra.question.role + "' vs '" + doc_question.role + "')");
  }
  EnsembleResult r;
  r.question = doc_question;
  r.ultra_args = ultra.final_texts();
  r.doc_args.assign(doc_args.begin(), doc_args.end());
  r.merged = merge_spans(doc, r.ultra_args, r.doc_args);
  return r;
}

}  // namespace ultra
