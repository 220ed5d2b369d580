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

#include <algorithm>

#include <spdlog/spdlog.h>

#include "ultra/errors.hpp"
#include "ultra/text.hpp"

namespace ultra {

namespace {

constexpr std::size_t kLocalMaxNewTokens = 64;

}  // namespace

std::vector<std::string> CandidateSet::texts() const {
  std::vector<std::string> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(c.text);
  return out;
}

std::size_t locate_candidate(const Document& doc, std::string_view text,
                             std::span<const std::size_t> source_windows) {
  if (auto pos = find_normalized(doc.full_text(), text)) return *pos;
  if (source_windows.empty()) return 0;
  const auto offsets = doc.sentence_offsets();
  const std::size_t first = *std::min_element(source_windows.begin(), source_windows.end());
  return first < offsets.size() ? offsets[first] : 0;
}

void sort_candidates(std::vector<Candidate>& cands) {
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.first_offset != b.first_offset) return a.first_offset < b.first_offset;
    const std::size_t wa = a.source_windows.empty() ? 0 : a.source_windows.front();
    const std::size_t wb = b.source_windows.empty() ? 0 : b.source_windows.front();
    if (wa != wb) return wa < wb;
    return a.text < b.text;
  });
}

std::vector<Candidate> dedup_candidates(std::vector<Candidate> cands) {
  std::vector<Candidate> out;
  std::vector<std::string> keys;
  for (auto& c : cands) {
    const std::string key = normalize_dedup(c.text);
    auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) {
      keys.push_back(key);
      out.push_back(std::move(c));
      continue;
    }
    Candidate& kept = out[static_cast<std::size_t>(it - keys.begin())];
    kept.source_windows.insert(kept.source_windows.end(), c.source_windows.begin(),
                               c.source_windows.end());
    std::sort(kept.source_windows.begin(), kept.source_windows.end());
    kept.source_windows.erase(std::unique(kept.source_windows.begin(), kept.source_windows.end()),
                              kept.source_windows.end());
    kept.first_offset = std::min(kept.first_offset, c.first_offset);
  }
  sort_candidates(out);
  return out;
}

RequestTag local_tag(const Window& w, const Question& q) {
  return RequestTag{{"local", w.doc_id, std::to_string(w.start), q.role}};
}

std::optional<std::string> extract_window(Gateway& gw, const PromptTemplates& templates,
                                          const Window& w, const Question& q) {
  GenerationRequest req;
  req.prompt = templates.render_local(w, q, gw.config().token_budget);
  req.max_new_tokens = kLocalMaxNewTokens;
  req.tag = local_tag(w, q);
  std::string out;
  try {
    out = gw.complete(req);
  } catch (const Error& e) {
    throw e.with_context("document '" + w.doc_id + "' window " + std::to_string(w.start) +
                         " role '" + q.role + "'");
  }
  if (is_not_available(out)) return std::nullopt;
  return out;
}

CandidateSet assemble_candidates(const Document& doc, const Question& q,
                                 std::span<const Window> windows,
                                 std::span<const std::optional<std::string>> outputs) {
  if (windows.size() != outputs.size()) {
    fail(ErrorKind::kValidation, "window/output count mismatch");
  }
  std::vector<Candidate> raw;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!outputs[i] || is_not_available(*outputs[i])) continue;
    Candidate c;
    c.text = trim(*outputs[i]);
    c.role = q.role;
    c.source_windows = {windows[i].start};
    raw.push_back(std::move(c));
  }
  // Merge first so offsets are computed from the full window list.
  auto merged = dedup_candidates(std::move(raw));
  for (auto& c : merged) c.first_offset = locate_candidate(doc, c.text, c.source_windows);
  sort_candidates(merged);
  return CandidateSet{q, std::move(merged)};
}

CandidateSet extract_candidates(Gateway& gw, const PromptTemplates& templates,
                                const Document& doc, const Question& q, std::size_t k) {
  const auto windows = split_windows(doc, k);
  std::vector<std::optional<std::string>> outputs(windows.size());
  std::size_t failures = 0;
  std::string last_error;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    try {
      outputs[i] = extract_window(gw, templates, windows[i], q);
    } catch (const Error& e) {
      if (!e.is_call_failure()) throw;
      ++failures;
      last_error = e.what();
      spdlog::warn("skipping window: {}", e.what());
    }
  }
  if (failures * 2 > windows.size()) {
    fail(ErrorKind::kTransport, std::to_string(failures) + " of " + std::to_string(windows.size()) +
                                    " window calls failed for document '" + doc.id + "' role '" +
                                    q.role + "'; last: " + last_error);
  }
  return assemble_candidates(doc, q, windows, outputs);
}

nlohmann::ordered_json candidate_to_json(const std::string& doc_id, const Candidate& c) {
  nlohmann::ordered_json j;
  j["doc"] = doc_id;
  j["role"] = c.role;
  j["text"] = c.text;
  j["windows"] = c.source_windows;
  j["offset"] = c.first_offset;
  return j;
}

}  // namespace ultra
