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


#include "ultra/leafer.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include <spdlog/spdlog.h>

#include "ultra/errors.hpp"
#include "ultra/eval.hpp"
#include "ultra/text.hpp"

namespace ultra {

namespace {

constexpr std::size_t kJudgeMaxNewTokens = 64;

bool present(std::optional<std::string_view> s) { return s && !is_not_available(*s); }

std::string in_quotes(std::string_view s) { return "\"" + std::string(s) + "\""; }

// Straight or curly double quote at pos; width receives the byte length.
bool double_quote_at(std::string_view s, std::size_t pos, std::size_t* width) {
  std::size_t w = 0;
  if (!is_quote_at(s, pos, &w)) return false;
  if (w == 1 && s[pos] != '"') return false;
  if (w == 3 && static_cast<unsigned char>(s[pos + 2]) != 0x9C &&
      static_cast<unsigned char>(s[pos + 2]) != 0x9D) {
    return false;
  }
  *width = w;
  return true;
}

// Text between the first double quote after from and the last one.
std::optional<std::string> quoted_span(std::string_view text, std::size_t from) {
  std::size_t open = std::string_view::npos, open_w = 0;
  std::size_t close = std::string_view::npos;
  for (std::size_t i = from; i < text.size(); ++i) {
    std::size_t w = 0;
    if (!double_quote_at(text, i, &w)) continue;
    if (open == std::string_view::npos) {
      open = i;
      open_w = w;
    } else {
      close = i;
    }
    i += w - 1;
  }
  if (open == std::string_view::npos || close == std::string_view::npos) return std::nullopt;
  return std::string(text.substr(open + open_w, close - open - open_w));
}

}  // namespace

std::string_view to_string(JudgmentClass c) {
  switch (c) {
    case JudgmentClass::kBothNa: return "both_na";
    case JudgmentClass::kSpurious: return "spurious";
    case JudgmentClass::kMissed: return "missed";
    case JudgmentClass::kExact: return "exact";
    case JudgmentClass::kBoundary: return "boundary";
    case JudgmentClass::kWrong: return "wrong";
  }
  return "?";
}

double content_jaccard(std::string_view a, std::string_view b) {
  const auto ta = normalize_em(a);
  const auto tb = normalize_em(b);
  const std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

JudgmentClass classify_pair(std::optional<std::string_view> extraction,
                            std::optional<std::string_view> gold) {
  const bool has_ex = present(extraction);
  const bool has_gold = present(gold);
  if (!has_ex && !has_gold) return JudgmentClass::kBothNa;
  if (has_ex && !has_gold) return JudgmentClass::kSpurious;
  if (!has_ex) return JudgmentClass::kMissed;
  if (normalize_dedup(*extraction) == normalize_dedup(*gold)) return JudgmentClass::kExact;
  if (content_jaccard(*extraction, *gold) >= kBoundaryJaccard) return JudgmentClass::kBoundary;
  return JudgmentClass::kWrong;
}

Judgment render_judgment(JudgmentClass kind, std::optional<std::string_view> gold) {
  Judgment j;
  j.kind = kind;
  auto need_gold = [&]() -> std::string {
    if (!present(gold)) {
      fail(ErrorKind::kValidation,
           "judgment class '" + std::string(to_string(kind)) + "' needs a gold span");
    }
    return std::string(*gold);
  };
  switch (kind) {
    case JudgmentClass::kBothNa:
    case JudgmentClass::kExact:
      j.text = "Yes.";
      break;
    case JudgmentClass::kSpurious:
      j.text = "No, you should generate " + in_quotes(kNotAvailable);
      j.corrected = std::string(kNotAvailable);
      break;
    case JudgmentClass::kMissed:
    case JudgmentClass::kWrong:
      j.corrected = need_gold();
      j.text = "No, you should generate " + in_quotes(*j.corrected) + ".";
      break;
    case JudgmentClass::kBoundary:
      j.corrected = need_gold();
      j.text = "You are almost there! The right answer should be " + in_quotes(*j.corrected) + ".";
      break;
  }
  return j;
}

Judgment make_judgment(std::optional<std::string_view> extraction,
                       std::optional<std::string_view> gold) {
  return render_judgment(classify_pair(extraction, gold), gold);
}

Judgment parse_judgment(std::string_view text, bool extraction_present) {
  Judgment j;
  j.text = trim(text);
  const std::string lower = to_lower(j.text);
  if (lower.rfind("yes", 0) == 0) {
    j.kind = extraction_present ? JudgmentClass::kExact : JudgmentClass::kBothNa;
    return j;
  }
  auto unparseable = [&]() -> Error {
    return Error(ErrorKind::kParse, "unparseable judgment: \"" + j.text + "\"");
  };
  if (auto at = lower.find("should generate"); at != std::string::npos) {
    auto span = quoted_span(j.text, at);
    if (!span) throw unparseable();
    if (is_not_available(*span)) {
      j.kind = JudgmentClass::kSpurious;
      j.corrected = std::string(kNotAvailable);
    } else {
      j.kind = extraction_present ? JudgmentClass::kWrong : JudgmentClass::kMissed;
      j.corrected = *span;
    }
    return j;
  }
  if (auto at = lower.find("should be"); at != std::string::npos) {
    auto span = quoted_span(j.text, at);
    if (!span) throw unparseable();
    j.kind = JudgmentClass::kBoundary;
    j.corrected = *span;
    return j;
  }
  throw unparseable();
}

std::optional<std::string> gold_for_window(const Document& doc, const Window& w,
                                           std::string_view role,
                                           std::optional<std::string_view> extraction) {
  std::optional<std::string> best;
  double best_score = -1.0;
  for (const auto& span : doc.gold_spans(role)) {
    if (!find_normalized(w.text, span)) continue;
    if (!present(extraction)) return span;
    const double score = content_jaccard(*extraction, span);
    if (score > best_score) {
      best_score = score;
      best = span;
    }
  }
  return best;
}

std::string judge_input(const PromptTemplates& templates, const Window& w, const Question& q,
                        std::string_view extraction) {
  return templates.render_local(w, q) + "\nAnswer: " + std::string(extraction);
}

RequestTag judge_tag(const Window& w, const Question& q, std::string_view extraction) {
  return RequestTag{{"judge", w.doc_id, std::to_string(w.start), q.role, std::string(extraction)}};
}

std::vector<LeaferBankRecord> build_bank(Gateway& gw, const PromptTemplates& templates,
                                         const std::vector<Document>& train,
                                         const Ontology& ontology, std::size_t k) {
  std::vector<LeaferBankRecord> records;
  for (const auto& doc : train) {
    if (!doc.gold) {
      fail(ErrorKind::kValidation, "training document '" + doc.id + "' has no gold annotations");
    }
    const auto questions = questions_for(doc, ontology);
    for (const auto& w : split_windows(doc, k)) {
      for (const auto& q : questions) {
        auto extraction = extract_window(gw, templates, w, q);
        auto gold = gold_for_window(doc, w, q.role, extraction);
        LeaferBankRecord r;
        r.doc_id = doc.id;
        r.window_start = w.start;
        r.window_text = w.text;
        r.question = q;
        r.extraction = extraction.value_or(std::string(kNotAvailable));
        r.gold = gold.value_or(std::string(kNotAvailable));
        r.judgment = make_judgment(extraction, gold);
        records.push_back(std::move(r));
      }
    }
  }
  return records;
}

nlohmann::ordered_json bank_record_to_json(const PromptTemplates& templates,
                                           const LeaferBankRecord& r) {
  Window w;
  w.doc_id = r.doc_id;
  w.start = r.window_start;
  w.text = r.window_text;
  nlohmann::ordered_json j;
  j["input"] = judge_input(templates, w, r.question, r.extraction);
  j["target"] = r.judgment.text;
  return j;
}

void write_bank(std::ostream& out, const PromptTemplates& templates,
                std::span<const LeaferBankRecord> records) {
  for (const auto& r : records) out << bank_record_to_json(templates, r).dump() << '\n';
}

Judgment judge(Gateway& gw, const PromptTemplates& templates, const Window& w, const Question& q,
               std::string_view extraction) {
  GenerationRequest req;
  req.prompt = judge_input(templates, w, q, extraction);
  const std::size_t budget = gw.config().token_budget;
  if (approx_tokens(req.prompt) > budget) {
    // Shrink the passage so the question and extraction survive.
    const std::size_t overhead = approx_tokens(req.prompt) - approx_tokens(w.text) + 2;
    Window shorter = w;
    shorter.text = truncate_to_tokens(w.text, budget > overhead ? budget - overhead : 1);
    if (trim(shorter.text).empty()) shorter.text = "...";
    req.prompt = judge_input(templates, shorter, q, extraction);
  }
  req.max_new_tokens = kJudgeMaxNewTokens;
  req.tag = judge_tag(w, q, extraction);
  std::string out;
  try {
    out = gw.complete(req);
  } catch (const Error& e) {
    throw e.with_context("judging '" + std::string(extraction) + "' in document '" + w.doc_id + "'");
  }
  return parse_judgment(out, !is_not_available(extraction));
}

CandidateSet rectify(const Document& doc, const CandidateSet& cs,
                     std::span<const Judgment> judgments) {
  if (judgments.size() != cs.candidates.size()) {
    fail(ErrorKind::kValidation, "rectify needs one judgment per candidate (" +
                                     std::to_string(cs.candidates.size()) + " candidates, " +
                                     std::to_string(judgments.size()) + " judgments)");
  }
  std::vector<Candidate> kept;
  for (std::size_t i = 0; i < judgments.size(); ++i) {
    Candidate c = cs.candidates[i];
    const Judgment& j = judgments[i];
    switch (j.kind) {
      case JudgmentClass::kBothNa:
      case JudgmentClass::kExact:
        break;
      case JudgmentClass::kSpurious:
        continue;
      case JudgmentClass::kMissed:
      case JudgmentClass::kBoundary:
      case JudgmentClass::kWrong:
        if (!j.corrected || is_not_available(*j.corrected)) continue;
        c.text = trim(*j.corrected);
        c.first_offset = locate_candidate(doc, c.text, c.source_windows);
        break;
    }
    kept.push_back(std::move(c));
  }
  return CandidateSet{cs.question, dedup_candidates(std::move(kept))};
}

Window judgment_window(const Document& doc, std::span<const Window> windows, const Candidate& c) {
  if (c.source_windows.empty()) fail(ErrorKind::kValidation, "candidate without source windows");
  const std::size_t start = c.source_windows.front();
  for (const auto& w : windows) {
    if (w.start == start) return w;
  }
  fail(ErrorKind::kValidation, "candidate '" + c.text + "' cites window " + std::to_string(start) +
                                   " not present in document '" + doc.id + "'");
}

}  // namespace ultra
