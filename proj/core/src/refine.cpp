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


#include "ultra/refine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

#include "ultra/errors.hpp"

namespace ultra {

namespace {

const std::vector<std::string> kYesNo = {"yes", "no"};

std::size_t first_window(const Candidate& c) {
  return c.source_windows.empty() ? 0 : c.source_windows.front();
}

bool earlier(const Candidate& a, const Candidate& b) {
  if (a.first_offset != b.first_offset) return a.first_offset < b.first_offset;
  return first_window(a) < first_window(b);
}

}  // namespace

std::string_view to_string(Calibration g) {
  return g == Calibration::kAdditive ? "additive" : "multiplicative";
}

Calibration calibration_from_string(std::string_view s) {
  if (s == "additive") return Calibration::kAdditive;
  if (s == "multiplicative") return Calibration::kMultiplicative;
  fail(ErrorKind::kValidation,
       "unknown calibration '" + std::string(s) + "' (expected additive or multiplicative)");
}

std::vector<std::string> RankedArgumentSet::final_texts() const {
  std::vector<std::string> out;
  for (const auto& c : final) out.push_back(c.text);
  return out;
}

std::size_t final_size(std::size_t n) {
  if (n == 0) fail(ErrorKind::kValidation, "final_size is undefined for an empty set");
  return static_cast<std::size_t>(std::bit_width(n));
}

CandidateSet prune_earliest(const CandidateSet& cands, std::size_t cap) {
  if (cap == 0) fail(ErrorKind::kValidation, "prune cap must be positive");
  const auto& in = cands.candidates;
  if (in.size() <= cap) return cands;
  std::vector<std::size_t> idx(in.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return earlier(in[a], in[b]); });
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  CandidateSet out{cands.question, {}};
  for (std::size_t i : idx) out.candidates.push_back(in[i]);
  return out;
}

std::array<double, 2> calibrate(std::array<double, 2> raw, std::array<double, 2> prior,
                                Calibration g) {
  std::array<double, 2> z{};
  for (std::size_t i = 0; i < 2; ++i) {
    if (g == Calibration::kAdditive) {
      z[i] = raw[i] - prior[i];
    } else {
      if (!(prior[i] > 0.0)) fail(ErrorKind::kNumeric, "multiplicative calibration with a zero prior");
      z[i] = raw[i] / prior[i];
    }
  }
  auto p = softmax(z);
  return {p[0], p[1]};
}

std::optional<std::array<double, 2>> PriorCache::find(const std::string& prompt) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(prompt);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void PriorCache::insert(const std::string& prompt, std::array<double, 2> probs) {
  std::lock_guard lock(mu_);
  entries_.emplace(prompt, probs);
}

std::size_t PriorCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

RequestTag compare_tag(const Document& doc, const Question& q, std::string_view arg1,
                       std::string_view arg2) {
  return RequestTag{{"compare", doc.id, q.event_type, q.role, std::string(arg1), std::string(arg2)}};
}

RequestTag prior_tag(const Question& q, std::string_view arg1, std::string_view arg2) {
  return RequestTag{{"prior", q.event_type, q.role, std::string(arg1), std::string(arg2)}};
}

namespace {

std::array<double, 2> ask(Gateway& gw, std::string prompt, RequestTag tag) {
  auto p = gw.choice_probabilities(ChoiceRequest{std::move(prompt), kYesNo, std::move(tag)});
  return {p[0], p[1]};
}

// Calibrated (first, second) preference for one display order.
std::array<double, 2> one_order(Gateway& gw, const PromptTemplates& templates,
                                const Document& doc, const std::string& article,
                                const Question& q, const std::string& first,
                                const std::string& second, Calibration g, PriorCache* cache) {
  const std::size_t budget = gw.config().token_budget;
  const auto raw = ask(gw, templates.render_compare(article, q, first, second, budget),
                       compare_tag(doc, q, first, second));
  const std::string prior_prompt = templates.render_compare("", q, first, second, budget);
  std::optional<std::array<double, 2>> prior = cache ? cache->find(prior_prompt) : std::nullopt;
  if (!prior) {
    prior = ask(gw, prior_prompt, prior_tag(q, first, second));
    if (cache) cache->insert(prior_prompt, *prior);
  }
  return calibrate(raw, *prior, g);
}

}  // namespace

PairScore calibrated_pair(Gateway& gw, const PromptTemplates& templates, const Document& doc,
                          const Question& q, const std::string& a, const std::string& b,
                          const RefineOptions& opts, PriorCache* cache) {
  if (a == b) fail(ErrorKind::kValidation, "cannot compare a candidate with itself");
  const std::string article = doc.full_text();
  const auto ab = one_order(gw, templates, doc, article, q, a, b, opts.calibration, cache);
  PairScore s{a, b, ab[0], ab[1]};
  if (opts.both_orders) {
    const auto ba = one_order(gw, templates, doc, article, q, b, a, opts.calibration, cache);
    const double pa = (ab[0] + ba[1]) / 2.0;
    const double pb = (ab[1] + ba[0]) / 2.0;
    s.p_a = pa / (pa + pb);
    s.p_b = pb / (pa + pb);
  }
  return s;
}

RankedArgumentSet passthrough(const CandidateSet& cands) {
  RankedArgumentSet out;
  out.question = cands.question;
  for (const auto& c : cands.candidates) out.ranked.push_back(RankedCandidate{c, 0.0});
  out.final = cands.candidates;
  return out;
}

RankedArgumentSet rank_and_filter(Gateway& gw, const PromptTemplates& templates,
                                  const Document& doc, const CandidateSet& cands,
                                  const RefineOptions& opts, PriorCache* cache) {
  const CandidateSet pruned = prune_earliest(cands, opts.prune_cap);
  const auto& c = pruned.candidates;
  const std::size_t n = c.size();
  if (n <= 1) return passthrough(pruned);

  std::vector<double> score(n, 0.0);
  std::size_t pairs = 0, failed = 0;
  std::string last_error;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      ++pairs;
      PairScore s{c[i].text, c[j].text, 0.5, 0.5};
      try {
        s = calibrated_pair(gw, templates, doc, pruned.question, c[i].text, c[j].text, opts, cache);
      } catch (const Error& e) {
        if (!e.is_call_failure()) throw;
        ++failed;
        last_error = e.what();
        spdlog::warn("pair ('{}', '{}') scored 0.5/0.5 after failure: {}", c[i].text, c[j].text,
                     e.what());
      }
      score[i] += s.p_a;
      score[j] += s.p_b;
    }
  }
  if (failed == pairs) {
    fail(ErrorKind::kTransport, "every pairwise comparison failed for document '" + doc.id +
                                    "' role '" + pruned.question.role + "'; last: " + last_error);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return earlier(c[a], c[b]);
  });

  RankedArgumentSet out;
  out.question = pruned.question;
  for (std::size_t i : order) out.ranked.push_back(RankedCandidate{c[i], score[i]});
  const std::size_t keep = std::min(n, final_size(n));
  for (std::size_t r = 0; r < keep; ++r) out.final.push_back(out.ranked[r].candidate);
  return out;
}

}  // namespace ultra
