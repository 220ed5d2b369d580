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

#ifndef ULTRA_REFINE_HPP_
#define ULTRA_REFINE_HPP_

#include <array>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "ultra/corpus.hpp"
#include "ultra/extractor.hpp"
#include "ultra/gateway.hpp"
#include "ultra/prompts.hpp"

namespace ultra {

enum class Calibration { kAdditive, kMultiplicative };

std::string_view to_string(Calibration g);
Calibration calibration_from_string(std::string_view s);

inline constexpr std::size_t kDefaultPruneCap = 5;

struct PairScore {
  std::string a;
  std::string b;
  double p_a = 0.5;
  double p_b = 0.5;
};

struct RankedCandidate {
  Candidate candidate;
  double score = 0.0;
};

struct RankedArgumentSet {
  Question question;
  std::vector<RankedCandidate> ranked;  // descending score
  std::vector<Candidate> final;         // kept prefix of ranked

  std::vector<std::string> final_texts() const;
};

// floor(1 + log2(n)) for n >= 1.
std::size_t final_size(std::size_t n);

// Keeps the cap earliest candidates, preserving their relative order.
CandidateSet prune_earliest(const CandidateSet& cands,
                            std::size_t cap = kDefaultPruneCap);

// softmax(g(raw_a, prior_a), g(raw_b, prior_b)).
std::array<double, 2> calibrate(std::array<double, 2> raw,
                                std::array<double, 2> prior, Calibration g);

// Prior (blank-article) probabilities keyed by prompt; shared across a run.
class PriorCache {
 public:
  std::optional<std::array<double, 2>> find(const std::string& prompt) const;
  void insert(const std::string& prompt, std::array<double, 2> probs);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::array<double, 2>> entries_;
};

struct RefineOptions {
  Calibration calibration = Calibration::kAdditive;
  std::size_t prune_cap = kDefaultPruneCap;
  bool both_orders = true;  // average the (a,b) and (b,a) displays
};

// Calibrated preference between a and b over the full article.
PairScore calibrated_pair(Gateway& gw, const PromptTemplates& templates,
                          const Document& doc, const Question& q,
                          const std::string& a, const std::string& b,
                          const RefineOptions& opts,
                          PriorCache* cache = nullptr);

RequestTag compare_tag(const Document& doc, const Question& q,
                       std::string_view arg1, std::string_view arg2);
RequestTag prior_tag(const Question& q, std::string_view arg1,
                     std::string_view arg2);

// Prune, score every pair, rank by summed win probability (ties go to the
// earlier candidate) and keep final_size(n) of them.
RankedArgumentSet rank_and_filter(Gateway& gw,
                                  const PromptTemplates& templates,
                                  const Document& doc,
                                  const CandidateSet& cands,
                                  const RefineOptions& opts,
                                  PriorCache* cache = nullptr);

// Ranked set that keeps everything, for runs without layer-2.
RankedArgumentSet passthrough(const CandidateSet& cands);

}  // namespace ultra

#endif  // ULTRA_REFINE_HPP_
