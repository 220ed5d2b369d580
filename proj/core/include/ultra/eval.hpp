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

#ifndef ULTRA_EVAL_HPP_
#define ULTRA_EVAL_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace ultra {

bool is_stop_word(std::string_view token);
std::span<const std::string_view> stop_words();

// Lowercase, strip punctuation, split on whitespace, drop stop words.
std::vector<std::string> normalize_em(std::string_view s);

bool em_match(std::string_view pred, std::string_view gold);

// Rule-based head words: each comma- or "and"-separated chunk loses its
// leading determiners/prepositions, is cut at the next preposition, and
// contributes its last non-stop alphabetic token. An approximation of
// noun-phrase heads, not a parser.
std::set<std::string> head_words(std::string_view s);

// Head sets intersect. EM-equal strings always match.
bool hm_match(std::string_view pred, std::string_view gold);

using MatchFn = std::function<bool(std::string_view, std::string_view)>;

// Greedy one-to-one matching: preds in normalized-text order, each takes
// the first unmatched gold it matches.
std::size_t count_matches(std::span<const std::string> preds,
                          std::span<const std::string> golds,
                          const MatchFn& match);

struct Prf {
  std::size_t matched = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;

  double precision() const;
  double recall() const;
  double f1() const;
  Prf& operator+=(const Prf& o);
};

struct MetricPair {
  Prf em;
  Prf hm;
  MetricPair& operator+=(const MetricPair& o);
};

struct EvalReport {
  MetricPair overall;  // micro-averaged over (doc, role) instances
  std::map<std::string, MetricPair> per_role;
  std::size_t instances = 0;

  nlohmann::ordered_json to_json() const;
  // EM/HM x P/R/F1 table, values x100 with one decimal.
  std::string to_table() const;
};

using EvalKey = std::pair<std::string, std::string>;  // (doc id, role)
using SpanMap = std::map<EvalKey, std::vector<std::string>>;

// Throws kValidation when the two key sets differ.
EvalReport score(const SpanMap& preds, const SpanMap& golds);

}  // namespace ultra

#endif  // ULTRA_EVAL_HPP_
