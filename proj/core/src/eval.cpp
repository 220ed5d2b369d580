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


#include "ultra/eval.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <iomanip>
#include <sstream>

#include "ultra/errors.hpp"
#include "ultra/text.hpp"

namespace ultra {

namespace {

// Fixed English stop-word list, sorted for binary search.
constexpr std::array<std::string_view, 135> kStopWords = {
    "a",        "about",   "above",     "across",  "after",      "again",   "against",
    "all",      "along",   "am",        "among",   "an",         "and",     "any",
    "are",      "around",  "as",        "at",      "be",         "been",    "before",
    "being",    "below",   "between",   "both",    "but",        "by",      "can",
    "could",    "did",     "do",        "does",    "doing",      "down",    "during",
    "each",     "few",     "for",       "from",    "further",    "had",     "has",
    "have",     "having",  "he",        "her",     "here",       "hers",    "herself",
    "him",      "himself", "his",       "how",     "i",          "if",      "in",
    "into",     "is",      "it",        "its",     "itself",     "just",    "may",
    "me",       "might",   "more",      "most",    "must",       "my",      "myself",
    "no",       "nor",     "not",       "now",     "of",         "off",     "on",
    "once",     "only",    "or",        "other",   "our",        "ours",    "ourselves",
    "out",      "over",    "own",       "same",    "shall",      "she",     "should",
    "so",       "some",    "such",      "than",    "that",       "the",     "their",
    "theirs",   "them",    "themselves", "then",   "there",      "these",   "they",
    "this",     "those",   "through",   "to",      "too",        "under",   "until",
    "up",       "very",    "was",       "we",      "were",       "what",    "when",
    "where",    "which",   "while",     "who",     "whom",       "why",     "will",
    "with",     "within",  "without",   "would",   "you",        "your",    "yours",
    "yourself", "yourselves"};

constexpr std::array<std::string_view, 31> kPrepositions = {
    "about",  "above",   "across", "after",  "against", "along",  "among",  "around",
    "at",     "before",  "below",  "beside", "between", "by",     "despite", "during",
    "for",    "from",    "in",     "inside", "into",    "near",   "of",     "on",
    "over",   "per",     "since",  "through", "to",     "under",  "with"};

constexpr std::array<std::string_view, 17> kDeterminers = {
    "a",     "an",    "another", "any",  "each", "every", "her",  "his", "its",
    "my",    "our",   "some",    "that", "the",  "their", "these", "this"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& list, std::string_view w) {
  return std::find(list.begin(), list.end(), w) != list.end();
}

bool is_preposition(std::string_view w) { return contains(kPrepositions, w); }
bool is_determiner(std::string_view w) { return contains(kDeterminers, w); }

bool is_alpha_token(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
    return std::isalpha(static_cast<unsigned char>(c));
  });
}

// Lowercases and removes punctuation (ASCII plus common UTF-8 quotes and
// dashes). Dashes become spaces.
std::string strip_punct(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c == 0xE2 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x80) {
      const auto d = static_cast<unsigned char>(s[i + 2]);
      if (d == 0x93 || d == 0x94) {  // en/em dash
        out += ' ';
        i += 2;
        continue;
      }
      if (d == 0x98 || d == 0x99 || d == 0x9C || d == 0x9D || d == 0xA6) {
        i += 2;
        continue;
      }
    }
    if (c < 0x80 && std::ispunct(c)) continue;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

std::string sort_key(std::string_view s) {
  std::string key;
  for (const auto& t : normalize_em(s)) {
    if (!key.empty()) key += ' ';
    key += t;
  }
  return key;
}

void add_head(const std::vector<std::string>& chunk, std::set<std::string>& heads) {
  std::size_t i = 0;
  while (i < chunk.size() && (is_determiner(chunk[i]) || is_preposition(chunk[i]))) ++i;
  std::size_t j = i;
  while (j < chunk.size() && !is_preposition(chunk[j])) ++j;
  const std::string* fallback = nullptr;
  for (std::size_t p = j; p > i; --p) {
    const std::string& tok = chunk[p - 1];
    if (is_stop_word(tok)) continue;
    if (is_alpha_token(tok)) {
      heads.insert(tok);
      return;
    }
    if (fallback == nullptr) fallback = &tok;
  }
  if (fallback != nullptr) heads.insert(*fallback);
}

}  // namespace

bool is_stop_word(std::string_view token) {
  return std::binary_search(kStopWords.begin(), kStopWords.end(), token);
}

std::span<const std::string_view> stop_words() { return kStopWords; }

std::vector<std::string> normalize_em(std::string_view s) {
  std::vector<std::string> out;
  for (auto& tok : split_whitespace(strip_punct(s))) {
    if (!is_stop_word(tok)) out.push_back(std::move(tok));
  }
  return out;
}

bool em_match(std::string_view pred, std::string_view gold) {
  const auto p = normalize_em(pred);
  const auto g = normalize_em(gold);
  if (!p.empty() && !g.empty()) return p == g;
  // Spans made only of stop words are compared verbatim.
  const auto raw_p = split_whitespace(strip_punct(pred));
  return !raw_p.empty() && p.empty() && g.empty() && raw_p == split_whitespace(strip_punct(gold));
}

std::set<std::string> head_words(std::string_view s) {
  std::set<std::string> heads;
  std::vector<std::string> chunk;
  for (const auto& raw : split_whitespace(s)) {
    const bool breaks_after = !raw.empty() && (raw.back() == ',' || raw.back() == ';');
    for (auto& tok : split_whitespace(strip_punct(raw))) {
      if (tok == "and" || tok == "or") {
        add_head(chunk, heads);
        chunk.clear();
      } else {
        chunk.push_back(std::move(tok));
      }
    }
    if (breaks_after) {
      add_head(chunk, heads);
      chunk.clear();
    }
  }
  add_head(chunk, heads);
  return heads;
}

bool hm_match(std::string_view pred, std::string_view gold) {
  if (em_match(pred, gold) && !normalize_em(pred).empty()) return true;
  const auto a = head_words(pred);
  const auto b = head_words(gold);
  return std::any_of(a.begin(), a.end(), [&](const std::string& h) { return b.count(h) > 0; });
}

std::size_t count_matches(std::span<const std::string> preds, std::span<const std::string> golds,
                          const MatchFn& match) {
  std::vector<std::size_t> order(preds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::string> keys;
  keys.reserve(preds.size());
  for (const auto& p : preds) keys.push_back(sort_key(p));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return preds[a] < preds[b];
  });
  std::vector<bool> used(golds.size(), false);
  std::size_t matched = 0;
  for (std::size_t idx : order) {
    for (std::size_t g = 0; g < golds.size(); ++g) {
      if (!used[g] && match(preds[idx], golds[g])) {
        used[g] = true;
        ++matched;
        break;
      }
    }
  }
  return matched;
}

double Prf::precision() const {
  return predicted == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(predicted);
}

double Prf::recall() const {
  return gold == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(gold);
}

double Prf::f1() const {
  const double p = precision(), r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

Prf& Prf::operator+=(const Prf& o) {
  matched += o.matched;
  predicted += o.predicted;
  gold += o.gold;
  return *this;
}

MetricPair& MetricPair::operator+=(const MetricPair& o) {
  em += o.em;
  hm += o.hm;
  return *this;
}

namespace {

nlohmann::ordered_json prf_json(const Prf& p) {
  nlohmann::ordered_json j;
  j["precision"] = p.precision();
  j["recall"] = p.recall();
  j["f1"] = p.f1();
  j["matched"] = p.matched;
  j["predicted"] = p.predicted;
  j["gold"] = p.gold;
  return j;
}

nlohmann::ordered_json pair_json(const MetricPair& m) {
  nlohmann::ordered_json j;
  j["em"] = prf_json(m.em);
  j["hm"] = prf_json(m.hm);
  return j;
}

void table_row(std::ostringstream& os, const std::string& name, std::size_t width,
               const MetricPair& m) {
  os << std::left << std::setw(static_cast<int>(width)) << name << std::right << std::fixed
     << std::setprecision(1);
  for (const Prf* p : {&m.em, &m.hm}) {
    os << std::setw(7) << p->precision() * 100.0 << std::setw(7) << p->recall() * 100.0
       << std::setw(7) << p->f1() * 100.0;
  }
  os << '\n';
}

}  // namespace

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j = pair_json(overall);
  j["instances"] = instances;
  j["per_role"] = nlohmann::ordered_json::object();
  for (const auto& [role, m] : per_role) j["per_role"][role] = pair_json(m);
  return j;
}

std::string EvalReport::to_table() const {
  std::size_t width = 8;
  for (const auto& [role, _] : per_role) width = std::max(width, role.size() + 2);
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "" << std::right << std::setw(21)
     << "EM" << std::setw(21) << "HM" << '\n';
  os << std::left << std::setw(static_cast<int>(width)) << "role" << std::right;
  for (int i = 0; i < 2; ++i) os << std::setw(7) << "P" << std::setw(7) << "R" << std::setw(7) << "F1";
  os << '\n';
  for (const auto& [role, m] : per_role) table_row(os, role, width, m);
  table_row(os, "overall", width, overall);
  return os.str();
}

EvalReport score(const SpanMap& preds, const SpanMap& golds) {
  auto describe = [](const EvalKey& k) { return "('" + k.first + "', '" + k.second + "')"; };
  for (const auto& [key, _] : preds) {
    if (!golds.count(key)) fail(ErrorKind::kValidation, "prediction key " + describe(key) + " has no gold entry");
  }
  for (const auto& [key, _] : golds) {
    if (!preds.count(key)) fail(ErrorKind::kValidation, "gold key " + describe(key) + " has no prediction entry");
  }
  EvalReport report;
  for (const auto& [key, pred] : preds) {
    const auto& gold = golds.at(key);
    MetricPair m;
    m.em = Prf{count_matches(pred, gold, em_match), pred.size(), gold.size()};
    m.hm = Prf{count_matches(pred, gold, hm_match), pred.size(), gold.size()};
    report.overall += m;
    report.per_role[key.second] += m;
    ++report.instances;
  }
  return report;
}

}  // namespace ultra
