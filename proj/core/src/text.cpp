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

#include "ultra/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "ultra/errors.hpp"

namespace ultra {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kTransport: return "transport error";
    case ErrorKind::kBackend: return "backend error";
    case ErrorKind::kCapability: return "capability error";
    case ErrorKind::kNumeric: return "numeric error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(message), kind_(kind), line_(line) {}

Error Error::with_context(std::string_view context) const {
  return Error(kind_, std::string(context) + ": " + what(), line_);
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

bool is_terminal_punct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
}

// Strips one layer of surrounding quotes or trailing punctuation; returns
// false once nothing changes.
bool strip_once(std::string& s) {
  std::size_t w = 0;
  if (!s.empty() && is_terminal_punct(s.back())) {
    s.pop_back();
    return true;
  }
  if (!s.empty() && is_quote_at(s, 0, &w)) {
    s.erase(0, w);
    return true;
  }
  // Trailing quote: check the last one to three bytes.
  for (std::size_t len = 1; len <= 3 && len <= s.size(); ++len) {
    if (is_quote_at(s, s.size() - len, &w) && w == len) {
      s.erase(s.size() - len);
      return true;
    }
  }
  return false;
}

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_quote_at(std::string_view s, std::size_t pos, std::size_t* width) {
  if (pos >= s.size()) return false;
  if (s[pos] == '"' || s[pos] == '\'' || s[pos] == '`') {
    *width = 1;
    return true;
  }
  // U+2018, U+2019, U+201C, U+201D: E2 80 {98,99,9C,9D}
  if (pos + 2 < s.size() && static_cast<unsigned char>(s[pos]) == 0xE2 &&
      static_cast<unsigned char>(s[pos + 1]) == 0x80) {
    auto c = static_cast<unsigned char>(s[pos + 2]);
    if (c == 0x98 || c == 0x99 || c == 0x9C || c == 0x9D) {
      *width = 3;
      return true;
    }
  }
  return false;
}

std::string normalize_dedup(std::string_view s) {
  std::string out;
  for (const auto& tok : split_whitespace(to_lower(s))) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  while (strip_once(out)) out = trim(out);
  return out;
}

bool is_not_available(std::string_view s) {
  auto n = normalize_dedup(s);
  return n.empty() || n == "n/a";
}

std::optional<std::size_t> find_normalized(std::string_view haystack,
                                           std::string_view needle) {
  const std::string target = normalize_dedup(needle);
  if (target.empty()) return std::nullopt;
  // Collapse whitespace in the haystack, remembering original offsets.
  std::string flat;
  std::vector<std::size_t> origin;
  flat.reserve(haystack.size());
  origin.reserve(haystack.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < haystack.size(); ++i) {
    char c = haystack[i];
    if (is_space(c)) {
      pending_space = !flat.empty();
      continue;
    }
    if (pending_space) {
      flat += ' ';
      origin.push_back(i);
      pending_space = false;
    }
    flat += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    origin.push_back(i);
  }
  auto pos = flat.find(target);
  if (pos == std::string::npos) return std::nullopt;
  return origin[pos];
}

std::size_t approx_tokens(std::string_view text) {
  auto words = split_whitespace(text).size();
  return static_cast<std::size_t>(std::ceil(static_cast<double>(words) * 1.3 - 1e-9));
}

std::string truncate_to_tokens(std::string_view text, std::size_t budget) {
  if (approx_tokens(text) <= budget) return std::string(text);
  // Largest word count w with ceil(1.3 w) <= budget.
  std::size_t keep = 0;
  while (static_cast<std::size_t>(std::ceil((keep + 1) * 1.3 - 1e-9)) <= budget) ++keep;
  std::size_t i = 0, words = 0, cut = 0;
  while (i < text.size() && words < keep) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) {
      ++words;
      cut = j;
    }
    i = j;
  }
  return std::string(text.substr(0, cut));
}

}  // namespace ultra
