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


#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "cli.hpp"
#include "ultra/errors.hpp"
#include "ultra/refine.hpp"
#include "ultra/text.hpp"

namespace ultra::cli {

namespace {

using Value = std::variant<std::string, long long, bool>;

const std::set<std::string> kTopKeys = {"mode",         "window_k", "prune_cap", "calibration",
                                        "ensemble",     "refine",   "single_order", "leafer",
                                        "trace",        "workers",  "templates"};
const std::set<std::string> kBackendKeys = {"kind",        "endpoint",      "model",
                                            "token_budget", "timeout_ms",   "retries",
                                            "backoff_ms",  "max_in_flight", "scoring",
                                            "mock_script"};

std::string join(const std::set<std::string>& keys) {
  std::string out;
  for (const auto& k : keys) out += (out.empty() ? "" : ", ") + k;
  return out;
}

[[noreturn]] void bad(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::kParse, "config line " + std::to_string(line) + ": " + msg, line);
}

Value parse_value(std::string_view raw, std::size_t line) {
  const std::string v = trim(raw);
  if (v.empty()) bad(line, "missing value");
  if (v.front() == '"') {
    std::string out;
    std::size_t i = 1;
    for (; i < v.size() && v[i] != '"'; ++i) {
      if (v[i] == '\\' && i + 1 < v.size()) {
        const char e = v[++i];
        out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
      } else {
        out += v[i];
      }
    }
    if (i >= v.size()) bad(line, "unterminated string");
    if (!trim(std::string_view(v).substr(i + 1)).empty()) bad(line, "trailing characters after string");
    return out;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(v, &used);
  } catch (const std::exception&) {
    bad(line, "cannot read value '" + v + "' (strings need double quotes)");
  }
  if (used != v.size()) bad(line, "cannot read value '" + v + "'");
  return n;
}

// Strips a # comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && in_string) {
      ++i;
    } else if (line[i] == '"') {
      in_string = !in_string;
    } else if (line[i] == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

std::string as_string(const Value& v, const std::string& key) {
  if (auto s = std::get_if<std::string>(&v)) return *s;
  fail(ErrorKind::kValidation, "config key '" + key + "' must be a string");
}

bool as_bool(const Value& v, const std::string& key) {
  if (auto b = std::get_if<bool>(&v)) return *b;
  fail(ErrorKind::kValidation, "config key '" + key + "' must be true or false");
}

std::size_t as_count(const Value& v, const std::string& key) {
  auto n = std::get_if<long long>(&v);
  if (!n || *n < 0) fail(ErrorKind::kValidation, "config key '" + key + "' must be a non-negative integer");
  return static_cast<std::size_t>(*n);
}

void apply_backend(BackendConfig& b, const std::string& key, const Value& v) {
  if (key == "kind") {
    const auto kind = as_string(v, key);
    if (kind == "http") b.kind = BackendKind::kHttp;
    else if (kind == "mock") b.kind = BackendKind::kMock;
    else fail(ErrorKind::kValidation, "backend kind must be \"http\" or \"mock\"");
  } else if (key == "endpoint") {
    b.endpoint = as_string(v, key);
  } else if (key == "model") {
    b.model = as_string(v, key);
  } else if (key == "token_budget") {
    b.token_budget = as_count(v, key);
  } else if (key == "timeout_ms") {
    b.timeout = std::chrono::milliseconds(as_count(v, key));
  } else if (key == "retries") {
    b.retries = as_count(v, key);
  } else if (key == "backoff_ms") {
    b.backoff = std::chrono::milliseconds(as_count(v, key));
  } else if (key == "max_in_flight") {
    b.max_in_flight = as_count(v, key);
  } else if (key == "scoring") {
    const auto s = as_string(v, key);
    if (s == "sequence") b.scoring = OptionScoring::kSequence;
    else if (s == "first_token") b.scoring = OptionScoring::kFirstToken;
    else fail(ErrorKind::kValidation, "scoring must be \"sequence\" or \"first_token\"");
  } else if (key == "mock_script") {
    b.mock_script = as_string(v, key);
    b.kind = BackendKind::kMock;
  }
}

}  // namespace

CliConfig parse_config(std::string_view text) {
  CliConfig cfg;
  cfg.pipeline.backend.kind = BackendKind::kHttp;
  std::map<std::string, Value> top;
  std::map<std::string, Value> backend, judge;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad(lineno, "malformed table header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "backend" && section != "judge") {
        fail(ErrorKind::kValidation, "unknown config table [" + section + "] (valid: backend, judge)");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad(lineno, "expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const Value value = parse_value(std::string_view(line).substr(eq + 1), lineno);
    const auto& valid = section.empty() ? kTopKeys : kBackendKeys;
    if (!valid.count(key)) {
      fail(ErrorKind::kValidation, "unknown config key '" + key + "'" +
                                       (section.empty() ? "" : " in [" + section + "]") +
                                       "; valid keys: " + join(valid));
    }
    auto& target = section.empty() ? top : section == "backend" ? backend : judge;
    target[key] = value;
  }

  auto& p = cfg.pipeline;
  if (auto it = top.find("mode"); it != top.end()) {
    const auto mode = as_string(it->second, "mode");
    if (mode == "base") p.window_k = kBaseWindow;
    else if (mode == "long") p.window_k = kLongWindow;
    else fail(ErrorKind::kValidation, "mode must be \"base\" or \"long\"");
  }
  for (const auto& [key, v] : top) {
    if (key == "window_k") p.window_k = as_count(v, key);
    else if (key == "prune_cap") p.refine.prune_cap = as_count(v, key);
    else if (key == "calibration") p.refine.calibration = calibration_from_string(as_string(v, key));
    else if (key == "ensemble") p.ensemble = as_bool(v, key);
    else if (key == "refine") p.layer2 = as_bool(v, key);
    else if (key == "single_order") p.refine.both_orders = !as_bool(v, key);
    else if (key == "leafer") p.leafer = leafer_mode_from_string(as_string(v, key));
    else if (key == "trace") p.trace = as_bool(v, key);
    else if (key == "workers") p.workers = as_count(v, key);
    else if (key == "templates") cfg.templates = as_string(v, key);
  }
  for (const auto& [key, v] : backend) apply_backend(p.backend, key, v);
  if (!judge.empty()) {
    BackendConfig j;
    j.kind = BackendKind::kHttp;
    for (const auto& [key, v] : judge) apply_backend(j, key, v);
    p.judge_backend = j;
  }
  return cfg;
}

CliConfig load_config(const std::filesystem::path& path) {
  if (path.empty()) return parse_config("");
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kValidation, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  CliConfig cfg;
  try {
    cfg = parse_config(buf.str());
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
  // Relative file references are taken from the config's directory.
  const auto base = path.parent_path();
  auto rebase = [&](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative()) p = base / p;
  };
  rebase(cfg.pipeline.backend.mock_script);
  if (cfg.pipeline.judge_backend) rebase(cfg.pipeline.judge_backend->mock_script);
  if (cfg.templates) rebase(*cfg.templates);
  return cfg;
}

void apply_environment(CliConfig& cfg) {
  auto fill = [](BackendConfig& b) {
    if (const char* key = std::getenv("ULTRA_API_KEY"); key != nullptr && *key != '\0') b.api_key = key;
    if (const char* ep = std::getenv("ULTRA_ENDPOINT"); ep != nullptr && *ep != '\0' && b.endpoint.empty()) {
      b.endpoint = ep;
    }
  };
  fill(cfg.pipeline.backend);
  if (cfg.pipeline.judge_backend) fill(*cfg.pipeline.judge_backend);
}

}  // namespace ultra::cli
