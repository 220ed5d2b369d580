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


#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "ultra/errors.hpp"
#include "ultra/gateway.hpp"

namespace ultra {

namespace {

const std::set<std::string> kScriptKeys = {"complete",    "choice",         "choice_logprobs",
                                           "preferences", "default_complete", "default_choice"};

template <typename Map>
const typename Map::mapped_type* lookup(const Map& m, const std::string& prompt,
                                        const RequestTag& tag) {
  if (auto it = m.find(prompt); it != m.end()) return &it->second;
  if (!tag.empty()) {
    if (auto it = m.find(tag.key()); it != m.end()) return &it->second;
  }
  return nullptr;
}

std::vector<double> number_list(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) fail(ErrorKind::kValidation, "mock script: " + where + " must be a list");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) fail(ErrorKind::kValidation, "mock script: " + where + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

MockScript::ChoiceEntry choice_entry(const nlohmann::json& j, const std::string& where) {
  MockScript::ChoiceEntry e;
  if (j.is_object()) {
    for (const auto& [label, v] : j.items()) {
      if (!v.is_number()) fail(ErrorKind::kValidation, "mock script: " + where + " must hold numbers");
      e.labels.push_back(label);
      e.values.push_back(v.get<double>());
    }
    return e;
  }
  e.values = number_list(j, where);
  return e;
}

nlohmann::json entry_json(const MockScript::ChoiceEntry& e) {
  if (e.labels.empty()) return e.values;
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < e.labels.size(); ++i) j[e.labels[i]] = e.values[i];
  return j;
}

}  // namespace

std::vector<double> MockScript::ChoiceEntry::for_options(
    const std::vector<std::string>& options) const {
  if (labels.empty()) {
    if (values.size() != options.size()) {
      fail(ErrorKind::kValidation, "mock choice entry has " + std::to_string(values.size()) +
                                       " values for " + std::to_string(options.size()) + " options");
    }
    return values;
  }
  std::vector<double> out;
  for (const auto& opt : options) {
    auto it = std::find(labels.begin(), labels.end(), opt);
    if (it == labels.end()) fail(ErrorKind::kValidation, "mock choice entry has no value for option '" + opt + "'");
    out.push_back(values[static_cast<std::size_t>(it - labels.begin())]);
  }
  return out;
}

MockScript MockScript::from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::kValidation, "mock script must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kScriptKeys.count(key)) {
      std::string valid;
      for (const auto& k : kScriptKeys) valid += (valid.empty() ? "" : ", ") + k;
      fail(ErrorKind::kValidation, "mock script: unknown key '" + key + "' (valid: " + valid + ")");
    }
  }
  MockScript s;
  if (j.contains("complete")) {
    for (const auto& [k, v] : j.at("complete").items()) {
      if (!v.is_string()) fail(ErrorKind::kValidation, "mock script: complete['" + k + "'] must be a string");
      s.completions[k] = v.get<std::string>();
    }
  }
  if (j.contains("choice")) {
    for (const auto& [k, v] : j.at("choice").items()) s.choices[k] = choice_entry(v, "choice['" + k + "']");
  }
  if (j.contains("choice_logprobs")) {
    for (const auto& [k, v] : j.at("choice_logprobs").items()) {
      s.choice_logprobs[k] = choice_entry(v, "choice_logprobs['" + k + "']");
    }
  }
  if (j.contains("preferences")) {
    for (const auto& [k, v] : j.at("preferences").items()) {
      if (!v.is_number() || v.get<double>() <= 0.0) {
        fail(ErrorKind::kValidation, "mock script: preference for '" + k + "' must be a positive number");
      }
      s.preferences[k] = v.get<double>();
    }
  }
  if (j.contains("default_complete")) s.default_completion = j.at("default_complete").get<std::string>();
  if (j.contains("default_choice")) s.default_choice = number_list(j.at("default_choice"), "default_choice");
  return s;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kValidation, "cannot open mock script " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

nlohmann::json MockScript::to_json() const {
  nlohmann::json j;
  j["complete"] = completions;
  j["choice"] = nlohmann::json::object();
  for (const auto& [k, e] : choices) j["choice"][k] = entry_json(e);
  j["choice_logprobs"] = nlohmann::json::object();
  for (const auto& [k, e] : choice_logprobs) j["choice_logprobs"][k] = entry_json(e);
  j["preferences"] = preferences;
  j["default_complete"] = default_completion;
  j["default_choice"] = default_choice;
  return j;
}

MockBackend::MockBackend(MockScript script) : script_(std::move(script)) {}

std::string MockBackend::generate(const GenerationRequest& req) {
  if (const auto* hit = lookup(script_.completions, req.prompt, req.tag)) return *hit;
  return script_.default_completion;
}

std::vector<double> MockBackend::score_options(const ChoiceRequest& req) {
  const std::size_t n = req.options.size();
  auto checked = [&](const std::vector<double>& v) {
    if (v.size() != n) {
      fail(ErrorKind::kValidation, "mock script entry for '" + req.tag.key() + "' has " +
                                       std::to_string(v.size()) + " values, expected " +
                                       std::to_string(n));
    }
    return v;
  };
  if (const auto* p = lookup(script_.choices, req.prompt, req.tag)) {
    std::vector<double> logs;
    for (double x : p->for_options(req.options)) logs.push_back(std::log(x));  // log(0) = -inf, rejected upstream
    return logs;
  }
  if (const auto* l = lookup(script_.choice_logprobs, req.prompt, req.tag)) {
    return l->for_options(req.options);
  }

  const auto& parts = req.tag.parts;
  if (n == 2 && parts.size() >= 3 && parts.front() == "compare") {
    auto a = script_.preferences.find(parts[parts.size() - 2]);
    auto b = script_.preferences.find(parts[parts.size() - 1]);
    if (a != script_.preferences.end() && b != script_.preferences.end()) {
      const double p = a->second / (a->second + b->second);
      return {std::log(p), std::log(1.0 - p)};
    }
  }
  if (!script_.default_choice.empty()) {
    std::vector<double> logs;
    for (double x : checked(script_.default_choice)) logs.push_back(std::log(x));
    return logs;
  }
  return std::vector<double>(n, 0.0);
}

}  // namespace ultra
