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

#ifndef ULTRA_PROMPTS_HPP_
#define ULTRA_PROMPTS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ultra/chunker.hpp"
#include "ultra/corpus.hpp"

namespace ultra {

enum class Stage { kLocal, kCompare, kDoclevel };

std::string_view to_string(Stage stage);

// Instruction templates for the three stages. Each stage also has a
// "truncated" layout that places the question before the long field
// (passage, article or news) and ends with that field, so trimming the
// prompt tail under the token budget never removes the question.
class PromptTemplates {
 public:
  // The aligned instructions used by the extractor, comparator and
  // document-level extractor.
  static PromptTemplates defaults();
  // JSON object: {"local": ..., "compare": ..., "doclevel": ...} plus
  // optional "<stage>_truncated" layouts. Missing stages keep defaults.
  static PromptTemplates from_json(const nlohmann::json& j);
  static PromptTemplates load(const std::filesystem::path& path);

  const std::string& get(Stage stage) const;
  // Empty when a custom template has no truncated layout.
  const std::string& truncated(Stage stage) const;

  // budget = 0 disables the layout switch.
  std::string render_local(const Window& w, const Question& q,
                           std::size_t budget = 0) const;
  std::string render_compare(std::string_view article, const Question& q,
                             std::string_view arg1, std::string_view arg2,
                             std::size_t budget = 0) const;
  std::string render_doclevel(const Document& doc, const Question& q,
                              std::size_t budget = 0) const;

 private:
  std::map<Stage, std::string> templates_;
  std::map<Stage, std::string> truncated_;
};

// Single-pass {name} substitution; replacement values are never rescanned.
// Throws kValidation on a placeholder outside allowed or without a value.
std::string fill_template(
    std::string_view tmpl, const std::map<std::string, std::string>& values);

// Throws kValidation if tmpl uses a placeholder not allowed for stage.
void check_placeholders(Stage stage, std::string_view tmpl);

}  // namespace ultra

#endif  // ULTRA_PROMPTS_HPP_
