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


#include "ultra/prompts.hpp"

#include <fstream>
#include <set>

#include "ultra/errors.hpp"
#include "ultra/text.hpp"

namespace ultra {

namespace {

constexpr const char* kLocal =
    "Given a passage from a news article about {e_type}, select the tokens representing "
    "information about '{arg_role}' or answer 'N/A' if the question is not answerable. "
    "\nPassage: {sentence}. Question: What is the '{arg_role}' for the '{e_type}' event?";
constexpr const char* kLocalTruncated =
    "Given a passage from a news article about {e_type}, select the tokens representing "
    "information about '{arg_role}' or answer 'N/A' if the question is not answerable. "
    "\nQuestion: What is the '{arg_role}' for the '{e_type}' event? \nPassage: {sentence}";

constexpr const char* kCompare =
    "Given a news article about '{e_type}' and two candidate spans, decide whether '{arg1}' "
    "is a more acceptable '{arg_role}' than '{arg2}' for the '{e_type}' event. "
    "\nArticle: {article} \nFor this '{e_type}' event, is '{arg1}' a more acceptable "
    "'{arg_role}' than '{arg2}'? Answer yes/no.";
constexpr const char* kCompareTruncated =
    "Given a news article about '{e_type}' and two candidate spans, decide whether '{arg1}' "
    "is a more acceptable '{arg_role}' than '{arg2}' for the '{e_type}' event. "
    "\nFor this '{e_type}' event, is '{arg1}' a more acceptable '{arg_role}' than '{arg2}'? "
    "Answer yes/no. \nArticle: {article}";

constexpr const char* kDoclevel =
    "Given a news article about {e_type}, select the tokens representing information about "
    "'{arg_role}'. \nContext: {news}. Question: What is the '{arg_role}' for the '{e_type}' "
    "event?";
constexpr const char* kDoclevelTruncated =
    "Given a news article about {e_type}, select the tokens representing information about "
    "'{arg_role}'. \nQuestion: What is the '{arg_role}' for the '{e_type}' event? "
    "\nContext: {news}";

const std::set<std::string>& allowed(Stage stage) {
  static const std::set<std::string> local = {"e_type", "arg_role", "sentence"};
  static const std::set<std::string> compare = {"e_type", "arg_role", "arg1", "arg2", "article"};
  static const std::set<std::string> doclevel = {"e_type", "arg_role", "news"};
  switch (stage) {
    case Stage::kLocal: return local;
    case Stage::kCompare: return compare;
    case Stage::kDoclevel: return doclevel;
  }
  return local;
}

const char* long_field(Stage stage) {
  switch (stage) {
    case Stage::kLocal: return "{sentence}";
    case Stage::kCompare: return "{article}";
    case Stage::kDoclevel: return "{news}";
  }
  return "";
}

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

// Calls on_placeholder(name, begin, end) for every {name} in tmpl.
template <typename F>
void scan_placeholders(std::string_view tmpl, F on_placeholder) {
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] != '{') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < tmpl.size() && is_name_char(tmpl[j])) ++j;
    if (j < tmpl.size() && tmpl[j] == '}' && j > i + 1) {
      on_placeholder(tmpl.substr(i + 1, j - i - 1), i, j + 1);
      i = j + 1;
    } else {
      ++i;
    }
  }
}

void require_nonempty(std::string_view value, const char* what) {
  if (trim(value).empty()) fail(ErrorKind::kValidation, std::string("empty ") + what);
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kLocal: return "local";
    case Stage::kCompare: return "compare";
    case Stage::kDoclevel: return "doclevel";
  }
  return "?";
}

void check_placeholders(Stage stage, std::string_view tmpl) {
  const auto& ok = allowed(stage);
  scan_placeholders(tmpl, [&](std::string_view name, std::size_t, std::size_t) {
    if (!ok.count(std::string(name))) {
      fail(ErrorKind::kValidation, "template for stage '" + std::string(to_string(stage)) +
                                       "' uses unknown placeholder {" + std::string(name) + "}");
    }
  });
}

std::string fill_template(std::string_view tmpl,
                          const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t copied = 0;
  scan_placeholders(tmpl, [&](std::string_view name, std::size_t begin, std::size_t end) {
    auto it = values.find(std::string(name));
    if (it == values.end()) {
      fail(ErrorKind::kValidation, "no value for placeholder {" + std::string(name) + "}");
    }
    out.append(tmpl.substr(copied, begin - copied));
    out += it->second;
    copied = end;
  });
  out.append(tmpl.substr(copied));
  return out;
}

PromptTemplates PromptTemplates::defaults() {
  PromptTemplates t;
  t.templates_ = {{Stage::kLocal, kLocal}, {Stage::kCompare, kCompare}, {Stage::kDoclevel, kDoclevel}};
  t.truncated_ = {{Stage::kLocal, kLocalTruncated},
                  {Stage::kCompare, kCompareTruncated},
                  {Stage::kDoclevel, kDoclevelTruncated}};
  return t;
}

PromptTemplates PromptTemplates::from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorKind::kValidation, "template file must be a JSON object");
  PromptTemplates t = defaults();
  std::set<std::string> known;
  for (Stage stage : {Stage::kLocal, Stage::kCompare, Stage::kDoclevel}) {
    const std::string name(to_string(stage));
    known.insert(name);
    known.insert(name + "_truncated");
    if (j.contains(name)) {
      auto text = j.at(name).get<std::string>();
      check_placeholders(stage, text);
      t.templates_[stage] = text;
      // A replaced template without its own truncated layout cannot reuse
      // the default one.
      t.truncated_[stage].clear();
    }
    if (j.contains(name + "_truncated")) {
      auto text = j.at(name + "_truncated").get<std::string>();
      check_placeholders(stage, text);
      const std::string field = long_field(stage);
      if (text.size() < field.size() || text.compare(text.size() - field.size(), field.size(), field) != 0) {
        fail(ErrorKind::kValidation, name + "_truncated must end with " + field);
      }
      t.truncated_[stage] = text;
    }
  }
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) fail(ErrorKind::kValidation, "unknown template key '" + key + "'");
  }
  return t;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kValidation, "cannot open template file " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

const std::string& PromptTemplates::get(Stage stage) const { return templates_.at(stage); }

const std::string& PromptTemplates::truncated(Stage stage) const {
  static const std::string empty;
  auto it = truncated_.find(stage);
  return it == truncated_.end() ? empty : it->second;
}

namespace {

std::string render(const PromptTemplates& t, Stage stage,
                   const std::map<std::string, std::string>& values, std::size_t budget) {
  std::string full = fill_template(t.get(stage), values);
  if (budget == 0 || approx_tokens(full) <= budget || t.truncated(stage).empty()) return full;
  return fill_template(t.truncated(stage), values);
}

}  // namespace

std::string PromptTemplates::render_local(const Window& w, const Question& q,
                                          std::size_t budget) const {
  require_nonempty(w.text, "window text");
  require_nonempty(q.event_type, "event type");
  require_nonempty(q.role, "argument role");
  return render(*this, Stage::kLocal,
                {{"e_type", q.event_type}, {"arg_role", q.role}, {"sentence", w.text}}, budget);
}

std::string PromptTemplates::render_compare(std::string_view article, const Question& q,
                                            std::string_view arg1, std::string_view arg2,
                                            std::size_t budget) const {
  require_nonempty(q.event_type, "event type");
  require_nonempty(q.role, "argument role");
  require_nonempty(arg1, "first candidate");
  require_nonempty(arg2, "second candidate");
  if (arg1 == arg2) fail(ErrorKind::kValidation, "cannot compare a candidate with itself");
  return render(*this, Stage::kCompare,
                {{"e_type", q.event_type},
                 {"arg_role", q.role},
                 {"arg1", std::string(arg1)},
                 {"arg2", std::string(arg2)},
                 {"article", std::string(article)}},
                budget);
}

std::string PromptTemplates::render_doclevel(const Document& doc, const Question& q,
                                             std::size_t budget) const {
  if (doc.sentences.empty()) fail(ErrorKind::kValidation, "document '" + doc.id + "' is empty");
  require_nonempty(q.event_type, "event type");
  require_nonempty(q.role, "argument role");
  return render(*this, Stage::kDoclevel,
                {{"e_type", q.event_type}, {"arg_role", q.role}, {"news", doc.full_text()}}, budget);
}

}  // namespace ultra
