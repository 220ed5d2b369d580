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


#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "ultra/errors.hpp"
#include "ultra/gateway.hpp"
#include "ultra/leafer.hpp"
#include "ultra/text.hpp"

namespace ultra::cli {

namespace {

// Flags shared by the subcommands that talk to a backend.
struct RunFlags {
  std::string config;
  std::string mock;
  std::string judge_mock;
  std::string templates;
  std::string endpoint;
  std::string model;
  std::string mode;
  std::size_t k = 0;
  std::string refine_g;
  std::size_t prune_cap = 0;
  std::string leafer;
  std::size_t workers = 0;
  bool no_refine = false;
  bool ensemble = false;
  bool trace = false;
  bool single_order = false;

  void add_backend(CLI::App* app) {
    app->add_option("--config", config, "Run configuration (TOML)")->check(CLI::ExistingFile);
    app->add_option("--mock", mock, "Mock backend script (JSON); runs offline")->check(CLI::ExistingFile);
    app->add_option("--templates", templates, "Prompt template file (JSON)")->check(CLI::ExistingFile);
    app->add_option("--endpoint", endpoint, "Completions endpoint URL");
    app->add_option("--model", model, "Model identifier sent to the endpoint");
    app->add_option("--mode", mode, "Window preset: base (k=5) or long (k=15)")
        ->check(CLI::IsMember({"base", "long"}));
    app->add_option("--k", k, "Window size in sentences (>= 2)")->check(CLI::Range(2, 1000));
  }

  void add_pipeline(CLI::App* app) {
    add_backend(app);
    app->add_option("--judge-mock", judge_mock, "Mock script for the LEAFER judge")
        ->check(CLI::ExistingFile);
    app->add_option("--refine-g", refine_g, "Calibration function")
        ->check(CLI::IsMember({"additive", "multiplicative"}));
    app->add_option("--prune-cap", prune_cap, "Candidates kept before pairwise ranking")
        ->check(CLI::Range(1, 1000));
    app->add_option("--leafer", leafer, "LEAFER mode")->check(CLI::IsMember({"off", "oracle", "backend"}));
    app->add_option("--workers", workers, "Concurrent (document, role) units")->check(CLI::Range(1, 1024));
    app->add_flag("--no-refine", no_refine, "Skip layer-2 and emit the rectified candidates");
    app->add_flag("--ensemble", ensemble, "Merge with the document-level extractor");
    app->add_flag("--trace", trace, "Include per-stage sets in the output");
    app->add_flag("--single-order", single_order, "Score each pair in one display order only");
  }

  CliConfig resolve() const {
    CliConfig cfg = load_config(config);
    auto& p = cfg.pipeline;
    if (!mode.empty()) p.window_k = mode == "long" ? kLongWindow : kBaseWindow;
    if (k != 0) p.window_k = k;
    if (!refine_g.empty()) p.refine.calibration = calibration_from_string(refine_g);
    if (prune_cap != 0) p.refine.prune_cap = prune_cap;
    if (!leafer.empty()) p.leafer = leafer_mode_from_string(leafer);
    if (workers != 0) p.workers = workers;
    if (no_refine) p.layer2 = false;
    if (ensemble) p.ensemble = true;
    if (trace) p.trace = true;
    if (single_order) p.refine.both_orders = false;
    if (!templates.empty()) cfg.templates = templates;
    if (!endpoint.empty()) {
      p.backend.kind = BackendKind::kHttp;
      p.backend.endpoint = endpoint;
    }
    if (!model.empty()) p.backend.model = model;
    if (!mock.empty()) {
      p.backend.kind = BackendKind::kMock;
      p.backend.mock_script = mock;
    }
    if (!judge_mock.empty()) {
      BackendConfig j = p.backend;
      j.kind = BackendKind::kMock;
      j.mock_script = judge_mock;
      p.judge_backend = j;
    }
    apply_environment(cfg);
    p.validate();
    return cfg;
  }
};

PromptTemplates templates_for(const CliConfig& cfg) {
  return cfg.templates ? PromptTemplates::load(*cfg.templates) : PromptTemplates::defaults();
}

// Opens path for writing, or returns the fallback stream for "" / "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) fail(ErrorKind::kValidation, "cannot write " + path);
    out_ = file_.get();
  }
  std::ostream& get() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

struct Backends {
  std::unique_ptr<Gateway> main;
  std::unique_ptr<Gateway> judge;
};

Backends open_backends(const CliConfig& cfg, bool cache_generations = false) {
  Backends b;
  auto backend = make_backend(cfg.pipeline.backend);
  if (cache_generations) backend = std::make_shared<CachingBackend>(backend);
  b.main = std::make_unique<Gateway>(cfg.pipeline.backend, backend);
  if (cfg.pipeline.judge_backend) b.judge = Gateway::from_config(*cfg.pipeline.judge_backend);
  return b;
}

int cmd_extract(const RunFlags& flags, const std::string& corpus_path,
                const std::string& ontology_path, const std::string& output,
                const std::string& candidates_path, std::ostream& out) {
  const CliConfig cfg = flags.resolve();
  const auto corpus = load_corpus(corpus_path);
  const auto ontology = Ontology::load(ontology_path);
  auto backends = open_backends(cfg);
  Pipeline pipeline(cfg.pipeline, *backends.main, backends.judge.get(), templates_for(cfg));
  const RunResult result = pipeline.run(corpus, ontology);

  Sink sink(output, out);
  write_outputs(sink.get(), result.outputs);
  if (!candidates_path.empty()) {
    Sink cands(candidates_path, out);
    for (const auto& o : result.outputs) {
      for (const auto& c : o.candidates) cands.get() << candidate_to_json(o.doc_id, c).dump() << '\n';
    }
  }
  spdlog::info("extracted {} (document, role) pairs; {} document(s) failed", result.outputs.size(),
               result.failures.size());
  return kOk;
}

std::vector<ExtractionOutput> read_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kValidation, "cannot open predictions " + path);
  try {
    return read_outputs(in);
  } catch (const Error& e) {
    throw e.with_context(path);
  }
}

int cmd_evaluate(const std::string& predictions, const std::string& corpus_path,
                 const std::string& ontology_path, const std::string& json_path,
                 std::ostream& out) {
  const auto corpus = load_corpus(corpus_path);
  const auto outputs = read_predictions(predictions);
  std::optional<Ontology> ontology;
  if (!ontology_path.empty()) ontology = Ontology::load(ontology_path);
  const auto [preds, golds] = eval_maps(corpus, outputs, ontology ? &*ontology : nullptr);
  const EvalReport report = score(preds, golds);
  out << report.to_table();
  if (!json_path.empty()) {
    Sink sink(json_path, out);
    sink.get() << report.to_json().dump(2) << '\n';
  }
  return kOk;
}

int cmd_build_bank(const RunFlags& flags, const std::string& train_path,
                   const std::string& ontology_path, const std::string& out_path,
                   std::ostream& out) {
  const CliConfig cfg = flags.resolve();
  const auto train = load_corpus(train_path);
  const auto ontology = Ontology::load(ontology_path);
  auto gw = Gateway::from_config(cfg.pipeline.backend);
  const auto templates = templates_for(cfg);
  const auto records = build_bank(*gw, templates, train, ontology, cfg.pipeline.window_k);
  Sink sink(out_path, out);
  write_bank(sink.get(), templates, records);
  std::map<JudgmentClass, std::size_t> counts;
  for (const auto& r : records) ++counts[r.judgment.kind];
  for (const auto& [kind, n] : counts) spdlog::info("{}: {}", to_string(kind), n);
  return kOk;
}

int cmd_sweep(const RunFlags& flags, const std::string& corpus_path,
              const std::string& ontology_path, const std::vector<std::size_t>& ks,
              const std::string& output, bool full_pipeline, std::ostream& out) {
  CliConfig cfg = flags.resolve();
  const auto corpus = load_corpus(corpus_path);
  const auto ontology = Ontology::load(ontology_path);
  auto backends = open_backends(cfg, /*cache_generations=*/true);
  const auto templates = templates_for(cfg);

  Sink sink(output, out);
  auto& csv = sink.get();
  csv << "k,windows,em_p,em_r,em_f1,hm_p,hm_r,hm_f1\n";
  for (std::size_t k : ks) {
    PipelineConfig pc = cfg.pipeline;
    pc.window_k = k;
    if (!full_pipeline) {
      pc.leafer = LeaferMode::kOff;
      pc.layer2 = false;
      pc.ensemble = false;
    }
    Pipeline pipeline(pc, *backends.main, backends.judge.get(), templates);
    const auto result = pipeline.run(corpus, ontology);
    std::size_t windows = 0;
    for (const auto& d : corpus) windows += window_count(d.sentences.size(), k);
    const auto [preds, golds] = eval_maps(corpus, result.outputs, &ontology);
    const auto report = score(preds, golds);
    const auto& m = report.overall;
    csv << k << ',' << windows << std::fixed << std::setprecision(1);
    for (double v : {m.em.precision(), m.em.recall(), m.em.f1(), m.hm.precision(), m.hm.recall(),
                     m.hm.f1()}) {
      csv << ',' << v * 100.0;
    }
    csv << '\n';
    csv.unsetf(std::ios::fixed);
  }
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation:
    case ErrorKind::kParse:
      return kValidationFailure;
    default:
      return kBackendFailure;
  }
}

}  // namespace

std::pair<SpanMap, SpanMap> eval_maps(const std::vector<Document>& corpus,
                                      const std::vector<ExtractionOutput>& outputs,
                                      const Ontology* ontology) {
  std::map<std::string, const Document*> by_id;
  for (const auto& d : corpus) by_id[d.id] = &d;
  SpanMap preds, golds;
  for (const auto& o : outputs) {
    if (!by_id.count(o.doc_id)) {
      fail(ErrorKind::kValidation, "prediction for unknown document '" + o.doc_id + "'");
    }
    auto& slot = preds[{o.doc_id, o.role}];
    slot.insert(slot.end(), o.final_args.begin(), o.final_args.end());
  }
  for (const auto& d : corpus) {
    if (ontology != nullptr) {
      for (const auto& role : ontology->roles(d.event_type)) {
        preds[{d.id, role}];
        golds[{d.id, role}] = d.gold_spans(role);
      }
    } else if (d.gold) {
      for (const auto& g : *d.gold) golds[{d.id, g.role}] = d.gold_spans(g.role);
    }
  }
  // Align the key sets.
  for (const auto& [key, _] : preds) {
    if (golds.count(key)) continue;
    if (ontology != nullptr) {
      fail(ErrorKind::kValidation, "role '" + key.second + "' of document '" + key.first +
                                       "' is not in the ontology");
    }
    golds[key];
  }
  for (const auto& [key, _] : golds) preds[key];
  return {preds, golds};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Document-level event argument extraction with LLM backends"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  RunFlags extract_flags;
  std::string corpus, ontology, output, candidates;
  auto* extract = app.add_subcommand("extract", "Run the extraction pipeline over a corpus");
  extract->add_option("--corpus", corpus, "Corpus (JSONL)")->required()->check(CLI::ExistingFile);
  extract->add_option("--ontology", ontology, "Ontology (JSON)")->required()->check(CLI::ExistingFile);
  extract->add_option("--output,-o", output, "Predictions JSONL (default stdout)");
  extract->add_option("--emit-candidates", candidates, "Write layer-1 candidates (JSONL)");
  extract_flags.add_pipeline(extract);

  std::string predictions, eval_corpus, eval_ontology, json_out;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold (EM/HM)");
  evaluate->add_option("--predictions", predictions, "Predictions JSONL")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--corpus", eval_corpus, "Corpus with gold (JSONL)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--ontology", eval_ontology, "Score every ontology role")->check(CLI::ExistingFile);
  evaluate->add_option("--json", json_out, "Also write the report as JSON");

  RunFlags bank_flags;
  std::string train, bank_ontology, bank_out;
  auto* bank = app.add_subcommand("build-bank", "Export LEAFER judgment records for fine-tuning");
  bank->add_option("--train", train, "Annotated training corpus (JSONL)")->required()->check(CLI::ExistingFile);
  bank->add_option("--ontology", bank_ontology, "Ontology (JSON)")->required()->check(CLI::ExistingFile);
  bank->add_option("--out", bank_out, "Output JSONL")->required();
  bank_flags.add_backend(bank);

  RunFlags sweep_flags;
  std::string sweep_corpus, sweep_ontology, sweep_output;
  std::vector<std::size_t> ks;
  bool full_pipeline = false;
  auto* sweep = app.add_subcommand("sweep-window", "P/R/F1 per window size (CSV)");
  sweep->add_option("--corpus", sweep_corpus, "Corpus with gold (JSONL)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--ontology", sweep_ontology, "Ontology (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--k-list", ks, "Comma-separated window sizes, each >= 2")
      ->required()
      ->delimiter(',')
      ->check(CLI::Range(2, 1000));
  sweep->add_option("--output,-o", sweep_output, "CSV path (default stdout)");
  sweep->add_flag("--full-pipeline", full_pipeline, "Run the configured stages, not layer-1 only");
  sweep_flags.add_pipeline(sweep);
  // --k is the single-size flag elsewhere; sweep takes the list.
  sweep->remove_option(sweep->get_option("--k"));
  sweep->add_option("--k", ks, "Alias of --k-list")->delimiter(',')->check(CLI::Range(2, 1000));
  sweep->get_option("--k-list")->required(false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kValidationFailure;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  try {
    if (*extract) return cmd_extract(extract_flags, corpus, ontology, output, candidates, out);
    if (*evaluate) return cmd_evaluate(predictions, eval_corpus, eval_ontology, json_out, out);
    if (*bank) return cmd_build_bank(bank_flags, train, bank_ontology, bank_out, out);
    if (*sweep) {
      if (ks.empty()) {
        err << "error: sweep-window needs --k-list (or --k) with at least one size\n";
        return kValidationFailure;
      }
      return cmd_sweep(sweep_flags, sweep_corpus, sweep_ontology, ks, sweep_output, full_pipeline, out);
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  return kValidationFailure;
}

}  // namespace ultra::cli
