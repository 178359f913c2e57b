// Copyright 2026 The factalign Authors.
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

// Command-line driver for the alignment pipeline.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spdlog/spdlog.h"

#include "factalign/annotation.h"
#include "factalign/errors.h"
#include "factalign/evaluation.h"
#include "factalign/file_io.h"
#include "factalign/pipeline.h"
#include "factalign/records.h"
#include "factalign/text.h"

namespace fa = factalign;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct Overrides {
  std::string config_path;
  std::optional<int> workers;
  std::optional<uint64_t> seed;
  std::optional<double> tau;
  std::optional<int> k;
  std::string weights;
};

fa::PipelineConfig LoadConfig(const Overrides &o) {
  if (o.config_path.empty()) throw fa::ConfigError("--config is required");
  fa::PipelineConfig config = fa::PipelineConfig::Load(o.config_path);
  config.ApplyEnvironment();
  if (o.workers) config.workers = *o.workers;
  if (o.seed) config.seed = *o.seed;
  if (o.tau) config.stage1.tau = *o.tau;
  if (o.k) config.stage1.k = *o.k;
  if (!o.weights.empty()) {
    std::vector<double> w;
    std::stringstream in(o.weights);
    std::string part;
    while (std::getline(in, part, ',')) {
      try {
        w.push_back(std::stod(part));
      } catch (const std::exception &) {
        throw fa::ConfigError("--weights: not a number: " + part);
      }
    }
    if (w.size() != 4) throw fa::ConfigError("--weights needs four comma-separated numbers");
    std::copy(w.begin(), w.end(), config.stage1.weights.begin());
  }
  config.Validate();
  return config;
}

int RunStep(const Overrides &o, const std::string &command,
            fa::CommandResult (*step)(const fa::PipelineConfig &)) {
  fa::PipelineConfig config = LoadConfig(o);
  fa::CommandResult result = step(config);
  std::string manifest = fa::WriteManifest(config, command, result);
  std::cout << command << ": " << result.counts.dump() << "\n";
  for (const std::string &out : result.outputs) std::cout << "  wrote " << out << "\n";
  std::cout << "  manifest " << manifest << "\n";
  if (!result.errors.empty()) {
    for (const fa::ItemError &e : result.errors) spdlog::error("{}: {}", e.item, e.message);
    std::cerr << command << ": " << result.errors.size() << " item(s) failed, see "
              << config.OutputPath(command + ".errors.jsonl") << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

std::string FormatNumber(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Reads 0/1 marks separated by whitespace, commas or brackets.
std::vector<int> ReadMarks(const std::string &path) {
  std::string text = fa::ReadFile(path);
  std::vector<int> marks;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (token != "0" && token != "1") {
      throw fa::InvalidArgument(path + ": marks must be 0 or 1, got '" + token + "'");
    }
    marks.push_back(token == "1");
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == '[' || c == ']' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  return marks;
}

std::vector<std::string> ReadTextLines(const std::string &path) {
  std::vector<std::string> lines;
  fa::ReadLines(path, [&](std::string_view line, int) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
  });
  return lines;
}

void WriteJsonOutput(const std::string &path, const json &j) {
  if (!path.empty()) fa::WriteFile(path, j.dump(2) + "\n");
}

int EvalF1(const std::vector<std::string> &predicted_paths, const std::vector<std::string> &names,
           const std::string &gold_path, const std::string &json_path) {
  std::vector<fa::AlignedInstance> gold = fa::ReadJsonl<fa::AlignedInstance>(gold_path);
  std::vector<std::pair<std::string, fa::F1Report>> rows;
  json out = json::object();
  for (size_t i = 0; i < predicted_paths.size(); ++i) {
    std::map<std::string, fa::FactKeySet> predicted;
    for (const auto &a : fa::ReadJsonl<fa::AlignedInstance>(predicted_paths[i])) {
      auto &keys = predicted[fa::SentenceKey(a.sentence)];
      for (const fa::Fact &f : a.facts) keys.insert(fa::FactKey(f));
    }
    std::vector<fa::FactKeySet> p, g;
    std::vector<fa::Language> langs;
    for (const auto &a : gold) {
      auto it = predicted.find(fa::SentenceKey(a.sentence));
      p.push_back(it == predicted.end() ? fa::FactKeySet{} : it->second);
      g.push_back(fa::FactKeys(a.facts));
      langs.push_back(a.sentence.language);
    }
    std::string name = i < names.size()
                           ? names[i]
                           : std::filesystem::path(predicted_paths[i]).stem().string();
    fa::F1Report report = fa::SelectionF1(p, g, langs);
    out[name] = fa::ToJson(report);
    rows.emplace_back(name, std::move(report));
  }
  std::cout << fa::FormatF1Table(rows);
  WriteJsonOutput(json_path, out);
  return kExitOk;
}

int EvalStats(const std::string &input, const std::string &json_path) {
  std::vector<fa::AlignedInstance> all = fa::ReadJsonl<fa::AlignedInstance>(input);
  std::map<fa::Language, std::vector<fa::AlignedInstance>> by_language;
  for (auto &a : all) by_language[a.sentence.language].push_back(std::move(a));
  std::vector<fa::StatsReport> reports;
  for (fa::Language l : fa::kAllLanguages) {
    auto it = by_language.find(l);
    if (it != by_language.end()) reports.push_back(fa::DatasetStats(it->second, l));
  }
  if (reports.empty()) throw fa::InvalidArgument(input + ": no instances");
  std::cout << fa::FormatStatsTable(reports) << "\n" << fa::FormatTopPredicatesTable(reports);
  json out = json::array();
  for (const auto &r : reports) out.push_back(fa::ToJson(r));
  WriteJsonOutput(json_path, out);
  return kExitOk;
}

std::vector<fa::AnnotationTask> LoadTasks(const std::string &candidates,
                                          const std::string &translations,
                                          const std::string &golden) {
  auto sets = fa::ReadJsonl<fa::CandidateSet>(candidates);
  std::map<std::string, std::string> tr;
  if (!translations.empty()) {
    fa::ReadLines(translations, [&](std::string_view line, int line_no) {
      if (fa::Trim(line).empty()) return;
      json j = json::parse(line);
      fa::json_schema::ExpectKeys(j, {"key", "translation"}, "translation");
      tr[fa::json_schema::String(j, "key", "translation")] =
          fa::json_schema::String(j, "translation", "translation");
      (void)line_no;
    });
  } else {
    for (const auto &s : sets) tr[fa::SentenceKey(s.sentence)] = "";
  }
  std::map<std::string, fa::FactKeySet> gold;
  if (!golden.empty()) {
    fa::ReadLines(golden, [&](std::string_view line, int) {
      if (fa::Trim(line).empty()) return;
      json j = json::parse(line);
      fa::json_schema::ExpectKeys(j, {"key", "facts"}, "golden");
      auto &set = gold[fa::json_schema::String(j, "key", "golden")];
      for (const auto &id : fa::json_schema::Array(j, "facts", "golden")) {
        set.insert(id.get<std::string>());
      }
    });
  }
  return fa::CreateTasks(sets, tr, gold);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Cross-lingual fact-to-sentence alignment pipeline"};
  app.require_subcommand(1);
  Overrides o;
  std::string log_level = "info";
  app.add_option("--config", o.config_path, "Pipeline config (JSON)");
  app.add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--tau", o.tau, "Stage-1 score threshold");
  app.add_option("--k", o.k, "Stage-1 facts kept per sentence");
  app.add_option("--weights", o.weights, "Stage-1 component weights, four comma-separated");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error");

  auto *ingest = app.add_subcommand("ingest", "Extract, split and filter dump sentences");
  auto *facts = app.add_subcommand("extract-facts", "Extract facts from the entity dump");
  auto *stage1 = app.add_subcommand("stage1", "Generate top-K candidate facts per sentence");
  auto *stage2 = app.add_subcommand("stage2", "Select aligned facts among the candidates");
  auto *distant = app.add_subcommand("build-distant", "Build the distant-supervision pairs");
  auto *run = app.add_subcommand("run", "ingest, extract-facts, stage1 and stage2 in order");

  auto *eval = app.add_subcommand("eval", "Metrics and reports");
  eval->require_subcommand(1);
  std::vector<std::string> predicted, names;
  std::string gold, json_out;
  auto *f1 = eval->add_subcommand("f1", "Selection F1 against gold alignments");
  f1->add_option("--predicted", predicted, "Aligned JSONL (repeatable)")->required();
  f1->add_option("--name", names, "Row name per --predicted");
  f1->add_option("--gold", gold, "Gold aligned JSONL")->required();
  f1->add_option("--json", json_out, "Also write the report as JSON");

  std::string marks_a, marks_b;
  auto *kappa = eval->add_subcommand("kappa", "Cohen's kappa of two mark vectors");
  kappa->add_option("a", marks_a, "Marks of the first annotator")->required();
  kappa->add_option("b", marks_b, "Marks of the second annotator")->required();

  std::string hyp, ref;
  bool lowercase = false, no_punct = false;
  auto *bleu = eval->add_subcommand("bleu", "Corpus BLEU-4");
  bleu->add_option("--hyp", hyp, "Hypotheses, one per line")->required();
  bleu->add_option("--ref", ref, "References, one per line")->required();
  bleu->add_flag("--lowercase", lowercase, "Lowercase ASCII before matching");
  bleu->add_flag("--no-split-punct", no_punct, "Keep punctuation attached to words");
  bleu->add_option("--json", json_out, "Also write the result as JSON");

  std::string stats_input;
  auto *stats = eval->add_subcommand("stats", "Dataset statistics per language");
  stats->add_option("--input", stats_input, "Aligned JSONL")->required();
  stats->add_option("--json", json_out, "Also write the reports as JSON");

  std::string candidates, translations, golden;
  auto *serve = app.add_subcommand("serve", "Run the annotation HTTP service");
  serve->add_option("--candidates", candidates, "Candidate sets to load as tasks");
  serve->add_option("--translations", translations, "JSONL {key, translation}");
  serve->add_option("--golden", golden, "JSONL {key, facts} of golden-control answers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));
  spdlog::set_pattern("[%l] %v");

  try {
    if (*ingest) return RunStep(o, "ingest", fa::RunIngest);
    if (*facts) return RunStep(o, "extract-facts", fa::RunExtractFacts);
    if (*stage1) return RunStep(o, "stage1", fa::RunCandidateGeneration);
    if (*stage2) return RunStep(o, "stage2", fa::RunCandidateSelection);
    if (*distant) return RunStep(o, "build-distant", fa::RunBuildDistant);
    if (*run) {
      int status = kExitOk;
      for (auto [name, step] : {std::pair{"ingest", fa::RunIngest},
                                std::pair{"extract-facts", fa::RunExtractFacts},
                                std::pair{"stage1", fa::RunCandidateGeneration},
                                std::pair{"stage2", fa::RunCandidateSelection}}) {
        status = std::max(status, RunStep(o, name, step));
      }
      return status;
    }
    if (*f1) return EvalF1(predicted, names, gold, json_out);
    if (*kappa) {
      std::cout << FormatNumber(fa::CohenKappa(ReadMarks(marks_a), ReadMarks(marks_b))) << "\n";
      return kExitOk;
    }
    if (*bleu) {
      fa::BleuTokenizer tok;
      tok.lowercase = lowercase;
      tok.split_punctuation = !no_punct;
      fa::BleuResult r = fa::CorpusBleuDetailed(ReadTextLines(hyp), ReadTextLines(ref), tok);
      char buf[160];
      std::snprintf(buf, sizeof(buf), "BLEU = %.1f  BP = %.3f  tokenizer = %s\n", 100 * r.bleu,
                    r.brevity_penalty, r.tokenizer.c_str());
      std::cout << buf;
      WriteJsonOutput(json_out, fa::ToJson(r));
      return kExitOk;
    }
    if (*stats) return EvalStats(stats_input, json_out);
    if (*serve) {
      json annotation;
      if (!o.config_path.empty()) annotation = LoadConfig(o).annotation;
      fa::AnnotationService service(fa::ServiceConfig::FromJson(annotation));
      if (!candidates.empty()) service.AddTasks(LoadTasks(candidates, translations, golden));
      fa::ServeAnnotations(service);
      return kExitOk;
    }
  } catch (const fa::ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
