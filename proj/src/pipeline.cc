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

#include "factalign/pipeline.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "spdlog/spdlog.h"

#include "factalign/dump_reader.h"
#include "factalign/file_io.h"
#include "factalign/records.h"
#include "factalign/remote_providers.h"
#include "factalign/text.h"

namespace factalign {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void AllowKeys(const json &j, std::initializer_list<std::string_view> keys,
               std::string_view what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be an object");
  for (const auto &[key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(std::string(what) + ": unknown setting '" + key + "'");
    }
  }
}

template <typename T>
T Get(const json &j, const char *key, T fallback, std::string_view what) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception &) {
    throw ConfigError(std::string(what) + "." + key + " has the wrong type");
  }
}

std::string Resolve(const std::string &base_dir, const std::string &path) {
  if (path.empty() || fs::path(path).is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

bool IsUrl(const std::string &s) {
  return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0;
}

}  // namespace

PipelineConfig PipelineConfig::FromJson(const json &j, const std::string &base_dir) {
  AllowKeys(j, {"languages", "paths", "ingest", "facts", "stage1", "stage2", "distant",
                "providers", "seed", "workers", "annotation"},
            "config");
  PipelineConfig c;
  if (!j.contains("languages") || !j["languages"].is_array() || j["languages"].empty()) {
    throw ConfigError("config.languages must be a non-empty list of language codes");
  }
  for (const json &code : j["languages"]) {
    if (!code.is_string()) throw ConfigError("config.languages entries must be strings");
    Language l = ParseLanguage(code.get<std::string>());
    if (std::find(c.languages.begin(), c.languages.end(), l) != c.languages.end()) {
      throw ConfigError("language listed twice: " + code.get<std::string>());
    }
    c.languages.push_back(l);
  }

  json paths = j.value("paths", json::object());
  c.raw_paths = paths;
  AllowKeys(paths, {"dumps", "entity_dump", "entity_map", "output_dir", "prefix_dir", "lexicons",
                    "glossary", "distant_input"},
            "paths");
  auto per_language = [&](const char *key, std::map<Language, std::string> *out) {
    if (!paths.contains(key)) return;
    if (!paths[key].is_object()) throw ConfigError(std::string("paths.") + key + " must map codes to paths");
    for (const auto &[code, p] : paths[key].items()) {
      if (!p.is_string()) throw ConfigError(std::string("paths.") + key + "." + code + " must be a string");
      (*out)[ParseLanguage(code)] = Resolve(base_dir, p.get<std::string>());
    }
  };
  per_language("dumps", &c.dumps);
  per_language("lexicons", &c.lexicons);
  c.entity_dump = Resolve(base_dir, Get<std::string>(paths, "entity_dump", "", "paths"));
  c.entity_map = Resolve(base_dir, Get<std::string>(paths, "entity_map", "", "paths"));
  c.output_dir = Resolve(base_dir, Get<std::string>(paths, "output_dir", "out", "paths"));
  c.prefix_dir = Resolve(base_dir, Get<std::string>(paths, "prefix_dir", "", "paths"));
  c.glossary = Resolve(base_dir, Get<std::string>(paths, "glossary", "", "paths"));
  c.distant_input = Resolve(base_dir, Get<std::string>(paths, "distant_input", "", "paths"));

  json ingest = j.value("ingest", json::object());
  AllowKeys(ingest, {"min_tokens", "max_tokens"}, "ingest");
  c.limits.min_tokens = Get<int>(ingest, "min_tokens", c.limits.min_tokens, "ingest");
  c.limits.max_tokens = Get<int>(ingest, "max_tokens", c.limits.max_tokens, "ingest");

  json facts = j.value("facts", json::object());
  AllowKeys(facts, {"allowlist"}, "facts");
  if (facts.contains("allowlist")) {
    c.allowlist.clear();
    for (const json &name : facts["allowlist"]) {
      auto type = name.is_string() ? ParseDatatype(name.get<std::string>()) : std::nullopt;
      if (!type) throw ConfigError("facts.allowlist: unknown datatype " + name.dump());
      c.allowlist.insert(*type);
    }
  }

  json s1 = j.value("stage1", json::object());
  AllowKeys(s1, {"tau", "k", "weights"}, "stage1");
  c.stage1.tau = Get<double>(s1, "tau", c.stage1.tau, "stage1");
  c.stage1.k = Get<int>(s1, "k", c.stage1.k, "stage1");
  if (s1.contains("weights")) {
    auto w = Get<std::vector<double>>(s1, "weights", {}, "stage1");
    if (w.size() != 4) throw ConfigError("stage1.weights must have four entries");
    std::copy(w.begin(), w.end(), c.stage1.weights.begin());
  }

  json s2 = j.value("stage2", json::object());
  AllowKeys(s2, {"selector", "cutoff", "overlap_threshold", "nli_input"}, "stage2");
  c.stage2.method = ParseSelectionMethod(Get<std::string>(s2, "selector", "entailment", "stage2"));
  c.stage2.cutoff = Get<double>(s2, "cutoff", c.stage2.cutoff, "stage2");
  c.stage2.overlap_threshold =
      Get<double>(s2, "overlap_threshold", c.stage2.overlap_threshold, "stage2");
  std::string nli_input = Get<std::string>(s2, "nli_input", "", "stage2");

  json d = j.value("distant", json::object());
  AllowKeys(d, {"skip_top", "pool_size", "train_fraction"}, "distant");
  c.distant.skip_top = Get<int>(d, "skip_top", c.distant.skip_top, "distant");
  c.distant.pool_size = Get<int>(d, "pool_size", c.distant.pool_size, "distant");
  c.distant.train_fraction = Get<double>(d, "train_fraction", c.distant.train_fraction, "distant");

  json p = j.value("providers", json::object());
  AllowKeys(p, {"embedding", "translation", "nli", "classifier", "embedding_dim", "timeout_seconds"},
            "providers");
  c.providers.embedding = Get<std::string>(p, "embedding", "mock", "providers");
  c.providers.translation = Get<std::string>(p, "translation", "mock", "providers");
  c.providers.nli = Get<std::string>(p, "nli", "mock", "providers");
  c.providers.classifier = Get<std::string>(p, "classifier", "mock", "providers");
  c.providers.embedding_dim = Get<int>(p, "embedding_dim", 64, "providers");
  c.providers.timeout_seconds = Get<int>(p, "timeout_seconds", 60, "providers");

  // Remote NLI models read the joined pair text by default, mocks read the
  // sentence and the fact separately.
  if (nli_input.empty()) {
    c.stage2.nli_input = IsUrl(c.providers.nli) ? NliInput::kPairText : NliInput::kSentenceAndFact;
  } else if (nli_input == "pair") {
    c.stage2.nli_input = NliInput::kPairText;
  } else if (nli_input == "separate") {
    c.stage2.nli_input = NliInput::kSentenceAndFact;
  } else {
    throw ConfigError("stage2.nli_input must be 'pair' or 'separate'");
  }

  if (j.contains("seed") && !j["seed"].is_null()) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
    c.seed = j["seed"].get<uint64_t>();
  }
  c.workers = Get<int>(j, "workers", 1, "config");
  c.annotation = j.value("annotation", json(nullptr));
  if (c.annotation.is_object() && c.annotation.contains("event_log")) {
    c.annotation["event_log"] = Resolve(base_dir, c.annotation["event_log"].get<std::string>());
  }
  return c;
}

PipelineConfig PipelineConfig::Load(const std::string &path) {
  if (!fs::is_regular_file(path)) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::exception &e) {
    throw ConfigError(path + ": " + e.what());
  }
  return FromJson(j, fs::path(path).parent_path().string());
}

void PipelineConfig::ApplyEnvironment() {
  auto env = [](const char *name, std::string *slot) {
    if (const char *v = std::getenv(name)) {
      if (*v) *slot = v;
    }
  };
  env("FACTALIGN_EMBEDDING_URL", &providers.embedding);
  env("FACTALIGN_TRANSLATION_URL", &providers.translation);
  env("FACTALIGN_NLI_URL", &providers.nli);
  env("FACTALIGN_CLASSIFIER_URL", &providers.classifier);
}

void PipelineConfig::Validate() const {
  stage1.Validate();
  if (limits.min_tokens < 1 || limits.max_tokens < limits.min_tokens) {
    throw ConfigError("ingest limits need 1 <= min_tokens <= max_tokens");
  }
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (stage2.cutoff < 0 || stage2.cutoff > 1) throw ConfigError("stage2.cutoff must lie in [0, 1]");
  if (distant.skip_top < 0 || distant.pool_size < 1) {
    throw ConfigError("distant window needs skip_top >= 0 and pool_size >= 1");
  }
  if (distant.train_fraction < 0 || distant.train_fraction > 1) {
    throw ConfigError("distant.train_fraction must lie in [0, 1]");
  }
  if (providers.embedding_dim < 8) throw ConfigError("providers.embedding_dim must be >= 8");
  if (providers.timeout_seconds < 1) throw ConfigError("providers.timeout_seconds must be >= 1");
  auto check_slot = [](const std::string &value, const char *name, bool allow_glossary) {
    if (value == "mock" || IsUrl(value) || (allow_glossary && value == "glossary")) return;
    throw ConfigError(std::string("providers.") + name + " must be 'mock' or an http(s) URL");
  };
  check_slot(providers.embedding, "embedding", false);
  check_slot(providers.translation, "translation", true);
  check_slot(providers.nli, "nli", false);
  check_slot(providers.classifier, "classifier", false);
  if (providers.translation == "glossary" && glossary.empty()) {
    throw ConfigError("providers.translation = glossary requires paths.glossary");
  }
  for (const auto &[lang, path] : dumps) {
    if (std::find(languages.begin(), languages.end(), lang) == languages.end()) {
      throw ConfigError("paths.dumps has " + std::string(LanguageCode(lang)) +
                        ", which is not in languages");
    }
  }
}

json PipelineConfig::Canonical() const {
  json langs = json::array();
  for (Language l : languages) langs.push_back(LanguageCode(l));
  json allow = json::array();
  for (Datatype t : allowlist) allow.push_back(DatatypeName(t));
  json paths = raw_paths;
  paths.erase("output_dir");
  return {{"languages", langs},
          {"paths", paths},
          {"ingest", {{"min_tokens", limits.min_tokens}, {"max_tokens", limits.max_tokens}}},
          {"facts", {{"allowlist", allow}}},
          {"stage1", {{"tau", stage1.tau}, {"k", stage1.k}, {"weights", stage1.weights}}},
          {"stage2",
           {{"selector", SelectionMethodName(stage2.method)},
            {"cutoff", stage2.cutoff},
            {"overlap_threshold", stage2.overlap_threshold},
            {"nli_input", stage2.nli_input == NliInput::kPairText ? "pair" : "separate"}}},
          {"distant",
           {{"skip_top", distant.skip_top},
            {"pool_size", distant.pool_size},
            {"train_fraction", distant.train_fraction}}},
          {"providers",
           {{"embedding", providers.embedding},
            {"translation", providers.translation},
            {"nli", providers.nli},
            {"classifier", providers.classifier},
            {"embedding_dim", providers.embedding_dim}}},
          {"seed", seed ? json(*seed) : json(nullptr)}};
}

std::string PipelineConfig::Hash() const { return HexDigest(Fingerprint(Canonical().dump())); }

std::string PipelineConfig::OutputPath(const std::string &name) const {
  return (fs::path(output_dir) / name).string();
}

Providers MakeProviders(const PipelineConfig &config) {
  const ProviderSettings &p = config.providers;
  Providers out;
  if (IsUrl(p.embedding)) {
    out.embedder = std::make_unique<HttpEmbeddingProvider>(p.embedding, p.timeout_seconds);
  } else {
    out.embedder = std::make_unique<HashEmbedder>(p.embedding_dim);
  }
  if (IsUrl(p.translation)) {
    out.translator = std::make_unique<HttpTranslationProvider>(p.translation, p.timeout_seconds);
  } else if (p.translation == "glossary") {
    out.translator = std::make_unique<GlossaryTranslator>(GlossaryTranslator::FromFile(config.glossary));
  } else {
    out.translator = std::make_unique<IdentityTranslator>();
  }
  if (IsUrl(p.nli)) {
    out.nli = std::make_unique<HttpEntailmentProvider>(p.nli, p.timeout_seconds);
  } else {
    out.nli = std::make_unique<OverlapEntailment>(0.6, out.translator.get());
  }
  if (IsUrl(p.classifier)) {
    out.classifier = std::make_unique<HttpAlignmentClassifier>(p.classifier, p.timeout_seconds);
  } else {
    out.classifier = std::make_unique<OverlapClassifier>(out.translator.get());
  }
  return out;
}

std::map<std::pair<Language, std::string>, std::string> LoadEntityMap(const std::string &path) {
  std::map<std::pair<Language, std::string>, std::string> map;
  ReadLines(path, [&](std::string_view line, int line_no) {
    if (Trim(line).empty() || line[0] == '#') return;
    size_t a = line.find('\t');
    size_t b = a == std::string_view::npos ? a : line.find('\t', a + 1);
    if (b == std::string_view::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected lang<TAB>title<TAB>qid");
    }
    Language lang = ParseLanguage(line.substr(0, a));
    map[{lang, std::string(line.substr(a + 1, b - a - 1))}] = std::string(Trim(line.substr(b + 1)));
  });
  return map;
}

namespace {

std::vector<Language> OrderedLanguages(const std::vector<Language> &languages) {
  std::vector<Language> out;
  for (Language l : kAllLanguages) {
    if (std::find(languages.begin(), languages.end(), l) != languages.end()) out.push_back(l);
  }
  return out;
}

std::unique_ptr<ContentTagger> MakeTagger(const PipelineConfig &config, Language language) {
  auto it = config.lexicons.find(language);
  if (it == config.lexicons.end()) return std::make_unique<PermissiveContentTagger>();
  return std::make_unique<LexiconContentTagger>(LoadLexicon(it->second));
}

void RequireInput(const std::string &path, const char *what) {
  if (path.empty()) throw ConfigError(std::string(what) + " is not configured");
  if (!fs::exists(path)) throw ConfigError(std::string(what) + " not found: " + path);
}

}  // namespace

CommandResult RunIngest(const PipelineConfig &config) {
  CommandResult result;
  SplitterConfig splitter = SplitterConfig::FromDirectory(
      config.prefix_dir.empty() ? std::string(FACTALIGN_DATA_DIR) + "/nonbreaking_prefixes"
                                : config.prefix_dir);
  std::map<std::pair<Language, std::string>, std::string> entity_map;
  if (!config.entity_map.empty()) {
    RequireInput(config.entity_map, "paths.entity_map");
    entity_map = LoadEntityMap(config.entity_map);
    result.inputs.push_back(config.entity_map);
  }
  ScriptLanguageDetector detector;
  std::vector<Sentence> kept;
  std::vector<Rejection> rejected;
  int64_t pages = 0;
  for (Language lang : OrderedLanguages(config.languages)) {
    auto dump = config.dumps.find(lang);
    if (dump == config.dumps.end()) {
      throw ConfigError("no dump configured for " + std::string(LanguageCode(lang)));
    }
    RequireInput(dump->second, "dump");
    result.inputs.push_back(dump->second);
    std::unique_ptr<ContentTagger> tagger = MakeTagger(config, lang);
    if (auto lex = config.lexicons.find(lang); lex != config.lexicons.end()) {
      result.inputs.push_back(lex->second);
    }

    std::vector<Sentence> lang_kept;
    std::vector<WikiPage> batch;
    auto flush = [&] {
      FilterReport report =
          IngestPages(batch, splitter, detector, *tagger, config.workers, config.limits);
      std::move(report.kept.begin(), report.kept.end(), std::back_inserter(lang_kept));
      std::move(report.rejected.begin(), report.rejected.end(), std::back_inserter(rejected));
      batch.clear();
    };
    try {
      ExtractPagesFromFile(dump->second, lang, [&](WikiPage page) {
        auto e = entity_map.find({lang, page.title});
        if (page.entity_id.empty() && e != entity_map.end()) page.entity_id = e->second;
        ++pages;
        batch.push_back(std::move(page));
        if (batch.size() >= 256) flush();
      });
    } catch (const ParseError &e) {
      result.errors.push_back({dump->second, e.what()});
      spdlog::error("{}: {}", dump->second, e.what());
    }
    flush();
    std::stable_sort(lang_kept.begin(), lang_kept.end(), CanonicalSentenceLess);
    std::move(lang_kept.begin(), lang_kept.end(), std::back_inserter(kept));
  }
  std::stable_sort(rejected.begin(), rejected.end(), [](const Rejection &a, const Rejection &b) {
    auto la = std::find(kAllLanguages.begin(), kAllLanguages.end(), a.sentence.language);
    auto lb = std::find(kAllLanguages.begin(), kAllLanguages.end(), b.sentence.language);
    if (la != lb) return la < lb;
    return CanonicalSentenceLess(a.sentence, b.sentence);
  });

  std::string sentences_path = config.OutputPath("sentences.jsonl");
  std::string rejected_path = config.OutputPath("rejected.jsonl");
  WriteJsonl(sentences_path, kept);
  WriteJsonl(rejected_path, rejected);
  result.outputs = {sentences_path, rejected_path};
  json reasons = json::object();
  for (const Rejection &r : rejected) {
    std::string name(RejectReasonName(r.reason));
    reasons[name] = reasons.value(name, 0) + 1;
  }
  result.counts = {{"pages", pages},
                   {"kept", kept.size()},
                   {"rejected", rejected.size()},
                   {"rejected_by_reason", reasons}};
  return result;
}

CommandResult RunExtractFacts(const PipelineConfig &config) {
  CommandResult result;
  RequireInput(config.entity_dump, "paths.entity_dump");
  result.inputs.push_back(config.entity_dump);

  // Labels first, so that claims can name entities defined later in the dump.
  LabelCatalog catalog;
  ReadLines(config.entity_dump, [&](std::string_view line, int line_no) {
    if (Trim(line).empty()) return;
    try {
      catalog.AddDocument(json::parse(line));
    } catch (const json::exception &e) {
      result.errors.push_back({config.entity_dump + ":" + std::to_string(line_no),
                               std::string("malformed JSON: ") + e.what()});
    }
  });

  FactStore store;
  FactParseStats stats;
  int64_t entities = 0;
  ReadLines(config.entity_dump, [&](std::string_view line, int line_no) {
    if (Trim(line).empty()) return;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded()) return;  // reported in the first pass
    if (doc.value("type", "item") != "item") return;
    std::string id = doc.value("id", "line " + std::to_string(line_no));
    try {
      for (Fact &f : ParseEntityFacts(doc, catalog, config.allowlist, &stats)) {
        store.Add(std::move(f));
      }
      ++entities;
    } catch (const ParseError &e) {
      result.errors.push_back({id, e.what()});
    }
  });

  std::vector<Fact> facts;
  for (const std::string &qid : store.Subjects()) {
    for (const Fact &f : store.FactsFor(qid)) facts.push_back(f);
  }
  std::string facts_path = config.OutputPath("facts.jsonl");
  WriteJsonl(facts_path, facts);
  result.outputs = {facts_path};
  result.counts = {{"entities", entities},
                   {"facts", facts.size()},
                   {"claims", stats.claims},
                   {"skipped_datatype", stats.skipped_datatype},
                   {"unknown_datatype", stats.unknown_datatype},
                   {"skipped_no_value", stats.skipped_no_value},
                   {"skipped_deprecated", stats.skipped_deprecated},
                   {"dropped_qualifiers", stats.dropped_qualifiers}};
  return result;
}

CommandResult RunCandidateGeneration(const PipelineConfig &config) {
  CommandResult result;
  std::string sentences_path = config.OutputPath("sentences.jsonl");
  std::string facts_path = config.OutputPath("facts.jsonl");
  RequireInput(sentences_path, "sentences (run ingest first)");
  RequireInput(facts_path, "facts (run extract-facts first)");
  result.inputs = {sentences_path, facts_path};

  std::vector<Sentence> sentences = ReadJsonl<Sentence>(sentences_path);
  FactStore store;
  for (Fact &f : ReadJsonl<Fact>(facts_path)) store.Add(std::move(f));
  std::vector<EntityBundle> bundles = BuildBundles(store, sentences);

  Providers providers = MakeProviders(config);
  std::vector<CandidateSet> sets = RunStage1(bundles, config.stage1, *providers.embedder,
                                             *providers.translator, config.workers,
                                             &result.errors);
  std::string out = config.OutputPath("candidates.jsonl");
  WriteJsonl(out, sets);
  result.outputs = {out};
  size_t candidates = 0;
  for (const CandidateSet &s : sets) candidates += s.candidates.size();
  result.counts = {{"bundles", bundles.size()},
                   {"sentences", sentences.size()},
                   {"candidate_sets", sets.size()},
                   {"candidates", candidates}};
  return result;
}

CommandResult RunCandidateSelection(const PipelineConfig &config) {
  CommandResult result;
  std::string in = config.OutputPath("candidates.jsonl");
  RequireInput(in, "candidates (run stage1 first)");
  result.inputs = {in};
  std::vector<CandidateSet> sets = ReadJsonl<CandidateSet>(in);
  Providers providers = MakeProviders(config);
  std::vector<AlignedInstance> aligned =
      RunStage2(sets, config.stage2, providers.nli.get(), providers.classifier.get(),
                config.workers, &result.errors);
  std::string out = config.OutputPath("aligned.jsonl");
  WriteJsonl(out, aligned);
  result.outputs = {out};
  size_t facts = 0;
  for (const AlignedInstance &a : aligned) facts += a.facts.size();
  result.counts = {{"candidate_sets", sets.size()},
                   {"aligned", aligned.size()},
                   {"facts", facts},
                   {"method", SelectionMethodName(config.stage2.method)}};
  return result;
}

std::vector<DistantPage> GroupDistantPages(const std::vector<DistantSentence> &sentences) {
  std::map<std::string, DistantPage> by_page;
  for (const DistantSentence &s : sentences) {
    DistantPage &page = by_page[s.sentence.page_id];
    page.page_id = s.sentence.page_id;
    page.sentences.push_back(s);
  }
  std::vector<DistantPage> pages;
  for (auto &[id, page] : by_page) {
    std::stable_sort(page.sentences.begin(), page.sentences.end(),
                     [](const DistantSentence &a, const DistantSentence &b) {
                       return a.sentence.ordinal < b.sentence.ordinal;
                     });
    pages.push_back(std::move(page));
  }
  std::sort(pages.begin(), pages.end(), [](const DistantPage &a, const DistantPage &b) {
    return PageIdLess(a.page_id, b.page_id);
  });
  return pages;
}

CommandResult RunBuildDistant(const PipelineConfig &config) {
  if (!config.seed) throw ConfigError("build-distant requires a seed");
  CommandResult result;
  RequireInput(config.distant_input, "paths.distant_input");
  result.inputs = {config.distant_input};
  std::vector<DistantPage> pages =
      GroupDistantPages(ReadJsonl<DistantSentence>(config.distant_input));
  Providers providers = MakeProviders(config);
  DistantDataset data =
      BuildDistantDataset(pages, *providers.embedder, *config.seed, config.distant, config.workers);

  std::string train = config.OutputPath("distant_train.jsonl");
  std::string validation = config.OutputPath("distant_validation.jsonl");
  std::string manifest = config.OutputPath("distant_manifest.json");
  WriteJsonl(train, data.train);
  WriteJsonl(validation, data.validation);
  const DistantStats &s = data.stats;
  json counts = {{"pages", pages.size()},
                 {"positives", s.positives},
                 {"negatives", s.negatives},
                 {"missing_negatives", s.missing_negatives},
                 {"train", data.train.size()},
                 {"validation", data.validation.size()},
                 {"train_positives", s.train_positives},
                 {"train_negatives", s.train_negatives},
                 {"validation_positives", s.validation_positives},
                 {"validation_negatives", s.validation_negatives}};
  WriteFile(manifest, json({{"seed", data.seed}, {"counts", counts}}).dump(2) + "\n");
  result.outputs = {train, validation, manifest};
  result.counts = counts;
  return result;
}

std::string WriteManifest(const PipelineConfig &config, const std::string &command,
                          const CommandResult &result) {
  fs::path out_dir = fs::path(config.output_dir).lexically_normal();
  auto label = [&](const std::string &path) {
    fs::path p = fs::path(path).lexically_normal();
    fs::path rel = p.lexically_relative(out_dir);
    if (!rel.empty() && *rel.begin() != "..") return "$out/" + rel.generic_string();
    return p.filename().generic_string();
  };
  json inputs = json::object(), outputs = json::object();
  for (const std::string &p : result.inputs) inputs[label(p)] = FileDigest(p);
  for (const std::string &p : result.outputs) outputs[label(p)] = FileDigest(p);

  std::string errors_path = config.OutputPath(command + ".errors.jsonl");
  if (!result.errors.empty()) {
    std::string text;
    for (const ItemError &e : result.errors) {
      text += json({{"item", e.item}, {"error", e.message}}).dump() + "\n";
    }
    WriteFile(errors_path, text);
  } else if (fs::exists(errors_path)) {
    fs::remove(errors_path);
  }
  json manifest = {{"command", command},
                   {"version", kVersion},
                   {"config_hash", config.Hash()},
                   {"seed", config.seed ? json(*config.seed) : json(nullptr)},
                   {"inputs", inputs},
                   {"outputs", outputs},
                   {"counts", result.counts},
                   {"errors", result.errors.size()}};
  std::string path = config.OutputPath(command + ".manifest.json");
  WriteFile(path, manifest.dump(2) + "\n");
  return path;
}

}  // namespace factalign
