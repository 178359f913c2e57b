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

#ifndef FACTALIGN_PIPELINE_H_
#define FACTALIGN_PIPELINE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "factalign/errors.h"
#include "factalign/facts.h"
#include "factalign/language.h"
#include "factalign/providers.h"
#include "factalign/sentences.h"
#include "factalign/stage1.h"
#include "factalign/stage2.h"

namespace factalign {

inline constexpr std::string_view kVersion = "1.0.0";

// Each slot is "mock" or an http(s) base URL. The translation slot also
// accepts "glossary" (requires paths.glossary).
struct ProviderSettings {
  std::string embedding = "mock";
  std::string translation = "mock";
  std::string nli = "mock";
  std::string classifier = "mock";
  int embedding_dim = 64;
  int timeout_seconds = 60;
};

struct PipelineConfig {
  std::vector<Language> languages;

  // Paths, resolved against the config file's directory.
  std::map<Language, std::string> dumps;
  std::string entity_dump;
  std::string entity_map;  // "lang<TAB>title<TAB>qid" lines
  std::string output_dir = "out";
  std::string prefix_dir;  // non-breaking prefix lists; empty: built-in data
  std::map<Language, std::string> lexicons;
  std::string glossary;
  std::string distant_input;  // JSONL of {sentence, facts}

  FilterLimits limits;
  std::set<Datatype> allowlist = DefaultAllowlist();
  Stage1Config stage1;
  SelectorConfig stage2;
  DistantConfig distant;
  ProviderSettings providers;
  std::optional<uint64_t> seed;
  int workers = 1;
  nlohmann::json annotation;  // ServiceConfig fields
  nlohmann::json raw_paths;   // "paths" as written, for hashing

  // Throws ConfigError. Relative paths are resolved against base_dir.
  static PipelineConfig FromJson(const nlohmann::json &j, const std::string &base_dir);
  static PipelineConfig Load(const std::string &path);

  // Applies FACTALIGN_{EMBEDDING,TRANSLATION,NLI,CLASSIFIER}_URL.
  void ApplyEnvironment();

  // Checks ranges and cross-field requirements. Throws ConfigError.
  void Validate() const;

  // Settings that influence outputs (workers excluded), for hashing.
  nlohmann::json Canonical() const;
  std::string Hash() const;

  std::string OutputPath(const std::string &name) const;
};

struct Providers {
  std::unique_ptr<EmbeddingProvider> embedder;
  std::unique_ptr<TranslationProvider> translator;
  std::unique_ptr<EntailmentProvider> nli;
  std::unique_ptr<AlignmentClassifierProvider> classifier;
};

Providers MakeProviders(const PipelineConfig &config);

// "lang<TAB>title<TAB>qid" lines keyed by (language, title).
std::map<std::pair<Language, std::string>, std::string> LoadEntityMap(const std::string &path);

struct CommandResult {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<ItemError> errors;
  nlohmann::json counts = nlohmann::json::object();
};

// Pipeline steps; each reads and writes files under config.output_dir.
CommandResult RunIngest(const PipelineConfig &config);
CommandResult RunExtractFacts(const PipelineConfig &config);
CommandResult RunCandidateGeneration(const PipelineConfig &config);
CommandResult RunCandidateSelection(const PipelineConfig &config);
CommandResult RunBuildDistant(const PipelineConfig &config);

// Writes "<command>.manifest.json" (and "<command>.errors.jsonl" when there
// are errors) into the output directory. Contents depend only on the command,
// the config hash, the seed and the input and output bytes.
std::string WriteManifest(const PipelineConfig &config, const std::string &command,
                          const CommandResult &result);

// Groups {sentence, facts} records into pages in canonical order.
std::vector<DistantPage> GroupDistantPages(const std::vector<DistantSentence> &sentences);

}  // namespace factalign

#endif  // FACTALIGN_PIPELINE_H_
