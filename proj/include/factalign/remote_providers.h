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

#ifndef FACTALIGN_REMOTE_PROVIDERS_H_
#define FACTALIGN_REMOTE_PROVIDERS_H_

#include <string>

#include "factalign/providers.h"

namespace factalign {

// JSON-over-HTTP adapters for user-deployed inference services:
//
//   POST /embed       {text, language}           -> {vector}
//   POST /translate   {text, source, target}     -> {text}
//   POST /nli         {premise, hypothesis}      -> {label, confidence}
//   POST /align-score {pair}                     -> {probability}
//
// The base URL is "http://host:port" with an optional path prefix. Every call
// opens its own connection, so the adapters may be shared between workers.
// Transport errors, non-200 statuses and malformed bodies raise ProviderError.

class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(std::string base_url, int timeout_seconds = 60);
  Embedding Embed(std::string_view text, Language language) const override;

 private:
  std::string base_url_;
  int timeout_seconds_;
};

class HttpTranslationProvider : public TranslationProvider {
 public:
  explicit HttpTranslationProvider(std::string base_url, int timeout_seconds = 60);
  std::string Translate(std::string_view text, Language source,
                        Language target) const override;

 private:
  std::string base_url_;
  int timeout_seconds_;
};

class HttpEntailmentProvider : public EntailmentProvider {
 public:
  explicit HttpEntailmentProvider(std::string base_url, int timeout_seconds = 60);
  NliResult Classify(std::string_view premise,
                     std::string_view hypothesis) const override;

 private:
  std::string base_url_;
  int timeout_seconds_;
};

class HttpAlignmentClassifier : public AlignmentClassifierProvider {
 public:
  explicit HttpAlignmentClassifier(std::string base_url, int timeout_seconds = 60);
  double Score(std::string_view pair_text) const override;

 private:
  std::string base_url_;
  int timeout_seconds_;
};

}  // namespace factalign

#endif  // FACTALIGN_REMOTE_PROVIDERS_H_
