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

#ifndef FACTALIGN_STAGE1_H_
#define FACTALIGN_STAGE1_H_

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "factalign/errors.h"
#include "factalign/facts.h"
#include "factalign/providers.h"
#include "factalign/sentences.h"

namespace factalign {

struct Stage1Config {
  double tau = 0.65;
  int k = 10;
  // semantic_native, tfidf_fact_to_lr, tfidf_sentence_to_en, semantic_translated
  std::array<double, 4> weights = {0.25, 0.25, 0.25, 0.25};

  // Throws ConfigError unless tau in [0,1], k >= 1 and the weights are
  // non-negative and sum to 1 (within 1e-9).
  void Validate() const;
};

struct AnalyzerConfig {
  bool lowercase = true;
  bool strip_punctuation = true;

  bool operator==(const AnalyzerConfig &) const = default;
};

std::vector<std::string> Analyze(std::string_view text, const AnalyzerConfig &config);

// Document frequencies and smoothed inverse document frequencies:
// idf(t) = ln((1 + N) / (1 + df(t))) + 1. Terms never seen in the corpus get
// the idf of df = 0.
class TfidfIndex {
 public:
  TfidfIndex() = default;

  // Throws ConfigError on an empty corpus.
  static TfidfIndex Build(const std::vector<std::string> &documents,
                          const AnalyzerConfig &analyzer = {});

  int doc_count() const { return doc_count_; }
  const std::map<std::string, int> &vocabulary() const { return vocabulary_; }
  int DocumentFrequency(std::string_view term) const;
  double Idf(std::string_view term) const;
  double UnseenIdf() const;
  const AnalyzerConfig &analyzer() const { return analyzer_; }

  // Cosine of the tf-idf vectors of two texts. 0 when either text has no
  // terms or the texts share none.
  double Cosine(std::string_view a, std::string_view b) const;

  bool operator==(const TfidfIndex &) const = default;

 private:
  AnalyzerConfig analyzer_;
  int doc_count_ = 0;
  std::map<std::string, int> vocabulary_;  // term -> index, in term order
  std::vector<int> df_;
  std::vector<double> idf_;
};

inline double TfidfCosine(const TfidfIndex &index, std::string_view a,
                          std::string_view b) {
  return index.Cosine(a, b);
}

struct SimilarityComponents {
  double semantic_native = 0;        // embed(fact_en) vs embed(sentence)
  double tfidf_fact_to_lr = 0;       // tfidf(localized fact, sentence)
  double tfidf_sentence_to_en = 0;   // tfidf(fact_en, translated sentence)
  double semantic_translated = 0;    // embed(localized fact) vs embed(translated sentence)

  std::array<double, 4> AsArray() const {
    return {semantic_native, tfidf_fact_to_lr, tfidf_sentence_to_en, semantic_translated};
  }
  bool operator==(const SimilarityComponents &) const = default;
};

struct ScoredCandidate {
  Fact fact;
  double score = 0;
  SimilarityComponents components;

  bool operator==(const ScoredCandidate &) const = default;
};

struct CandidateSet {
  Sentence sentence;
  std::vector<ScoredCandidate> candidates;  // ranked, 1..k entries

  bool operator==(const CandidateSet &) const = default;
};

// Maps an embedding cosine from [-1, 1] onto [0, 1].
inline double UnitCosine(double c) { return (c + 1.0) / 2.0; }

// Weighted mean of the four components, clamped to [0, 1].
double CombineComponents(const SimilarityComponents &components,
                         const std::array<double, 4> &weights);

// Ranking order: higher score first, then pid, then canonical object.
bool CandidateBefore(const ScoredCandidate &a, const ScoredCandidate &b);

// Scores one (fact, sentence) pair. Provider failures are rethrown as
// ProviderError naming the component being computed.
ScoredCandidate FactSentenceSimilarity(const Fact &fact, const Sentence &sentence,
                                       const TfidfIndex &index_lr,
                                       const TfidfIndex &index_en,
                                       const EmbeddingProvider &embedder,
                                       const TranslationProvider &translator,
                                       const Stage1Config &config);

// Scores every fact against every sentence of the bundle; a sentence survives
// when its best score is strictly above tau and keeps its top-k facts.
std::vector<CandidateSet> GenerateCandidates(const EntityBundle &bundle,
                                             const Stage1Config &config,
                                             const TfidfIndex &index_lr,
                                             const TfidfIndex &index_en,
                                             const EmbeddingProvider &embedder,
                                             const TranslationProvider &translator);

struct Stage1Indexes {
  TfidfIndex lr;  // sentences and localized fact texts
  TfidfIndex en;  // translated sentences and English fact texts
};

// Builds both indexes from the bundles of one language.
Stage1Indexes BuildStage1Indexes(const std::vector<EntityBundle> &bundles,
                                 const TranslationProvider &translator);

// Full candidate generation over bundles of any languages: indexes are built
// per language, bundles are scored in parallel, and the result keeps bundle
// order. Translations and embeddings are memoized for the duration of the run.
// With `errors`, a bundle whose scoring fails is skipped and recorded;
// otherwise the first failure propagates.
std::vector<CandidateSet> RunStage1(const std::vector<EntityBundle> &bundles,
                                    const Stage1Config &config,
                                    const EmbeddingProvider &embedder,
                                    const TranslationProvider &translator, int workers,
                                    std::vector<ItemError> *errors = nullptr);

}  // namespace factalign

#endif  // FACTALIGN_STAGE1_H_
