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

#include "factalign/stage1.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "factalign/errors.h"
#include "factalign/parallel.h"
#include "factalign/text.h"

namespace factalign {

void Stage1Config::Validate() const {
  if (!(tau >= 0 && tau <= 1)) throw ConfigError("tau must lie in [0, 1]");
  if (k < 1) throw ConfigError("k must be positive");
  double sum = 0;
  for (double w : weights) {
    if (!(w >= 0)) throw ConfigError("component weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("component weights must sum to 1");
}

std::vector<std::string> Analyze(std::string_view text, const AnalyzerConfig &config) {
  if (config.lowercase && config.strip_punctuation) return AnalyzeTerms(text);
  std::vector<std::string> terms;
  for (std::string &token : WhitespaceTokens(text)) {
    if (config.strip_punctuation) {
      for (std::string &t : AnalyzeTerms(token)) terms.push_back(std::move(t));
      continue;
    }
    if (config.lowercase) {
      for (char &c : token) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
    }
    terms.push_back(std::move(token));
  }
  return terms;
}

TfidfIndex TfidfIndex::Build(const std::vector<std::string> &documents,
                             const AnalyzerConfig &analyzer) {
  if (documents.empty()) throw ConfigError("cannot build a TFIDF index from no documents");
  TfidfIndex index;
  index.analyzer_ = analyzer;
  index.doc_count_ = static_cast<int>(documents.size());
  std::map<std::string, int> df;
  for (const std::string &doc : documents) {
    std::vector<std::string> terms = Analyze(doc, analyzer);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (std::string &t : terms) ++df[std::move(t)];
  }
  const double n = index.doc_count_;
  for (const auto &[term, count] : df) {
    index.vocabulary_.emplace(term, static_cast<int>(index.df_.size()));
    index.df_.push_back(count);
    index.idf_.push_back(std::log((1.0 + n) / (1.0 + count)) + 1.0);
  }
  return index;
}

int TfidfIndex::DocumentFrequency(std::string_view term) const {
  auto it = vocabulary_.find(std::string(term));
  return it == vocabulary_.end() ? 0 : df_[it->second];
}

double TfidfIndex::UnseenIdf() const { return std::log(1.0 + doc_count_) + 1.0; }

double TfidfIndex::Idf(std::string_view term) const {
  auto it = vocabulary_.find(std::string(term));
  return it == vocabulary_.end() ? UnseenIdf() : idf_[it->second];
}

double TfidfIndex::Cosine(std::string_view a, std::string_view b) const {
  auto weights = [&](std::string_view text) {
    std::map<std::string, double> tf;
    for (std::string &t : Analyze(text, analyzer_)) tf[std::move(t)] += 1.0;
    for (auto &[term, w] : tf) w *= Idf(term);
    return tf;
  };
  std::map<std::string, double> wa = weights(a), wb = weights(b);
  if (wa.empty() || wb.empty()) return 0.0;
  double dot = 0, na = 0, nb = 0;
  for (const auto &[term, w] : wa) {
    na += w * w;
    auto it = wb.find(term);
    if (it != wb.end()) dot += w * it->second;
  }
  for (const auto &[term, w] : wb) nb += w * w;
  if (dot == 0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double CombineComponents(const SimilarityComponents &components,
                         const std::array<double, 4> &weights) {
  std::array<double, 4> c = components.AsArray();
  double score = 0;
  for (size_t i = 0; i < 4; ++i) score += weights[i] * c[i];
  return std::clamp(score, 0.0, 1.0);
}

bool CandidateBefore(const ScoredCandidate &a, const ScoredCandidate &b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.fact.predicate.pid != b.fact.predicate.pid) {
    return EntityIdLess(a.fact.predicate.pid, b.fact.predicate.pid);
  }
  return CanonicalValue(a.fact.object) < CanonicalValue(b.fact.object);
}

namespace {

// Provider-derived features of one fact, computed once per bundle.
struct FactFeatures {
  std::string text_en;
  std::string text_lr;
  Embedding embedding_en;
  Embedding embedding_lr;
};

struct SentenceFeatures {
  std::string text_en;
  Embedding embedding_lr;
  Embedding embedding_en;
};

template <typename Fn>
auto Guard(const char *component, Fn &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const MissingLabel &) {
    throw;
  } catch (const std::exception &e) {
    throw ProviderError(std::string(component) + ": " + e.what());
  }
}

FactFeatures PrepareFact(const Fact &fact, Language language,
                         const EmbeddingProvider &embedder,
                         const TranslationProvider &translator) {
  FactFeatures f;
  f.text_en = VerbalizeFact(fact, false, Language::kEn, {false});
  f.text_lr = Guard("tfidf_fact_to_lr",
                    [&] { return LocalizeFactText(fact, language, translator); });
  f.embedding_en = Guard("semantic_native",
                         [&] { return embedder.Embed(f.text_en, Language::kEn); });
  f.embedding_lr = Guard("semantic_translated",
                         [&] { return embedder.Embed(f.text_lr, language); });
  return f;
}

SentenceFeatures PrepareSentence(const Sentence &sentence,
                                 const EmbeddingProvider &embedder,
                                 const TranslationProvider &translator) {
  SentenceFeatures s;
  s.text_en = sentence.language == Language::kEn
                  ? sentence.text
                  : Guard("tfidf_sentence_to_en", [&] {
                      return translator.Translate(sentence.text, sentence.language,
                                                  Language::kEn);
                    });
  s.embedding_lr = Guard("semantic_native",
                         [&] { return embedder.Embed(sentence.text, sentence.language); });
  s.embedding_en = Guard("semantic_translated",
                         [&] { return embedder.Embed(s.text_en, Language::kEn); });
  return s;
}

ScoredCandidate ScorePrepared(const Fact &fact, const FactFeatures &f,
                              const Sentence &sentence, const SentenceFeatures &s,
                              const TfidfIndex &index_lr, const TfidfIndex &index_en,
                              const Stage1Config &config) {
  ScoredCandidate candidate;
  candidate.fact = fact;
  SimilarityComponents &c = candidate.components;
  c.semantic_native = UnitCosine(Cosine(f.embedding_en, s.embedding_lr));
  c.tfidf_fact_to_lr = index_lr.Cosine(f.text_lr, sentence.text);
  c.tfidf_sentence_to_en = index_en.Cosine(f.text_en, s.text_en);
  c.semantic_translated = UnitCosine(Cosine(f.embedding_lr, s.embedding_en));
  candidate.score = CombineComponents(c, config.weights);
  return candidate;
}

}  // namespace

ScoredCandidate FactSentenceSimilarity(const Fact &fact, const Sentence &sentence,
                                       const TfidfIndex &index_lr,
                                       const TfidfIndex &index_en,
                                       const EmbeddingProvider &embedder,
                                       const TranslationProvider &translator,
                                       const Stage1Config &config) {
  FactFeatures f = PrepareFact(fact, sentence.language, embedder, translator);
  SentenceFeatures s = PrepareSentence(sentence, embedder, translator);
  return ScorePrepared(fact, f, sentence, s, index_lr, index_en, config);
}

std::vector<CandidateSet> GenerateCandidates(const EntityBundle &bundle,
                                             const Stage1Config &config,
                                             const TfidfIndex &index_lr,
                                             const TfidfIndex &index_en,
                                             const EmbeddingProvider &embedder,
                                             const TranslationProvider &translator) {
  config.Validate();
  std::vector<FactFeatures> facts;
  facts.reserve(bundle.facts.size());
  for (const Fact &fact : bundle.facts) {
    facts.push_back(PrepareFact(fact, bundle.language, embedder, translator));
  }
  std::vector<CandidateSet> sets;
  for (const Sentence &sentence : bundle.sentences) {
    SentenceFeatures s = PrepareSentence(sentence, embedder, translator);
    std::vector<ScoredCandidate> scored;
    scored.reserve(facts.size());
    for (size_t i = 0; i < facts.size(); ++i) {
      scored.push_back(ScorePrepared(bundle.facts[i], facts[i], sentence, s, index_lr,
                                     index_en, config));
    }
    if (scored.empty()) continue;
    std::sort(scored.begin(), scored.end(), CandidateBefore);
    if (!(scored.front().score > config.tau)) continue;
    if (scored.size() > static_cast<size_t>(config.k)) scored.resize(config.k);
    sets.push_back({sentence, std::move(scored)});
  }
  return sets;
}

Stage1Indexes BuildStage1Indexes(const std::vector<EntityBundle> &bundles,
                                 const TranslationProvider &translator) {
  std::vector<std::string> docs_lr, docs_en;
  for (const EntityBundle &bundle : bundles) {
    for (const Sentence &s : bundle.sentences) {
      docs_lr.push_back(s.text);
      docs_en.push_back(s.language == Language::kEn
                            ? s.text
                            : translator.Translate(s.text, s.language, Language::kEn));
    }
    for (const Fact &fact : bundle.facts) {
      docs_lr.push_back(LocalizeFactText(fact, bundle.language, translator));
      docs_en.push_back(VerbalizeFact(fact, false, Language::kEn, {false}));
    }
  }
  return {TfidfIndex::Build(docs_lr), TfidfIndex::Build(docs_en)};
}

std::vector<CandidateSet> RunStage1(const std::vector<EntityBundle> &bundles,
                                    const Stage1Config &config,
                                    const EmbeddingProvider &embedder,
                                    const TranslationProvider &translator, int workers,
                                    std::vector<ItemError> *errors) {
  config.Validate();
  CachingEmbedder cached_embedder(embedder);
  CachingTranslator cached_translator(translator);

  std::map<Language, std::vector<EntityBundle>> by_language;
  for (const EntityBundle &b : bundles) by_language[b.language].push_back(b);
  std::map<Language, Stage1Indexes> indexes;
  for (const auto &[language, group] : by_language) {
    indexes.emplace(language, BuildStage1Indexes(group, cached_translator));
  }

  std::vector<std::vector<CandidateSet>> results(bundles.size());
  std::vector<std::optional<std::string>> failures(bundles.size());
  ParallelFor(bundles.size(), workers, [&](size_t i) {
    const Stage1Indexes &idx = indexes.at(bundles[i].language);
    try {
      results[i] = GenerateCandidates(bundles[i], config, idx.lr, idx.en, cached_embedder,
                                      cached_translator);
    } catch (const Error &e) {
      if (errors == nullptr) throw;
      failures[i] = e.what();
    }
  });
  std::vector<CandidateSet> all;
  for (size_t i = 0; i < results.size(); ++i) {
    if (failures[i]) {
      errors->push_back({bundles[i].entity.qid + "/" +
                             std::string(LanguageCode(bundles[i].language)),
                         *failures[i]});
    }
    std::move(results[i].begin(), results[i].end(), std::back_inserter(all));
  }
  return all;
}

}  // namespace factalign
