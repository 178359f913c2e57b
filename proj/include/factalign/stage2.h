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

#ifndef FACTALIGN_STAGE2_H_
#define FACTALIGN_STAGE2_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factalign/errors.h"
#include "factalign/facts.h"
#include "factalign/providers.h"
#include "factalign/sentences.h"
#include "factalign/stage1.h"

namespace factalign {

enum class SelectionMethod { kEntailment, kClassifier, kOverlap, kGold };

std::string_view SelectionMethodName(SelectionMethod method);
SelectionMethod ParseSelectionMethod(std::string_view name);

struct AlignedInstance {
  Sentence sentence;
  std::vector<Fact> facts;  // subset of the candidate facts, in candidate order
  SelectionMethod method = SelectionMethod::kEntailment;
  std::string section;

  bool operator==(const AlignedInstance &) const = default;
};

// sentence.text + "⟨SEP⟩" + "subject | predicate | object" (English, without
// qualifiers).
std::string FormatPair(const Sentence &sentence, const Fact &fact);

// How a (sentence, fact) pair is presented to the NLI model.
enum class NliInput {
  kSentenceAndFact,  // premise = sentence, hypothesis = fact verbalization
  kPairText,         // premise = FormatPair(sentence, fact), empty hypothesis
};

// Keeps the candidate facts the model labels as entailment. Returns nullopt
// when none survives. Provider errors propagate; nothing partial is returned.
std::optional<AlignedInstance> SelectByEntailment(
    const CandidateSet &candidates, const EntailmentProvider &nli,
    NliInput input = NliInput::kSentenceAndFact);

// Keeps candidate facts whose tfidf_sentence_to_en component is >= threshold.
std::optional<AlignedInstance> BaselineOverlapSelect(const CandidateSet &candidates,
                                                     double threshold);

// Keeps candidate facts with clf.Score(FormatPair(s, f)) >= cutoff.
std::optional<AlignedInstance> SelectByClassifier(const CandidateSet &candidates,
                                                  const AlignmentClassifierProvider &clf,
                                                  double cutoff = 0.5);

struct SelectorConfig {
  SelectionMethod method = SelectionMethod::kEntailment;
  double cutoff = 0.5;             // classifier
  double overlap_threshold = 0.5;  // overlap baseline
  NliInput nli_input = NliInput::kSentenceAndFact;
};

// Applies the configured selector to every candidate set in parallel.
// Output keeps input order and omits sets with no surviving fact. With
// `errors`, a set whose selection fails is skipped and recorded.
std::vector<AlignedInstance> RunStage2(const std::vector<CandidateSet> &sets,
                                       const SelectorConfig &config,
                                       const EntailmentProvider *nli,
                                       const AlignmentClassifierProvider *classifier,
                                       int workers, std::vector<ItemError> *errors = nullptr);

// ---------------------------------------------------------------------------
// Distant supervision.
// ---------------------------------------------------------------------------

enum class PairLabel { kPositive, kNegative };

std::string_view PairLabelName(PairLabel label);
PairLabel ParsePairLabel(std::string_view name);

struct PairExample {
  std::string pair_text;
  PairLabel label = PairLabel::kPositive;
  std::string source_page;
  int sentence_ordinal = 0;

  bool operator==(const PairExample &) const = default;
};

// A sentence with the facts automatically aligned to it (sentence mentions
// the fact's subject and object).
struct DistantSentence {
  Sentence sentence;
  std::vector<Fact> facts;

  bool operator==(const DistantSentence &) const = default;
};

struct DistantPage {
  std::string page_id;
  std::vector<DistantSentence> sentences;
};

struct DistantConfig {
  int skip_top = 2;             // most similar sentences never used as donors
  int pool_size = 10;           // donors are sampled from the next pool_size
  double train_fraction = 0.9;
};

struct DistantStats {
  int64_t positives = 0;
  int64_t negatives = 0;
  int64_t missing_negatives = 0;  // positives without an eligible donor
  int64_t train_positives = 0;
  int64_t train_negatives = 0;
  int64_t validation_positives = 0;
  int64_t validation_negatives = 0;
};

struct DistantDataset {
  std::vector<PairExample> train;
  std::vector<PairExample> validation;
  uint64_t seed = 0;
  DistantStats stats;
};

// Rank positions [skip_top, skip_top + pool_size) of a similarity ranking of
// `ranked_count` sentences, clipped to the ranking length.
std::pair<size_t, size_t> DonorWindow(size_t ranked_count, const DistantConfig &config);

// round(train_fraction * n).
size_t TrainSize(size_t n, double train_fraction);

// For every (sentence, aligned fact) emits a positive pair. For each positive
// the page's other sentences are ranked by embedding cosine to the sentence
// (ties by ordinal), the donor is drawn uniformly from the eligible sentences
// inside DonorWindow, where eligible means carrying a fact not aligned to the
// sentence, and one such fact is drawn uniformly to form the negative pair.
// Each page draws from its own stream derived from (seed, page id); pages are
// merged in canonical order, shuffled with the seed and split.
DistantDataset BuildDistantDataset(const std::vector<DistantPage> &pages,
                                   const EmbeddingProvider &embedder, uint64_t seed,
                                   const DistantConfig &config = {}, int workers = 1);

}  // namespace factalign

#endif  // FACTALIGN_STAGE2_H_
