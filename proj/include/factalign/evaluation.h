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

#ifndef FACTALIGN_EVALUATION_H_
#define FACTALIGN_EVALUATION_H_

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "factalign/language.h"
#include "factalign/stage2.h"

namespace factalign {

// ---------------------------------------------------------------------------
// Selection F1.
// ---------------------------------------------------------------------------

// Fact identity for scoring: "pid|canonical object".
using FactKeySet = std::set<std::string>;

std::string FactKey(const Fact &fact);
FactKeySet FactKeys(const std::vector<Fact> &facts);

struct PrfScores {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  int64_t support = 0;  // gold facts
  int64_t true_positives = 0;
  int64_t false_positives = 0;
  int64_t false_negatives = 0;

  bool operator==(const PrfScores &) const = default;
};

// Precision is 1 when nothing was predicted and recall is 1 when nothing was
// expected; f1 is 0 when both are 0.
PrfScores ScoresFromCounts(int64_t tp, int64_t fp, int64_t fn);

struct F1Report {
  std::map<Language, PrfScores> per_language;
  PrfScores micro;  // pooled over every language
  PrfScores macro;  // unweighted mean over languages; counts are summed

  bool operator==(const F1Report &) const = default;
};

// Throws InvalidArgument on length mismatch.
F1Report SelectionF1(const std::vector<FactKeySet> &predicted,
                     const std::vector<FactKeySet> &gold,
                     const std::vector<Language> &languages);

// ---------------------------------------------------------------------------
// Agreement.
// ---------------------------------------------------------------------------

// Marks must be 0 or 1 and equally long. Throws InvalidArgument.
double CohenKappa(const std::vector<int> &a, const std::vector<int> &b);

struct AgreementReport {
  std::map<std::pair<std::string, std::string>, double> pairwise_kappa;  // first < second
  double average_kappa = 0;
  int64_t item_count = 0;
};

// marks[annotator][item] = 0/1. Each pair is scored on the items both marked
// (in item order); pairs without common items are left out of the average.
// Throws InvalidArgument if no pair overlaps.
AgreementReport PairwiseAgreement(
    const std::map<std::string, std::map<std::string, int>> &marks);

// ---------------------------------------------------------------------------
// BLEU.
// ---------------------------------------------------------------------------

struct BleuTokenizer {
  bool lowercase = false;          // ASCII only
  bool split_punctuation = true;   // punctuation code points become tokens

  std::string Describe() const;
};

std::vector<std::string> BleuTokens(std::string_view text, const BleuTokenizer &tokenizer);

struct BleuResult {
  double bleu = 0;  // in [0, 1]
  double brevity_penalty = 0;
  std::array<double, 4> precisions{};
  std::array<int64_t, 4> matches{};
  std::array<int64_t, 4> totals{};
  int64_t hypothesis_length = 0;
  int64_t reference_length = 0;
  std::string tokenizer;
};

// Corpus BLEU-4 with pooled clipped counts, uniform weights and a brevity
// penalty. An order with no hypothesis n-grams counts as precision 1; an
// order with n-grams but no matches uses 1e-9 matches.
BleuResult CorpusBleuDetailed(const std::vector<std::string> &hypotheses,
                              const std::vector<std::string> &references,
                              const BleuTokenizer &tokenizer = {});

double CorpusBleu(const std::vector<std::string> &hypotheses,
                  const std::vector<std::string> &references,
                  const BleuTokenizer &tokenizer = {});

// ---------------------------------------------------------------------------
// Dataset statistics.
// ---------------------------------------------------------------------------

struct StatsReport {
  Language language = Language::kEn;
  int64_t instance_count = 0;
  double word_avg = 0;
  int64_t word_min = 0;
  int64_t word_max = 0;
  double fact_avg = 0;
  int64_t fact_min = 0;
  int64_t fact_max = 0;
  int64_t vocabulary_size = 0;
  std::map<int64_t, double> fact_count_histogram;  // fact count -> fraction
  std::vector<std::pair<std::string, int64_t>> top_predicates;  // at most 10

  bool operator==(const StatsReport &) const = default;
};

// Throws InvalidArgument on empty input or a language mismatch.
StatsReport DatasetStats(const std::vector<AlignedInstance> &instances, Language language);

// ---------------------------------------------------------------------------
// Plain-text tables.
// ---------------------------------------------------------------------------

// Rows of methods, one column per language in table order, then "Avg." (the
// macro f1). Languages absent from a report print "-".
std::string FormatF1Table(const std::vector<std::pair<std::string, F1Report>> &rows);

struct AnnotationSummary {
  Language language = Language::kEn;
  double average_kappa = 0;
  int64_t annotators = 0;
  StatsReport stats;
};

// Lang, kappa, annotators, instances, avg/min/max T, avg/min/max F.
std::string FormatAnnotationTable(const std::vector<AnnotationSummary> &rows);

// Lang, instances, avg/min/max T, avg/min/max F, vocabulary.
std::string FormatStatsTable(const std::vector<StatsReport> &rows);

// One column per language listing "label (count)".
std::string FormatTopPredicatesTable(const std::vector<StatsReport> &rows);

// Rows of models, BLEU x 100 per language, then the mean.
std::string FormatBleuTable(
    const std::vector<std::pair<std::string, std::map<Language, double>>> &rows);

}  // namespace factalign

#endif  // FACTALIGN_EVALUATION_H_
