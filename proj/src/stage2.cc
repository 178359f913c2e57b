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

#include "factalign/stage2.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "factalign/errors.h"
#include "factalign/parallel.h"
#include "factalign/random.h"

namespace factalign {

std::string_view SelectionMethodName(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::kEntailment: return "entailment";
    case SelectionMethod::kClassifier: return "classifier";
    case SelectionMethod::kOverlap: return "overlap";
    case SelectionMethod::kGold: return "gold";
  }
  return "unknown";
}

SelectionMethod ParseSelectionMethod(std::string_view name) {
  for (auto m : {SelectionMethod::kEntailment, SelectionMethod::kClassifier,
                 SelectionMethod::kOverlap, SelectionMethod::kGold}) {
    if (SelectionMethodName(m) == name) return m;
  }
  throw ConfigError("unknown selection method: " + std::string(name));
}

std::string_view PairLabelName(PairLabel label) {
  return label == PairLabel::kPositive ? "positive" : "negative";
}

PairLabel ParsePairLabel(std::string_view name) {
  if (name == "positive") return PairLabel::kPositive;
  if (name == "negative") return PairLabel::kNegative;
  throw ParseError("unknown pair label: " + std::string(name));
}

std::string FormatPair(const Sentence &sentence, const Fact &fact) {
  std::string out = sentence.text;
  out += kPairSeparator;
  out += VerbalizeFact(fact, false, Language::kEn, VerbalizeOptions{false});
  return out;
}

namespace {

template <typename Keep>
std::optional<AlignedInstance> Select(const CandidateSet &set, SelectionMethod method,
                                      Keep keep) {
  AlignedInstance out;
  out.sentence = set.sentence;
  out.method = method;
  out.section = set.sentence.section;
  for (const ScoredCandidate &c : set.candidates) {
    if (keep(c)) out.facts.push_back(c.fact);
  }
  if (out.facts.empty()) return std::nullopt;
  return out;
}

}  // namespace

std::optional<AlignedInstance> SelectByEntailment(const CandidateSet &candidates,
                                                  const EntailmentProvider &nli,
                                                  NliInput input) {
  return Select(candidates, SelectionMethod::kEntailment, [&](const ScoredCandidate &c) {
    NliResult r;
    if (input == NliInput::kPairText) {
      r = nli.Classify(FormatPair(candidates.sentence, c.fact), "");
    } else {
      r = nli.Classify(candidates.sentence.text,
                       VerbalizeFact(c.fact, false, Language::kEn, VerbalizeOptions{false}));
    }
    return r.label == NliLabel::kEntailment;
  });
}

std::optional<AlignedInstance> BaselineOverlapSelect(const CandidateSet &candidates,
                                                     double threshold) {
  return Select(candidates, SelectionMethod::kOverlap, [&](const ScoredCandidate &c) {
    return c.components.tfidf_sentence_to_en >= threshold;
  });
}

std::optional<AlignedInstance> SelectByClassifier(const CandidateSet &candidates,
                                                  const AlignmentClassifierProvider &clf,
                                                  double cutoff) {
  return Select(candidates, SelectionMethod::kClassifier, [&](const ScoredCandidate &c) {
    return clf.Score(FormatPair(candidates.sentence, c.fact)) >= cutoff;
  });
}

std::vector<AlignedInstance> RunStage2(const std::vector<CandidateSet> &sets,
                                       const SelectorConfig &config,
                                       const EntailmentProvider *nli,
                                       const AlignmentClassifierProvider *classifier,
                                       int workers, std::vector<ItemError> *errors) {
  if (config.method == SelectionMethod::kEntailment && nli == nullptr) {
    throw ConfigError("entailment selection requires an NLI provider");
  }
  if (config.method == SelectionMethod::kClassifier && classifier == nullptr) {
    throw ConfigError("classifier selection requires a classifier provider");
  }
  if (config.method == SelectionMethod::kGold) {
    throw ConfigError("gold alignments come from annotation, not from stage 2");
  }
  auto select = [&](const CandidateSet &set) -> std::optional<AlignedInstance> {
    switch (config.method) {
      case SelectionMethod::kEntailment:
        return SelectByEntailment(set, *nli, config.nli_input);
      case SelectionMethod::kClassifier:
        return SelectByClassifier(set, *classifier, config.cutoff);
      case SelectionMethod::kOverlap:
        return BaselineOverlapSelect(set, config.overlap_threshold);
      case SelectionMethod::kGold:
        break;
    }
    return std::nullopt;
  };
  std::vector<std::optional<AlignedInstance>> results(sets.size());
  std::vector<std::optional<std::string>> failures(sets.size());
  ParallelFor(sets.size(), workers, [&](size_t i) {
    try {
      results[i] = select(sets[i]);
    } catch (const Error &e) {
      if (errors == nullptr) throw;
      failures[i] = e.what();
    }
  });
  std::vector<AlignedInstance> out;
  for (size_t i = 0; i < results.size(); ++i) {
    if (failures[i]) {
      const Sentence &s = sets[i].sentence;
      errors->push_back({std::string(LanguageCode(s.language)) + ":" + s.page_id + ":" +
                             std::to_string(s.ordinal),
                         *failures[i]});
    }
    if (results[i]) out.push_back(std::move(*results[i]));
  }
  return out;
}

std::pair<size_t, size_t> DonorWindow(size_t ranked_count, const DistantConfig &config) {
  size_t begin = std::min(ranked_count, static_cast<size_t>(std::max(0, config.skip_top)));
  size_t end = std::min(ranked_count, begin + static_cast<size_t>(std::max(0, config.pool_size)));
  return {begin, end};
}

size_t TrainSize(size_t n, double train_fraction) {
  if (train_fraction < 0 || train_fraction > 1) {
    throw ConfigError("train fraction must lie in [0, 1]");
  }
  return std::min(n, static_cast<size_t>(std::llround(train_fraction * static_cast<double>(n))));
}

namespace {

struct PageResult {
  std::vector<PairExample> examples;
  int64_t positives = 0;
  int64_t negatives = 0;
  int64_t missing = 0;
};

PageResult BuildPage(const DistantPage &page, const EmbeddingProvider &embedder,
                     uint64_t seed, const DistantConfig &config) {
  PageResult result;
  std::vector<const DistantSentence *> sentences;
  for (const DistantSentence &s : page.sentences) sentences.push_back(&s);
  std::stable_sort(sentences.begin(), sentences.end(),
                   [](const DistantSentence *a, const DistantSentence *b) {
                     return a->sentence.ordinal < b->sentence.ordinal;
                   });

  std::vector<Embedding> vectors;
  std::vector<std::set<std::string>> fact_ids;
  for (const DistantSentence *s : sentences) {
    vectors.push_back(embedder.Embed(s->sentence.text, s->sentence.language));
    std::set<std::string> ids;
    for (const Fact &f : s->facts) ids.insert(FactId(f));
    fact_ids.push_back(std::move(ids));
  }

  Rng rng(DeriveSeed(seed, page.page_id));
  for (size_t i = 0; i < sentences.size(); ++i) {
    const DistantSentence &s = *sentences[i];
    if (s.facts.empty()) continue;

    // Other sentences by decreasing similarity; ties by ordinal.
    std::vector<std::pair<double, size_t>> ranked;
    for (size_t j = 0; j < sentences.size(); ++j) {
      if (j != i) ranked.emplace_back(Cosine(vectors[i], vectors[j]), j);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [&](const auto &a, const auto &b) {
      if (a.first != b.first) return a.first > b.first;
      return sentences[a.second]->sentence.ordinal < sentences[b.second]->sentence.ordinal;
    });
    auto [begin, end] = DonorWindow(ranked.size(), config);

    for (const Fact &fact : s.facts) {
      PairExample positive;
      positive.pair_text = FormatPair(s.sentence, fact);
      positive.label = PairLabel::kPositive;
      positive.source_page = page.page_id;
      positive.sentence_ordinal = s.sentence.ordinal;
      result.examples.push_back(std::move(positive));
      ++result.positives;

      // Donors carrying at least one fact not aligned to s.
      std::vector<std::pair<size_t, std::vector<const Fact *>>> eligible;
      for (size_t r = begin; r < end; ++r) {
        size_t j = ranked[r].second;
        std::vector<const Fact *> usable;
        for (const Fact &f : sentences[j]->facts) {
          if (!fact_ids[i].count(FactId(f))) usable.push_back(&f);
        }
        if (!usable.empty()) eligible.emplace_back(j, std::move(usable));
      }
      if (eligible.empty()) {
        ++result.missing;
        continue;
      }
      const auto &donor = eligible[UniformIndex(rng, eligible.size())];
      const Fact &negative_fact = *donor.second[UniformIndex(rng, donor.second.size())];
      PairExample negative;
      negative.pair_text = FormatPair(s.sentence, negative_fact);
      negative.label = PairLabel::kNegative;
      negative.source_page = page.page_id;
      negative.sentence_ordinal = s.sentence.ordinal;
      result.examples.push_back(std::move(negative));
      ++result.negatives;
    }
  }
  return result;
}

}  // namespace

DistantDataset BuildDistantDataset(const std::vector<DistantPage> &pages,
                                   const EmbeddingProvider &embedder, uint64_t seed,
                                   const DistantConfig &config, int workers) {
  if (config.skip_top < 0 || config.pool_size <= 0) {
    throw ConfigError("donor window must have skip_top >= 0 and pool_size > 0");
  }
  std::vector<const DistantPage *> order;
  std::set<std::string> seen;
  for (const DistantPage &p : pages) {
    if (!seen.insert(p.page_id).second) throw Duplicate("duplicate page: " + p.page_id);
    order.push_back(&p);
  }
  std::sort(order.begin(), order.end(), [](const DistantPage *a, const DistantPage *b) {
    return PageIdLess(a->page_id, b->page_id);
  });

  std::vector<PageResult> results(order.size());
  ParallelFor(order.size(), workers,
              [&](size_t i) { results[i] = BuildPage(*order[i], embedder, seed, config); });

  DistantDataset out;
  out.seed = seed;
  std::vector<PairExample> all;
  for (PageResult &r : results) {
    out.stats.positives += r.positives;
    out.stats.negatives += r.negatives;
    out.stats.missing_negatives += r.missing;
    for (PairExample &e : r.examples) all.push_back(std::move(e));
  }
  Rng rng(MixSeed(seed));
  Shuffle(all, rng);
  size_t n_train = TrainSize(all.size(), config.train_fraction);
  for (size_t i = 0; i < all.size(); ++i) {
    bool train = i < n_train;
    bool positive = all[i].label == PairLabel::kPositive;
    if (train) {
      (positive ? out.stats.train_positives : out.stats.train_negatives)++;
      out.train.push_back(std::move(all[i]));
    } else {
      (positive ? out.stats.validation_positives : out.stats.validation_negatives)++;
      out.validation.push_back(std::move(all[i]));
    }
  }
  return out;
}

}  // namespace factalign
