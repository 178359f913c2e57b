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


#include "oracles.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "factalign/facts.h"
#include "factalign/random.h"
#include "factalign/text.h"

namespace factalign {
namespace testing {

namespace {

int64_t PidNumber(const std::string &pid) { return std::stoll(pid.substr(1)); }

// True when a ranks strictly before b.
bool Better(const ScoredCandidate &a, const ScoredCandidate &b) {
  if (a.score != b.score) return a.score > b.score;
  int64_t pa = PidNumber(a.fact.predicate.pid), pb = PidNumber(b.fact.predicate.pid);
  if (pa != pb) return pa < pb;
  return CanonicalValue(a.fact.object) < CanonicalValue(b.fact.object);
}

}  // namespace

std::vector<CandidateSet> BruteForceCandidates(const EntityBundle &bundle,
                                               const Stage1Config &config,
                                               const TfidfIndex &index_lr,
                                               const TfidfIndex &index_en,
                                               const EmbeddingProvider &embedder,
                                               const TranslationProvider &translator) {
  const Language lr = bundle.language;
  const Language en = Language::kEn;
  const auto &w = config.weights;
  std::vector<CandidateSet> out;
  for (const Sentence &s : bundle.sentences) {
    std::string s_en = lr == en ? s.text : translator.Translate(s.text, lr, en);
    std::vector<ScoredCandidate> pool;
    for (const Fact &f : bundle.facts) {
      std::string f_en = VerbalizeFact(f, false, en, {false});
      std::string f_lr = LocalizeFactText(f, lr, translator);
      ScoredCandidate c;
      c.fact = f;
      c.components.semantic_native =
          (Cosine(embedder.Embed(f_en, en), embedder.Embed(s.text, lr)) + 1.0) / 2.0;
      c.components.tfidf_fact_to_lr = index_lr.Cosine(f_lr, s.text);
      c.components.tfidf_sentence_to_en = index_en.Cosine(f_en, s_en);
      c.components.semantic_translated =
          (Cosine(embedder.Embed(f_lr, lr), embedder.Embed(s_en, en)) + 1.0) / 2.0;
      double score = 0;
      score += w[0] * c.components.semantic_native;
      score += w[1] * c.components.tfidf_fact_to_lr;
      score += w[2] * c.components.tfidf_sentence_to_en;
      score += w[3] * c.components.semantic_translated;
      c.score = std::min(1.0, std::max(0.0, score));
      pool.push_back(std::move(c));
    }
    double best = -1;
    for (const auto &c : pool) best = std::max(best, c.score);
    if (pool.empty() || !(best > config.tau)) continue;

    // Selection by repeated extraction of the best remaining candidate.
    CandidateSet set;
    set.sentence = s;
    std::vector<bool> taken(pool.size(), false);
    for (int round = 0; round < config.k && round < static_cast<int>(pool.size()); ++round) {
      int pick = -1;
      for (size_t i = 0; i < pool.size(); ++i) {
        if (taken[i]) continue;
        if (pick < 0 || Better(pool[i], pool[pick])) pick = static_cast<int>(i);
      }
      taken[pick] = true;
      set.candidates.push_back(pool[pick]);
    }
    out.push_back(std::move(set));
  }
  return out;
}

std::string PositiveKey(const std::string &page, int ordinal, const std::string &pair_text) {
  return page + "|" + std::to_string(ordinal) + "|" + pair_text;
}

namespace {

struct PageView {
  std::vector<const DistantSentence *> sentences;  // by ordinal
  std::vector<Embedding> vectors;
};

PageView View(const DistantPage &page, const EmbeddingProvider &embedder) {
  PageView v;
  for (const auto &s : page.sentences) v.sentences.push_back(&s);
  std::stable_sort(v.sentences.begin(), v.sentences.end(),
                   [](auto *a, auto *b) { return a->sentence.ordinal < b->sentence.ordinal; });
  for (auto *s : v.sentences) v.vectors.push_back(embedder.Embed(s->sentence.text, s->sentence.language));
  return v;
}

// 0-based similarity rank of j among the sentences other than i.
size_t Rank(const PageView &v, size_t i, size_t j) {
  double cj = Cosine(v.vectors[i], v.vectors[j]);
  size_t rank = 0;
  for (size_t k = 0; k < v.sentences.size(); ++k) {
    if (k == i || k == j) continue;
    double ck = Cosine(v.vectors[i], v.vectors[k]);
    if (ck > cj || (ck == cj && k < j)) ++rank;
  }
  return rank;
}

bool AlignedTo(const DistantSentence &s, const Fact &f) {
  for (const Fact &g : s.facts) {
    if (FactId(g) == FactId(f)) return true;
  }
  return false;
}

// Eligible donors of sentence i in rank order, each with its usable facts.
std::vector<std::pair<size_t, std::vector<const Fact *>>> Donors(const PageView &v, size_t i,
                                                                 const DistantConfig &config) {
  std::vector<std::pair<size_t, size_t>> by_rank;  // (rank, j)
  for (size_t j = 0; j < v.sentences.size(); ++j) {
    if (j == i) continue;
    size_t r = Rank(v, i, j);
    if (r >= static_cast<size_t>(config.skip_top) &&
        r < static_cast<size_t>(config.skip_top + config.pool_size)) {
      by_rank.emplace_back(r, j);
    }
  }
  std::sort(by_rank.begin(), by_rank.end());
  std::vector<std::pair<size_t, std::vector<const Fact *>>> donors;
  for (auto [r, j] : by_rank) {
    std::vector<const Fact *> usable;
    for (const Fact &f : v.sentences[j]->facts) {
      if (!AlignedTo(*v.sentences[i], f)) usable.push_back(&f);
    }
    if (!usable.empty()) donors.emplace_back(j, std::move(usable));
  }
  return donors;
}

}  // namespace

std::map<std::string, std::set<std::string>> AllowedNegatives(
    const std::vector<DistantPage> &pages, const EmbeddingProvider &embedder,
    const DistantConfig &config) {
  std::map<std::string, std::set<std::string>> allowed;
  for (const DistantPage &page : pages) {
    PageView v = View(page, embedder);
    for (size_t i = 0; i < v.sentences.size(); ++i) {
      const DistantSentence &s = *v.sentences[i];
      auto donors = Donors(v, i, config);
      for (const Fact &f : s.facts) {
        auto &set = allowed[PositiveKey(page.page_id, s.sentence.ordinal,
                                        FormatPair(s.sentence, f))];
        for (const auto &[j, usable] : donors) {
          for (const Fact *g : usable) set.insert(FormatPair(s.sentence, *g));
        }
      }
    }
  }
  return allowed;
}

DistantDataset BruteForceDistant(const std::vector<DistantPage> &pages,
                                 const EmbeddingProvider &embedder, uint64_t seed,
                                 const DistantConfig &config) {
  std::vector<const DistantPage *> order;
  for (const auto &p : pages) order.push_back(&p);
  std::sort(order.begin(), order.end(),
            [](auto *a, auto *b) { return PageIdLess(a->page_id, b->page_id); });

  DistantDataset out;
  out.seed = seed;
  std::vector<PairExample> all;
  for (const DistantPage *page : order) {
    PageView v = View(*page, embedder);
    Rng rng(DeriveSeed(seed, page->page_id));
    for (size_t i = 0; i < v.sentences.size(); ++i) {
      const DistantSentence &s = *v.sentences[i];
      if (s.facts.empty()) continue;
      auto donors = Donors(v, i, config);
      for (const Fact &f : s.facts) {
        all.push_back({FormatPair(s.sentence, f), PairLabel::kPositive, page->page_id,
                       s.sentence.ordinal});
        ++out.stats.positives;
        if (donors.empty()) {
          ++out.stats.missing_negatives;
          continue;
        }
        const auto &donor = donors[UniformIndex(rng, donors.size())];
        const Fact &g = *donor.second[UniformIndex(rng, donor.second.size())];
        all.push_back({FormatPair(s.sentence, g), PairLabel::kNegative, page->page_id,
                       s.sentence.ordinal});
        ++out.stats.negatives;
      }
    }
  }
  Rng rng(MixSeed(seed));
  for (size_t i = all.size(); i-- > 1;) std::swap(all[i], all[UniformIndex(rng, i + 1)]);
  size_t n_train = static_cast<size_t>(std::llround(config.train_fraction * all.size()));
  for (size_t i = 0; i < all.size(); ++i) {
    bool positive = all[i].label == PairLabel::kPositive;
    if (i < n_train) {
      (positive ? out.stats.train_positives : out.stats.train_negatives)++;
      out.train.push_back(all[i]);
    } else {
      (positive ? out.stats.validation_positives : out.stats.validation_negatives)++;
      out.validation.push_back(all[i]);
    }
  }
  return out;
}

namespace {

PrfScores Prf(int64_t tp, int64_t fp, int64_t fn) {
  PrfScores s;
  s.true_positives = tp;
  s.false_positives = fp;
  s.false_negatives = fn;
  s.support = tp + fn;
  s.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
  s.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn);
  s.f1 = s.precision + s.recall == 0
             ? 0.0
             : 2 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace

F1Report ConfusionF1(const std::vector<FactKeySet> &predicted,
                     const std::vector<FactKeySet> &gold,
                     const std::vector<Language> &languages) {
  // matrix[language][predicted][expected]
  std::map<Language, std::array<std::array<int64_t, 2>, 2>> matrix;
  for (size_t i = 0; i < gold.size(); ++i) {
    auto &m = matrix[languages[i]];
    std::set<std::string> universe(predicted[i].begin(), predicted[i].end());
    universe.insert(gold[i].begin(), gold[i].end());
    for (const auto &key : universe) {
      ++m[predicted[i].count(key)][gold[i].count(key)];
    }
  }
  F1Report report;
  int64_t tp = 0, fp = 0, fn = 0;
  for (const auto &[lang, m] : matrix) {
    report.per_language[lang] = Prf(m[1][1], m[1][0], m[0][1]);
    tp += m[1][1];
    fp += m[1][0];
    fn += m[0][1];
  }
  report.micro = Prf(tp, fp, fn);
  report.macro = report.micro;
  if (!matrix.empty()) {
    std::vector<double> p, r, f;
    for (const auto &[lang, s] : report.per_language) {
      p.push_back(s.precision);
      r.push_back(s.recall);
      f.push_back(s.f1);
    }
    auto mean = [](const std::vector<double> &v) {
      double sum = 0;
      for (double x : v) sum += x;
      return sum / v.size();
    };
    report.macro.precision = mean(p);
    report.macro.recall = mean(r);
    report.macro.f1 = mean(f);
  }
  return report;
}

StatsReport RecountStats(const std::vector<AlignedInstance> &instances, Language language) {
  StatsReport r;
  r.language = language;
  r.instance_count = static_cast<int64_t>(instances.size());
  std::set<std::string> vocabulary;
  std::vector<int64_t> words, facts;
  std::map<std::string, int64_t> predicates;
  for (const auto &inst : instances) {
    std::istringstream in(inst.sentence.text);
    std::string token;
    int64_t n = 0;
    while (in >> token) {
      vocabulary.insert(token);
      ++n;
    }
    words.push_back(n);
    facts.push_back(static_cast<int64_t>(inst.facts.size()));
    for (const Fact &f : inst.facts) {
      ++predicates[f.predicate.label.empty() ? f.predicate.pid : f.predicate.label];
    }
  }
  auto sum = [](const std::vector<int64_t> &v) {
    int64_t s = 0;
    for (auto x : v) s += x;
    return s;
  };
  double n = static_cast<double>(instances.size());
  r.word_avg = sum(words) / n;
  r.word_min = *std::min_element(words.begin(), words.end());
  r.word_max = *std::max_element(words.begin(), words.end());
  r.fact_avg = sum(facts) / n;
  r.fact_min = *std::min_element(facts.begin(), facts.end());
  r.fact_max = *std::max_element(facts.begin(), facts.end());
  r.vocabulary_size = static_cast<int64_t>(vocabulary.size());
  for (int64_t c : std::set<int64_t>(facts.begin(), facts.end())) {
    r.fact_count_histogram[c] = std::count(facts.begin(), facts.end(), c) / n;
  }
  // Highest count first; equal counts by label.
  std::vector<std::pair<std::string, int64_t>> ranked;
  std::map<std::string, int64_t> remaining = predicates;
  while (!remaining.empty() && ranked.size() < 10) {
    auto best = remaining.begin();
    for (auto it = remaining.begin(); it != remaining.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    ranked.push_back(*best);
    remaining.erase(best);
  }
  r.top_predicates = std::move(ranked);
  return r;
}

namespace {

constexpr const char *kBleuWords[] = {"the", "singer", "was", "born", "in", "pune",
                                      "and", "won", "an",   "award", "for", "music"};

std::vector<std::string> RandomTokens(Rng &rng, int lo, int hi) {
  int n = lo + static_cast<int>(UniformIndex(rng, hi - lo + 1));
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(kBleuWords[UniformIndex(rng, std::size(kBleuWords))]);
  return out;
}

std::vector<std::string> Perturb(Rng &rng, std::vector<std::string> tokens) {
  int edits = static_cast<int>(UniformIndex(rng, 4));
  for (int e = 0; e < edits; ++e) {
    const char *word = kBleuWords[UniformIndex(rng, std::size(kBleuWords))];
    switch (UniformIndex(rng, 3)) {
      case 0:
        tokens[UniformIndex(rng, tokens.size())] = word;
        break;
      case 1:
        if (tokens.size() > 1) tokens.erase(tokens.begin() + UniformIndex(rng, tokens.size()));
        break;
      default:
        tokens.insert(tokens.begin() + UniformIndex(rng, tokens.size() + 1), word);
    }
  }
  return tokens;
}

}  // namespace

BleuMonotonicityReport RunBleuMonotonicity(int fixtures, uint64_t seed) {
  BleuMonotonicityReport report;
  Rng rng(seed);
  for (int f = 0; f < fixtures; ++f) {
    int n = 2 + static_cast<int>(UniformIndex(rng, 5));
    std::vector<std::string> refs, hyps;
    for (int i = 0; i < n; ++i) {
      auto ref = RandomTokens(rng, 3, 15);
      refs.push_back(Join(ref, " "));
      hyps.push_back(Join(Perturb(rng, ref), " "));
    }
    ++report.fixtures;
    report.identical_min = std::min(report.identical_min, CorpusBleu(refs, refs));
    double before = CorpusBleu(hyps, refs);
    report.perturbed_max = std::max(report.perturbed_max, before);
    for (int i = 0; i < n; ++i) {
      if (hyps[i] == refs[i]) continue;
      std::vector<std::string> fixed = hyps;
      fixed[i] = refs[i];
      double after = CorpusBleu(fixed, refs);
      ++report.replacements;
      if (after < before - 1e-12) {
        if (report.violations++ == 0) {
          std::ostringstream why;
          why << "fixture " << f << " pair " << i << ": " << before << " -> " << after;
          report.first_violation = why.str();
        }
      }
    }
  }
  return report;
}

}  // namespace testing
}  // namespace factalign
