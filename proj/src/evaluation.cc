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

#include "factalign/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "factalign/errors.h"
#include "factalign/text.h"

namespace factalign {

std::string FactKey(const Fact &fact) {
  return fact.predicate.pid + "|" + CanonicalValue(fact.object);
}

FactKeySet FactKeys(const std::vector<Fact> &facts) {
  FactKeySet keys;
  for (const Fact &f : facts) keys.insert(FactKey(f));
  return keys;
}

PrfScores ScoresFromCounts(int64_t tp, int64_t fp, int64_t fn) {
  PrfScores s;
  s.true_positives = tp;
  s.false_positives = fp;
  s.false_negatives = fn;
  s.support = tp + fn;
  s.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
  s.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn);
  double sum = s.precision + s.recall;
  s.f1 = sum > 0 ? 2 * s.precision * s.recall / sum : 0.0;
  return s;
}

F1Report SelectionF1(const std::vector<FactKeySet> &predicted,
                     const std::vector<FactKeySet> &gold,
                     const std::vector<Language> &languages) {
  if (predicted.size() != gold.size() || gold.size() != languages.size()) {
    throw InvalidArgument("selection_f1: predicted, gold and language lists differ in length");
  }
  struct Counts {
    int64_t tp = 0, fp = 0, fn = 0;
  };
  std::map<Language, Counts> counts;
  for (size_t i = 0; i < gold.size(); ++i) {
    Counts &c = counts[languages[i]];
    for (const std::string &k : predicted[i]) (gold[i].count(k) ? c.tp : c.fp)++;
    for (const std::string &k : gold[i]) {
      if (!predicted[i].count(k)) ++c.fn;
    }
  }
  F1Report report;
  Counts total;
  for (const auto &[lang, c] : counts) {
    report.per_language[lang] = ScoresFromCounts(c.tp, c.fp, c.fn);
    total.tp += c.tp;
    total.fp += c.fp;
    total.fn += c.fn;
  }
  report.micro = ScoresFromCounts(total.tp, total.fp, total.fn);
  report.macro = report.micro;
  if (!report.per_language.empty()) {
    double p = 0, r = 0, f = 0;
    for (const auto &[lang, s] : report.per_language) {
      p += s.precision;
      r += s.recall;
      f += s.f1;
    }
    double n = static_cast<double>(report.per_language.size());
    report.macro.precision = p / n;
    report.macro.recall = r / n;
    report.macro.f1 = f / n;
  }
  return report;
}

double CohenKappa(const std::vector<int> &a, const std::vector<int> &b) {
  if (a.size() != b.size()) throw InvalidArgument("cohen_kappa: mark vectors differ in length");
  if (a.empty()) throw InvalidArgument("cohen_kappa: empty mark vectors");
  int64_t agree = 0, a1 = 0, b1 = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if ((a[i] != 0 && a[i] != 1) || (b[i] != 0 && b[i] != 1)) {
      throw InvalidArgument("cohen_kappa: marks must be 0 or 1");
    }
    agree += a[i] == b[i];
    a1 += a[i];
    b1 += b[i];
  }
  double n = static_cast<double>(a.size());
  double po = agree / n;
  double pa = a1 / n, pb = b1 / n;
  double pe = pa * pb + (1 - pa) * (1 - pb);
  // pe == 1 means both annotators used a single identical mark throughout.
  if (pe >= 1.0) return 1.0;
  return (po - pe) / (1 - pe);
}

AgreementReport PairwiseAgreement(
    const std::map<std::string, std::map<std::string, int>> &marks) {
  AgreementReport report;
  std::set<std::string> items;
  for (const auto &[annotator, m] : marks) {
    for (const auto &[item, v] : m) items.insert(item);
  }
  report.item_count = static_cast<int64_t>(items.size());
  double sum = 0;
  for (auto i = marks.begin(); i != marks.end(); ++i) {
    for (auto j = std::next(i); j != marks.end(); ++j) {
      std::vector<int> a, b;
      for (const auto &[item, v] : i->second) {
        auto it = j->second.find(item);
        if (it == j->second.end()) continue;
        a.push_back(v);
        b.push_back(it->second);
      }
      if (a.empty()) continue;
      double k = CohenKappa(a, b);
      report.pairwise_kappa[{i->first, j->first}] = k;
      sum += k;
    }
  }
  if (report.pairwise_kappa.empty()) {
    throw InvalidArgument("agreement needs two annotators with common items");
  }
  report.average_kappa = sum / static_cast<double>(report.pairwise_kappa.size());
  return report;
}

std::string BleuTokenizer::Describe() const {
  std::string out = "whitespace";
  if (split_punctuation) out += "+punct";
  if (lowercase) out += "+lc";
  return out;
}

std::vector<std::string> BleuTokens(std::string_view text, const BleuTokenizer &tokenizer) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = DecodeUtf8(text, &pos);
    if (IsSpaceCodePoint(cp)) {
      flush();
    } else if (tokenizer.split_punctuation && IsPunctuationCodePoint(cp)) {
      flush();
      AppendUtf8(cp, &current);
      flush();
    } else {
      if (tokenizer.lowercase && cp >= 'A' && cp <= 'Z') cp = cp - 'A' + 'a';
      AppendUtf8(cp, &current);
    }
  }
  flush();
  return tokens;
}

namespace {

using NgramCounts = std::unordered_map<std::string, int64_t>;

NgramCounts Ngrams(const std::vector<std::string> &tokens, size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (size_t j = 0; j < n; ++j) {
      if (j) key += '\x1f';
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

BleuResult CorpusBleuDetailed(const std::vector<std::string> &hypotheses,
                              const std::vector<std::string> &references,
                              const BleuTokenizer &tokenizer) {
  if (hypotheses.size() != references.size()) {
    throw InvalidArgument("corpus_bleu: hypothesis and reference counts differ");
  }
  if (hypotheses.empty()) throw InvalidArgument("corpus_bleu: empty corpus");
  BleuResult result;
  result.tokenizer = tokenizer.Describe();
  for (size_t i = 0; i < hypotheses.size(); ++i) {
    auto hyp = BleuTokens(hypotheses[i], tokenizer);
    auto ref = BleuTokens(references[i], tokenizer);
    result.hypothesis_length += static_cast<int64_t>(hyp.size());
    result.reference_length += static_cast<int64_t>(ref.size());
    for (size_t n = 1; n <= 4; ++n) {
      NgramCounts h = Ngrams(hyp, n);
      NgramCounts r = Ngrams(ref, n);
      for (const auto &[gram, count] : h) {
        result.totals[n - 1] += count;
        auto it = r.find(gram);
        if (it != r.end()) result.matches[n - 1] += std::min(count, it->second);
      }
    }
  }
  double log_sum = 0;
  for (size_t n = 0; n < 4; ++n) {
    double p;
    if (result.totals[n] == 0) {
      p = 1.0;
    } else if (result.matches[n] == 0) {
      p = 1e-9 / static_cast<double>(result.totals[n]);
    } else {
      p = static_cast<double>(result.matches[n]) / static_cast<double>(result.totals[n]);
    }
    result.precisions[n] = p;
    log_sum += std::log(p);
  }
  int64_t c = result.hypothesis_length, r = result.reference_length;
  if (c == 0) {
    result.brevity_penalty = 0;
  } else if (c > r) {
    result.brevity_penalty = 1;
  } else {
    result.brevity_penalty = std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  }
  result.bleu = result.brevity_penalty * std::exp(log_sum / 4.0);
  result.bleu = std::clamp(result.bleu, 0.0, 1.0);
  return result;
}

double CorpusBleu(const std::vector<std::string> &hypotheses,
                  const std::vector<std::string> &references, const BleuTokenizer &tokenizer) {
  return CorpusBleuDetailed(hypotheses, references, tokenizer).bleu;
}

StatsReport DatasetStats(const std::vector<AlignedInstance> &instances, Language language) {
  if (instances.empty()) throw InvalidArgument("dataset_stats: no instances");
  StatsReport report;
  report.language = language;
  report.instance_count = static_cast<int64_t>(instances.size());
  std::unordered_set<std::string> vocabulary;
  std::map<int64_t, int64_t> fact_counts;
  std::map<std::string, int64_t> predicates;
  int64_t words_total = 0, facts_total = 0;
  report.word_min = report.fact_min = INT64_MAX;
  for (const AlignedInstance &inst : instances) {
    if (inst.sentence.language != language) {
      throw InvalidArgument("dataset_stats: instance in " +
                            std::string(LanguageCode(inst.sentence.language)) +
                            ", expected " + std::string(LanguageCode(language)));
    }
    auto tokens = WhitespaceTokens(inst.sentence.text);
    int64_t words = static_cast<int64_t>(tokens.size());
    int64_t facts = static_cast<int64_t>(inst.facts.size());
    for (auto &t : tokens) vocabulary.insert(std::move(t));
    words_total += words;
    facts_total += facts;
    report.word_min = std::min(report.word_min, words);
    report.word_max = std::max(report.word_max, words);
    report.fact_min = std::min(report.fact_min, facts);
    report.fact_max = std::max(report.fact_max, facts);
    ++fact_counts[facts];
    for (const Fact &f : inst.facts) {
      ++predicates[f.predicate.label.empty() ? f.predicate.pid : f.predicate.label];
    }
  }
  double n = static_cast<double>(instances.size());
  report.word_avg = static_cast<double>(words_total) / n;
  report.fact_avg = static_cast<double>(facts_total) / n;
  report.vocabulary_size = static_cast<int64_t>(vocabulary.size());
  for (const auto &[count, k] : fact_counts) {
    report.fact_count_histogram[count] = static_cast<double>(k) / n;
  }
  std::vector<std::pair<std::string, int64_t>> ranked(predicates.begin(), predicates.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
  if (ranked.size() > 10) ranked.resize(10);
  report.top_predicates = std::move(ranked);
  return report;
}

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Left-aligned first column, right-aligned others, two-space gutters.
std::string RenderTable(const std::vector<std::vector<std::string>> &rows) {
  std::vector<size_t> width;
  auto cells = [](const std::string &s) {
    size_t n = 0, pos = 0;
    while (pos < s.size()) {
      DecodeUtf8(s, &pos);
      ++n;
    }
    return n;
  };
  for (const auto &row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], cells(row[i]));
  }
  std::string out;
  for (const auto &row : rows) {
    std::string line;
    for (size_t i = 0; i < row.size(); ++i) {
      std::string pad(width[i] - cells(row[i]), ' ');
      if (i) line += "  ";
      line += i == 0 ? row[i] + pad : pad + row[i];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

std::string Triple(double avg, int64_t lo, int64_t hi) {
  return Fixed(avg, 1) + "/" + std::to_string(lo) + "/" + std::to_string(hi);
}

}  // namespace

std::string FormatF1Table(const std::vector<std::pair<std::string, F1Report>> &rows) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header = {"Method"};
  for (Language l : kAllLanguages) header.emplace_back(LanguageCode(l));
  header.push_back("Avg.");
  table.push_back(header);
  for (const auto &[name, report] : rows) {
    std::vector<std::string> row = {name};
    for (Language l : kAllLanguages) {
      auto it = report.per_language.find(l);
      row.push_back(it == report.per_language.end() ? "-" : Fixed(it->second.f1, 3));
    }
    row.push_back(Fixed(report.macro.f1, 3));
    table.push_back(std::move(row));
  }
  return RenderTable(table);
}

std::string FormatAnnotationTable(const std::vector<AnnotationSummary> &rows) {
  std::vector<std::vector<std::string>> table = {
      {"Lang", "kappa", "A", "I", "avg/min/max T", "avg/min/max F"}};
  for (const AnnotationSummary &r : rows) {
    table.push_back({std::string(LanguageCode(r.language)), Fixed(r.average_kappa, 2),
                     std::to_string(r.annotators), std::to_string(r.stats.instance_count),
                     Triple(r.stats.word_avg, r.stats.word_min, r.stats.word_max),
                     Triple(r.stats.fact_avg, r.stats.fact_min, r.stats.fact_max)});
  }
  return RenderTable(table);
}

std::string FormatStatsTable(const std::vector<StatsReport> &rows) {
  std::vector<std::vector<std::string>> table = {
      {"Lang", "I", "avg/min/max T", "avg/min/max F", "V"}};
  for (const StatsReport &r : rows) {
    table.push_back({std::string(LanguageCode(r.language)), std::to_string(r.instance_count),
                     Triple(r.word_avg, r.word_min, r.word_max),
                     Triple(r.fact_avg, r.fact_min, r.fact_max),
                     std::to_string(r.vocabulary_size)});
  }
  return RenderTable(table);
}

std::string FormatTopPredicatesTable(const std::vector<StatsReport> &rows) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header = {"Rank"};
  size_t depth = 0;
  for (const StatsReport &r : rows) {
    header.emplace_back(LanguageCode(r.language));
    depth = std::max(depth, r.top_predicates.size());
  }
  table.push_back(header);
  for (size_t i = 0; i < depth; ++i) {
    std::vector<std::string> row = {std::to_string(i + 1)};
    for (const StatsReport &r : rows) {
      if (i < r.top_predicates.size()) {
        row.push_back(r.top_predicates[i].first + " (" +
                      std::to_string(r.top_predicates[i].second) + ")");
      } else {
        row.push_back("-");
      }
    }
    table.push_back(std::move(row));
  }
  return RenderTable(table);
}

std::string FormatBleuTable(
    const std::vector<std::pair<std::string, std::map<Language, double>>> &rows) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header = {"Model"};
  for (Language l : kAllLanguages) header.emplace_back(LanguageCode(l));
  header.push_back("Avg");
  table.push_back(header);
  for (const auto &[name, scores] : rows) {
    std::vector<std::string> row = {name};
    double sum = 0;
    for (Language l : kAllLanguages) {
      auto it = scores.find(l);
      if (it == scores.end()) {
        row.push_back("-");
      } else {
        row.push_back(Fixed(100 * it->second, 1));
        sum += it->second;
      }
    }
    row.push_back(scores.empty() ? "-" : Fixed(100 * sum / scores.size(), 1));
    table.push_back(std::move(row));
  }
  return RenderTable(table);
}

}  // namespace factalign
