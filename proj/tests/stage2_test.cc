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


#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "factalign/errors.h"
#include "factalign/facts.h"
#include "factalign/providers.h"
#include "factalign/random.h"
#include "factalign/stage2.h"
#include "support/builders.h"
#include "support/oracles.h"

namespace factalign {
namespace {

using testing::Ent;
using testing::ItemFact;
using testing::TableEmbedder;
using testing::TimeFact;

const Entity kTina = Ent("Q3630863", "Tina Munim", "टीना मुनीम");

Sentence TinaSentence() {
  return MakeSentence("Tina Munim was born on 11 February 1955 in Mumbai.", Language::kEn,
                      "Early life", "42", kTina.qid, 3);
}

CandidateSet FourCandidates() {
  CandidateSet set;
  set.sentence = TinaSentence();
  set.candidates = {
      {TimeFact(kTina, "P569", "date of birth", "+1955-02-11T00:00:00Z"), 0.9, {0, 0, 0.8, 0}},
      {ItemFact(kTina, "P19", "place of birth", Ent("Q1156", "Mumbai")), 0.8, {0, 0, 0.5, 0}},
      {ItemFact(kTina, "P26", "spouse", Ent("Q1", "Anil Ambani")), 0.7, {0, 0, 0.3, 0}},
      {ItemFact(kTina, "P106", "occupation", Ent("Q33999", "actor")), 0.66, {0, 0, 0.0, 0}},
  };
  return set;
}

std::vector<std::string> Pids(const std::optional<AlignedInstance> &instance) {
  std::vector<std::string> pids;
  if (instance) {
    for (const Fact &f : instance->facts) pids.push_back(f.predicate.pid);
  }
  return pids;
}

// Entails the facts whose predicate label appears in `labels`.
FunctionEntailment EntailLabels(std::set<std::string> labels) {
  return FunctionEntailment([labels](std::string_view, std::string_view hypothesis) {
    for (const std::string &l : labels) {
      if (hypothesis.find(" | " + l + " | ") != std::string_view::npos) {
        return NliResult{NliLabel::kEntailment, 0.9};
      }
    }
    return NliResult{NliLabel::kNeutral, 0.6};
  });
}

DistantSentence DS(std::string text, int ordinal, std::vector<Fact> facts,
                   const std::string &page = "7") {
  return {MakeSentence(std::move(text), Language::kEn, "", page, "Q1", ordinal),
          std::move(facts)};
}

// Five sentences: s0 carries two facts, s3 and s4 one each, and s1, s2 are
// fact-free hubs that every other sentence is closest to.
struct HubPage {
  Entity e = Ent("Q1", "Asha");
  Fact f1 = TimeFact(e, "P569", "date of birth", "+1960-01-01T00:00:00Z");
  Fact f2 = ItemFact(e, "P19", "place of birth", Ent("Q2", "Pune"));
  Fact f3 = ItemFact(e, "P106", "occupation", Ent("Q3", "singer"));
  Fact f4 = ItemFact(e, "P166", "award received", Ent("Q4", "Padma Shri"));
  DistantPage page;
  TableEmbedder embedder{8};

  HubPage() {
    page.page_id = "7";
    page.sentences = {DS("Asha was born in Pune in 1960.", 0, {f1, f2}),
                      DS("Hub one.", 1, {}), DS("Hub two.", 2, {}),
                      DS("Asha is a singer.", 3, {f3}),
                      DS("Asha received the Padma Shri.", 4, {f4})};
    embedder.Set("Asha was born in Pune in 1960.", {1, 0, 0});
    embedder.Set("Asha is a singer.", {0, 1, 0});
    embedder.Set("Asha received the Padma Shri.", {0, 0, 1});
    embedder.Set("Hub one.", {1, 1, 1, 0.2});
    embedder.Set("Hub two.", {1, 1, 1, 0.4});
  }
};

std::vector<DistantPage> RandomPages(Rng &rng, int count) {
  std::vector<DistantPage> pages;
  for (int serial = 0; serial < count; ++serial) {
    EntityBundle bundle = testing::RandomBundle(rng, 8, 16, Language::kEn, serial);
    DistantPage page;
    page.page_id = std::to_string(serial);
    for (const Sentence &s : bundle.sentences) {
      DistantSentence ds{s, {}};
      for (const Fact &f : bundle.facts) {
        if (UniformIndex(rng, 4) == 0) ds.facts.push_back(f);
      }
      page.sentences.push_back(std::move(ds));
    }
    Shuffle(page.sentences, rng);
    pages.push_back(std::move(page));
  }
  Shuffle(pages, rng);
  return pages;
}

TEST_SUITE("stage2") {

TEST_CASE("pair text formatting") {
  Fact birth = TimeFact(kTina, "P569", "date of birth", "+1955-02-11T00:00:00Z");
  CHECK(FormatPair(TinaSentence(), birth) ==
        "Tina Munim was born on 11 February 1955 in Mumbai.⟨SEP⟩"
        "Tina Munim | date of birth | 11 February 1955");
  Fact qualified = birth;
  qualified.qualifiers.push_back({{"P1480", "sourcing circumstances"},
                                  ItemValue{Ent("Q5727902", "circa")}});
  CHECK(FormatPair(TinaSentence(), qualified) == FormatPair(TinaSentence(), birth));
  Sentence hindi = MakeSentence("टीना मुनीम का जन्म 1955 में हुआ।", Language::kHi);
  CHECK(FormatPair(hindi, birth) ==
        "टीना मुनीम का जन्म 1955 में हुआ।⟨SEP⟩Tina Munim | date of birth | 11 February 1955");
}

TEST_CASE("entailment keeps entailed facts in candidate order") {
  CandidateSet set = FourCandidates();
  auto all = SelectByEntailment(set, EntailLabels({"date of birth", "place of birth", "spouse",
                                                   "occupation"}));
  CHECK(Pids(all) == std::vector<std::string>{"P569", "P19", "P26", "P106"});
  CHECK(all->method == SelectionMethod::kEntailment);
  CHECK(all->section == "Early life");
  CHECK(all->sentence == set.sentence);

  CHECK_FALSE(SelectByEntailment(set, EntailLabels({})).has_value());
  CHECK(Pids(SelectByEntailment(set, EntailLabels({"spouse", "date of birth"}))) ==
        std::vector<std::string>{"P569", "P26"});

  FunctionEntailment contradiction([](std::string_view, std::string_view) {
    return NliResult{NliLabel::kContradiction, 1.0};
  });
  CHECK_FALSE(SelectByEntailment(set, contradiction).has_value());
}

TEST_CASE("the nli input form controls premise and hypothesis") {
  CandidateSet set = FourCandidates();
  std::vector<std::pair<std::string, std::string>> seen;
  FunctionEntailment recorder([&](std::string_view p, std::string_view h) {
    seen.emplace_back(std::string(p), std::string(h));
    return NliResult{NliLabel::kEntailment, 1.0};
  });
  SelectByEntailment(set, recorder, NliInput::kSentenceAndFact);
  REQUIRE(seen.size() == 4);
  CHECK(seen[0].first == set.sentence.text);
  CHECK(seen[0].second == "Tina Munim | date of birth | 11 February 1955");
  seen.clear();
  SelectByEntailment(set, recorder, NliInput::kPairText);
  REQUIRE(seen.size() == 4);
  CHECK(seen[1].first == FormatPair(set.sentence, set.candidates[1].fact));
  CHECK(seen[1].second.empty());
}

TEST_CASE("overlap baseline thresholds the sentence-to-English component") {
  CandidateSet set = FourCandidates();
  CHECK(Pids(BaselineOverlapSelect(set, 0.0)).size() == 4);
  CHECK_FALSE(BaselineOverlapSelect(set, 1.01).has_value());
  CHECK(Pids(BaselineOverlapSelect(set, 0.5)) == std::vector<std::string>{"P569", "P19"});
  CHECK(BaselineOverlapSelect(set, 0.7)->method == SelectionMethod::kOverlap);
}

TEST_CASE("classifier selection uses a cutoff") {
  CandidateSet set = FourCandidates();
  CHECK(Pids(SelectByClassifier(set, ConstantClassifier(1.0))).size() == 4);
  CHECK_FALSE(SelectByClassifier(set, ConstantClassifier(0.0)).has_value());
  CHECK(Pids(SelectByClassifier(set, ConstantClassifier(0.5))).size() == 4);

  FunctionClassifier by_fact([](std::string_view pair) {
    return pair.find("date of birth") != std::string_view::npos ? 0.9 : 0.4;
  });
  auto picked = SelectByClassifier(set, by_fact);
  CHECK(Pids(picked) == std::vector<std::string>{"P569"});
  CHECK(picked->method == SelectionMethod::kClassifier);
  CHECK(Pids(SelectByClassifier(set, by_fact, 0.3)).size() == 4);
}

TEST_CASE("provider errors propagate without partial output") {
  CandidateSet set = FourCandidates();
  std::atomic<int> calls{0};
  FunctionEntailment flaky([&](std::string_view, std::string_view) -> NliResult {
    if (++calls == 3) throw ProviderError("nli timeout");
    return {NliLabel::kEntailment, 1.0};
  });
  CHECK_THROWS_AS(SelectByEntailment(set, flaky), ProviderError);
  FunctionClassifier broken([](std::string_view) -> double { throw ProviderError("down"); });
  CHECK_THROWS_AS(SelectByClassifier(set, broken), ProviderError);
}

TEST_CASE("stage 2 keeps input order and records failures") {
  std::vector<CandidateSet> sets;
  for (int i = 0; i < 40; ++i) {
    CandidateSet set = FourCandidates();
    set.sentence.ordinal = i;
    set.sentence.text = "Sentence " + std::to_string(i) + ".";
    sets.push_back(set);
  }
  FunctionEntailment odd([](std::string_view premise, std::string_view) -> NliResult {
    int n = std::stoi(std::string(premise.substr(9)));
    if (n == 13) throw ProviderError("bad input");
    return {n % 2 ? NliLabel::kEntailment : NliLabel::kNeutral, 1.0};
  });
  SelectorConfig config;
  std::vector<ItemError> errors;
  auto out = RunStage2(sets, config, &odd, nullptr, 4, &errors);
  REQUIRE(out.size() == 19);
  for (size_t i = 0; i < out.size(); ++i) {
    int expected = static_cast<int>(2 * i + 1);
    if (expected >= 13) expected += 2;
    CHECK(out[i].sentence.ordinal == expected);
  }
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].message.find("bad input") != std::string::npos);
  CHECK_THROWS_AS(RunStage2(sets, config, &odd, nullptr, 4), ProviderError);

  CHECK_THROWS_AS(RunStage2(sets, config, nullptr, nullptr, 1), ConfigError);
  config.method = SelectionMethod::kClassifier;
  CHECK_THROWS_AS(RunStage2(sets, config, &odd, nullptr, 1), ConfigError);
  config.method = SelectionMethod::kGold;
  CHECK_THROWS_AS(RunStage2(sets, config, &odd, nullptr, 1), ConfigError);
  config.method = SelectionMethod::kOverlap;
  config.overlap_threshold = 0.5;
  CHECK(RunStage2(sets, config, nullptr, nullptr, 3).size() == 40);
}

TEST_CASE("method and label names round-trip") {
  for (auto m : {SelectionMethod::kEntailment, SelectionMethod::kClassifier,
                 SelectionMethod::kOverlap, SelectionMethod::kGold}) {
    CHECK(ParseSelectionMethod(SelectionMethodName(m)) == m);
  }
  CHECK_THROWS_AS(ParseSelectionMethod("magic"), ConfigError);
  CHECK(ParsePairLabel(PairLabelName(PairLabel::kNegative)) == PairLabel::kNegative);
  CHECK_THROWS_AS(ParsePairLabel("maybe"), ParseError);
}

TEST_CASE("donor window and train size") {
  DistantConfig config;
  CHECK(DonorWindow(20, config) == std::pair<size_t, size_t>{2, 12});
  CHECK(DonorWindow(5, config) == std::pair<size_t, size_t>{2, 5});
  CHECK(DonorWindow(1, config) == std::pair<size_t, size_t>{1, 1});
  CHECK(DonorWindow(0, config) == std::pair<size_t, size_t>{0, 0});
  CHECK(TrainSize(10, 0.9) == 9);
  CHECK(TrainSize(5, 0.9) == 5);  // 4.5 rounds away from zero
  CHECK(TrainSize(3, 0.5) == 2);
  CHECK(TrainSize(0, 0.9) == 0);
  CHECK(TrainSize(7, 1.0) == 7);
  CHECK(TrainSize(7, 0.0) == 0);
  CHECK_THROWS_AS(TrainSize(7, 1.5), ConfigError);
}

TEST_CASE("hub sentences are skipped as donors") {
  HubPage hub;
  DistantConfig config;
  config.train_fraction = 1.0;
  DistantDataset data = BuildDistantDataset({hub.page}, hub.embedder, 5, config);
  CHECK(data.stats.positives == 4);
  CHECK(data.stats.negatives == 4);
  CHECK(data.stats.missing_negatives == 0);
  CHECK(data.validation.empty());
  REQUIRE(data.train.size() == 8);

  std::set<std::string> fact_texts_s0 = {
      VerbalizeFact(hub.f3, false, Language::kEn), VerbalizeFact(hub.f4, false, Language::kEn)};
  for (const PairExample &e : data.train) {
    CHECK(e.source_page == "7");
    CHECK(e.sentence_ordinal != 1);
    CHECK(e.sentence_ordinal != 2);
    if (e.label == PairLabel::kNegative && e.sentence_ordinal == 0) {
      std::string fact = e.pair_text.substr(e.pair_text.find(kPairSeparator) + kPairSeparator.size());
      CHECK(fact_texts_s0.count(fact) == 1);
    }
  }

  // With no skipping the hubs would be the only donors in a window of two,
  // and they carry no facts.
  config.skip_top = 0;
  config.pool_size = 2;
  DistantDataset hubs_only = BuildDistantDataset({hub.page}, hub.embedder, 5, config);
  CHECK(hubs_only.stats.negatives == 0);
  CHECK(hubs_only.stats.missing_negatives == 4);
}

TEST_CASE("a donor must carry a fact the sentence lacks") {
  Entity e = Ent("Q1", "Asha");
  Fact f = ItemFact(e, "P19", "place of birth", Ent("Q2", "Pune"));
  DistantPage page{"9", {DS("Asha was born in Pune.", 0, {f}, "9"),
                         DS("Pune is where Asha was born.", 1, {f}, "9")}};
  DistantConfig config;
  config.skip_top = 0;
  HashEmbedder embedder(16);
  DistantDataset data = BuildDistantDataset({page}, embedder, 1, config);
  CHECK(data.stats.positives == 2);
  CHECK(data.stats.negatives == 0);
  CHECK(data.stats.missing_negatives == 2);
}

TEST_CASE("distant examples are valid and split by the train fraction") {
  Rng rng(404);
  HashEmbedder embedder(16);
  for (int trial = 0; trial < 8; ++trial) {
    auto pages = RandomPages(rng, 12);
    DistantConfig config;
    config.skip_top = static_cast<int>(UniformIndex(rng, 4));
    config.pool_size = 1 + static_cast<int>(UniformIndex(rng, 10));
    config.train_fraction = 0.1 * static_cast<double>(UniformIndex(rng, 11));
    DistantDataset data = BuildDistantDataset(pages, embedder, 1000 + trial, config);
    auto allowed = testing::AllowedNegatives(pages, embedder, config);

    std::vector<PairExample> all = data.train;
    all.insert(all.end(), data.validation.begin(), data.validation.end());
    CHECK(data.train.size() == TrainSize(all.size(), config.train_fraction));

    // Positives are exactly the aligned pairs.
    std::multiset<std::string> expected_positives;
    std::map<std::string, std::set<std::string>> per_sentence;
    std::map<std::string, int> positives_with_donor;
    for (const DistantPage &p : pages) {
      for (const DistantSentence &s : p.sentences) {
        for (const Fact &f : s.facts) {
          std::string pair = FormatPair(s.sentence, f);
          std::string key = testing::PositiveKey(p.page_id, s.sentence.ordinal, pair);
          expected_positives.insert(key);
          std::string sentence_key = p.page_id + "|" + std::to_string(s.sentence.ordinal);
          const auto &allowed_here = allowed.at(key);
          per_sentence[sentence_key].insert(allowed_here.begin(), allowed_here.end());
          if (!allowed_here.empty()) ++positives_with_donor[sentence_key];
        }
      }
    }
    std::multiset<std::string> positives;
    std::map<std::string, int> negatives_per_sentence;
    for (const PairExample &e : all) {
      std::string sentence_key = e.source_page + "|" + std::to_string(e.sentence_ordinal);
      if (e.label == PairLabel::kPositive) {
        positives.insert(testing::PositiveKey(e.source_page, e.sentence_ordinal, e.pair_text));
      } else {
        ++negatives_per_sentence[sentence_key];
        CHECK(per_sentence[sentence_key].count(e.pair_text) == 1);
      }
    }
    CHECK(positives == expected_positives);
    CHECK(negatives_per_sentence == positives_with_donor);
    CHECK(data.stats.positives == static_cast<int64_t>(positives.size()));
    CHECK(data.stats.negatives + data.stats.missing_negatives == data.stats.positives);
    CHECK(data.stats.train_positives + data.stats.train_negatives ==
          static_cast<int64_t>(data.train.size()));
  }
}

TEST_CASE("distant sampling matches the oracle and is deterministic") {
  Rng rng(77);
  HashEmbedder embedder(16);
  for (int trial = 0; trial < 6; ++trial) {
    auto pages = RandomPages(rng, 10);
    DistantConfig config;
    uint64_t seed = 17 + static_cast<uint64_t>(trial);
    DistantDataset a = BuildDistantDataset(pages, embedder, seed, config, 1);
    DistantDataset b = BuildDistantDataset(pages, embedder, seed, config, 4);
    CHECK(a.train == b.train);
    CHECK(a.validation == b.validation);
    DistantDataset oracle = testing::BruteForceDistant(pages, embedder, seed, config);
    CHECK(a.train == oracle.train);
    CHECK(a.validation == oracle.validation);
    CHECK(a.stats.negatives == oracle.stats.negatives);
    CHECK(a.seed == seed);

    // Page order in the input does not matter.
    std::vector<DistantPage> reversed(pages.rbegin(), pages.rend());
    CHECK(BuildDistantDataset(reversed, embedder, seed, config).train == a.train);
  }
}

TEST_CASE("different seeds draw different samples") {
  Rng rng(5);
  HashEmbedder embedder(16);
  auto pages = RandomPages(rng, 12);
  DistantDataset a = BuildDistantDataset(pages, embedder, 1);
  DistantDataset b = BuildDistantDataset(pages, embedder, 2);
  CHECK(a.train != b.train);
  std::vector<PairExample> all_a = a.train, all_b = b.train;
  all_a.insert(all_a.end(), a.validation.begin(), a.validation.end());
  all_b.insert(all_b.end(), b.validation.begin(), b.validation.end());
  CHECK(all_a.size() == all_b.size());
}

}  // TEST_SUITE

}  // namespace
}  // namespace factalign
