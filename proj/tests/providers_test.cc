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


#include <cmath>
#include <thread>

#include "doctest.h"
#include "factalign/errors.h"
#include "factalign/providers.h"
#include "factalign/remote_providers.h"
#include "json.hpp"
#include "support/local_server.h"

namespace factalign {
namespace {

using nlohmann::json;
using testing::LocalServer;

double Norm(const Embedding &v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

TEST_SUITE("providers") {

TEST_CASE("mock embedding is deterministic and normalized") {
  Embedding a = MockEmbed("abc", 16);
  CHECK(a == MockEmbed("abc", 16));
  CHECK(Cosine(a, MockEmbed("abc", 16)) == doctest::Approx(1.0).epsilon(1e-12));

  Embedding b = MockEmbed("abd", 16);
  CHECK(a != b);
  double c = Cosine(a, b);
  CHECK(c >= -1.0);
  CHECK(c <= 1.0);

  CHECK(Norm(MockEmbed("किसी", 32)) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(a.size() == 16);
}

TEST_CASE("mock embedding of empty text is the reserved vector") {
  Embedding e = MockEmbed("", 9);
  REQUIRE(e.size() == 9);
  for (double x : e) CHECK(x == doctest::Approx(1.0 / 3.0));
  CHECK(MockEmbed("  ...  ", 9) == e);
}

TEST_CASE("mock embedding rejects small dimensions") {
  CHECK_THROWS_AS(MockEmbed("abc", 7), ConfigError);
  CHECK_THROWS_AS(HashEmbedder(4), ConfigError);
  CHECK_NOTHROW(MockEmbed("abc", 8));
}

TEST_CASE("equal inputs give cosine exactly one") {
  HashEmbedder embedder(64);
  for (const char *text : {"Asha Kulkarni was born in Pune.", "पुणे", "x", ""}) {
    Embedding a = embedder.Embed(text, Language::kHi);
    Embedding b = embedder.Embed(text, Language::kHi);
    CHECK(a == b);
    CHECK(Norm(a) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("token overlap raises mock cosine") {
  Embedding base = MockEmbed("singer born in pune", 64);
  double close = Cosine(base, MockEmbed("singer born in mumbai", 64));
  double far = Cosine(base, MockEmbed("cricket team captain", 64));
  CHECK(close > far);
}

TEST_CASE("identity translation returns its input and logs calls") {
  IdentityTranslator t;
  CHECK(t.Translate("hello", Language::kEn, Language::kHi) == "hello");
  CHECK(t.Translate("", Language::kEn, Language::kTa) == "");
  REQUIRE(t.call_count() == 2);
  auto calls = t.calls();
  CHECK(calls[0].text == "hello");
  CHECK(calls[0].source == Language::kEn);
  CHECK(calls[0].target == Language::kHi);
  CHECK(calls[1].target == Language::kTa);
}

TEST_CASE("identity translation composed is identity") {
  IdentityTranslator t;
  std::string text = "विक्रम देसाई क्रिकेटर हैं।";
  std::string out = text;
  for (Language l : kAllLanguages) out = t.Translate(out, Language::kHi, l);
  CHECK(out == text);
}

TEST_CASE("lexicon content check") {
  Lexicon lex = {{"dog", PosTag::kNoun}, {"runs", PosTag::kVerb}};
  CHECK(LexiconContentCheck("dog runs fast", Language::kEn, lex));
  CHECK_FALSE(LexiconContentCheck("very very fast", Language::kEn, {}));
  CHECK_FALSE(LexiconContentCheck("", Language::kEn, lex));
  CHECK_FALSE(LexiconContentCheck("fast fast", Language::kEn, lex));
  LexiconContentTagger tagger(lex);
  CHECK(tagger.HasContentWord("the dog", Language::kEn));
  CHECK_FALSE(tagger.HasContentWord("", Language::kEn));
  PermissiveContentTagger permissive;
  CHECK(permissive.HasContentWord("anything", Language::kEn));
  CHECK_FALSE(permissive.HasContentWord("", Language::kEn));
}

TEST_CASE("script detector votes by Unicode script") {
  ScriptLanguageDetector d;
  struct Case {
    const char *text;
    Language language;
  };
  for (const Case &c : {Case{"The quick brown fox", Language::kEn},
                        Case{"विक्रम देसाई क्रिकेटर हैं", Language::kHi},
                        Case{"সে একজন গায়িকা", Language::kBn},
                        Case{"அவர் ஒரு பாடகர்", Language::kTa},
                        Case{"ఆమె గాయని", Language::kTe},
                        Case{"તે ગાયક છે", Language::kGu},
                        Case{"ಅವರು ಗಾಯಕ", Language::kKn}}) {
    Detection r = d.Detect(c.text);
    REQUIRE(r.language.has_value());
    CHECK(*r.language == c.language);
    CHECK(r.confidence > 0.99);
    CHECK(r.confidence <= 1.0);
  }
  Detection mixed = d.Detect("Pune पुणे शहर");
  REQUIRE(mixed.language.has_value());
  CHECK(*mixed.language == Language::kHi);
  CHECK(mixed.confidence > 0.5);
  CHECK(mixed.confidence < 1.0);

  Detection none = d.Detect("12345 !!");
  CHECK_FALSE(none.language.has_value());
  CHECK(none.confidence == 0.0);
}

TEST_CASE("devanagari matches hindi and marathi") {
  Detection d = ScriptLanguageDetector().Detect("मी पुण्यात राहतो");
  CHECK(DetectionMatches(d, Language::kHi));
  CHECK(DetectionMatches(d, Language::kMr));
  CHECK_FALSE(DetectionMatches(d, Language::kEn));
  CHECK_FALSE(DetectionMatches(Detection{}, Language::kEn));
}

TEST_CASE("glossary translation matches longest phrases first") {
  GlossaryTranslator g;
  g.Add(Language::kHi, "जन्म", "born");
  g.Add(Language::kHi, "जन्म स्थान", "place of birth");
  g.Add(Language::kHi, "पुणे", "Pune");
  CHECK(g.Translate("जन्म स्थान पुणे।", Language::kHi, Language::kEn) ==
        "place of birth Pune।");
  CHECK(g.Translate("जन्म हुआ", Language::kHi, Language::kEn) == "born हुआ");
  CHECK(g.Translate("place of birth Pune", Language::kEn, Language::kHi) == "जन्म स्थान पुणे");
  CHECK(g.Translate("कुछ भी", Language::kHi, Language::kHi) == "कुछ भी");
}

TEST_CASE("term coverage and overlap mocks") {
  CHECK(TermCoverage("Asha was born in Pune", "Asha | place of birth | Pune") ==
        doctest::Approx(2.0 / 5.0));
  CHECK(TermCoverage("anything", "") == 0.0);
  std::string pair = "Asha sang.";
  pair += kPairSeparator;
  pair += "Asha | occupation | singer";
  CHECK(TermCoverage(pair, "") == doctest::Approx(1.0 / 3.0));

  OverlapEntailment nli;
  CHECK(nli.Classify("Asha Kulkarni is a singer", "Asha Kulkarni | singer").label ==
        NliLabel::kEntailment);
  NliResult neutral = nli.Classify("Vikram plays cricket", "Asha | occupation | singer");
  CHECK(neutral.label == NliLabel::kNeutral);
  CHECK(neutral.confidence >= 0.0);
  CHECK(neutral.confidence <= 1.0);

  OverlapClassifier clf;
  double p = clf.Score(pair);
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
}

TEST_CASE("overlap mocks translate non-English premises") {
  GlossaryTranslator g;
  g.Add(Language::kHi, "आशा", "Asha");
  g.Add(Language::kHi, "गायक", "singer");
  std::string hypothesis = "Asha | singer";
  CHECK(OverlapEntailment(0.6).Classify("आशा गायक", hypothesis).label == NliLabel::kNeutral);
  CHECK(OverlapEntailment(0.6, &g).Classify("आशा गायक", hypothesis).label ==
        NliLabel::kEntailment);
  std::string pair = std::string("आशा गायक") + std::string(kPairSeparator) + hypothesis;
  CHECK(OverlapClassifier().Score(pair) == 0.0);
  CHECK(OverlapClassifier(&g).Score(pair) == doctest::Approx(1.0));
}

TEST_CASE("caching decorators agree with their base") {
  HashEmbedder base(32);
  CachingEmbedder cached(base);
  CHECK(cached.Embed("a b c", Language::kEn) == base.Embed("a b c", Language::kEn));
  CHECK(cached.Embed("a b c", Language::kEn) == base.Embed("a b c", Language::kEn));
  IdentityTranslator t;
  CachingTranslator ct(t);
  CHECK(ct.Translate("x", Language::kHi, Language::kEn) == "x");
  CHECK(ct.Translate("x", Language::kHi, Language::kEn) == "x");
  CHECK(t.call_count() == 1);
}

TEST_CASE("providers are safe to call concurrently") {
  HashEmbedder base(32);
  CachingEmbedder cached(base);
  IdentityTranslator t;
  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w) {
    threads.emplace_back([&, w] {
      for (int i = 0; i < 200; ++i) {
        std::string text = "word" + std::to_string((i + w) % 17);
        cached.Embed(text, Language::kEn);
        t.Translate(text, Language::kEn, Language::kHi);
      }
    });
  }
  for (auto &th : threads) th.join();
  CHECK(t.call_count() == 800);
  CHECK(cached.Embed("word3", Language::kEn) == base.Embed("word3", Language::kEn));
}

TEST_CASE("http adapters speak the JSON contract") {
  json last_translate, last_nli, last_align;
  LocalServer server([&](httplib::Server &s) {
    s.Post("/v1/embed", [](const httplib::Request &req, httplib::Response &res) {
      json body = json::parse(req.body);
      std::vector<double> v(8, 0.0);
      v[body["text"].get<std::string>().size() % 8] = 2.0;
      res.set_content(json({{"vector", v}}).dump(), "application/json");
    });
    s.Post("/v1/translate", [&](const httplib::Request &req, httplib::Response &res) {
      last_translate = json::parse(req.body);
      res.set_content(json({{"text", "translated"}}).dump(), "application/json");
    });
    s.Post("/v1/nli", [&](const httplib::Request &req, httplib::Response &res) {
      last_nli = json::parse(req.body);
      res.set_content(json({{"label", "entailment"}, {"confidence", 0.75}}).dump(),
                      "application/json");
    });
    s.Post("/v1/align-score", [&](const httplib::Request &req, httplib::Response &res) {
      last_align = json::parse(req.body);
      res.set_content(json({{"probability", 0.25}}).dump(), "application/json");
    });
  });
  std::string base = server.url() + "/v1/";

  Embedding v = HttpEmbeddingProvider(base).Embed("abc", Language::kHi);
  REQUIRE(v.size() == 8);
  CHECK(v[3] == doctest::Approx(1.0));
  CHECK(Norm(v) == doctest::Approx(1.0));

  HttpTranslationProvider translator(base);
  CHECK(translator.Translate("नमस्ते", Language::kHi, Language::kEn) == "translated");
  CHECK(last_translate == json({{"text", "नमस्ते"}, {"source", "hi"}, {"target", "en"}}));
  CHECK(translator.Translate("same", Language::kTa, Language::kTa) == "same");

  NliResult r = HttpEntailmentProvider(base).Classify("premise", "hypothesis");
  CHECK(r.label == NliLabel::kEntailment);
  CHECK(r.confidence == doctest::Approx(0.75));
  CHECK(last_nli == json({{"premise", "premise"}, {"hypothesis", "hypothesis"}}));

  CHECK(HttpAlignmentClassifier(base).Score("s⟨SEP⟩f") == doctest::Approx(0.25));
  CHECK(last_align == json({{"pair", "s⟨SEP⟩f"}}));
}

TEST_CASE("http adapters report failures as provider errors") {
  LocalServer server([](httplib::Server &s) {
    s.Post("/embed", [](const httplib::Request &, httplib::Response &res) {
      res.set_content(json({{"vector", {1, 2}}}).dump(), "application/json");
    });
    s.Post("/translate", [](const httplib::Request &, httplib::Response &res) {
      res.status = 500;
    });
    s.Post("/nli", [](const httplib::Request &, httplib::Response &res) {
      res.set_content(json({{"label", "maybe"}}).dump(), "application/json");
    });
    s.Post("/align-score", [](const httplib::Request &, httplib::Response &res) {
      res.set_content("not json", "text/plain");
    });
  });
  CHECK_THROWS_AS(HttpEmbeddingProvider(server.url()).Embed("x", Language::kEn), ProviderError);
  CHECK_THROWS_AS(
      HttpTranslationProvider(server.url()).Translate("x", Language::kHi, Language::kEn),
      ProviderError);
  CHECK_THROWS_AS(HttpEntailmentProvider(server.url()).Classify("p", "h"), ProviderError);
  CHECK_THROWS_AS(HttpAlignmentClassifier(server.url()).Score("x"), ProviderError);

  CHECK_THROWS_AS(HttpAlignmentClassifier("http://127.0.0.1:1", 1).Score("x"), ProviderError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace factalign
