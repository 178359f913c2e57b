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

#ifndef FACTALIGN_RECORDS_H_
#define FACTALIGN_RECORDS_H_

// JSON encodings of the pipeline records and validated JSONL file I/O.

#include <string>
#include <vector>

#include "json.hpp"

#include "factalign/errors.h"
#include "factalign/evaluation.h"
#include "factalign/facts.h"
#include "factalign/file_io.h"
#include "factalign/sentences.h"
#include "factalign/stage1.h"
#include "factalign/stage2.h"

namespace factalign {

using nlohmann::json;

json ToJson(const Entity &entity);
json ToJson(const Value &value);
json ToJson(const Fact &fact);
json ToJson(const Sentence &sentence);
json ToJson(const Rejection &rejection);
json ToJson(const SimilarityComponents &components);
json ToJson(const ScoredCandidate &candidate);
json ToJson(const CandidateSet &set);
json ToJson(const AlignedInstance &instance);
json ToJson(const PairExample &pair);
json ToJson(const DistantSentence &sentence);
json ToJson(const PrfScores &scores);
json ToJson(const F1Report &report);
json ToJson(const AgreementReport &report);
json ToJson(const BleuResult &result);
json ToJson(const StatsReport &report);

// Strict decoders: missing fields, wrong types and unknown fields raise
// ParseError.
template <typename T>
T FromJson(const json &j);

template <> Entity FromJson<Entity>(const json &j);
template <> Value FromJson<Value>(const json &j);
template <> Fact FromJson<Fact>(const json &j);
template <> Sentence FromJson<Sentence>(const json &j);
template <> Rejection FromJson<Rejection>(const json &j);
template <> SimilarityComponents FromJson<SimilarityComponents>(const json &j);
template <> ScoredCandidate FromJson<ScoredCandidate>(const json &j);
template <> CandidateSet FromJson<CandidateSet>(const json &j);
template <> AlignedInstance FromJson<AlignedInstance>(const json &j);
template <> PairExample FromJson<PairExample>(const json &j);
template <> DistantSentence FromJson<DistantSentence>(const json &j);

// Encodes one record as a single line and checks that it decodes back to an
// equal value.
template <typename T>
std::string ToValidatedLine(const T &item) {
  json j = ToJson(item);
  std::string line = j.dump(-1, ' ', false, json::error_handler_t::strict);
  T back = FromJson<T>(json::parse(line));
  if (!(back == item)) throw Error("record does not round-trip: " + line);
  return line;
}

template <typename T>
std::string ToJsonl(const std::vector<T> &items) {
  std::string out;
  for (const T &item : items) {
    out += ToValidatedLine(item);
    out += '\n';
  }
  return out;
}

template <typename T>
void WriteJsonl(const std::string &path, const std::vector<T> &items) {
  WriteFile(path, ToJsonl(items));
}

// Parses every non-empty line; errors name the file and line.
template <typename T>
std::vector<T> ParseJsonl(std::string_view text, const std::string &origin) {
  std::vector<T> items;
  size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      items.push_back(FromJson<T>(json::parse(line)));
    } catch (const json::exception &e) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError &e) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return items;
}

template <typename T>
std::vector<T> ReadJsonl(const std::string &path) {
  return ParseJsonl<T>(ReadFile(path), path);
}

// Field helpers shared by the decoders.
namespace json_schema {

void ExpectObject(const json &j, std::string_view what);
// Throws when j has a key outside `allowed`.
void ExpectKeys(const json &j, std::initializer_list<std::string_view> allowed,
                std::string_view what);
const json &Field(const json &j, std::string_view key, std::string_view what);
std::string String(const json &j, std::string_view key, std::string_view what);
double Number(const json &j, std::string_view key, std::string_view what);
int64_t Integer(const json &j, std::string_view key, std::string_view what);
bool Boolean(const json &j, std::string_view key, std::string_view what);
const json &Array(const json &j, std::string_view key, std::string_view what);

}  // namespace json_schema

}  // namespace factalign

#endif  // FACTALIGN_RECORDS_H_
