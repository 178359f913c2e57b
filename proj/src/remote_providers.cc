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

#include "factalign/remote_providers.h"

#include <cmath>

#include "factalign/errors.h"
#include "httplib.h"
#include "json.hpp"

namespace factalign {

using json = nlohmann::json;

namespace {

// Splits "http://host:port/prefix" into the scheme+authority and the prefix.
std::pair<std::string, std::string> SplitBaseUrl(const std::string &url) {
  size_t scheme = url.find("://");
  size_t path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path), prefix};
}

json PostJson(const std::string &base_url, int timeout_seconds,
              const std::string &route, const json &body) {
  auto [host, prefix] = SplitBaseUrl(base_url);
  httplib::Client client(host);
  client.set_connection_timeout(timeout_seconds);
  client.set_read_timeout(timeout_seconds);
  client.set_write_timeout(timeout_seconds);
  auto result = client.Post(prefix + route, body.dump(), "application/json");
  if (!result) {
    throw ProviderError("POST " + base_url + route + " failed: " +
                        httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw ProviderError("POST " + base_url + route + " returned status " +
                        std::to_string(result->status));
  }
  try {
    return json::parse(result->body);
  } catch (const json::exception &e) {
    throw ProviderError("POST " + base_url + route + " returned invalid JSON: " +
                        e.what());
  }
}

template <typename T>
T Field(const json &body, const char *name, const std::string &route) {
  try {
    return body.at(name).get<T>();
  } catch (const json::exception &) {
    throw ProviderError(route + " response lacks a valid '" + name + "' field");
  }
}

}  // namespace

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

Embedding HttpEmbeddingProvider::Embed(std::string_view text,
                                       Language language) const {
  json body = {{"text", text}, {"language", LanguageCode(language)}};
  json reply = PostJson(base_url_, timeout_seconds_, "/embed", body);
  auto vector = Field<Embedding>(reply, "vector", "/embed");
  if (vector.size() < 8) {
    throw ProviderError("/embed returned a vector of dimension " +
                        std::to_string(vector.size()));
  }
  double norm = 0;
  for (double x : vector) norm += x * x;
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (double &x : vector) x /= norm;
  }
  return vector;
}

HttpTranslationProvider::HttpTranslationProvider(std::string base_url,
                                                 int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

std::string HttpTranslationProvider::Translate(std::string_view text,
                                               Language source,
                                               Language target) const {
  if (source == target) return std::string(text);
  json body = {{"text", text},
               {"source", LanguageCode(source)},
               {"target", LanguageCode(target)}};
  json reply = PostJson(base_url_, timeout_seconds_, "/translate", body);
  return Field<std::string>(reply, "text", "/translate");
}

HttpEntailmentProvider::HttpEntailmentProvider(std::string base_url,
                                               int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

NliResult HttpEntailmentProvider::Classify(std::string_view premise,
                                           std::string_view hypothesis) const {
  json body = {{"premise", premise}, {"hypothesis", hypothesis}};
  json reply = PostJson(base_url_, timeout_seconds_, "/nli", body);
  NliResult result;
  result.label = ParseNliLabel(Field<std::string>(reply, "label", "/nli"));
  result.confidence = reply.contains("confidence")
                          ? Field<double>(reply, "confidence", "/nli")
                          : 1.0;
  if (result.confidence < 0 || result.confidence > 1) {
    throw ProviderError("/nli confidence outside [0, 1]");
  }
  return result;
}

HttpAlignmentClassifier::HttpAlignmentClassifier(std::string base_url,
                                                 int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

double HttpAlignmentClassifier::Score(std::string_view pair_text) const {
  json body = {{"pair", pair_text}};
  json reply = PostJson(base_url_, timeout_seconds_, "/align-score", body);
  double p = Field<double>(reply, "probability", "/align-score");
  if (!(p >= 0 && p <= 1)) {
    throw ProviderError("/align-score probability outside [0, 1]");
  }
  return p;
}

}  // namespace factalign
