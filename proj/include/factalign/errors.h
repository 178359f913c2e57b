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

#ifndef FACTALIGN_ERRORS_H_
#define FACTALIGN_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace factalign {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or parameter values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments to an operation (length mismatches, empty inputs).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input data. Carries the byte offset when known, else -1.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string &message, int64_t offset = -1)
      : Error(offset >= 0 ? message + " at byte offset " + std::to_string(offset)
                          : message),
        offset_(offset) {}

  int64_t offset() const { return offset_; }

 private:
  int64_t offset_;
};

// A label required for verbalization is not available.
class MissingLabel : public Error {
 public:
  explicit MissingLabel(const std::string &id)
      : Error("missing label for " + id), id_(id) {}

  const std::string &id() const { return id_; }

 private:
  std::string id_;
};

// An external provider (embedding, translation, NLI, classifier) failed.
class ProviderError : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class Duplicate : public Error {
 public:
  using Error::Error;
};

// A failure confined to one input item (page, entity, bundle, sentence) that
// the batch drivers record instead of aborting.
struct ItemError {
  std::string item;
  std::string message;

  bool operator==(const ItemError &) const = default;
};

}  // namespace factalign

#endif  // FACTALIGN_ERRORS_H_
