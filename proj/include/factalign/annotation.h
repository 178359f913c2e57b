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

#ifndef FACTALIGN_ANNOTATION_H_
#define FACTALIGN_ANNOTATION_H_

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "factalign/evaluation.h"
#include "factalign/language.h"
#include "factalign/stage1.h"
#include "factalign/stage2.h"

namespace httplib {
class Server;
}

namespace factalign {

struct AnnotationTask {
  std::string task_id;
  Sentence sentence;
  std::string reference_translation;
  std::vector<Fact> facts;  // candidate facts, ids are FactKey(fact)
  bool is_golden = false;
  FactKeySet gold;  // server-side only

  Language language() const { return sentence.language; }
  bool operator==(const AnnotationTask &) const = default;
};

// "<code>:<page id>:<ordinal>", the key of the translation and gold maps.
std::string SentenceKey(const Sentence &sentence);

// Content hash of the sentence identity and text.
std::string TaskIdFor(const Sentence &sentence);

// One task per candidate set. Throws InvalidArgument when a translation entry
// is missing and Duplicate when two sets share a sentence.
std::vector<AnnotationTask> CreateTasks(const std::vector<CandidateSet> &candidate_sets,
                                        const std::map<std::string, std::string> &translations,
                                        const std::map<std::string, FactKeySet> &golden);

// What an annotator sees: task_id, language, sentence, reference_translation
// and facts [{id, text}]. Identical shape for golden and regular tasks.
nlohmann::json AnnotatorPayload(const AnnotationTask &task);

enum class Coverage { kPartial, kComplete };

std::string_view CoverageName(Coverage coverage);
Coverage ParseCoverage(std::string_view name);

struct SubmissionRequest {
  std::string task_id;
  std::string annotator_id;
  std::vector<std::string> marked_fact_ids;
  std::optional<Coverage> coverage;  // may be omitted when issue_text is set
  std::string issue_text;
};

struct Submission {
  int64_t record_id = 0;
  std::string task_id;
  std::string annotator_id;
  std::vector<std::string> marked_fact_ids;  // sorted, distinct
  std::optional<Coverage> coverage;
  std::string issue_text;
  std::string timestamp;

  bool operator==(const Submission &) const = default;
};

nlohmann::json SubmissionJson(const Submission &submission);

struct AnnotatorProfile {
  std::string annotator_id;
  Language language = Language::kEn;
  std::optional<double> golden_kappa;
  bool qualified = false;

  bool operator==(const AnnotatorProfile &) const = default;
};

struct QualificationResult {
  std::vector<AnnotatorProfile> ranked;  // kappa descending, then id
  std::vector<std::pair<std::string, std::string>> excluded;  // (annotator, reason)
};

enum class GoldRule { kMajority, kIntersection, kUnion };

std::string_view GoldRuleName(GoldRule rule);
GoldRule ParseGoldRule(std::string_view name);

// Aggregates the marks of several annotators. Majority keeps ids marked by
// strictly more than half.
std::set<std::string> AggregateMarks(const std::vector<std::set<std::string>> &marks,
                                     GoldRule rule);

struct GoldExport {
  std::vector<AlignedInstance> instances;
  int64_t empty_excluded = 0;
  std::vector<std::pair<std::string, std::string>> skipped;  // (task, reason)
};

struct ServiceConfig {
  int golden_quota = 60;
  int top_n = 4;
  std::string event_log;  // empty: in-memory only
  std::string admin_token;
  std::string host = "127.0.0.1";
  int port = 8080;

  // Reads a JSON object with the fields above; FACTALIGN_ADMIN_TOKEN and
  // FACTALIGN_EVENT_LOG override the file. Throws ConfigError.
  static ServiceConfig FromJson(const nlohmann::json &j);
};

// Annotation state backed by an append-only JSONL event log. All public
// methods are thread-safe; mutations serialize on one lock and are logged
// before they return.
class AnnotationService {
 public:
  using Clock = std::function<std::string()>;

  // Replays config.event_log when it exists, then appends to it.
  explicit AnnotationService(ServiceConfig config, Clock clock = nullptr);

  // Idempotent for identical tasks; a different task under an existing id
  // raises Duplicate.
  void AddTasks(const std::vector<AnnotationTask> &tasks);

  // Idempotent; re-registering under another language raises Duplicate.
  void RegisterAnnotator(const std::string &annotator_id, Language language);

  // Golden tasks until the quota is served, then nothing until qualified,
  // then regular tasks least-assigned first. Throws NotFound.
  std::optional<AnnotationTask> NextTask(const std::string &annotator_id);

  // Returns the record id. Throws NotFound, InvalidArgument or Duplicate.
  int64_t Submit(const SubmissionRequest &request);

  // Pure ranking of the language's annotators by golden-control kappa.
  QualificationResult RankAnnotators(Language language) const;

  // Ranks and marks the top_n as qualified (the rest of the language is not).
  QualificationResult Qualify(Language language, int top_n);

  GoldExport ExportGold(Language language, GoldRule rule = GoldRule::kMajority) const;

  std::optional<Submission> FindSubmission(int64_t record_id) const;
  std::optional<AnnotationTask> FindTask(const std::string &task_id) const;
  std::optional<AnnotatorProfile> FindAnnotator(const std::string &annotator_id) const;

  // Golden tasks an annotator must complete before qualification: the quota,
  // capped by the golden tasks available in the language.
  int EffectiveQuota(Language language) const;

  nlohmann::json Stats() const;

  // Complete state; equal snapshots mean equal services.
  nlohmann::json Snapshot() const;

  const ServiceConfig &config() const { return config_; }

 private:
  struct AnnotatorState {
    AnnotatorProfile profile;
    std::vector<std::string> served;  // in serve order
    std::set<std::string> served_set;
    int golden_served = 0;
  };

  void Append(const nlohmann::json &event);
  void Apply(const nlohmann::json &event);
  void ApplyTask(const AnnotationTask &task);
  void ApplyAssignment(const std::string &annotator_id, const std::string &task_id);
  void ApplySubmission(const Submission &submission);
  int EffectiveQuotaLocked(Language language) const;
  QualificationResult RankLocked(Language language) const;

  ServiceConfig config_;
  Clock clock_;
  mutable std::mutex mu_;
  std::ofstream log_;
  bool replaying_ = false;

  std::vector<std::string> task_order_;  // creation order
  std::map<std::string, AnnotationTask> tasks_;
  std::map<std::string, int64_t> assignment_counts_;
  std::map<std::string, AnnotatorState> annotators_;
  std::vector<Submission> submissions_;  // record_id - 1 indexes
  std::map<std::pair<std::string, std::string>, int64_t> by_task_annotator_;
};

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string UtcTimestamp();

// Installs the HTTP API on `server`. Admin routes require
// "Authorization: Bearer <admin_token>".
void InstallAnnotationRoutes(httplib::Server &server, AnnotationService &service);

// Blocks serving on config().host:config().port.
void ServeAnnotations(AnnotationService &service);

}  // namespace factalign

#endif  // FACTALIGN_ANNOTATION_H_
