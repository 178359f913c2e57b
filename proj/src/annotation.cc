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

#include "factalign/annotation.h"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <filesystem>

#include "httplib.h"
#include "spdlog/spdlog.h"

#include "factalign/errors.h"
#include "factalign/file_io.h"
#include "factalign/records.h"
#include "factalign/text.h"

namespace factalign {

using json_schema::Array;
using json_schema::Boolean;
using json_schema::ExpectKeys;
using json_schema::Field;
using json_schema::Integer;
using json_schema::String;

std::string SentenceKey(const Sentence &s) {
  return std::string(LanguageCode(s.language)) + ":" + s.page_id + ":" +
         std::to_string(s.ordinal);
}

std::string TaskIdFor(const Sentence &s) {
  uint64_t h = Fingerprint(LanguageCode(s.language));
  h = Fingerprint("\x1f", h);
  h = Fingerprint(s.page_id, h);
  h = Fingerprint("\x1f", h);
  h = Fingerprint(std::to_string(s.ordinal), h);
  h = Fingerprint("\x1f", h);
  h = Fingerprint(s.text, h);
  return "t" + HexDigest(h);
}

std::vector<AnnotationTask> CreateTasks(const std::vector<CandidateSet> &candidate_sets,
                                        const std::map<std::string, std::string> &translations,
                                        const std::map<std::string, FactKeySet> &golden) {
  std::vector<AnnotationTask> tasks;
  std::set<std::string> seen;
  for (const CandidateSet &set : candidate_sets) {
    std::string key = SentenceKey(set.sentence);
    auto tr = translations.find(key);
    if (tr == translations.end()) {
      throw InvalidArgument("no reference translation for sentence " + key);
    }
    if (set.candidates.empty()) throw InvalidArgument("no candidate facts for sentence " + key);
    AnnotationTask task;
    task.task_id = TaskIdFor(set.sentence);
    if (!seen.insert(task.task_id).second) {
      throw Duplicate("duplicate sentence " + key + " (task " + task.task_id + ")");
    }
    task.sentence = set.sentence;
    task.reference_translation = tr->second;
    for (const ScoredCandidate &c : set.candidates) task.facts.push_back(c.fact);
    auto g = golden.find(key);
    if (g != golden.end()) {
      task.is_golden = true;
      task.gold = g->second;
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

nlohmann::json AnnotatorPayload(const AnnotationTask &task) {
  nlohmann::json facts = nlohmann::json::array();
  for (const Fact &f : task.facts) {
    facts.push_back({{"id", FactKey(f)}, {"text", VerbalizeFact(f, true, Language::kEn)}});
  }
  return {{"task_id", task.task_id},
          {"language", LanguageCode(task.language())},
          {"sentence", task.sentence.text},
          {"reference_translation", task.reference_translation},
          {"facts", facts}};
}

std::string_view CoverageName(Coverage coverage) {
  return coverage == Coverage::kComplete ? "complete" : "partial";
}

Coverage ParseCoverage(std::string_view name) {
  if (name == "complete") return Coverage::kComplete;
  if (name == "partial") return Coverage::kPartial;
  throw InvalidArgument("coverage must be 'partial' or 'complete'");
}

std::string_view GoldRuleName(GoldRule rule) {
  switch (rule) {
    case GoldRule::kMajority: return "majority";
    case GoldRule::kIntersection: return "intersection";
    case GoldRule::kUnion: return "union";
  }
  return "majority";
}

GoldRule ParseGoldRule(std::string_view name) {
  for (GoldRule r : {GoldRule::kMajority, GoldRule::kIntersection, GoldRule::kUnion}) {
    if (GoldRuleName(r) == name) return r;
  }
  throw InvalidArgument("unknown aggregation rule: " + std::string(name));
}

std::set<std::string> AggregateMarks(const std::vector<std::set<std::string>> &marks,
                                     GoldRule rule) {
  std::map<std::string, size_t> votes;
  for (const auto &m : marks) {
    for (const std::string &id : m) ++votes[id];
  }
  std::set<std::string> out;
  for (const auto &[id, n] : votes) {
    bool keep = false;
    switch (rule) {
      case GoldRule::kMajority: keep = 2 * n > marks.size(); break;
      case GoldRule::kIntersection: keep = n == marks.size(); break;
      case GoldRule::kUnion: keep = true; break;
    }
    if (keep) out.insert(id);
  }
  return out;
}

ServiceConfig ServiceConfig::FromJson(const nlohmann::json &j) {
  ServiceConfig c;
  if (!j.is_null()) {
    if (!j.is_object()) throw ConfigError("annotation config must be an object");
    try {
      ExpectKeys(j, {"golden_quota", "top_n", "event_log", "admin_token", "host", "port"},
                 "annotation config");
      if (j.contains("golden_quota")) c.golden_quota = static_cast<int>(Integer(j, "golden_quota", "annotation config"));
      if (j.contains("top_n")) c.top_n = static_cast<int>(Integer(j, "top_n", "annotation config"));
      if (j.contains("event_log")) c.event_log = String(j, "event_log", "annotation config");
      if (j.contains("admin_token")) c.admin_token = String(j, "admin_token", "annotation config");
      if (j.contains("host")) c.host = String(j, "host", "annotation config");
      if (j.contains("port")) c.port = static_cast<int>(Integer(j, "port", "annotation config"));
    } catch (const ParseError &e) {
      throw ConfigError(e.what());
    }
  }
  if (const char *token = std::getenv("FACTALIGN_ADMIN_TOKEN")) c.admin_token = token;
  if (const char *log = std::getenv("FACTALIGN_EVENT_LOG")) c.event_log = log;
  if (c.golden_quota < 0) throw ConfigError("golden_quota must be >= 0");
  if (c.top_n < 1) throw ConfigError("top_n must be >= 1");
  if (c.port < 0 || c.port > 65535) throw ConfigError("port out of range");
  return c;
}

std::string UtcTimestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

nlohmann::json TaskJson(const AnnotationTask &t) {
  nlohmann::json facts = nlohmann::json::array();
  for (const Fact &f : t.facts) facts.push_back(ToJson(f));
  return {{"task_id", t.task_id},
          {"sentence", ToJson(t.sentence)},
          {"reference_translation", t.reference_translation},
          {"facts", facts},
          {"is_golden", t.is_golden},
          {"gold", t.gold}};
}

AnnotationTask TaskFromJson(const nlohmann::json &j) {
  ExpectKeys(j, {"task_id", "sentence", "reference_translation", "facts", "is_golden", "gold"},
             "task");
  AnnotationTask t;
  t.task_id = String(j, "task_id", "task");
  t.sentence = FromJson<Sentence>(Field(j, "sentence", "task"));
  t.reference_translation = String(j, "reference_translation", "task");
  for (const auto &f : Array(j, "facts", "task")) t.facts.push_back(FromJson<Fact>(f));
  t.is_golden = Boolean(j, "is_golden", "task");
  for (const auto &g : Array(j, "gold", "task")) {
    if (!g.is_string()) throw ParseError("task: gold ids must be strings");
    t.gold.insert(g.get<std::string>());
  }
  return t;
}

Submission SubmissionFromJson(const nlohmann::json &j) {
  ExpectKeys(j, {"record_id", "task_id", "annotator_id", "marked_fact_ids", "coverage",
                 "issue_text", "timestamp"},
             "submission");
  Submission s;
  s.record_id = Integer(j, "record_id", "submission");
  s.task_id = String(j, "task_id", "submission");
  s.annotator_id = String(j, "annotator_id", "submission");
  for (const auto &id : Array(j, "marked_fact_ids", "submission")) {
    if (!id.is_string()) throw ParseError("submission: fact ids must be strings");
    s.marked_fact_ids.push_back(id.get<std::string>());
  }
  const auto &cov = Field(j, "coverage", "submission");
  if (!cov.is_null()) s.coverage = ParseCoverage(cov.get<std::string>());
  s.issue_text = String(j, "issue_text", "submission");
  s.timestamp = String(j, "timestamp", "submission");
  return s;
}

}  // namespace

nlohmann::json SubmissionJson(const Submission &s) {
  return {{"record_id", s.record_id},
          {"task_id", s.task_id},
          {"annotator_id", s.annotator_id},
          {"marked_fact_ids", s.marked_fact_ids},
          {"coverage", s.coverage ? nlohmann::json(CoverageName(*s.coverage))
                                  : nlohmann::json(nullptr)},
          {"issue_text", s.issue_text},
          {"timestamp", s.timestamp}};
}

AnnotationService::AnnotationService(ServiceConfig config, Clock clock)
    : config_(std::move(config)), clock_(clock ? std::move(clock) : Clock(UtcTimestamp)) {
  if (config_.event_log.empty()) return;
  namespace fs = std::filesystem;
  if (fs::exists(config_.event_log)) {
    replaying_ = true;
    int events = 0;
    ReadLines(config_.event_log, [&](std::string_view line, int line_no) {
      if (Trim(line).empty()) return;
      try {
        Apply(nlohmann::json::parse(line));
      } catch (const std::exception &e) {
        throw ParseError(config_.event_log + ":" + std::to_string(line_no) + ": " + e.what());
      }
      ++events;
    });
    replaying_ = false;
    spdlog::info("replayed {} events from {}", events, config_.event_log);
  } else {
    fs::path parent = fs::path(config_.event_log).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
  }
  log_.open(config_.event_log, std::ios::app | std::ios::binary);
  if (!log_) throw Error("cannot open event log " + config_.event_log);
}

void AnnotationService::Append(const nlohmann::json &event) {
  if (replaying_ || !log_.is_open()) return;
  log_ << event.dump() << '\n';
  log_.flush();
  if (!log_) throw Error("failed to append to event log " + config_.event_log);
}

void AnnotationService::Apply(const nlohmann::json &event) {
  std::string type = String(event, "event", "event");
  if (type == "task") {
    ApplyTask(TaskFromJson(Field(event, "task", "event")));
  } else if (type == "annotator") {
    AnnotatorState st;
    st.profile.annotator_id = String(event, "id", "event");
    st.profile.language = ParseLanguage(String(event, "language", "event"));
    annotators_[st.profile.annotator_id] = std::move(st);
  } else if (type == "assignment") {
    ApplyAssignment(String(event, "annotator", "event"), String(event, "task", "event"));
  } else if (type == "submission") {
    ApplySubmission(SubmissionFromJson(Field(event, "submission", "event")));
  } else if (type == "qualification") {
    Language lang = ParseLanguage(String(event, "language", "event"));
    std::set<std::string> qualified;
    for (const auto &id : Array(event, "qualified", "event")) qualified.insert(id.get<std::string>());
    const auto &kappas = Field(event, "kappas", "event");
    for (auto &[id, st] : annotators_) {
      if (st.profile.language != lang) continue;
      st.profile.qualified = qualified.count(id) > 0;
      if (kappas.contains(id)) st.profile.golden_kappa = kappas[id].get<double>();
    }
  } else {
    throw ParseError("unknown event type '" + type + "'");
  }
}

void AnnotationService::ApplyTask(const AnnotationTask &task) {
  task_order_.push_back(task.task_id);
  assignment_counts_[task.task_id] = 0;
  tasks_.emplace(task.task_id, task);
}

void AnnotationService::ApplyAssignment(const std::string &annotator_id,
                                        const std::string &task_id) {
  AnnotatorState &st = annotators_.at(annotator_id);
  const AnnotationTask &task = tasks_.at(task_id);
  st.served.push_back(task_id);
  st.served_set.insert(task_id);
  if (task.is_golden) ++st.golden_served;
  ++assignment_counts_[task_id];
}

void AnnotationService::ApplySubmission(const Submission &submission) {
  by_task_annotator_[{submission.task_id, submission.annotator_id}] = submission.record_id;
  submissions_.push_back(submission);
}

void AnnotationService::AddTasks(const std::vector<AnnotationTask> &tasks) {
  std::lock_guard<std::mutex> lock(mu_);
  std::map<std::string, const AnnotationTask *> batch;
  for (const AnnotationTask &t : tasks) {
    if (t.facts.empty()) throw InvalidArgument("task " + t.task_id + " has no facts");
    auto it = tasks_.find(t.task_id);
    if (it != tasks_.end() && !(it->second == t)) {
      throw Duplicate("task " + t.task_id + " already exists with different content");
    }
    auto [b, inserted] = batch.emplace(t.task_id, &t);
    if (!inserted && !(*b->second == t)) throw Duplicate("duplicate task " + t.task_id);
  }
  for (const AnnotationTask &t : tasks) {
    if (tasks_.count(t.task_id)) continue;
    Append({{"event", "task"}, {"task", TaskJson(t)}});
    ApplyTask(t);
  }
}

void AnnotationService::RegisterAnnotator(const std::string &annotator_id, Language language) {
  if (annotator_id.empty()) throw InvalidArgument("annotator id must not be empty");
  std::lock_guard<std::mutex> lock(mu_);
  auto it = annotators_.find(annotator_id);
  if (it != annotators_.end()) {
    if (it->second.profile.language != language) {
      throw Duplicate("annotator " + annotator_id + " is registered for " +
                      std::string(LanguageCode(it->second.profile.language)));
    }
    return;
  }
  Append({{"event", "annotator"}, {"id", annotator_id}, {"language", LanguageCode(language)}});
  AnnotatorState st;
  st.profile.annotator_id = annotator_id;
  st.profile.language = language;
  annotators_[annotator_id] = std::move(st);
}

int AnnotationService::EffectiveQuotaLocked(Language language) const {
  int golden = 0;
  for (const auto &[id, t] : tasks_) golden += t.is_golden && t.language() == language;
  return std::min(config_.golden_quota, golden);
}

int AnnotationService::EffectiveQuota(Language language) const {
  std::lock_guard<std::mutex> lock(mu_);
  return EffectiveQuotaLocked(language);
}

std::optional<AnnotationTask> AnnotationService::NextTask(const std::string &annotator_id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = annotators_.find(annotator_id);
  if (it == annotators_.end()) throw NotFound("unknown annotator " + annotator_id);
  AnnotatorState &st = it->second;
  Language lang = st.profile.language;
  const AnnotationTask *pick = nullptr;
  if (!st.profile.qualified) {
    if (st.golden_served < config_.golden_quota) {
      for (const std::string &id : task_order_) {
        const AnnotationTask &t = tasks_.at(id);
        if (t.is_golden && t.language() == lang && !st.served_set.count(id)) {
          pick = &t;
          break;
        }
      }
    }
  } else {
    int64_t best = INT64_MAX;
    for (const std::string &id : task_order_) {
      const AnnotationTask &t = tasks_.at(id);
      if (t.is_golden || t.language() != lang || st.served_set.count(id)) continue;
      int64_t n = assignment_counts_.at(id);
      if (n < best) {
        best = n;
        pick = &t;
      }
    }
  }
  if (pick == nullptr) return std::nullopt;
  Append({{"event", "assignment"}, {"annotator", annotator_id}, {"task", pick->task_id}});
  ApplyAssignment(annotator_id, pick->task_id);
  return *pick;
}

int64_t AnnotationService::Submit(const SubmissionRequest &request) {
  std::lock_guard<std::mutex> lock(mu_);
  auto task_it = tasks_.find(request.task_id);
  if (task_it == tasks_.end()) throw NotFound("unknown task " + request.task_id);
  auto ann_it = annotators_.find(request.annotator_id);
  if (ann_it == annotators_.end()) throw NotFound("unknown annotator " + request.annotator_id);
  if (!ann_it->second.served_set.count(request.task_id)) {
    throw InvalidArgument("task " + request.task_id + " was not served to " +
                          request.annotator_id);
  }
  if (by_task_annotator_.count({request.task_id, request.annotator_id})) {
    throw Duplicate("annotator " + request.annotator_id + " already submitted task " +
                    request.task_id);
  }
  FactKeySet valid = FactKeys(task_it->second.facts);
  std::set<std::string> marked;
  for (const std::string &id : request.marked_fact_ids) {
    if (!valid.count(id)) {
      throw InvalidArgument("fact id '" + id + "' does not belong to task " + request.task_id);
    }
    marked.insert(id);
  }
  if (!request.coverage && Trim(request.issue_text).empty()) {
    throw InvalidArgument("coverage is required unless an issue is described");
  }
  Submission s;
  s.record_id = static_cast<int64_t>(submissions_.size()) + 1;
  s.task_id = request.task_id;
  s.annotator_id = request.annotator_id;
  s.marked_fact_ids.assign(marked.begin(), marked.end());
  s.coverage = request.coverage;
  s.issue_text = request.issue_text;
  s.timestamp = clock_();
  Append({{"event", "submission"}, {"submission", SubmissionJson(s)}});
  ApplySubmission(s);
  return s.record_id;
}

QualificationResult AnnotationService::RankLocked(Language language) const {
  QualificationResult result;
  int quota = EffectiveQuotaLocked(language);
  for (const auto &[id, st] : annotators_) {
    if (st.profile.language != language) continue;
    if (quota == 0) {
      result.excluded.emplace_back(id, "no golden tasks in " + std::string(LanguageCode(language)));
      continue;
    }
    std::vector<int> marks, gold;
    int done = 0;
    for (const std::string &task_id : task_order_) {
      const AnnotationTask &t = tasks_.at(task_id);
      if (!t.is_golden || t.language() != language) continue;
      auto sub = by_task_annotator_.find({task_id, id});
      if (sub == by_task_annotator_.end()) continue;
      ++done;
      const Submission &s = submissions_.at(sub->second - 1);
      std::set<std::string> mine(s.marked_fact_ids.begin(), s.marked_fact_ids.end());
      for (const Fact &f : t.facts) {
        std::string key = FactKey(f);
        marks.push_back(mine.count(key) ? 1 : 0);
        gold.push_back(t.gold.count(key) ? 1 : 0);
      }
    }
    if (done < quota) {
      result.excluded.emplace_back(id, "completed " + std::to_string(done) + " of " +
                                           std::to_string(quota) + " golden tasks");
      continue;
    }
    AnnotatorProfile p = st.profile;
    p.golden_kappa = CohenKappa(marks, gold);
    result.ranked.push_back(std::move(p));
  }
  std::sort(result.ranked.begin(), result.ranked.end(),
            [](const AnnotatorProfile &a, const AnnotatorProfile &b) {
              if (*a.golden_kappa != *b.golden_kappa) return *a.golden_kappa > *b.golden_kappa;
              return a.annotator_id < b.annotator_id;
            });
  return result;
}

QualificationResult AnnotationService::RankAnnotators(Language language) const {
  std::lock_guard<std::mutex> lock(mu_);
  return RankLocked(language);
}

QualificationResult AnnotationService::Qualify(Language language, int top_n) {
  if (top_n < 1) throw InvalidArgument("top_n must be >= 1");
  std::lock_guard<std::mutex> lock(mu_);
  QualificationResult result = RankLocked(language);
  nlohmann::json qualified = nlohmann::json::array();
  nlohmann::json kappas = nlohmann::json::object();
  for (size_t i = 0; i < result.ranked.size(); ++i) {
    AnnotatorProfile &p = result.ranked[i];
    p.qualified = static_cast<int>(i) < top_n;
    if (p.qualified) qualified.push_back(p.annotator_id);
    kappas[p.annotator_id] = *p.golden_kappa;
  }
  nlohmann::json event = {{"event", "qualification"},
                          {"language", LanguageCode(language)},
                          {"qualified", qualified},
                          {"kappas", kappas}};
  Append(event);
  Apply(event);
  return result;
}

GoldExport AnnotationService::ExportGold(Language language, GoldRule rule) const {
  std::lock_guard<std::mutex> lock(mu_);
  GoldExport out;
  for (const std::string &task_id : task_order_) {
    const AnnotationTask &t = tasks_.at(task_id);
    if (t.is_golden || t.language() != language) continue;
    std::vector<std::set<std::string>> marks;
    for (const auto &[id, st] : annotators_) {
      if (!st.profile.qualified) continue;
      auto sub = by_task_annotator_.find({task_id, id});
      if (sub == by_task_annotator_.end()) continue;
      const Submission &s = submissions_.at(sub->second - 1);
      marks.emplace_back(s.marked_fact_ids.begin(), s.marked_fact_ids.end());
    }
    if (marks.empty()) {
      out.skipped.emplace_back(task_id, "no submission from a qualified annotator");
      continue;
    }
    std::set<std::string> keep = AggregateMarks(marks, rule);
    AlignedInstance inst;
    inst.sentence = t.sentence;
    inst.method = SelectionMethod::kGold;
    inst.section = t.sentence.section;
    for (const Fact &f : t.facts) {
      if (keep.count(FactKey(f))) inst.facts.push_back(f);
    }
    if (inst.facts.empty()) {
      ++out.empty_excluded;
      continue;
    }
    out.instances.push_back(std::move(inst));
  }
  return out;
}

std::optional<Submission> AnnotationService::FindSubmission(int64_t record_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (record_id < 1 || record_id > static_cast<int64_t>(submissions_.size())) return std::nullopt;
  return submissions_[record_id - 1];
}

std::optional<AnnotationTask> AnnotationService::FindTask(const std::string &task_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = tasks_.find(task_id);
  if (it == tasks_.end()) return std::nullopt;
  return it->second;
}

std::optional<AnnotatorProfile> AnnotationService::FindAnnotator(
    const std::string &annotator_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = annotators_.find(annotator_id);
  if (it == annotators_.end()) return std::nullopt;
  return it->second.profile;
}

nlohmann::json AnnotationService::Stats() const {
  std::lock_guard<std::mutex> lock(mu_);
  nlohmann::json per = nlohmann::json::object();
  for (const auto &[id, t] : tasks_) {
    auto &l = per[std::string(LanguageCode(t.language()))];
    if (l.is_null()) {
      l = {{"tasks", 0}, {"golden_tasks", 0}, {"annotators", 0},
           {"qualified_annotators", 0}, {"submissions", 0}};
    }
    l["tasks"] = l["tasks"].get<int64_t>() + 1;
    if (t.is_golden) l["golden_tasks"] = l["golden_tasks"].get<int64_t>() + 1;
  }
  for (const auto &[id, st] : annotators_) {
    auto &l = per[std::string(LanguageCode(st.profile.language))];
    if (l.is_null()) {
      l = {{"tasks", 0}, {"golden_tasks", 0}, {"annotators", 0},
           {"qualified_annotators", 0}, {"submissions", 0}};
    }
    l["annotators"] = l["annotators"].get<int64_t>() + 1;
    if (st.profile.qualified) {
      l["qualified_annotators"] = l["qualified_annotators"].get<int64_t>() + 1;
    }
  }
  for (const Submission &s : submissions_) {
    auto &l = per[std::string(LanguageCode(tasks_.at(s.task_id).language()))];
    l["submissions"] = l["submissions"].get<int64_t>() + 1;
  }
  return {{"tasks", tasks_.size()},
          {"annotators", annotators_.size()},
          {"submissions", submissions_.size()},
          {"golden_quota", config_.golden_quota},
          {"per_language", per}};
}

nlohmann::json AnnotationService::Snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  nlohmann::json tasks = nlohmann::json::array();
  for (const std::string &id : task_order_) {
    nlohmann::json t = TaskJson(tasks_.at(id));
    t["assignments"] = assignment_counts_.at(id);
    tasks.push_back(std::move(t));
  }
  nlohmann::json annotators = nlohmann::json::array();
  for (const auto &[id, st] : annotators_) {
    annotators.push_back(
        {{"id", id},
         {"language", LanguageCode(st.profile.language)},
         {"golden_kappa", st.profile.golden_kappa ? nlohmann::json(*st.profile.golden_kappa)
                                                  : nlohmann::json(nullptr)},
         {"qualified", st.profile.qualified},
         {"served", st.served},
         {"golden_served", st.golden_served}});
  }
  nlohmann::json submissions = nlohmann::json::array();
  for (const Submission &s : submissions_) submissions.push_back(SubmissionJson(s));
  return {{"tasks", tasks}, {"annotators", annotators}, {"submissions", submissions}};
}

// ---------------------------------------------------------------------------
// HTTP API.
// ---------------------------------------------------------------------------

namespace {

void Reply(httplib::Response &res, int status, const nlohmann::json &body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response &res, int status, const std::string &message) {
  Reply(res, status, {{"error", message}});
}

// Runs a handler, mapping the error hierarchy onto HTTP statuses.
template <typename Fn>
void Guarded(httplib::Response &res, Fn fn) {
  try {
    fn();
  } catch (const NotFound &e) {
    ReplyError(res, 404, e.what());
  } catch (const Duplicate &e) {
    ReplyError(res, 409, e.what());
  } catch (const InvalidArgument &e) {
    ReplyError(res, 400, e.what());
  } catch (const ParseError &e) {
    ReplyError(res, 400, e.what());
  } catch (const ConfigError &e) {
    ReplyError(res, 400, e.what());
  } catch (const nlohmann::json::exception &e) {
    ReplyError(res, 400, std::string("malformed JSON: ") + e.what());
  } catch (const std::exception &e) {
    spdlog::error("annotation request failed: {}", e.what());
    ReplyError(res, 500, e.what());
  }
}

bool Authorized(const httplib::Request &req, const AnnotationService &service) {
  const std::string &token = service.config().admin_token;
  if (token.empty()) return false;
  return req.get_header_value("Authorization") == "Bearer " + token;
}

Language QueryLanguage(const httplib::Request &req) {
  if (!req.has_param("language")) throw InvalidArgument("missing 'language' parameter");
  auto lang = TryParseLanguage(req.get_param_value("language"));
  if (!lang) throw InvalidArgument("unsupported language " + req.get_param_value("language"));
  return *lang;
}

}  // namespace

void InstallAnnotationRoutes(httplib::Server &server, AnnotationService &service) {
  server.Post("/annotators", [&service](const httplib::Request &req, httplib::Response &res) {
    Guarded(res, [&] {
      auto body = nlohmann::json::parse(req.body);
      ExpectKeys(body, {"id", "language"}, "annotator");
      std::string id = String(body, "id", "annotator");
      std::string code = String(body, "language", "annotator");
      auto lang = TryParseLanguage(code);
      if (!lang) throw InvalidArgument("unsupported language " + code);
      service.RegisterAnnotator(id, *lang);
      Reply(res, 201, {{"id", id}, {"language", code}});
    });
  });

  server.Get("/tasks/next", [&service](const httplib::Request &req, httplib::Response &res) {
    Guarded(res, [&] {
      if (!req.has_param("annotator")) throw InvalidArgument("missing 'annotator' parameter");
      auto task = service.NextTask(req.get_param_value("annotator"));
      if (!task) {
        res.status = 204;
        return;
      }
      Reply(res, 200, AnnotatorPayload(*task));
    });
  });

  server.Post(R"(/tasks/([^/]+)/submission)",
              [&service](const httplib::Request &req, httplib::Response &res) {
                Guarded(res, [&] {
                  auto body = nlohmann::json::parse(req.body);
                  ExpectKeys(body, {"annotator_id", "marked_fact_ids", "coverage", "issue_text"},
                             "submission");
                  SubmissionRequest r;
                  r.task_id = req.matches[1];
                  r.annotator_id = String(body, "annotator_id", "submission");
                  for (const auto &id : Array(body, "marked_fact_ids", "submission")) {
                    if (!id.is_string()) throw InvalidArgument("fact ids must be strings");
                    r.marked_fact_ids.push_back(id.get<std::string>());
                  }
                  if (body.contains("coverage") && !body["coverage"].is_null()) {
                    r.coverage = ParseCoverage(String(body, "coverage", "submission"));
                  }
                  if (body.contains("issue_text")) {
                    r.issue_text = String(body, "issue_text", "submission");
                  }
                  int64_t id = service.Submit(r);
                  Reply(res, 201, {{"record_id", id}});
                });
              });

  auto admin = [&service](auto handler) {
    return [&service, handler](const httplib::Request &req, httplib::Response &res) {
      if (!Authorized(req, service)) {
        ReplyError(res, 401, "admin token required");
        return;
      }
      Guarded(res, [&] { handler(req, res); });
    };
  };

  server.Get("/admin/qualify", admin([&service](const httplib::Request &req,
                                                httplib::Response &res) {
               Language lang = QueryLanguage(req);
               int top_n = service.config().top_n;
               if (req.has_param("top_n")) {
                 try {
                   top_n = std::stoi(req.get_param_value("top_n"));
                 } catch (const std::exception &) {
                   throw InvalidArgument("top_n must be an integer");
                 }
               }
               QualificationResult q = service.Qualify(lang, top_n);
               nlohmann::json ranked = nlohmann::json::array();
               for (const AnnotatorProfile &p : q.ranked) {
                 ranked.push_back({{"annotator_id", p.annotator_id},
                                   {"language", LanguageCode(p.language)},
                                   {"golden_kappa", *p.golden_kappa},
                                   {"qualified", p.qualified}});
               }
               nlohmann::json excluded = nlohmann::json::array();
               for (const auto &[id, why] : q.excluded) {
                 excluded.push_back({{"annotator_id", id}, {"reason", why}});
               }
               Reply(res, 200, {{"ranked", ranked}, {"excluded", excluded}});
             }));

  server.Get("/admin/export", admin([&service](const httplib::Request &req,
                                               httplib::Response &res) {
               Language lang = QueryLanguage(req);
               GoldRule rule = GoldRule::kMajority;
               if (req.has_param("rule")) rule = ParseGoldRule(req.get_param_value("rule"));
               GoldExport g = service.ExportGold(lang, rule);
               nlohmann::json instances = nlohmann::json::array();
               for (const AlignedInstance &a : g.instances) instances.push_back(ToJson(a));
               nlohmann::json skipped = nlohmann::json::array();
               for (const auto &[id, why] : g.skipped) {
                 skipped.push_back({{"task_id", id}, {"reason", why}});
               }
               Reply(res, 200, {{"instances", instances},
                                {"excluded_empty", g.empty_excluded},
                                {"skipped", skipped},
                                {"rule", GoldRuleName(rule)}});
             }));

  server.Get("/admin/stats", admin([&service](const httplib::Request &,
                                              httplib::Response &res) {
               Reply(res, 200, service.Stats());
             }));

  server.Get(R"(/admin/submissions/(\d+))",
             admin([&service](const httplib::Request &req, httplib::Response &res) {
               auto s = service.FindSubmission(std::stoll(req.matches[1]));
               if (!s) throw NotFound("no such submission");
               Reply(res, 200, SubmissionJson(*s));
             }));
}

void ServeAnnotations(AnnotationService &service) {
  httplib::Server server;
  InstallAnnotationRoutes(server, service);
  spdlog::info("annotation service listening on {}:{}", service.config().host,
               service.config().port);
  if (!server.listen(service.config().host, service.config().port)) {
    throw Error("cannot listen on " + service.config().host + ":" +
                std::to_string(service.config().port));
  }
}

}  // namespace factalign
