#pragma once
// The closed intake loop: plan, interview under round structure and
// termination rules, rating phase, diagnosis, record assembly/persistence.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intake/agents.hpp"
#include "intake/backends.hpp"
#include "intake/profiles.hpp"
#include "intake/prompts.hpp"
#include "intake/scales.hpp"
#include "intake/session_types.hpp"

namespace intake::session {

struct SessionConfig {
    agents::AgentConfig agent;
    int min_rounds = 18;
    int round_cap = 60;  // liveness guard; a generator must not hang
    bool trace_internal = true;
    int workers = 1;
    bool evaluator_cot = true;  // false = passive linear-inquiry arm
    double initial_trust = 0.3;
    double initial_stress = 0.2;
    bool stamp_time = false;  // wall-clock timestamps break rerun determinism

    void validate() const;
    Json to_json_value() const;
    static SessionConfig from_json_value(const Json& j);
    std::string config_hash() const;
};

struct RunMeta {
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<std::string> backend_ids;
    std::string generated_at = "1970-01-01T00:00:00Z";
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
    bool chief_complaint_injected = false;
    bool trace_internal = true;
    double cot_temperature = 0.2;   // decode params echoed for auditability
    double chat_temperature = 0.8;
};

struct CorpusRecord {
    std::string record_id;
    profiles::PatientProfile profile;
    scales::ScalePlan plan;
    std::vector<TurnRecord> final_transcript;
    std::map<std::string, scales::ScaleResponse> patient_self_report;
    std::map<std::string, scales::ScaleResponse> doctor_clinician_report;
    agents::DiagnosticReport diagnosis;
    profiles::HonestyState honesty_echo;
    std::optional<agents::SuspicionTracker> tracker;  // present iff trace_internal
    RunMeta run_meta;
};

// Core topics each scale domain obliges the interview to cover.
const std::vector<std::string>& domain_topics(scales::Domain domain);
std::vector<std::string> required_topics(const scales::ScalePlan& plan,
                                         const scales::Repository& repo);

CorpusRecord run_session(const profiles::PatientProfile& profile, const scales::Repository& repo,
                         const backends::BackendSet& backends,
                         const prompts::PromptLibrary& prompts, const SessionConfig& config,
                         std::uint64_t seed, const std::string& record_id = "");

struct BatchEntry {
    std::string record_id;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
};

struct BatchReport {
    std::vector<BatchEntry> entries;
    std::size_t successes = 0;
    std::size_t failures = 0;
};

// Independent sessions with per-session seeds seed^index; failures are
// collected, not fatal. The factory supplies a fresh backend set per session
// so scripted cursors never interleave.
using BackendFactory = std::function<backends::BackendSet(std::size_t index)>;

std::pair<std::vector<CorpusRecord>, BatchReport> run_batch(
    const std::vector<profiles::PatientProfile>& profiles_list, const scales::Repository& repo,
    const BackendFactory& backend_factory, const prompts::PromptLibrary& prompts,
    const SessionConfig& config, std::uint64_t seed);

struct StatsReport {
    std::size_t total_dialogues = 0;
    std::size_t total_tokens = 0;
    double avg_turns = 0.0;
    double avg_tokens_per_turn = 0.0;
    std::map<std::string, double> pathology_pct;
    std::map<std::string, double> severity_pct;
    std::map<std::string, double> gender_pct;
    double age_mean = 0.0;
};

StatsReport corpus_stats(const std::vector<CorpusRecord>& records);

struct RecordViolation {
    std::string code;
    std::string message;
};

struct RecordValidation {
    std::vector<RecordViolation> violations;
    bool ok() const { return violations.empty(); }
};

RecordValidation validate_record(const CorpusRecord& record, const scales::Repository& repo);

// Replay a traced record's coverage/evidence bookkeeping to the state the
// terminating decision saw. Requires internal traces.
SaturationStatus reconstruct_saturation(const CorpusRecord& record,
                                        const scales::Repository& repo, int min_rounds);

// Public projection: internal traces and the tracker are stripped; the
// released fields are untouched.
CorpusRecord export_public(const CorpusRecord& record);

// One UTF-8 JSON record per file plus a batch manifest.
std::string record_filename(const CorpusRecord& record);
void write_record(const CorpusRecord& record, const std::string& dir);
void write_manifest(const BatchReport& report, const std::string& dir);
CorpusRecord load_record(const std::string& path);
// Unreadable files are skipped; pass `warnings` to collect them.
std::vector<CorpusRecord> load_corpus_dir(const std::string& dir,
                                          std::vector<std::string>* warnings = nullptr);

void to_json(Json& j, const CorpusRecord& r);
void from_json(const Json& j, CorpusRecord& r);
void to_json(Json& j, const StatsReport& s);
void to_json(Json& j, const BatchReport& b);

}  // namespace intake::session
