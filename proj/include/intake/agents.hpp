#pragma once
// The four intake roles as deterministic decision kernels around backend
// calls: Assessor (scale planning), Patient (trust/stress state machine),
// Evaluator (suspicion tracking and threshold policy), Diagnostician
// (discrepancy resolution).

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "intake/backends.hpp"
#include "intake/profiles.hpp"
#include "intake/prompts.hpp"
#include "intake/scales.hpp"
#include "intake/session_types.hpp"

namespace intake::agents {

struct AgentState {
    double trust = 0.5;
    double stress = 0.5;
};

struct StimulusAppraisal {
    double empathy = 0.0;   // [-1,1]
    double pressure = 0.0;  // [-1,1]
    std::string rationale;
};

enum class PatientStrategy { Disclose, Deflect, Minimize, ExaggerateSymptom, Neutral, Breakdown };
std::string to_string(PatientStrategy s);

struct PatientDirective {
    std::string thought_trace;
    AgentState next_state;
    PatientStrategy strategy = PatientStrategy::Neutral;
    std::string strategy_directive;
    std::vector<std::string> nonverbal_cues;  // each <= 10 chars
    bool allow_contradiction = false;         // set under Breakdown
    int length_budget_words = 0;              // 0 = unconstrained
};

enum class Decision { Proceed, Investigate, Terminate };
std::string to_string(Decision d);

enum class SuspectedDirection { None, Concealment, Exaggeration };

struct SuspicionTracker {
    double xi = 0.0;
    double theta_susp = 0.5;  // in (0,1)
    std::vector<std::pair<int, double>> history;        // (round, xi)
    std::vector<std::pair<int, Decision>> decision_log;  // (round, decision)
    SuspectedDirection suspected_direction = SuspectedDirection::None;
};

struct SuspicionEvidence {
    std::vector<std::string> inconsistency_flags;
    bool nonverbal_mismatch = false;
    double cot_estimate = 0.0;  // [0,1]
    SuspectedDirection direction_hint = SuspectedDirection::None;
};

struct EvaluatorDirective {
    std::string reasoning_step;
    double cot_estimate = 0.0;
    Decision decision = Decision::Proceed;
    std::string target_topic;
    std::string guidance_for_chat;
    std::vector<std::string> inconsistency_flags;
};

struct EvidenceRef {
    int round = 0;
    std::string note;
};

struct DiagnosticReport {
    profiles::ClinicalStatus status = profiles::ClinicalStatus::Healthy;
    profiles::Severity severity = profiles::Severity::NotApplicable;
    std::string symptom_match;
    std::string discrepancy_resolution;
    std::vector<EvidenceRef> key_evidence;
};

// All tunables of the state updates and threshold rules, defaulted once.
// The update directions are fixed; every magnitude is configurable.
struct AgentConfig {
    double lambda = 0.1;                   // sensitivity factor
    double pressure_trust_coupling = 0.0;  // pressure lowering trust
    double empathy_stress_coupling = 0.0;  // empathy lowering stress
    double stress_threshold = 0.7;         // defense trigger
    double trust_threshold = 0.6;          // disclosure trigger
    double breakdown_threshold = 0.9;      // Deflect escalates to Breakdown
    double alpha = 0.5;                    // suspicion smoothing
    double beta = 0.1;                     // per-inconsistency bonus
    double theta_susp = 0.5;               // Investigate threshold
    int self_report_bias = 1;              // items of floor/ceiling pull
    int rating_adjustment = 1;             // items of suspicion correction
    double cot_temperature = 0.2;
    double chat_temperature = 0.8;
    int breakdown_word_cap = 24;

    void validate() const;  // throws ConfigError
};

// --- Patient kernel ---------------------------------------------------------

// Deterministic cue-word appraisal when the backend supports lexicon mode,
// otherwise one structured model call.
StimulusAppraisal appraise(const std::string& utterance, backends::ModelBackend& backend);

// Channelwise additive update with clamping; couplings default to zero.
AgentState update_state(const AgentState& s, const StimulusAppraisal& psi, double lambda,
                        double pressure_trust_coupling = 0.0,
                        double empathy_stress_coupling = 0.0);

// Defense strictly precedes disclosure; otherwise the topic's honesty
// strategy decides.
PatientStrategy select_patient_strategy(const profiles::PatientProfile& profile,
                                        const AgentState& s, const std::string& topic,
                                        const AgentConfig& config);

struct PatientTurnResult {
    PatientDirective directive;
    std::string utterance;
};

PatientTurnResult patient_turn(const profiles::PatientProfile& profile, const AgentState& state,
                               const std::string& doctor_utterance, const std::string& topic,
                               const backends::BackendSet& backends,
                               const prompts::PromptLibrary& prompts, const AgentConfig& config,
                               std::mt19937_64& rng);

// --- Evaluator kernel -------------------------------------------------------

void update_suspicion(SuspicionTracker& tracker, const SuspicionEvidence& evidence,
                      const AgentConfig& config, int round);

// The two-way threshold policy; Terminate whenever saturation criteria hold.
Decision decide(const SuspicionTracker& tracker, const session::SaturationStatus& saturation);

struct EvaluatorTurnResult {
    EvaluatorDirective directive;
    std::string utterance;  // empty on Terminate
};

EvaluatorTurnResult evaluator_turn(const scales::ScalePlan& plan,
                                   const std::vector<session::TurnRecord>& transcript,
                                   SuspicionTracker& tracker,
                                   const session::SaturationStatus& saturation,
                                   const backends::BackendSet& backends,
                                   const prompts::PromptLibrary& prompts,
                                   const AgentConfig& config, int round);

// Control-arm evaluator: linear inquiry, no suspicion tracking, no backend.
EvaluatorTurnResult evaluator_turn_passive(const session::SaturationStatus& saturation,
                                           int round);

// --- Assessor ---------------------------------------------------------------

// Backend proposal -> validate -> one repair reprompt -> deterministic
// keyword fallback (first clinician + first self-report scale of the routed
// domain).
scales::ScalePlan assessor_select(const profiles::Demographics& demographics,
                                  const std::string& chief_complaint,
                                  const scales::Repository& repo,
                                  const backends::BackendSet& backends,
                                  const prompts::PromptLibrary& prompts,
                                  const AgentConfig& config);

// Keyword routing used as the Assessor fallback; exposed for tests.
scales::Domain route_primary_domain(const std::string& chief_complaint);

// --- Rating phase ------------------------------------------------------------

scales::ScaleResponse patient_self_report(const profiles::PatientProfile& profile,
                                          const scales::ScaleDefinition& def,
                                          const std::vector<session::TurnRecord>& transcript,
                                          const backends::BackendSet& backends,
                                          const prompts::PromptLibrary& prompts,
                                          const AgentConfig& config);

std::vector<scales::ScaleResponse> evaluator_rate(const scales::ScalePlan& plan,
                                                  const std::vector<session::TurnRecord>& transcript,
                                                  SuspicionTracker& tracker,
                                                  const scales::Repository& repo,
                                                  const backends::BackendSet& backends,
                                                  const prompts::PromptLibrary& prompts,
                                                  const AgentConfig& config);

// --- Diagnostician ------------------------------------------------------------

DiagnosticReport diagnose(const std::vector<session::TurnRecord>& transcript,
                          const std::map<std::string, scales::ScaleResponse>& self_reports,
                          const std::map<std::string, scales::ScaleResponse>& clinician_reports,
                          const SuspicionTracker& tracker, const scales::ScalePlan& plan,
                          const scales::Repository& repo, const backends::BackendSet& backends,
                          const prompts::PromptLibrary& prompts, const AgentConfig& config);

// Highest clinical severity implied by a set of scale responses. Labels from
// Classification and AlgorithmStub instruments carry no severity and are
// skipped.
profiles::Severity aggregate_severity(const std::map<std::string, scales::ScaleResponse>& reports,
                                      const scales::Repository& repo);

void to_json(Json& j, const DiagnosticReport& r);
void from_json(const Json& j, DiagnosticReport& r);
void to_json(Json& j, const SuspicionTracker& t);
void from_json(const Json& j, SuspicionTracker& t);

}  // namespace intake::agents
