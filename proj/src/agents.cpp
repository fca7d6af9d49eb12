#include "intake/agents.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace intake::agents {

std::string to_string(PatientStrategy s) {
    switch (s) {
        case PatientStrategy::Disclose: return "Disclose";
        case PatientStrategy::Deflect: return "Deflect";
        case PatientStrategy::Minimize: return "Minimize";
        case PatientStrategy::ExaggerateSymptom: return "ExaggerateSymptom";
        case PatientStrategy::Neutral: return "Neutral";
        case PatientStrategy::Breakdown: return "Breakdown";
    }
    return "Neutral";
}

std::string to_string(Decision d) {
    switch (d) {
        case Decision::Proceed: return "Proceed";
        case Decision::Investigate: return "Investigate";
        case Decision::Terminate: return "Terminate";
    }
    return "Proceed";
}

namespace {

std::string to_string(SuspectedDirection d) {
    switch (d) {
        case SuspectedDirection::None: return "none";
        case SuspectedDirection::Concealment: return "concealment";
        case SuspectedDirection::Exaggeration: return "exaggeration";
    }
    return "none";
}

SuspectedDirection direction_from_string(const std::string& s) {
    if (s == "concealment") return SuspectedDirection::Concealment;
    if (s == "exaggeration") return SuspectedDirection::Exaggeration;
    return SuspectedDirection::None;
}

}  // namespace

void AgentConfig::validate() const {
    auto in_open_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (lambda < 0.0) fail(ErrorCode::ConfigError, "lambda must be >= 0");
    if (!in_open_unit(stress_threshold)) fail(ErrorCode::ConfigError, "stress_threshold outside (0,1)");
    if (!in_open_unit(trust_threshold)) fail(ErrorCode::ConfigError, "trust_threshold outside (0,1)");
    if (!in_open_unit(theta_susp)) fail(ErrorCode::ConfigError, "theta_susp outside (0,1)");
    if (breakdown_threshold < stress_threshold || breakdown_threshold > 1.0)
        fail(ErrorCode::ConfigError, "breakdown_threshold must lie in [stress_threshold, 1]");
    if (alpha < 0.0 || alpha > 1.0) fail(ErrorCode::ConfigError, "alpha outside [0,1]");
    if (beta < 0.0) fail(ErrorCode::ConfigError, "beta must be >= 0");
    if (self_report_bias < 0 || rating_adjustment < 0)
        fail(ErrorCode::ConfigError, "bias magnitudes must be >= 0");
}

// ---------------------------------------------------------------------------
// Appraisal

namespace {

const std::vector<std::string>& empathy_cues() {
    static const std::vector<std::string> cues = {
        "many people",    "take your time", "i understand",   "understandable",
        "thank you for",  "that sounds",    "makes sense",    "i'm glad",
        "it's natural",   "no rush",        "i hear you",     "i appreciate",
        "that's a good",  "i'm sorry you",
    };
    return cues;
}

const std::vector<std::string>& pressure_cues() {
    static const std::vector<std::string> cues = {
        "yes or no",       "answer the question", "you must",       "why didn't you",
        "just answer",     "be specific",         "need you to",    "stop avoiding",
        "that contradicts", "are you lying",      "explain yourself", "you said earlier",
    };
    return cues;
}

}  // namespace

StimulusAppraisal appraise(const std::string& utterance, backends::ModelBackend& backend) {
    if (utterance.empty()) fail(ErrorCode::InvalidArgument, "utterance is empty");

    if (backend.lexicon_appraisal()) {
        StimulusAppraisal psi;
        const std::string text = lowercase(utterance);
        std::string matched;
        for (const std::string& cue : empathy_cues()) {
            if (text.find(cue) != std::string::npos) {
                psi.empathy = 1.0;
                matched += (matched.empty() ? "" : ", ") + cue;
            }
        }
        for (const std::string& cue : pressure_cues()) {
            if (text.find(cue) != std::string::npos) {
                psi.pressure = 1.0;
                matched += (matched.empty() ? "" : ", ") + cue;
            }
        }
        psi.rationale = matched.empty() ? "no cue words" : "cues: " + matched;
        return psi;
    }

    backends::ModelRequest request;
    request.role_tag = backends::RoleTag::PatientCoT;
    request.contract = backends::ResponseContract::json("appraisal");
    request.messages = {
        {backends::Speaker::System,
         "Rate the doctor's utterance as perceived by an anxious patient. Reply with JSON "
         "{\"empathy\": e, \"pressure\": p, \"rationale\": \"...\"} where e and p lie in [-1, 1]."},
        {backends::Speaker::User, utterance}};
    backends::ModelResponse response = backend.complete(request);
    StimulusAppraisal psi;
    psi.empathy = std::clamp(response.parsed->at("empathy").get<double>(), -1.0, 1.0);
    psi.pressure = std::clamp(response.parsed->at("pressure").get<double>(), -1.0, 1.0);
    psi.rationale = response.parsed->value("rationale", "");
    return psi;
}

AgentState update_state(const AgentState& s, const StimulusAppraisal& psi, double lambda,
                        double pressure_trust_coupling, double empathy_stress_coupling) {
    if (lambda < 0.0) fail(ErrorCode::InvalidArgument, "lambda must be >= 0");
    AgentState next;
    next.trust = clamp01(s.trust + lambda * psi.empathy -
                         lambda * pressure_trust_coupling * psi.pressure);
    next.stress = clamp01(s.stress + lambda * psi.pressure -
                          lambda * empathy_stress_coupling * psi.empathy);
    return next;
}

PatientStrategy select_patient_strategy(const profiles::PatientProfile& profile,
                                        const AgentState& s, const std::string& topic,
                                        const AgentConfig& config) {
    // Defense strictly precedes disclosure.
    if (s.stress > config.stress_threshold)
        return s.stress >= config.breakdown_threshold ? PatientStrategy::Breakdown
                                                      : PatientStrategy::Deflect;
    if (s.trust > config.trust_threshold) return PatientStrategy::Disclose;
    switch (profile.honesty.for_topic(topic)) {
        case profiles::DeceptionStrategy::Concealment: return PatientStrategy::Minimize;
        case profiles::DeceptionStrategy::Exaggeration: return PatientStrategy::ExaggerateSymptom;
        case profiles::DeceptionStrategy::Frankness: break;
    }
    return PatientStrategy::Neutral;
}

// ---------------------------------------------------------------------------
// Patient turn

namespace {

std::string normalize_cue(const std::string& cue) {
    const std::string l = lowercase(cue);
    auto has = [&l](const char* s) { return l.find(s) != std::string::npos; };
    if (has("eye") || has("looks down") || has("gaze")) return "eye-avert";
    if (has("fidget")) return "fidgeting";
    if (has("pause") || has("silen")) return "long-pause";
    if (has("tear") || has("cry")) return "tearful";
    if (has("sigh")) return "sighs";
    if (has("tense") || has("stiff")) return "tense";
    if (has("slump") || has("shoulder")) return "slumped";
    if (has("restless") || has("shift")) return "restless";
    return cue.size() > 10 ? cue.substr(0, 10) : cue;
}

std::string render_transcript(const std::vector<session::TurnRecord>& transcript,
                              std::size_t tail = 0) {
    std::ostringstream out;
    std::size_t start = 0;
    if (tail > 0 && transcript.size() > tail) start = transcript.size() - tail;
    for (std::size_t i = start; i < transcript.size(); ++i) {
        const session::TurnRecord& t = transcript[i];
        out << "Round " << t.round << "\nDoctor: " << t.doctor_utterance << "\n";
        if (t.patient_utterance) out << "Patient: " << *t.patient_utterance << "\n";
    }
    return out.str();
}

std::string profile_json_text(const profiles::PatientProfile& profile) {
    // The patient-facing prompts must not leak the latent ground truth.
    Json j = profile;
    j.erase("ground_truth");
    return j.dump();
}

std::string breakdown_render(const std::string& utterance, int word_cap) {
    std::istringstream in(utterance);
    std::ostringstream out;
    out << "I... I don't know.";
    std::string word;
    int kept = 0;
    while (kept < word_cap && (in >> word)) {
        out << ' ' << word;
        ++kept;
    }
    if (in >> word) out << " ...";
    return out.str();
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (const std::string& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
}

}  // namespace

PatientTurnResult patient_turn(const profiles::PatientProfile& profile, const AgentState& state,
                               const std::string& doctor_utterance, const std::string& topic,
                               const backends::BackendSet& backends,
                               const prompts::PromptLibrary& prompts, const AgentConfig& config,
                               std::mt19937_64& rng) {
    backends::ModelBackend& cot = backends.get(backends::RoleTag::PatientCoT);
    const StimulusAppraisal psi = appraise(doctor_utterance, cot);
    const AgentState next = update_state(state, psi, config.lambda,
                                         config.pressure_trust_coupling,
                                         config.empathy_stress_coupling);
    const PatientStrategy strategy = select_patient_strategy(profile, next, topic, config);

    backends::ModelRequest cot_request;
    cot_request.role_tag = backends::RoleTag::PatientCoT;
    cot_request.contract = backends::ResponseContract::json("patient_cot");
    cot_request.decode.temperature = config.cot_temperature;
    cot_request.messages = {
        {backends::Speaker::System,
         prompts.render("patient_cot_system", {{"profile", profile_json_text(profile)},
                                               {"doctor_input", doctor_utterance}})},
        {backends::Speaker::User,
         "Engine state: trust=" + std::to_string(next.trust) +
             " stress=" + std::to_string(next.stress) + " strategy=" + to_string(strategy) +
             " topic=" + topic + ". Produce the JSON object."}};
    const backends::ModelResponse cot_response = backends.get(backends::RoleTag::PatientCoT)
                                                     .complete(cot_request);
    const Json& parsed = *cot_response.parsed;

    PatientDirective directive;
    directive.thought_trace = parsed.at("thought_trace").get<std::string>();
    directive.strategy_directive = parsed.at("strategy_directive").get<std::string>();
    directive.next_state = next;
    directive.strategy = strategy;
    if (strategy == PatientStrategy::Breakdown) {
        directive.allow_contradiction = true;
        directive.length_budget_words = config.breakdown_word_cap;
    }

    // Non-verbal markers injected with probability proportional to stress.
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    if (parsed.contains("non_verbal_cues")) {
        for (const Json& cue : parsed.at("non_verbal_cues")) {
            if (!cue.is_string()) continue;
            if (uniform(rng) < next.stress)
                directive.nonverbal_cues.push_back(normalize_cue(cue.get<std::string>()));
        }
    }

    backends::ModelRequest chat_request;
    chat_request.role_tag = backends::RoleTag::PatientChat;
    chat_request.contract = backends::ResponseContract::free_text();
    chat_request.decode.temperature = config.chat_temperature;
    chat_request.messages = {
        {backends::Speaker::System,
         prompts.render("patient_chat_system",
                        {{"strategy_directive", directive.strategy_directive},
                         {"non_verbal_cues", join_list(directive.nonverbal_cues)}})},
        {backends::Speaker::User, "Doctor: " + doctor_utterance}};
    std::string utterance =
        backends.get(backends::RoleTag::PatientChat).complete(chat_request).text;
    if (strategy == PatientStrategy::Breakdown)
        utterance = breakdown_render(utterance, config.breakdown_word_cap);

    return {std::move(directive), std::move(utterance)};
}

// ---------------------------------------------------------------------------
// Suspicion and decisions

void update_suspicion(SuspicionTracker& tracker, const SuspicionEvidence& evidence,
                      const AgentConfig& config, int round) {
    if (evidence.cot_estimate < 0.0 || evidence.cot_estimate > 1.0)
        fail(ErrorCode::InvalidArgument, "cot_estimate outside [0,1]");
    const double flags = static_cast<double>(evidence.inconsistency_flags.size()) +
                         (evidence.nonverbal_mismatch ? 1.0 : 0.0);
    tracker.xi = clamp01((1.0 - config.alpha) * tracker.xi +
                         config.alpha * evidence.cot_estimate + config.beta * flags);
    tracker.history.emplace_back(round, tracker.xi);
    if (evidence.direction_hint != SuspectedDirection::None)
        tracker.suspected_direction = evidence.direction_hint;
}

Decision decide(const SuspicionTracker& tracker, const session::SaturationStatus& saturation) {
    if (saturation.terminate_ok()) return Decision::Terminate;
    return tracker.xi > tracker.theta_susp ? Decision::Investigate : Decision::Proceed;
}

// ---------------------------------------------------------------------------
// Evaluator turn

namespace {

std::string normalize_topic(const std::string& raw) {
    const std::string l = lowercase(raw);
    if (profiles::is_known_topic(l)) return l;
    auto has = [&l](const char* s) { return l.find(s) != std::string::npos; };
    if (has("sleep") || has("insomnia")) return "sleep";
    if (has("risk") || has("suicid") || has("harm")) return "risk";
    if (has("anxi") || has("worry") || has("panic")) return "anxiety";
    if (has("trauma") || has("flashback") || has("nightmare")) return "trauma";
    if (has("interest") || has("anhedon")) return "interest";
    if (has("energy") || has("fatigue")) return "energy";
    if (has("appetite") || has("eat") || has("weight")) return "appetite";
    if (has("concentrat") || has("focus") || has("attention")) return "concentration";
    if (has("guilt") || has("worthless")) return "guilt";
    if (has("somatic") || has("body") || has("physical")) return "somatic";
    if (has("social") || has("friend") || has("family")) return "social";
    if (has("function") || has("work") || has("daily")) return "functioning";
    if (has("mood") || has("depress") || has("sad")) return "mood";
    return "";
}

// First uncovered required topic; once everything is covered the inquiry
// cycles back through the required set for item-level depth.
std::string next_uncovered_topic(const session::SaturationStatus& saturation) {
    for (const std::string& t : saturation.required_topics)
        if (!saturation.domains_covered.count(t)) return t;
    if (!saturation.required_topics.empty())
        return saturation.required_topics[static_cast<std::size_t>(saturation.rounds) %
                                          saturation.required_topics.size()];
    return "functioning";
}

std::string plan_scale_names(const scales::ScalePlan& plan) {
    std::vector<std::string> names;
    for (const auto& e : plan.clinician_scales) names.push_back(e.abbr);
    for (const auto& e : plan.self_report_scales) names.push_back(e.abbr);
    return join_list(names);
}

}  // namespace

EvaluatorTurnResult evaluator_turn(const scales::ScalePlan& plan,
                                   const std::vector<session::TurnRecord>& transcript,
                                   SuspicionTracker& tracker,
                                   const session::SaturationStatus& saturation,
                                   const backends::BackendSet& backends,
                                   const prompts::PromptLibrary& prompts,
                                   const AgentConfig& config, int round) {
    backends::ModelRequest cot_request;
    cot_request.role_tag = backends::RoleTag::EvaluatorCoT;
    cot_request.contract = backends::ResponseContract::json("evaluator_cot");
    cot_request.decode.temperature = config.cot_temperature;
    std::string coverage = "covered topics: ";
    coverage += join_list({saturation.domains_covered.begin(), saturation.domains_covered.end()});
    coverage += "; required: " + join_list(saturation.required_topics);
    cot_request.messages = {
        {backends::Speaker::System,
         prompts.render("evaluator_cot_system", {{"scale_name", plan_scale_names(plan)}})},
        {backends::Speaker::User,
         render_transcript(transcript, 6) + "\n" + coverage + "\nProduce the JSON object."}};
    const backends::ModelResponse cot_response =
        backends.get(backends::RoleTag::EvaluatorCoT).complete(cot_request);
    const Json& parsed = *cot_response.parsed;

    SuspicionEvidence evidence;
    evidence.cot_estimate = clamp01(parsed.at("suspicion_score").get<double>());
    if (parsed.contains("inconsistency_flags"))
        for (const Json& flag : parsed.at("inconsistency_flags"))
            if (flag.is_string()) evidence.inconsistency_flags.push_back(flag.get<std::string>());
    evidence.nonverbal_mismatch = parsed.value("nonverbal_mismatch", false);
    if (parsed.contains("suspected_direction"))
        evidence.direction_hint =
            direction_from_string(parsed.at("suspected_direction").get<std::string>());
    update_suspicion(tracker, evidence, config, round);

    const Decision decision = decide(tracker, saturation);
    tracker.decision_log.emplace_back(round, decision);

    EvaluatorDirective directive;
    directive.reasoning_step = parsed.at("reasoning_step").get<std::string>();
    directive.cot_estimate = evidence.cot_estimate;
    directive.decision = decision;
    directive.guidance_for_chat = parsed.at("guidance_for_chat").get<std::string>();
    directive.inconsistency_flags = evidence.inconsistency_flags;

    if (decision == Decision::Terminate) return {std::move(directive), ""};

    if (decision == Decision::Investigate) {
        const std::string flagged = normalize_topic(parsed.at("target_topic").get<std::string>());
        directive.target_topic = flagged.empty() ? next_uncovered_topic(saturation) : flagged;
    } else {
        directive.target_topic = next_uncovered_topic(saturation);
    }

    backends::ModelRequest chat_request;
    chat_request.role_tag = backends::RoleTag::EvaluatorChat;
    chat_request.contract = backends::ResponseContract::free_text();
    chat_request.decode.temperature = config.chat_temperature;
    chat_request.messages = {
        {backends::Speaker::System,
         prompts.render("evaluator_chat_system",
                        {{"guidance_for_chat", directive.guidance_for_chat},
                         {"target_topic", directive.target_topic}})},
        {backends::Speaker::User, render_transcript(transcript, 2) + "Next doctor turn:"}};
    std::string utterance =
        backends.get(backends::RoleTag::EvaluatorChat).complete(chat_request).text;
    return {std::move(directive), std::move(utterance)};
}

EvaluatorTurnResult evaluator_turn_passive(const session::SaturationStatus& saturation,
                                           int /*round*/) {
    EvaluatorTurnResult result;
    result.directive.reasoning_step = "linear inquiry protocol";
    result.directive.cot_estimate = 0.0;
    if (saturation.terminate_ok()) {
        result.directive.decision = Decision::Terminate;
        return result;
    }
    result.directive.decision = Decision::Proceed;
    result.directive.target_topic = next_uncovered_topic(saturation);
    result.directive.guidance_for_chat = "ask the next scheduled item";
    result.utterance = "Let's move to the next item. How have things been with your " +
                       result.directive.target_topic + " recently?";
    return result;
}

// ---------------------------------------------------------------------------
// Assessor

scales::Domain route_primary_domain(const std::string& chief_complaint) {
    static const std::vector<std::string> depression_kw = {
        "depress", "flat",      "down",    "sad",    "hopeless", "empty",   "no interest",
        "lost interest", "worthless", "crying", "fatigue", "low mood", "tired all"};
    static const std::vector<std::string> anxiety_kw = {
        "anxi", "worry", "panic", "nervous", "on edge", "tense", "fear", "racing heart",
        "restless"};
    static const std::vector<std::string> trauma_kw = {
        "trauma", "nightmare", "flashback", "assault", "accident", "abuse", "startle",
        "intrusive"};

    const std::string text = lowercase(chief_complaint);
    auto score = [&text](const std::vector<std::string>& keywords) {
        int n = 0;
        for (const std::string& kw : keywords)
            if (text.find(kw) != std::string::npos) ++n;
        return n;
    };
    const int d = score(depression_kw);
    const int a = score(anxiety_kw);
    const int t = score(trauma_kw);
    if (t > d && t > a) return scales::Domain::Ptsd;
    if (a > d && a >= t) return scales::Domain::Anxiety;
    // Depression is the default screening battery, healthy presentations included.
    return scales::Domain::Depression;
}

namespace {

scales::ScalePlan plan_from_proposal(const Json& proposal, const scales::Repository& repo) {
    scales::ScalePlan plan;
    auto fill = [&repo](const Json& list, std::vector<scales::PlanEntry>& out) {
        for (const Json& entry : list) {
            const std::string name = entry.at("name").get<std::string>();
            const scales::ScaleDefinition* def = repo.find(name);
            out.push_back({def ? def->abbr : name, entry.value("reason", "")});
        }
    };
    fill(proposal.at("clinician_scales"), plan.clinician_scales);
    fill(proposal.at("self_report_scales"), plan.self_report_scales);
    return plan;
}

std::string violations_text(const scales::ValidationReport& report) {
    std::string out;
    for (const scales::Violation& v : report.violations)
        out += (out.empty() ? "" : "; ") + v.code + ": " + v.message;
    return out;
}

}  // namespace

scales::ScalePlan assessor_select(const profiles::Demographics& demographics,
                                  const std::string& chief_complaint,
                                  const scales::Repository& repo,
                                  const backends::BackendSet& backends,
                                  const prompts::PromptLibrary& prompts,
                                  const AgentConfig& config) {
    const std::string demo_text = std::to_string(demographics.age) + "-year-old " +
                                  profiles::to_string(demographics.gender) +
                                  (demographics.occupation.empty() ? ""
                                                                   : ", " + demographics.occupation);
    backends::ModelRequest request;
    request.role_tag = backends::RoleTag::AssessorCoT;
    request.contract = backends::ResponseContract::json("scale_plan");
    request.decode.temperature = config.cot_temperature;
    request.messages = {{backends::Speaker::System,
                         prompts.render("assessor_system", {{"demographics", demo_text},
                                                            {"chief_complaint", chief_complaint}})},
                        {backends::Speaker::User, "Produce the JSON object."}};

    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            backends::ModelResponse response =
                backends.get(backends::RoleTag::AssessorCoT).complete(request);
            scales::ScalePlan plan = plan_from_proposal(*response.parsed, repo);
            scales::ValidationReport report = scales::validate_plan(plan, repo);
            if (report.ok()) return plan;
            if (attempt == 0) {
                request.messages.push_back({backends::Speaker::Assistant, response.text});
                request.messages.push_back(
                    {backends::Speaker::User, "The proposed plan is invalid: " +
                                                  violations_text(report) +
                                                  ". Propose a corrected JSON plan."});
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SchemaViolation && e.code() != ErrorCode::UnscriptedRequest)
                throw;
            break;  // backend cannot produce a usable plan; fall back
        }
    }

    const scales::Domain domain = route_primary_domain(chief_complaint);
    const scales::ScaleDefinition* clinician = repo.first_of(domain, scales::Admin::ClinicianRated);
    const scales::ScaleDefinition* self = repo.first_of(domain, scales::Admin::SelfReport);
    if (!clinician || !self)
        fail(ErrorCode::BackendFailure,
             "no valid plan and repository lacks scales for domain " + scales::to_string(domain));
    scales::ScalePlan plan;
    plan.clinician_scales.push_back({clinician->abbr, "keyword-routed fallback selection"});
    plan.self_report_scales.push_back({self->abbr, "keyword-routed fallback selection"});
    return plan;
}

// ---------------------------------------------------------------------------
// Rating phase

namespace {

struct ItemProposal {
    std::vector<int> items;
    std::string interpretation;
    std::map<int, std::vector<int>> evidence;
    SuspectedDirection direction = SuspectedDirection::None;
};

ItemProposal request_items(const scales::ScaleDefinition& def, backends::ModelRequest request,
                           backends::ModelBackend& backend, std::size_t transcript_size,
                           bool evidence_required) {
    for (int attempt = 0; attempt < 2; ++attempt) {
        backends::ModelResponse response = backend.complete(request);
        const Json& parsed = *response.parsed;
        ItemProposal proposal;
        proposal.items = parsed.at("item_scores").get<std::vector<int>>();
        proposal.interpretation = parsed.value("interpretation", "");
        if (parsed.contains("suspected_direction"))
            proposal.direction =
                direction_from_string(parsed.at("suspected_direction").get<std::string>());

        std::string problem;
        if (static_cast<int>(proposal.items.size()) != def.item_count) {
            problem = "expected " + std::to_string(def.item_count) + " item scores, got " +
                      std::to_string(proposal.items.size());
        } else {
            for (int v : proposal.items)
                if (v < def.item_min || v > def.item_max) {
                    problem = "item score " + std::to_string(v) + " outside [" +
                              std::to_string(def.item_min) + "," + std::to_string(def.item_max) +
                              "]";
                    break;
                }
        }
        if (problem.empty() && parsed.contains("dialogue_evidence")) {
            for (auto& [key, value] : parsed.at("dialogue_evidence").items()) {
                if (key.empty() ||
                    key.find_first_not_of("0123456789") != std::string::npos) {
                    problem = "dialogue_evidence keys must be item indices, got '" + key + "'";
                    break;
                }
                const int item = std::stoi(key);
                if (item >= def.item_count) {
                    problem = "dialogue_evidence cites item " + key + " of a " +
                              std::to_string(def.item_count) + "-item instrument";
                    break;
                }
                std::vector<int> rounds = value.get<std::vector<int>>();
                for (int r : rounds)
                    if (r < 0 || r >= static_cast<int>(transcript_size))
                        fail(ErrorCode::OutOfRange,
                             def.abbr + ": dialogue evidence references round " +
                                 std::to_string(r) + " of a " + std::to_string(transcript_size) +
                                 "-round transcript");
                proposal.evidence[item] = std::move(rounds);
            }
        }
        if (problem.empty() && evidence_required && proposal.evidence.empty())
            problem = "dialogue_evidence is required for clinician-rated scales";

        if (problem.empty()) return proposal;
        if (attempt == 0) {
            request.messages.push_back({backends::Speaker::Assistant, response.text});
            request.messages.push_back(
                {backends::Speaker::User,
                 "Invalid scores: " + problem + ". Reply again with corrected JSON."});
            continue;
        }
        if (problem.rfind("expected", 0) == 0)
            fail(ErrorCode::ItemCountMismatch, def.abbr + ": " + problem);
        fail(ErrorCode::ItemOutOfRange, def.abbr + ": " + problem);
    }
    fail(ErrorCode::BackendFailure, "unreachable");
}

std::vector<int> shift_items(const scales::ScaleDefinition& def, std::vector<int> items,
                             int delta) {
    for (int& v : items) v = std::clamp(v + delta, def.item_min, def.item_max);
    return items;
}

std::map<std::string, std::string> scoring_context(const profiles::PatientProfile& profile) {
    return {{"gender", profiles::to_string(profile.demographics.gender)}};
}

}  // namespace

scales::ScaleResponse patient_self_report(const profiles::PatientProfile& profile,
                                          const scales::ScaleDefinition& def,
                                          const std::vector<session::TurnRecord>& transcript,
                                          const backends::BackendSet& backends,
                                          const prompts::PromptLibrary& prompts,
                                          const AgentConfig& config) {
    if (def.admin != scales::Admin::SelfReport)
        fail(ErrorCode::InvalidArgument, def.abbr + " is not a self-report instrument");

    backends::ModelRequest request;
    request.role_tag = backends::RoleTag::PatientCoT;
    request.contract = backends::ResponseContract::json("self_report");
    request.decode.temperature = config.cot_temperature;
    request.messages = {
        {backends::Speaker::System,
         prompts.render("patient_selfreport_system",
                        {{"scale_name", def.name},
                         {"item_count", std::to_string(def.item_count)},
                         {"item_min", std::to_string(def.item_min)},
                         {"item_max", std::to_string(def.item_max)},
                         {"profile", profile_json_text(profile)}})},
        {backends::Speaker::User, render_transcript(transcript, 8) + "Produce the JSON object."}};

    ItemProposal proposal = request_items(def, request, backends.get(backends::RoleTag::PatientCoT),
                                          transcript.size(), /*evidence_required=*/false);

    // Honesty bias: concealment pulls toward the floor, exaggeration toward
    // the ceiling, frankness reports as-is.
    int delta = 0;
    if (profile.honesty.strategy == profiles::DeceptionStrategy::Concealment)
        delta = -config.self_report_bias;
    else if (profile.honesty.strategy == profiles::DeceptionStrategy::Exaggeration)
        delta = config.self_report_bias;
    const std::vector<int> items = shift_items(def, proposal.items, delta);

    const scales::ScoreResult scored = scales::score_scale(def, items, scoring_context(profile));
    scales::ScaleResponse response;
    response.scale_abbr = def.abbr;
    response.item_scores = items;
    response.total_score = scored.total;
    response.severity = scored.severity;
    response.interpretation =
        proposal.interpretation.empty() ? scored.severity : proposal.interpretation;
    response.dialogue_evidence = std::move(proposal.evidence);
    response.rater = scales::Rater::Patient;
    return response;
}

std::vector<scales::ScaleResponse> evaluator_rate(const scales::ScalePlan& plan,
                                                  const std::vector<session::TurnRecord>& transcript,
                                                  SuspicionTracker& tracker,
                                                  const scales::Repository& repo,
                                                  const backends::BackendSet& backends,
                                                  const prompts::PromptLibrary& prompts,
                                                  const AgentConfig& config) {
    std::vector<scales::ScaleResponse> responses;
    for (const scales::PlanEntry& entry : plan.clinician_scales) {
        const scales::ScaleDefinition& def = repo.get(entry.abbr);

        backends::ModelRequest request;
        request.role_tag = backends::RoleTag::EvaluatorCoT;
        request.contract = backends::ResponseContract::json("clinician_rating");
        request.decode.temperature = config.cot_temperature;
        request.messages = {
            {backends::Speaker::System,
             prompts.render("evaluator_rating_system",
                            {{"scale_name", def.name},
                             {"item_count", std::to_string(def.item_count)},
                             {"item_min", std::to_string(def.item_min)},
                             {"item_max", std::to_string(def.item_max)},
                             {"suspicion_score", std::to_string(tracker.xi)}})},
            {backends::Speaker::User, render_transcript(transcript) + "Produce the JSON object."}};

        ItemProposal proposal =
            request_items(def, request, backends.get(backends::RoleTag::EvaluatorCoT),
                          transcript.size(), /*evidence_required=*/true);
        if (proposal.direction != SuspectedDirection::None)
            tracker.suspected_direction = proposal.direction;

        // Suspicion-aware correction of the transcript-literal estimate: a
        // concealing narrator is rated up, an exaggerating one down.
        std::vector<int> items = proposal.items;
        if (tracker.xi > tracker.theta_susp) {
            const SuspectedDirection direction = proposal.direction != SuspectedDirection::None
                                                     ? proposal.direction
                                                     : tracker.suspected_direction;
            if (direction == SuspectedDirection::Concealment)
                items = shift_items(def, items, config.rating_adjustment);
            else if (direction == SuspectedDirection::Exaggeration)
                items = shift_items(def, items, -config.rating_adjustment);
        }

        const scales::ScoreResult scored = scales::score_scale(def, items);
        scales::ScaleResponse response;
        response.scale_abbr = def.abbr;
        response.item_scores = items;
        response.total_score = scored.total;
        response.severity = scored.severity;
        response.interpretation =
            proposal.interpretation.empty() ? scored.severity : proposal.interpretation;
        response.dialogue_evidence = std::move(proposal.evidence);
        response.rater = scales::Rater::Evaluator;
        responses.push_back(std::move(response));
    }
    return responses;
}

// ---------------------------------------------------------------------------
// Diagnostician

profiles::Severity aggregate_severity(const std::map<std::string, scales::ScaleResponse>& reports,
                                      const scales::Repository& repo) {
    int best = 0;
    for (const auto& [abbr, response] : reports) {
        const scales::ScaleDefinition* def = repo.find(abbr);
        if (def && (def->mode == scales::ScoringMode::Classification ||
                    def->mode == scales::ScoringMode::AlgorithmStub))
            continue;
        best = std::max(best, scales::severity_rank_from_label(response.severity));
    }
    switch (best) {
        case 1: return profiles::Severity::Mild;
        case 2: return profiles::Severity::Moderate;
        case 3: return profiles::Severity::Severe;
        default: return profiles::Severity::NotApplicable;
    }
}

namespace {

int severity_rank(profiles::Severity s) {
    switch (s) {
        case profiles::Severity::NotApplicable: return 0;
        case profiles::Severity::Mild: return 1;
        case profiles::Severity::Moderate: return 2;
        case profiles::Severity::Severe: return 3;
    }
    return 0;
}

std::string reports_summary(const std::map<std::string, scales::ScaleResponse>& reports) {
    std::string out;
    for (const auto& [abbr, r] : reports)
        out += (out.empty() ? "" : "; ") + abbr + "=" + std::to_string(r.total_score) + " (" +
               r.severity + ")";
    return out.empty() ? "none" : out;
}

std::vector<EvidenceRef> parse_key_evidence(const Json& list, std::size_t transcript_size) {
    std::vector<EvidenceRef> out;
    for (const Json& item : list) {
        EvidenceRef ref;
        if (item.is_number_integer()) {
            ref.round = item.get<int>();
        } else if (item.is_object()) {
            ref.round = item.at("round").get<int>();
            ref.note = item.value("note", "");
        } else if (item.is_string()) {
            const std::string text = item.get<std::string>();
            std::size_t i = 0;
            while (i < text.size() && !isdigit(static_cast<unsigned char>(text[i]))) ++i;
            if (i == text.size())
                fail(ErrorCode::SchemaViolation,
                     "key_evidence entry has no round reference: " + text);
            ref.round = std::stoi(text.substr(i));
            ref.note = text;
        } else {
            fail(ErrorCode::SchemaViolation, "key_evidence entries must be rounds or strings");
        }
        if (ref.round < 0 || ref.round >= static_cast<int>(transcript_size))
            fail(ErrorCode::SchemaViolation,
                 "key_evidence references round " + std::to_string(ref.round) +
                     " outside the transcript");
        out.push_back(std::move(ref));
    }
    return out;
}

}  // namespace

DiagnosticReport diagnose(const std::vector<session::TurnRecord>& transcript,
                          const std::map<std::string, scales::ScaleResponse>& self_reports,
                          const std::map<std::string, scales::ScaleResponse>& clinician_reports,
                          const SuspicionTracker& tracker, const scales::ScalePlan& plan,
                          const scales::Repository& repo, const backends::BackendSet& backends,
                          const prompts::PromptLibrary& prompts, const AgentConfig& config) {
    for (const scales::PlanEntry& e : plan.self_report_scales)
        if (!self_reports.count(e.abbr))
            fail(ErrorCode::IncompleteReports, "missing self-report for " + e.abbr);
    for (const scales::PlanEntry& e : plan.clinician_scales)
        if (!clinician_reports.count(e.abbr))
            fail(ErrorCode::IncompleteReports, "missing clinician report for " + e.abbr);

    backends::ModelRequest request;
    request.role_tag = backends::RoleTag::Diagnostician;
    request.contract = backends::ResponseContract::json("diagnosis");
    request.decode.temperature = config.cot_temperature;
    request.messages = {
        {backends::Speaker::System,
         prompts.render("diagnostician_system",
                        {{"patient_score", reports_summary(self_reports)},
                         {"evaluator_score", reports_summary(clinician_reports)},
                         {"suspicion_score", std::to_string(tracker.xi)},
                         {"suspected_direction", to_string(tracker.suspected_direction)}})},
        {backends::Speaker::User, render_transcript(transcript) + "Produce the JSON object."}};
    const backends::ModelResponse response =
        backends.get(backends::RoleTag::Diagnostician).complete(request);
    const Json& parsed = *response.parsed;

    DiagnosticReport report;
    report.status =
        profiles::status_from_string(parsed.at("final_diagnosis").at("status").get<std::string>());
    report.symptom_match = parsed.at("reasoning").at("symptom_match").get<std::string>();
    report.key_evidence =
        parse_key_evidence(parsed.at("reasoning").at("key_evidence"), transcript.size());
    if (report.key_evidence.empty())
        fail(ErrorCode::SchemaViolation, "key_evidence must not be empty");

    const profiles::Severity self_sev = aggregate_severity(self_reports, repo);
    const profiles::Severity clin_sev = aggregate_severity(clinician_reports, repo);
    std::string rule;
    profiles::Severity severity;

    if (report.status == profiles::ClinicalStatus::Healthy) {
        severity = profiles::Severity::NotApplicable;
        rule = "healthy status; severity not applicable";
    } else if (self_sev == clin_sev) {
        severity = self_sev;
        rule = "self-rated and clinician-rated severities agree";
    } else if (tracker.xi > tracker.theta_susp) {
        if (tracker.suspected_direction == SuspectedDirection::Concealment) {
            severity = clin_sev;
            rule = "concealment flagged: clinician-rated severity preferred over self-report";
        } else if (tracker.suspected_direction == SuspectedDirection::Exaggeration) {
            severity = severity_rank(self_sev) < severity_rank(clin_sev) ? self_sev : clin_sev;
            rule = "exaggeration flagged: severity downgraded to the lower estimate";
        } else {
            severity = clin_sev;
            rule = "suspicion without direction: clinician-rated severity preferred";
        }
    } else {
        severity = clin_sev;
        rule = "disagreement below suspicion threshold: clinician-rated severity preferred";
    }
    if (report.status != profiles::ClinicalStatus::Healthy &&
        severity == profiles::Severity::NotApplicable)
        severity = profiles::Severity::Mild;  // screening floor for a non-healthy status
    report.severity = severity;

    const std::string cot_note =
        parsed.at("reasoning").at("discrepancy_resolution").get<std::string>();
    report.discrepancy_resolution = rule + (cot_note.empty() ? "" : ". " + cot_note);
    return report;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(Json& j, const DiagnosticReport& r) {
    Json evidence = Json::array();
    for (const EvidenceRef& e : r.key_evidence)
        evidence.push_back(Json{{"round", e.round}, {"note", e.note}});
    j = Json{{"status", profiles::to_string(r.status)},
             {"severity", profiles::to_string(r.severity)},
             {"symptom_match", r.symptom_match},
             {"discrepancy_resolution", r.discrepancy_resolution},
             {"key_evidence", evidence}};
}

void from_json(const Json& j, DiagnosticReport& r) {
    r.status = profiles::status_from_string(j.at("status").get<std::string>());
    r.severity = profiles::severity_from_string(j.at("severity").get<std::string>());
    r.symptom_match = j.value("symptom_match", "");
    r.discrepancy_resolution = j.value("discrepancy_resolution", "");
    r.key_evidence.clear();
    for (const Json& e : j.at("key_evidence"))
        r.key_evidence.push_back({e.at("round").get<int>(), e.value("note", "")});
}

void to_json(Json& j, const SuspicionTracker& t) {
    Json history = Json::array();
    for (const auto& [round, xi] : t.history) history.push_back(Json{{"round", round}, {"xi", xi}});
    Json decisions = Json::array();
    for (const auto& [round, d] : t.decision_log)
        decisions.push_back(Json{{"round", round}, {"decision", to_string(d)}});
    j = Json{{"xi", t.xi},
             {"theta_susp", t.theta_susp},
             {"history", history},
             {"decision_log", decisions},
             {"suspected_direction", to_string(t.suspected_direction)}};
}

void from_json(const Json& j, SuspicionTracker& t) {
    t.xi = j.at("xi").get<double>();
    t.theta_susp = j.at("theta_susp").get<double>();
    t.history.clear();
    for (const Json& h : j.at("history"))
        t.history.emplace_back(h.at("round").get<int>(), h.at("xi").get<double>());
    t.decision_log.clear();
    for (const Json& d : j.at("decision_log")) {
        const std::string name = d.at("decision").get<std::string>();
        Decision decision = Decision::Proceed;
        if (name == "Investigate") decision = Decision::Investigate;
        if (name == "Terminate") decision = Decision::Terminate;
        t.decision_log.emplace_back(d.at("round").get<int>(), decision);
    }
    t.suspected_direction = direction_from_string(j.value("suspected_direction", "none"));
}

}  // namespace intake::agents
