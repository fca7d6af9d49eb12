#include "intake/session.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>
#include <thread>

namespace intake::session {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config

void SessionConfig::validate() const {
    agent.validate();
    if (min_rounds < 1) fail(ErrorCode::ConfigError, "min_rounds must be >= 1");
    if (round_cap <= min_rounds)
        fail(ErrorCode::ConfigError, "round_cap must exceed min_rounds");
    if (workers < 1) fail(ErrorCode::ConfigError, "workers must be >= 1");
    if (initial_trust < 0.0 || initial_trust > 1.0 || initial_stress < 0.0 ||
        initial_stress > 1.0)
        fail(ErrorCode::ConfigError, "initial state outside [0,1]");
}

// `workers` and `stamp_time` are execution details: they must not shift the
// config hash, or parallel and serial runs of one batch would differ in bytes.
Json SessionConfig::to_json_value() const {
    return Json{{"lambda", agent.lambda},
                {"pressure_trust_coupling", agent.pressure_trust_coupling},
                {"empathy_stress_coupling", agent.empathy_stress_coupling},
                {"stress_th", agent.stress_threshold},
                {"trust_th", agent.trust_threshold},
                {"breakdown_th", agent.breakdown_threshold},
                {"alpha", agent.alpha},
                {"beta", agent.beta},
                {"theta_susp", agent.theta_susp},
                {"self_report_bias", agent.self_report_bias},
                {"rating_adjustment", agent.rating_adjustment},
                {"cot_temperature", agent.cot_temperature},
                {"chat_temperature", agent.chat_temperature},
                {"breakdown_word_cap", agent.breakdown_word_cap},
                {"min_rounds", min_rounds},
                {"round_cap", round_cap},
                {"trace_internal", trace_internal},
                {"evaluator_cot", evaluator_cot},
                {"initial_trust", initial_trust},
                {"initial_stress", initial_stress}};
}

SessionConfig SessionConfig::from_json_value(const Json& j) {
    SessionConfig c;
    c.agent.lambda = j.value("lambda", c.agent.lambda);
    c.agent.pressure_trust_coupling =
        j.value("pressure_trust_coupling", c.agent.pressure_trust_coupling);
    c.agent.empathy_stress_coupling =
        j.value("empathy_stress_coupling", c.agent.empathy_stress_coupling);
    c.agent.stress_threshold = j.value("stress_th", c.agent.stress_threshold);
    c.agent.trust_threshold = j.value("trust_th", c.agent.trust_threshold);
    c.agent.breakdown_threshold = j.value("breakdown_th", c.agent.breakdown_threshold);
    c.agent.alpha = j.value("alpha", c.agent.alpha);
    c.agent.beta = j.value("beta", c.agent.beta);
    c.agent.theta_susp = j.value("theta_susp", c.agent.theta_susp);
    c.agent.self_report_bias = j.value("self_report_bias", c.agent.self_report_bias);
    c.agent.rating_adjustment = j.value("rating_adjustment", c.agent.rating_adjustment);
    c.agent.cot_temperature = j.value("cot_temperature", c.agent.cot_temperature);
    c.agent.chat_temperature = j.value("chat_temperature", c.agent.chat_temperature);
    c.agent.breakdown_word_cap = j.value("breakdown_word_cap", c.agent.breakdown_word_cap);
    c.min_rounds = j.value("min_rounds", c.min_rounds);
    c.round_cap = j.value("round_cap", c.round_cap);
    c.trace_internal = j.value("trace_internal", c.trace_internal);
    c.workers = j.value("workers", c.workers);
    c.evaluator_cot = j.value("evaluator_cot", c.evaluator_cot);
    c.initial_trust = j.value("initial_trust", c.initial_trust);
    c.initial_stress = j.value("initial_stress", c.initial_stress);
    c.stamp_time = j.value("stamp_time", c.stamp_time);
    return c;
}

std::string SessionConfig::config_hash() const { return hex64(fnv1a(to_json_value().dump())); }

// ---------------------------------------------------------------------------
// Topics and coverage

const std::vector<std::string>& domain_topics(scales::Domain domain) {
    static const std::vector<std::string> depression = {"mood", "interest", "sleep", "energy",
                                                        "risk"};
    static const std::vector<std::string> anxiety = {"anxiety", "somatic", "sleep", "risk"};
    static const std::vector<std::string> ptsd = {"trauma", "sleep", "mood", "risk"};
    static const std::vector<std::string> sleep = {"sleep"};
    static const std::vector<std::string> mood_pers = {"mood", "social"};
    switch (domain) {
        case scales::Domain::Depression: return depression;
        case scales::Domain::Anxiety: return anxiety;
        case scales::Domain::Ptsd: return ptsd;
        case scales::Domain::Sleep: return sleep;
        case scales::Domain::MoodPersonality: return mood_pers;
    }
    return depression;
}

std::vector<std::string> required_topics(const scales::ScalePlan& plan,
                                         const scales::Repository& repo) {
    std::vector<std::string> out;
    auto add_domain = [&out](scales::Domain domain) {
        for (const std::string& t : domain_topics(domain))
            if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    };
    for (const scales::PlanEntry& e : plan.clinician_scales)
        if (const auto* def = repo.find(e.abbr)) add_domain(def->domain);
    for (const scales::PlanEntry& e : plan.self_report_scales)
        if (const auto* def = repo.find(e.abbr)) add_domain(def->domain);
    return out;
}

namespace {

const std::vector<std::string>& exhaustion_markers() {
    static const std::vector<std::string> markers = {
        "nothing else", "that's all", "nothing more", "told you everything", "no more to say"};
    return markers;
}

bool has_exhaustion_marker(const std::string& utterance) {
    const std::string l = lowercase(utterance);
    for (const std::string& m : exhaustion_markers())
        if (l.find(m) != std::string::npos) return true;
    return false;
}

// Live bookkeeping for coverage, per-scale evidence and exhaustion. The same
// walker replays a finished transcript so stored sessions can be re-checked.
struct CoverageTracker {
    std::vector<std::string> required;
    std::set<std::string> covered;
    std::map<std::string, int> evidence;   // abbr -> candidate evidence turns
    std::map<std::string, int> needed;     // abbr -> item_count
    int completed_rounds = 0;
    int consecutive_exhausted = 0;

    static CoverageTracker make(const scales::ScalePlan& plan, const scales::Repository& repo) {
        CoverageTracker t;
        t.required = required_topics(plan, repo);
        auto add = [&t, &repo](const scales::PlanEntry& e) {
            if (const auto* def = repo.find(e.abbr)) {
                t.evidence[def->abbr] = 0;
                t.needed[def->abbr] = def->item_count;
            }
        };
        for (const auto& e : plan.clinician_scales) add(e);
        for (const auto& e : plan.self_report_scales) add(e);
        return t;
    }

    void cover(const std::string& topic, bool bump_evidence, const scales::ScalePlan& plan,
               const scales::Repository& repo) {
        if (topic.empty()) return;
        covered.insert(topic);
        if (!bump_evidence) return;
        auto bump = [this, &topic, &repo](const scales::PlanEntry& e) {
            if (const auto* def = repo.find(e.abbr)) {
                const auto& topics = domain_topics(def->domain);
                if (std::find(topics.begin(), topics.end(), topic) != topics.end())
                    ++evidence[def->abbr];
            }
        };
        for (const auto& e : plan.clinician_scales) bump(e);
        for (const auto& e : plan.self_report_scales) bump(e);
    }

    std::string next_uncovered() const {
        for (const std::string& t : required)
            if (!covered.count(t)) return t;
        return "";
    }

    // Defense turns yield nothing usable. A disclosing patient volunteers an
    // uncovered topic; failing that, the elaboration deepens evidence on the
    // current one. Round 1 is the free complaint narrative, so it covers its
    // topic without counting as scale-driven evidence.
    void finish_round(const std::string& topic, bool disclosed, bool productive,
                      bool scale_driven, const std::string& utterance,
                      const scales::ScalePlan& plan, const scales::Repository& repo) {
        if (productive) {
            cover(topic, scale_driven, plan, repo);
            if (disclosed) {
                const std::string volunteered = next_uncovered();
                cover(volunteered.empty() ? topic : volunteered, scale_driven, plan, repo);
            }
        }
        ++completed_rounds;
        consecutive_exhausted = has_exhaustion_marker(utterance) ? consecutive_exhausted + 1 : 0;
    }

    bool evidence_sufficient() const {
        for (const auto& [abbr, count] : evidence)
            if (count < needed.at(abbr)) return false;
        return !evidence.empty();
    }

    SaturationStatus status(int min_rounds) const {
        SaturationStatus s;
        s.domains_covered = covered;
        s.required_topics = required;
        s.rounds = completed_rounds;
        s.min_rounds = min_rounds;
        s.evidence_sufficient = evidence_sufficient();
        s.patient_exhausted = consecutive_exhausted >= 2;
        return s;
    }
};

const char* kGreeting = "Hello, welcome. Please have a seat.";
const char* kOpening =
    "To help us get started, could you tell me a bit about what brings you in today?";
const char* kClosing =
    "Thank you for your time and openness today. This concludes our interview.";

std::string topic_from_note(const std::string& note) {
    if (note.rfind("topic=", 0) != 0) return "";
    const std::size_t end = note.find(';');
    return note.substr(6, end == std::string::npos ? std::string::npos : end - 6);
}

std::string iso_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Session loop

CorpusRecord run_session(const profiles::PatientProfile& profile, const scales::Repository& repo,
                         const backends::BackendSet& backends,
                         const prompts::PromptLibrary& prompts, const SessionConfig& config,
                         std::uint64_t seed, const std::string& record_id) {
    config.validate();
    {
        auto issues = profiles::validate_profile(profile);
        if (!issues.empty())
            fail(ErrorCode::InvalidArgument, "profile invalid: " + issues.front().code + ": " +
                                                 issues.front().message);
    }

    CorpusRecord record;
    record.record_id = record_id.empty() ? "rec-" + hex64(seed) : record_id;
    record.profile = profile;
    record.honesty_echo = profile.honesty;

    std::mt19937_64 rng(seed);
    agents::SuspicionTracker tracker;
    tracker.theta_susp = config.agent.theta_susp;
    agents::AgentState state{config.initial_trust, config.initial_stress};

    record.plan = agents::assessor_select(profile.demographics, profile.chief_complaint, repo,
                                          backends, prompts, config.agent);
    {
        auto report = scales::validate_plan(record.plan, repo);
        if (!report.ok())
            fail(ErrorCode::PlanInvalid, report.violations.front().code + ": " +
                                             report.violations.front().message);
    }
    CoverageTracker coverage = CoverageTracker::make(record.plan, repo);

    // Round 0: doctor-only greeting.
    record.final_transcript.push_back(TurnRecord{0, kGreeting, std::nullopt, {}, {}, {}});

    // Round 1: fixed opening; the patient's answer must carry the chief complaint.
    {
        agents::PatientTurnResult turn = agents::patient_turn(
            profile, state, kOpening, "mood", backends, prompts, config.agent, rng);
        state = turn.directive.next_state;
        std::string reply = turn.utterance;
        if (!contains_ci(reply, profile.chief_complaint)) {
            reply = "Well... " + profile.chief_complaint + (reply.empty() ? "" : " " + reply);
            record.run_meta.chief_complaint_injected = true;
        }
        TurnRecord t;
        t.round = 1;
        t.doctor_utterance = kOpening;
        t.patient_utterance = reply;
        t.nonverbal = turn.directive.nonverbal_cues;
        t.patient_trace = PatientTrace{state.trust, state.stress,
                                       agents::to_string(turn.directive.strategy),
                                       turn.directive.strategy_directive};
        record.final_transcript.push_back(std::move(t));
        const bool productive = turn.directive.strategy != agents::PatientStrategy::Deflect &&
                                turn.directive.strategy != agents::PatientStrategy::Breakdown;
        coverage.finish_round("mood", turn.directive.strategy == agents::PatientStrategy::Disclose,
                              productive, /*scale_driven=*/false, reply, record.plan, repo);
    }

    bool terminated = false;
    for (int round = 2; round <= config.round_cap; ++round) {
        const SaturationStatus saturation = coverage.status(config.min_rounds);
        agents::EvaluatorTurnResult ev =
            config.evaluator_cot
                ? agents::evaluator_turn(record.plan, record.final_transcript, tracker, saturation,
                                         backends, prompts, config.agent, round)
                : agents::evaluator_turn_passive(saturation, round);

        ClinicianTrace clinician_trace{
            tracker.xi, agents::to_string(ev.directive.decision),
            "topic=" + ev.directive.target_topic +
                (ev.directive.reasoning_step.empty() ? "" : "; " + ev.directive.reasoning_step)};

        if (ev.directive.decision == agents::Decision::Terminate) {
            TurnRecord t;
            t.round = round;
            t.doctor_utterance = kClosing;
            t.clinician_trace = clinician_trace;
            record.final_transcript.push_back(std::move(t));
            terminated = true;
            break;
        }

        agents::PatientTurnResult turn =
            agents::patient_turn(profile, state, ev.utterance, ev.directive.target_topic, backends,
                                 prompts, config.agent, rng);
        state = turn.directive.next_state;

        TurnRecord t;
        t.round = round;
        t.doctor_utterance = ev.utterance;
        t.patient_utterance = turn.utterance;
        t.nonverbal = turn.directive.nonverbal_cues;
        t.clinician_trace = clinician_trace;
        t.patient_trace = PatientTrace{state.trust, state.stress,
                                       agents::to_string(turn.directive.strategy),
                                       turn.directive.strategy_directive};
        record.final_transcript.push_back(std::move(t));
        const bool productive = turn.directive.strategy != agents::PatientStrategy::Deflect &&
                                turn.directive.strategy != agents::PatientStrategy::Breakdown;
        coverage.finish_round(ev.directive.target_topic,
                              turn.directive.strategy == agents::PatientStrategy::Disclose,
                              productive, /*scale_driven=*/true, turn.utterance, record.plan, repo);
    }
    if (!terminated)
        fail(ErrorCode::RoundLimitExceeded,
             "session did not terminate within " + std::to_string(config.round_cap) + " rounds");

    // Rating phase: every plan scale, no omissions or merging.
    for (const scales::PlanEntry& entry : record.plan.self_report_scales) {
        const scales::ScaleDefinition& def = repo.get(entry.abbr);
        record.patient_self_report[def.abbr] = agents::patient_self_report(
            profile, def, record.final_transcript, backends, prompts, config.agent);
    }
    for (scales::ScaleResponse& response :
         agents::evaluator_rate(record.plan, record.final_transcript, tracker, repo, backends,
                                prompts, config.agent)) {
        std::string abbr = response.scale_abbr;
        record.doctor_clinician_report[std::move(abbr)] = std::move(response);
    }
    for (const scales::PlanEntry& entry : record.plan.clinician_scales)
        if (!record.doctor_clinician_report.count(entry.abbr))
            fail(ErrorCode::RatingIncomplete, "no clinician response for " + entry.abbr);

    record.diagnosis =
        agents::diagnose(record.final_transcript, record.patient_self_report,
                         record.doctor_clinician_report, tracker, record.plan, repo, backends,
                         prompts, config.agent);

    record.run_meta.seed = seed;
    record.run_meta.config_hash = config.config_hash();
    record.run_meta.backend_ids = backends.backend_ids();
    record.run_meta.trace_internal = config.trace_internal;
    record.run_meta.cot_temperature = config.agent.cot_temperature;
    record.run_meta.chat_temperature = config.agent.chat_temperature;
    if (config.stamp_time) record.run_meta.generated_at = iso_timestamp_now();
    for (const backends::ModelBackend* backend : backends.distinct_backends()) {
        const backends::Usage usage = backend->cumulative_usage();
        record.run_meta.prompt_tokens += usage.prompt_tokens;
        record.run_meta.completion_tokens += usage.completion_tokens;
    }

    if (config.trace_internal)
        record.tracker = tracker;
    else
        return export_public(record);
    return record;
}

// ---------------------------------------------------------------------------
// Batch

std::pair<std::vector<CorpusRecord>, BatchReport> run_batch(
    const std::vector<profiles::PatientProfile>& profiles_list, const scales::Repository& repo,
    const BackendFactory& backend_factory, const prompts::PromptLibrary& prompts,
    const SessionConfig& config, std::uint64_t seed) {
    config.validate();
    const std::size_t n = profiles_list.size();
    std::vector<std::optional<CorpusRecord>> slots(n);
    std::vector<BatchEntry> entries(n);

    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n) return;
            char id[32];
            std::snprintf(id, sizeof(id), "rec-%04zu", i);
            const std::uint64_t session_seed = seed ^ static_cast<std::uint64_t>(i);
            entries[i].record_id = id;
            entries[i].seed = session_seed;
            try {
                slots[i] = run_session(profiles_list[i], repo, backend_factory(i), prompts, config,
                                       session_seed, id);
                entries[i].ok = true;
            } catch (const std::exception& e) {
                entries[i].ok = false;
                entries[i].error = e.what();
            }
        }
    };

    const std::size_t thread_count =
        std::min<std::size_t>(static_cast<std::size_t>(config.workers), std::max<std::size_t>(n, 1));
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t i = 0; i < thread_count; ++i) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }

    std::vector<CorpusRecord> records;
    BatchReport report;
    report.entries = std::move(entries);
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i]) {
            records.push_back(std::move(*slots[i]));
            ++report.successes;
        } else {
            ++report.failures;
        }
    }
    return {std::move(records), std::move(report)};
}

// ---------------------------------------------------------------------------
// Stats

namespace {

std::size_t record_turns(const CorpusRecord& r) {
    std::size_t n = 0;
    for (const TurnRecord& t : r.final_transcript)
        if (t.patient_utterance) ++n;
    return n;
}

std::size_t record_tokens(const CorpusRecord& r) {
    std::size_t n = 0;
    for (const TurnRecord& t : r.final_transcript) {
        n += whitespace_tokens(t.doctor_utterance);
        if (t.patient_utterance) n += whitespace_tokens(*t.patient_utterance);
    }
    return n;
}

}  // namespace

StatsReport corpus_stats(const std::vector<CorpusRecord>& records) {
    if (records.empty()) fail(ErrorCode::EmptyCorpus, "no records");
    StatsReport stats;
    stats.total_dialogues = records.size();
    std::size_t total_turns = 0;
    double age_sum = 0.0;
    std::map<std::string, std::size_t> pathology, severity, gender;
    for (const CorpusRecord& r : records) {
        total_turns += record_turns(r);
        stats.total_tokens += record_tokens(r);
        ++pathology[profiles::to_string(r.profile.ground_truth.status)];
        ++severity[profiles::to_string(r.profile.ground_truth.severity)];
        ++gender[profiles::to_string(r.profile.demographics.gender)];
        age_sum += r.profile.demographics.age;
    }
    const double n = static_cast<double>(records.size());
    stats.avg_turns = static_cast<double>(total_turns) / n;
    stats.avg_tokens_per_turn =
        total_turns == 0 ? 0.0
                         : static_cast<double>(stats.total_tokens) / static_cast<double>(total_turns);
    for (const auto& [k, v] : pathology) stats.pathology_pct[k] = 100.0 * v / n;
    for (const auto& [k, v] : severity) stats.severity_pct[k] = 100.0 * v / n;
    for (const auto& [k, v] : gender) stats.gender_pct[k] = 100.0 * v / n;
    stats.age_mean = age_sum / n;
    return stats;
}

// ---------------------------------------------------------------------------
// Validation

RecordValidation validate_record(const CorpusRecord& record, const scales::Repository& repo) {
    RecordValidation report;
    auto note = [&report](const std::string& code, const std::string& message) {
        report.violations.push_back({code, message});
    };

    const auto& transcript = record.final_transcript;
    if (transcript.empty()) {
        note("EmptyTranscript", "record has no rounds");
        return report;
    }
    for (std::size_t i = 0; i < transcript.size(); ++i) {
        if (transcript[i].round != static_cast<int>(i))
            note("RoundGap", "round " + std::to_string(transcript[i].round) + " at position " +
                                 std::to_string(i));
        if (transcript[i].doctor_utterance.empty())
            note("MissingDoctorUtterance", "round " + std::to_string(i));
        const bool terminal = i + 1 == transcript.size();
        if (i >= 1 && !terminal && !transcript[i].patient_utterance)
            note("MissingPatientUtterance", "round " + std::to_string(i));
        for (const std::string& tag : transcript[i].nonverbal)
            if (tag.size() > 10)
                note("NonverbalTooLong", "round " + std::to_string(i) + ": '" + tag + "'");
    }
    if (transcript.size() < 2 || !transcript[1].patient_utterance)
        note("MissingOpeningAnswer", "round-1 patient utterance absent");

    // Trace presence must match the session's trace_internal flag.
    const bool expect = record.run_meta.trace_internal;
    for (std::size_t i = 0; i < transcript.size(); ++i) {
        const TurnRecord& t = transcript[i];
        const bool has_patient = t.patient_utterance.has_value();
        if (expect) {
            if (i >= 1 && has_patient && !t.patient_trace)
                note("TraceMismatch", "round " + std::to_string(i) + " lacks patient trace");
            if (i >= 2 && !t.clinician_trace)
                note("TraceMismatch", "round " + std::to_string(i) + " lacks clinician trace");
        } else {
            if (t.patient_trace || t.clinician_trace)
                note("TraceMismatch", "round " + std::to_string(i) + " carries internal traces");
        }
    }
    if (!expect && record.tracker) note("TraceMismatch", "public record carries a tracker");

    // Report key sets equal plan sets exactly.
    auto check_reports = [&](const std::vector<scales::PlanEntry>& entries,
                             const std::map<std::string, scales::ScaleResponse>& reports,
                             const std::string& which) {
        std::set<std::string> wanted;
        for (const scales::PlanEntry& e : entries) {
            wanted.insert(e.abbr);
            if (!reports.count(e.abbr))
                note("MissingScaleResponse", which + " report missing for " + e.abbr);
        }
        for (const auto& [abbr, _] : reports)
            if (!wanted.count(abbr))
                note("ExtraScaleResponse", which + " report for unplanned scale " + abbr);
    };
    check_reports(record.plan.self_report_scales, record.patient_self_report, "self");
    check_reports(record.plan.clinician_scales, record.doctor_clinician_report, "clinician");

    // Scale responses must recompute: totals, bands, in-range evidence.
    auto check_response = [&](const scales::ScaleResponse& r) {
        const scales::ScaleDefinition* def = repo.find(r.scale_abbr);
        if (!def) {
            note("UnknownScale", r.scale_abbr);
            return;
        }
        try {
            const auto scored = scales::score_scale(
                *def, r.item_scores,
                {{"gender", profiles::to_string(record.profile.demographics.gender)}});
            if (scored.total != r.total_score)
                note("TotalMismatch", r.scale_abbr + ": stored " + std::to_string(r.total_score) +
                                          " recomputed " + std::to_string(scored.total));
            if (scored.severity != r.severity)
                note("SeverityMismatch",
                     r.scale_abbr + ": stored '" + r.severity + "' recomputed '" + scored.severity +
                         "'");
        } catch (const Error& e) {
            note("ResponseInvalid", r.scale_abbr + ": " + e.what());
        }
        for (const auto& [item, rounds] : r.dialogue_evidence)
            for (int round : rounds)
                if (round < 0 || round >= static_cast<int>(transcript.size()))
                    note("EvidenceOutOfRange",
                         r.scale_abbr + " item " + std::to_string(item) + " references round " +
                             std::to_string(round));
    };
    for (const auto& [_, r] : record.patient_self_report) check_response(r);
    for (const auto& [_, r] : record.doctor_clinician_report) check_response(r);

    const bool healthy = record.diagnosis.status == profiles::ClinicalStatus::Healthy;
    if (healthy != (record.diagnosis.severity == profiles::Severity::NotApplicable))
        note("DiagnosisInvariant", "severity NotApplicable must hold exactly for Healthy");
    for (const agents::EvidenceRef& e : record.diagnosis.key_evidence)
        if (e.round < 0 || e.round >= static_cast<int>(transcript.size()))
            note("EvidenceOutOfRange", "diagnosis cites round " + std::to_string(e.round));

    const bool gt_healthy = record.profile.ground_truth.status == profiles::ClinicalStatus::Healthy;
    if (gt_healthy != (record.profile.ground_truth.severity == profiles::Severity::NotApplicable))
        note("GroundTruthInvariant", "profile severity/status mismatch");

    {
        Json echo = record.honesty_echo;
        Json live = record.profile.honesty;
        if (echo != live) note("HonestyEchoMismatch", "honesty_echo differs from profile honesty");
    }
    return report;
}

SaturationStatus reconstruct_saturation(const CorpusRecord& record,
                                        const scales::Repository& repo, int min_rounds) {
    if (!record.run_meta.trace_internal)
        fail(ErrorCode::InvalidArgument, "reconstruction needs internal traces");
    CoverageTracker coverage = CoverageTracker::make(record.plan, repo);
    for (const TurnRecord& t : record.final_transcript) {
        if (t.round == 0 || !t.patient_utterance) continue;
        std::string topic = "mood";  // fixed round-1 opening topic
        if (t.round >= 2 && t.clinician_trace)
            topic = topic_from_note(t.clinician_trace->hypothesis_note);
        std::string strategy = t.patient_trace ? t.patient_trace->strategy : "Neutral";
        const bool productive = strategy != "Deflect" && strategy != "Breakdown";
        coverage.finish_round(topic, strategy == "Disclose", productive,
                              /*scale_driven=*/t.round >= 2, *t.patient_utterance, record.plan,
                              repo);
    }
    return coverage.status(min_rounds);
}

CorpusRecord export_public(const CorpusRecord& record) {
    CorpusRecord out = record;
    for (TurnRecord& t : out.final_transcript) {
        t.clinician_trace.reset();
        t.patient_trace.reset();
    }
    out.tracker.reset();
    out.run_meta.trace_internal = false;
    return out;
}

// ---------------------------------------------------------------------------
// Persistence

std::string record_filename(const CorpusRecord& record) { return record.record_id + ".json"; }

void write_record(const CorpusRecord& record, const std::string& dir) {
    fs::create_directories(dir);
    const Json j = record;
    const std::string path = dir + "/" + record_filename(record);
    const std::string tmp = path + ".tmp";
    write_text_file(tmp, j.dump(2) + "\n");
    fs::rename(tmp, path);
}

void write_manifest(const BatchReport& report, const std::string& dir) {
    fs::create_directories(dir);
    Json j = report;
    write_text_file(dir + "/manifest.json", j.dump(2) + "\n");
}

CorpusRecord load_record(const std::string& path) {
    return load_json_file(path).get<CorpusRecord>();
}

std::vector<CorpusRecord> load_corpus_dir(const std::string& dir,
                                          std::vector<std::string>* warnings) {
    if (!fs::is_directory(dir)) fail(ErrorCode::IoError, dir + " is not a directory");
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json" || entry.path().extension() != ".json") continue;
        files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    std::vector<CorpusRecord> records;
    for (const std::string& file : files) {
        try {
            records.push_back(load_record(file));
        } catch (const std::exception& e) {
            if (warnings) warnings->push_back(file + ": " + e.what());
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(Json& j, const TurnRecord& t) {
    j = Json{{"round", t.round}, {"doctor", t.doctor_utterance}};
    if (t.patient_utterance) j["patient"] = *t.patient_utterance;
    if (!t.nonverbal.empty()) j["nonverbal"] = t.nonverbal;
    if (t.clinician_trace)
        j["clinician_trace"] = Json{{"xi", t.clinician_trace->xi},
                                    {"decision", t.clinician_trace->decision},
                                    {"hypothesis_note", t.clinician_trace->hypothesis_note}};
    if (t.patient_trace)
        j["patient_trace"] = Json{{"trust", t.patient_trace->trust},
                                  {"stress", t.patient_trace->stress},
                                  {"strategy", t.patient_trace->strategy},
                                  {"directive_text", t.patient_trace->directive_text}};
}

void from_json(const Json& j, TurnRecord& t) {
    t.round = j.at("round").get<int>();
    t.doctor_utterance = j.at("doctor").get<std::string>();
    t.patient_utterance.reset();
    if (j.contains("patient")) t.patient_utterance = j.at("patient").get<std::string>();
    t.nonverbal = j.value("nonverbal", std::vector<std::string>{});
    t.clinician_trace.reset();
    if (j.contains("clinician_trace")) {
        const Json& c = j.at("clinician_trace");
        t.clinician_trace = ClinicianTrace{c.at("xi").get<double>(),
                                           c.at("decision").get<std::string>(),
                                           c.value("hypothesis_note", "")};
    }
    t.patient_trace.reset();
    if (j.contains("patient_trace")) {
        const Json& p = j.at("patient_trace");
        t.patient_trace = PatientTrace{p.at("trust").get<double>(), p.at("stress").get<double>(),
                                       p.at("strategy").get<std::string>(),
                                       p.value("directive_text", "")};
    }
}

void to_json(Json& j, const CorpusRecord& r) {
    j = Json{{"record_id", r.record_id},
             {"profile", r.profile},
             {"plan", r.plan},
             {"final_transcript", r.final_transcript},
             {"patient_self_report", r.patient_self_report},
             {"doctor_clinician_report", r.doctor_clinician_report},
             {"diagnosis", r.diagnosis},
             {"honesty_echo", r.honesty_echo},
             {"run_meta",
              Json{{"seed", r.run_meta.seed},
                   {"config_hash", r.run_meta.config_hash},
                   {"backend_ids", r.run_meta.backend_ids},
                   {"generated_at", r.run_meta.generated_at},
                   {"prompt_tokens", r.run_meta.prompt_tokens},
                   {"completion_tokens", r.run_meta.completion_tokens},
                   {"chief_complaint_injected", r.run_meta.chief_complaint_injected},
                   {"trace_internal", r.run_meta.trace_internal},
                   {"cot_temperature", r.run_meta.cot_temperature},
                   {"chat_temperature", r.run_meta.chat_temperature}}}};
    if (r.tracker) j["tracker"] = *r.tracker;
}

void from_json(const Json& j, CorpusRecord& r) {
    r.record_id = j.at("record_id").get<std::string>();
    r.profile = j.at("profile").get<profiles::PatientProfile>();
    r.plan = j.at("plan").get<scales::ScalePlan>();
    r.final_transcript = j.at("final_transcript").get<std::vector<TurnRecord>>();
    r.patient_self_report.clear();
    for (auto& [k, v] : j.at("patient_self_report").items())
        r.patient_self_report[k] = v.get<scales::ScaleResponse>();
    r.doctor_clinician_report.clear();
    for (auto& [k, v] : j.at("doctor_clinician_report").items())
        r.doctor_clinician_report[k] = v.get<scales::ScaleResponse>();
    r.diagnosis = j.at("diagnosis").get<agents::DiagnosticReport>();
    r.honesty_echo = j.at("honesty_echo").get<profiles::HonestyState>();
    r.tracker.reset();
    if (j.contains("tracker")) r.tracker = j.at("tracker").get<agents::SuspicionTracker>();
    const Json& meta = j.at("run_meta");
    r.run_meta.seed = meta.at("seed").get<std::uint64_t>();
    r.run_meta.config_hash = meta.value("config_hash", "");
    r.run_meta.backend_ids = meta.value("backend_ids", std::vector<std::string>{});
    r.run_meta.generated_at = meta.value("generated_at", "1970-01-01T00:00:00Z");
    r.run_meta.prompt_tokens = meta.value("prompt_tokens", std::size_t{0});
    r.run_meta.completion_tokens = meta.value("completion_tokens", std::size_t{0});
    r.run_meta.chief_complaint_injected = meta.value("chief_complaint_injected", false);
    r.run_meta.trace_internal = meta.value("trace_internal", true);
    r.run_meta.cot_temperature = meta.value("cot_temperature", 0.2);
    r.run_meta.chat_temperature = meta.value("chat_temperature", 0.8);
}

void to_json(Json& j, const StatsReport& s) {
    j = Json{{"total_dialogues", s.total_dialogues},
             {"total_tokens", s.total_tokens},
             {"avg_turns", s.avg_turns},
             {"avg_tokens_per_turn", s.avg_tokens_per_turn},
             {"pathology_pct", s.pathology_pct},
             {"severity_pct", s.severity_pct},
             {"gender_pct", s.gender_pct},
             {"age_mean", s.age_mean}};
}

void to_json(Json& j, const BatchReport& b) {
    Json entries = Json::array();
    for (const BatchEntry& e : b.entries)
        entries.push_back(Json{{"record_id", e.record_id},
                               {"seed", e.seed},
                               {"status", e.ok ? "ok" : "failed"},
                               {"error", e.error}});
    j = Json{{"entries", entries}, {"successes", b.successes}, {"failures", b.failures}};
}

}  // namespace intake::session
