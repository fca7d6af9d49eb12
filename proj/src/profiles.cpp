#include "intake/profiles.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "intake/backends.hpp"

namespace intake::profiles {

std::string to_string(Gender g) {
    switch (g) {
        case Gender::Male: return "Male";
        case Gender::Female: return "Female";
        case Gender::Unspecified: return "Unspecified";
    }
    return "Unspecified";
}

std::string to_string(ClinicalStatus s) {
    switch (s) {
        case ClinicalStatus::Healthy: return "Healthy";
        case ClinicalStatus::Depression: return "Depression";
        case ClinicalStatus::Anxiety: return "Anxiety";
        case ClinicalStatus::Ptsd: return "PTSD";
    }
    return "Healthy";
}

std::string to_string(Severity s) {
    switch (s) {
        case Severity::NotApplicable: return "NotApplicable";
        case Severity::Mild: return "Mild";
        case Severity::Moderate: return "Moderate";
        case Severity::Severe: return "Severe";
    }
    return "NotApplicable";
}

std::string to_string(DeceptionStrategy s) {
    switch (s) {
        case DeceptionStrategy::Frankness: return "Frankness";
        case DeceptionStrategy::Concealment: return "Concealment";
        case DeceptionStrategy::Exaggeration: return "Exaggeration";
    }
    return "Frankness";
}

std::string to_string(RiskFlag f) {
    switch (f) {
        case RiskFlag::Denied: return "Denied";
        case RiskFlag::Suspected: return "Suspected";
        case RiskFlag::Endorsed: return "Endorsed";
    }
    return "Denied";
}

std::string to_string(Tier t) {
    switch (t) {
        case Tier::Low: return "Low";
        case Tier::Medium: return "Medium";
        case Tier::High: return "High";
    }
    return "Low";
}

Gender gender_from_string(const std::string& s) {
    const std::string l = lowercase(s);
    if (l == "male" || l == "m") return Gender::Male;
    if (l == "female" || l == "f") return Gender::Female;
    return Gender::Unspecified;
}

ClinicalStatus status_from_string(const std::string& s) {
    if (s == "Healthy") return ClinicalStatus::Healthy;
    if (s == "Depression") return ClinicalStatus::Depression;
    if (s == "Anxiety") return ClinicalStatus::Anxiety;
    if (s == "PTSD") return ClinicalStatus::Ptsd;
    fail(ErrorCode::ParseError, "unknown clinical status '" + s + "'");
}

Severity severity_from_string(const std::string& s) {
    if (s == "NotApplicable" || s == "None" || s == "N/A") return Severity::NotApplicable;
    if (s == "Mild") return Severity::Mild;
    if (s == "Moderate") return Severity::Moderate;
    if (s == "Severe") return Severity::Severe;
    fail(ErrorCode::ParseError, "unknown severity '" + s + "'");
}

DeceptionStrategy strategy_from_string(const std::string& s) {
    if (s == "Frankness") return DeceptionStrategy::Frankness;
    if (s == "Concealment") return DeceptionStrategy::Concealment;
    if (s == "Exaggeration") return DeceptionStrategy::Exaggeration;
    fail(ErrorCode::ParseError, "unknown deception strategy '" + s + "'");
}

RiskFlag risk_flag_from_string(const std::string& s) {
    if (s == "Denied") return RiskFlag::Denied;
    if (s == "Suspected") return RiskFlag::Suspected;
    if (s == "Endorsed") return RiskFlag::Endorsed;
    fail(ErrorCode::ParseError, "unknown risk flag '" + s + "'");
}

const std::vector<std::string>& topic_vocabulary() {
    static const std::vector<std::string> topics = {
        "mood",  "interest", "sleep",  "energy", "appetite", "concentration", "guilt",
        "risk",  "anxiety",  "trauma", "somatic", "social",   "functioning"};
    return topics;
}

bool is_known_topic(const std::string& topic) {
    const auto& v = topic_vocabulary();
    return std::find(v.begin(), v.end(), topic) != v.end();
}

// ---------------------------------------------------------------------------
// FeatureBank

FeatureBank FeatureBank::load(const std::string& path) {
    return from_json(load_json_file(path), path);
}

FeatureBank FeatureBank::from_json(const Json& doc, const std::string& context) {
    if (!doc.is_array()) fail(ErrorCode::ParseError, context + ": expected a JSON array");
    FeatureBank bank;
    std::set<std::string> seen;
    for (const Json& entry : doc) {
        DeceptionFeature f;
        f.id = require_field(entry, "id", context).get<std::string>();
        if (!seen.insert(f.id).second)
            fail(ErrorCode::DuplicateFeatureId, context + ": duplicate feature id " + f.id);
        const std::string cls = require_field(entry, "strategy_class", context).get<std::string>();
        f.strategy_class = strategy_from_string(cls);
        if (f.strategy_class == DeceptionStrategy::Frankness)
            fail(ErrorCode::ParseError, context + ": feature " + f.id + " cannot be Frankness");
        f.label = require_field(entry, "label", context).get<std::string>();
        f.observables = require_field(entry, "observables", context).get<std::vector<std::string>>();
        f.target_fields =
            require_field(entry, "target_fields", context).get<std::vector<std::string>>();
        if (entry.contains("tags")) f.tags = entry.at("tags").get<std::vector<std::string>>();
        bank.features_.push_back(std::move(f));
    }
    return bank;
}

const DeceptionFeature* FeatureBank::find(const std::string& id) const {
    for (const DeceptionFeature& f : features_)
        if (f.id == id) return &f;
    return nullptr;
}

std::vector<const DeceptionFeature*> FeatureBank::by_class(DeceptionStrategy strategy) const {
    std::vector<const DeceptionFeature*> out;
    for (const DeceptionFeature& f : features_)
        if (f.strategy_class == strategy) out.push_back(&f);
    return out;
}

// ---------------------------------------------------------------------------
// Tiering

SeverityTier phq8_to_tier(int score) {
    if (score < 0 || score > 24)
        fail(ErrorCode::OutOfRange, "PHQ-8 total " + std::to_string(score) + " outside [0,24]");
    SeverityTier tier;
    tier.source_score = score;
    if (score <= 9)
        tier.tier = Tier::Low;
    else if (score <= 19)
        tier.tier = Tier::Medium;
    else
        tier.tier = Tier::High;
    return tier;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<ProfileIssue> validate_profile(const PatientProfile& profile, const FeatureBank* bank) {
    std::vector<ProfileIssue> issues;
    auto note = [&issues](const std::string& code, const std::string& message) {
        issues.push_back({code, message});
    };

    if (profile.demographics.age < 0 || profile.demographics.age > 120)
        note("AgeOutOfRange", "age " + std::to_string(profile.demographics.age));
    if (profile.chief_complaint.empty()) note("EmptyChiefComplaint", "chief_complaint is empty");

    const bool healthy = profile.ground_truth.status == ClinicalStatus::Healthy;
    const bool na = profile.ground_truth.severity == Severity::NotApplicable;
    if (healthy != na)
        note("SeverityStatusMismatch",
             "severity NotApplicable must hold exactly for Healthy status");

    const HonestyState& h = profile.honesty;
    const bool frank = h.strategy == DeceptionStrategy::Frankness;
    if (frank && !h.active_features.empty())
        note("HonestyFeatureMismatch", "Frankness must carry no active features");
    if (!frank && h.active_features.empty())
        note("HonestyFeatureMismatch", to_string(h.strategy) + " requires active features");
    if (bank) {
        for (const std::string& id : h.active_features) {
            const DeceptionFeature* f = bank->find(id);
            if (!f)
                note("UnknownFeature", "feature '" + id + "' not in bank");
            else if (f->strategy_class != h.strategy)
                note("StrategyMismatch", "feature '" + id + "' class " +
                                             to_string(f->strategy_class) + " != " +
                                             to_string(h.strategy));
        }
    }
    for (const auto& [topic, _] : h.topic_overrides)
        if (!is_known_topic(topic)) note("UnknownTopic", "topic override '" + topic + "'");
    return issues;
}

// ---------------------------------------------------------------------------
// Augmentation

namespace {

const std::vector<std::string>& connector_phrases() {
    static const std::vector<std::string> phrases = {
        "Behavioral constraint: ",
        "In conversation this shows as: ",
        "Presentation pattern: ",
        "When this topic comes up, the patient tends to: ",
    };
    return phrases;
}

std::string observables_text(const DeceptionFeature& feature) {
    std::string out;
    for (const std::string& obs : feature.observables) {
        if (!out.empty()) out += "; ";
        out += obs;
    }
    return out;
}

// Resolve a target path to the string field it rewrites. Risk-flag targets
// keep their tri-state value; their behavioral constraint lands on
// behavior_tendency and installs a "risk" topic override.
std::string* resolve_target(PatientProfile& p, const std::string& path, bool& is_risk_target) {
    is_risk_target = false;
    if (path == "chief_complaint") return &p.chief_complaint;
    if (path == "symptom_history") return &p.symptom_history;
    if (path == "behavior_tendency") return &p.behavior_tendency;
    if (path == "communication_style") return &p.communication_style;
    if (path == "affect_baseline") return &p.affect_baseline;
    const std::string psycho = "psychosocial_factors.";
    if (path.rfind(psycho, 0) == 0) return &p.psychosocial_factors[path.substr(psycho.size())];
    const std::string metrics = "psychometrics.";
    if (path.rfind(metrics, 0) == 0) return &p.psychometrics[path.substr(metrics.size())];
    const std::string risk = "risk_flags.";
    if (path.rfind(risk, 0) == 0) {
        is_risk_target = true;
        return &p.behavior_tendency;
    }
    return nullptr;
}

}  // namespace

PatientProfile augment_profile(const PatientProfile& base, DeceptionStrategy strategy,
                               const std::vector<std::string>& feature_ids,
                               const FeatureBank& bank, std::uint64_t seed) {
    if (strategy == DeceptionStrategy::Frankness) {
        if (!feature_ids.empty())
            fail(ErrorCode::StrategyMismatch, "Frankness takes no features");
        PatientProfile out = base;
        out.honesty = HonestyState{};
        return out;
    }
    if (feature_ids.empty())
        fail(ErrorCode::InvalidArgument, to_string(strategy) + " requires at least one feature");

    PatientProfile out = base;
    out.honesty.strategy = strategy;
    out.honesty.active_features = feature_ids;
    out.honesty.topic_overrides.clear();

    std::mt19937_64 rng(seed);
    for (const std::string& id : feature_ids) {
        const DeceptionFeature* feature = bank.find(id);
        if (!feature) fail(ErrorCode::UnknownFeature, "feature '" + id + "' not in bank");
        if (feature->strategy_class != strategy)
            fail(ErrorCode::StrategyMismatch,
                 "feature '" + id + "' is " + to_string(feature->strategy_class) + ", requested " +
                     to_string(strategy));

        const std::string body = "[" + feature->id + "] " + feature->label + ". " +
                                 observables_text(*feature) + ".";
        for (const std::string& path : feature->target_fields) {
            bool is_risk_target = false;
            std::string* field = resolve_target(out, path, is_risk_target);
            if (!field)
                fail(ErrorCode::UnknownFeature,
                     "feature '" + id + "' targets unknown field '" + path + "'");
            const auto& phrases = connector_phrases();
            const std::string& connector = phrases[rng() % phrases.size()];
            std::string note = connector + body;
            if (is_risk_target) {
                note = "On risk topics (" + path + "): " + note;
                out.honesty.topic_overrides["risk"] = strategy;
            }
            if (!field->empty()) *field += " ";
            *field += note;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Extraction

namespace {

const char* kExtractorSystemPrompt = R"(You are a clinical intake structuring assistant.
Read the interview transcript and produce a single JSON object describing the speaker as a patient profile. Cover every dimension below; write "unreported" where the transcript gives no evidence.
- demographics: age (integer), gender, occupation, living_status
- chief_complaint (non-empty), symptom_history
- psychosocial_factors: stressors, coping_mechanism, social_support, goals
- risk_flags: suicide, self_harm, violence — each one of Denied | Suspected | Endorsed
- behavior_tendency, communication_style, affect_baseline
- psychometrics: impression_management, agreeableness, openness
Output JSON only, no commentary.)";

void fill_defaults(PatientProfile& p) {
    for (const char* key : {"stressors", "coping_mechanism", "social_support", "goals"})
        p.psychosocial_factors.emplace(key, "unreported");
    for (const char* key : {"suicide", "self_harm", "violence"})
        p.risk_flags.emplace(key, RiskFlag::Denied);
    for (const char* key : {"impression_management", "agreeableness", "openness"})
        p.psychometrics.emplace(key, "unreported");
    if (p.behavior_tendency.empty()) p.behavior_tendency = "unreported";
    if (p.communication_style.empty()) p.communication_style = "unreported";
    if (p.affect_baseline.empty()) p.affect_baseline = "unreported";
    if (p.symptom_history.empty()) p.symptom_history = "unreported";
}

}  // namespace

PatientProfile extract_profile(const std::string& raw_transcript, backends::ModelBackend& backend) {
    if (raw_transcript.empty())
        fail(ErrorCode::OutOfRange, "transcript is empty");

    backends::ModelRequest request;
    request.role_tag = backends::RoleTag::Extractor;
    request.contract = backends::ResponseContract::json("profile_extract");
    request.decode.temperature = 0.2;
    request.messages = {{backends::Speaker::System, kExtractorSystemPrompt},
                        {backends::Speaker::User, raw_transcript}};

    backends::ModelResponse response;
    try {
        response = backend.complete(request);
    } catch (const Error& e) {
        // Parse exhaustion means the backend never produced JSON at all;
        // schema problems in parseable output keep their own code.
        if (e.code() == ErrorCode::SchemaViolation &&
            std::string(e.what()).find("not valid JSON") != std::string::npos)
            fail(ErrorCode::BackendFailure, "extractor output unparseable after retries");
        throw;
    }
    PatientProfile profile = response.parsed->get<PatientProfile>();
    fill_defaults(profile);
    profile.honesty = HonestyState{};

    auto issues = validate_profile(profile);
    if (!issues.empty()) {
        std::string detail;
        for (const ProfileIssue& issue : issues)
            detail += (detail.empty() ? "" : "; ") + issue.code + ": " + issue.message;
        fail(ErrorCode::SchemaViolation, "extracted profile invalid: " + detail);
    }
    return profile;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(Json& j, const GroundTruth& g) {
    j = Json{{"status", to_string(g.status)}, {"severity", to_string(g.severity)}};
}

void from_json(const Json& j, GroundTruth& g) {
    g.status = status_from_string(j.at("status").get<std::string>());
    g.severity = severity_from_string(j.at("severity").get<std::string>());
}

void to_json(Json& j, const HonestyState& h) {
    Json overrides = Json::object();
    for (const auto& [topic, strategy] : h.topic_overrides)
        overrides[topic] = to_string(strategy);
    j = Json{{"deception_strategy", to_string(h.strategy)},
             {"active_features", h.active_features},
             {"topic_overrides", overrides}};
}

void from_json(const Json& j, HonestyState& h) {
    h.strategy = strategy_from_string(j.at("deception_strategy").get<std::string>());
    h.active_features = j.value("active_features", std::vector<std::string>{});
    h.topic_overrides.clear();
    if (j.contains("topic_overrides")) {
        for (auto& [topic, strategy] : j.at("topic_overrides").items())
            h.topic_overrides[topic] = strategy_from_string(strategy.get<std::string>());
    }
}

void to_json(Json& j, const PatientProfile& p) {
    Json risk = Json::object();
    for (const auto& [key, flag] : p.risk_flags) risk[key] = to_string(flag);
    j = Json{{"demographics",
              Json{{"age", p.demographics.age},
                   {"gender", to_string(p.demographics.gender)},
                   {"occupation", p.demographics.occupation},
                   {"living_status", p.demographics.living_status}}},
             {"chief_complaint", p.chief_complaint},
             {"symptom_history", p.symptom_history},
             {"psychosocial_factors", p.psychosocial_factors},
             {"risk_flags", risk},
             {"behavior_tendency", p.behavior_tendency},
             {"communication_style", p.communication_style},
             {"affect_baseline", p.affect_baseline},
             {"psychometrics", p.psychometrics},
             {"ground_truth", p.ground_truth},
             {"honesty", p.honesty}};
}

void from_json(const Json& j, PatientProfile& p) {
    const Json& demo = j.at("demographics");
    p.demographics.age = demo.at("age").get<int>();
    p.demographics.gender = gender_from_string(demo.value("gender", "Unspecified"));
    p.demographics.occupation = demo.value("occupation", "");
    p.demographics.living_status = demo.value("living_status", "");
    p.chief_complaint = j.at("chief_complaint").get<std::string>();
    p.symptom_history = j.value("symptom_history", "");
    p.psychosocial_factors.clear();
    if (j.contains("psychosocial_factors"))
        for (auto& [k, v] : j.at("psychosocial_factors").items())
            p.psychosocial_factors[k] = v.is_string() ? v.get<std::string>() : v.dump();
    p.risk_flags.clear();
    if (j.contains("risk_flags"))
        for (auto& [k, v] : j.at("risk_flags").items())
            p.risk_flags[k] = risk_flag_from_string(v.get<std::string>());
    p.behavior_tendency = j.value("behavior_tendency", "");
    p.communication_style = j.value("communication_style", "");
    p.affect_baseline = j.value("affect_baseline", "");
    p.psychometrics.clear();
    if (j.contains("psychometrics"))
        for (auto& [k, v] : j.at("psychometrics").items())
            p.psychometrics[k] = v.is_string() ? v.get<std::string>() : v.dump();
    if (j.contains("ground_truth")) p.ground_truth = j.at("ground_truth").get<GroundTruth>();
    else p.ground_truth = GroundTruth{};
    if (j.contains("honesty")) p.honesty = j.at("honesty").get<HonestyState>();
    else p.honesty = HonestyState{};
}

}  // namespace intake::profiles
