#include "intake/backends.hpp"

namespace intake::backends {

namespace {

using Errors = std::vector<std::string>;

void need_string(const Json& j, const char* key, Errors& errors, bool non_empty = false) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        errors.push_back(std::string("missing string field '") + key + "'");
    } else if (non_empty && j.at(key).get<std::string>().empty()) {
        errors.push_back(std::string("field '") + key + "' must be non-empty");
    }
}

void need_number_in(const Json& j, const char* key, double lo, double hi, Errors& errors) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        errors.push_back(std::string("missing numeric field '") + key + "'");
        return;
    }
    const double v = j.at(key).get<double>();
    if (v < lo || v > hi)
        errors.push_back(std::string("field '") + key + "' outside [" + std::to_string(lo) + "," +
                         std::to_string(hi) + "]");
}

void need_int_array(const Json& j, const char* key, Errors& errors) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        errors.push_back(std::string("missing array field '") + key + "'");
        return;
    }
    for (const Json& v : j.at(key))
        if (!v.is_number_integer()) {
            errors.push_back(std::string("field '") + key + "' must hold integers");
            return;
        }
}

void need_one_of(const Json& j, const char* key, const std::vector<std::string>& allowed,
                 Errors& errors) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        errors.push_back(std::string("missing string field '") + key + "'");
        return;
    }
    const std::string v = j.at(key).get<std::string>();
    for (const std::string& a : allowed)
        if (v == a) return;
    errors.push_back(std::string("field '") + key + "' has unexpected value '" + v + "'");
}

Errors validate_appraisal(const Json& j) {
    Errors errors;
    need_number_in(j, "empathy", -1.0, 1.0, errors);
    need_number_in(j, "pressure", -1.0, 1.0, errors);
    return errors;
}

Errors validate_scale_plan(const Json& j) {
    Errors errors;
    for (const char* key : {"clinician_scales", "self_report_scales"}) {
        if (!j.contains(key) || !j.at(key).is_array()) {
            errors.push_back(std::string("missing array field '") + key + "'");
            continue;
        }
        for (const Json& entry : j.at(key)) {
            if (!entry.is_object() || !entry.contains("name") || !entry.at("name").is_string())
                errors.push_back(std::string("entries in '") + key + "' need a 'name'");
        }
    }
    return errors;
}

Errors validate_patient_cot(const Json& j) {
    Errors errors;
    need_string(j, "thought_trace", errors);
    need_string(j, "strategy_directive", errors);
    if (!j.contains("current_state") || !j.at("current_state").is_object()) {
        errors.push_back("missing object field 'current_state'");
    } else {
        need_number_in(j.at("current_state"), "trust", 0.0, 1.0, errors);
        need_number_in(j.at("current_state"), "stress", 0.0, 1.0, errors);
    }
    if (j.contains("non_verbal_cues") && !j.at("non_verbal_cues").is_array())
        errors.push_back("'non_verbal_cues' must be an array");
    return errors;
}

Errors validate_evaluator_cot(const Json& j) {
    Errors errors;
    need_string(j, "reasoning_step", errors);
    need_number_in(j, "suspicion_score", 0.0, 1.0, errors);
    need_one_of(j, "next_move_type", {"Proceed", "Investigate", "Terminate"}, errors);
    need_string(j, "target_topic", errors);
    need_string(j, "guidance_for_chat", errors);
    if (j.contains("inconsistency_flags") && !j.at("inconsistency_flags").is_array())
        errors.push_back("'inconsistency_flags' must be an array");
    return errors;
}

Errors validate_self_report(const Json& j) {
    Errors errors;
    need_int_array(j, "item_scores", errors);
    return errors;
}

Errors validate_clinician_rating(const Json& j) {
    Errors errors;
    need_int_array(j, "item_scores", errors);
    if (j.contains("suspected_direction"))
        need_one_of(j, "suspected_direction", {"none", "concealment", "exaggeration"}, errors);
    return errors;
}

Errors validate_diagnosis(const Json& j) {
    Errors errors;
    if (!j.contains("final_diagnosis") || !j.at("final_diagnosis").is_object()) {
        errors.push_back("missing object field 'final_diagnosis'");
    } else {
        need_one_of(j.at("final_diagnosis"), "status", {"Healthy", "Depression", "Anxiety", "PTSD"},
                    errors);
        need_one_of(j.at("final_diagnosis"), "severity",
                    {"NotApplicable", "None", "Mild", "Moderate", "Severe"}, errors);
    }
    if (!j.contains("reasoning") || !j.at("reasoning").is_object()) {
        errors.push_back("missing object field 'reasoning'");
    } else {
        need_string(j.at("reasoning"), "symptom_match", errors);
        need_string(j.at("reasoning"), "discrepancy_resolution", errors);
        if (!j.at("reasoning").contains("key_evidence") ||
            !j.at("reasoning").at("key_evidence").is_array())
            errors.push_back("missing array field 'key_evidence'");
    }
    return errors;
}

Errors validate_realism(const Json& j) {
    Errors errors;
    for (const char* dim : {"Discourse_Organicness", "Linguistic_Texture", "Emotional_Granularity",
                            "Defense_Resistance", "Interaction_Dynamics"}) {
        if (!j.contains(dim) || !j.at(dim).is_object()) {
            errors.push_back(std::string("missing dimension '") + dim + "'");
            continue;
        }
        need_number_in(j.at(dim), "score", 1, 10, errors);
        need_string(j.at(dim), "reason", errors);
    }
    return errors;
}

Errors validate_profile_extract(const Json& j) {
    Errors errors;
    if (!j.contains("demographics") || !j.at("demographics").is_object()) {
        errors.push_back("missing object field 'demographics'");
    } else {
        const Json& demo = j.at("demographics");
        if (!demo.contains("age") || !demo.at("age").is_number_integer())
            errors.push_back("demographics.age must be an integer");
        else if (demo.at("age").get<int>() < 0 || demo.at("age").get<int>() > 120)
            errors.push_back("demographics.age outside [0,120]");
    }
    need_string(j, "chief_complaint", errors, /*non_empty=*/true);
    for (const char* key : {"symptom_history", "behavior_tendency", "communication_style",
                            "affect_baseline"})
        need_string(j, key, errors);
    for (const char* key : {"psychosocial_factors", "risk_flags", "psychometrics"})
        if (!j.contains(key) || !j.at(key).is_object())
            errors.push_back(std::string("missing object field '") + key + "'");
    return errors;
}

}  // namespace

std::vector<std::string> validate_contract(const std::string& schema, const Json& value) {
    if (!value.is_object()) return {"top-level value must be a JSON object"};
    if (schema == "appraisal") return validate_appraisal(value);
    if (schema == "scale_plan") return validate_scale_plan(value);
    if (schema == "patient_cot") return validate_patient_cot(value);
    if (schema == "evaluator_cot") return validate_evaluator_cot(value);
    if (schema == "self_report") return validate_self_report(value);
    if (schema == "clinician_rating") return validate_clinician_rating(value);
    if (schema == "diagnosis") return validate_diagnosis(value);
    if (schema == "realism") return validate_realism(value);
    if (schema == "profile_extract") return validate_profile_extract(value);
    fail(ErrorCode::ConfigError, "unknown response contract '" + schema + "'");
}

}  // namespace intake::backends
