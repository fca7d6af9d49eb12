#include "fixtures.hpp"

namespace fixtures {

using namespace intake;

std::string data_dir() { return INTAKE_DATA_DIR; }
std::string fixture_dir() { return INTAKE_FIXTURE_DIR; }

const scales::Repository& repo() {
    static const scales::Repository r = scales::Repository::load(data_dir() + "/scales.json");
    return r;
}

const profiles::FeatureBank& bank() {
    static const profiles::FeatureBank b =
        profiles::FeatureBank::load(data_dir() + "/feature_bank.json");
    return b;
}

const prompts::PromptLibrary& prompt_library() {
    static const prompts::PromptLibrary lib(data_dir() + "/prompts");
    return lib;
}

namespace {

profiles::PatientProfile base_profile() {
    profiles::PatientProfile p;
    p.demographics.age = 34;
    p.demographics.gender = profiles::Gender::Male;
    p.demographics.occupation = "warehouse shift lead";
    p.demographics.living_status = "lives alone";
    p.psychosocial_factors = {{"stressors", "night shifts, overdue rent"},
                              {"coping_mechanism", "long walks, video games"},
                              {"social_support", "one close friend, distant family"},
                              {"goals", "keep the job, sleep normally again"}};
    p.risk_flags = {{"suicide", profiles::RiskFlag::Denied},
                    {"self_harm", profiles::RiskFlag::Denied},
                    {"violence", profiles::RiskFlag::Denied}};
    p.behavior_tendency = "cooperative, answers briefly unless prompted";
    p.communication_style = "plain spoken, avoids big words";
    p.affect_baseline = "tired, flat edges";
    p.psychometrics = {{"impression_management", "low"},
                       {"agreeableness", "medium"},
                       {"openness", "medium"}};
    return p;
}

}  // namespace

profiles::PatientProfile depressed_profile() {
    profiles::PatientProfile p = base_profile();
    p.chief_complaint = "everything feels flat lately and I can't sleep through the night";
    p.symptom_history = "low mood and early waking for about three months";
    p.ground_truth = {profiles::ClinicalStatus::Depression, profiles::Severity::Moderate};
    return p;
}

profiles::PatientProfile anxious_profile() {
    profiles::PatientProfile p = base_profile();
    p.demographics.age = 28;
    p.demographics.gender = profiles::Gender::Female;
    p.chief_complaint = "constant worry and panic spikes before work meetings";
    p.symptom_history = "tension and racing heart for six weeks";
    p.ground_truth = {profiles::ClinicalStatus::Anxiety, profiles::Severity::Mild};
    return p;
}

profiles::PatientProfile ptsd_profile() {
    profiles::PatientProfile p = base_profile();
    p.demographics.age = 41;
    p.chief_complaint = "nightmares and flashbacks since the highway accident";
    p.symptom_history = "startles at engine sounds, avoids driving";
    p.ground_truth = {profiles::ClinicalStatus::Ptsd, profiles::Severity::Severe};
    return p;
}

profiles::PatientProfile healthy_profile() {
    profiles::PatientProfile p = base_profile();
    p.demographics.age = 52;
    p.chief_complaint = "here for a routine check, generally doing fine";
    p.symptom_history = "no sustained complaints";
    p.ground_truth = {profiles::ClinicalStatus::Healthy, profiles::Severity::NotApplicable};
    return p;
}

profiles::PatientProfile concealing_profile(std::uint64_t seed) {
    return profiles::augment_profile(depressed_profile(), profiles::DeceptionStrategy::Concealment,
                                     {"C01", "C05"}, bank(), seed);
}

profiles::PatientProfile exaggerating_profile(std::uint64_t seed) {
    return profiles::augment_profile(depressed_profile(), profiles::DeceptionStrategy::Exaggeration,
                                     {"E01", "E03"}, bank(), seed);
}

Json build_script(const ScriptSpec& spec) {
    const scales::ScaleDefinition& clin = repo().get(spec.clinician_abbr);
    const scales::ScaleDefinition& self = repo().get(spec.self_abbr);

    std::vector<int> clin_items = spec.clinician_items;
    if (clin_items.empty())
        clin_items.assign(static_cast<std::size_t>(clin.item_count),
                          std::min(clin.item_max, std::max(clin.item_min, 1)));
    std::vector<int> self_items = spec.self_items;
    if (self_items.empty()) {
        if (spec.self_abbr == "PHQ-9")
            self_items = {2, 2, 2, 1, 1, 1, 1, 1, 1};  // total 12, Moderate band
        else
            self_items.assign(static_cast<std::size_t>(self.item_count),
                              std::min(self.item_max, std::max(self.item_min, 1)));
    }

    Json evaluator_union{
        {"reasoning_step", "narrative holds together so far"},
        {"suspicion_score", spec.suspicion},
        {"next_move_type", "Proceed"},
        {"target_topic", spec.target_topic},
        {"guidance_for_chat", "stay warm, move through the next relevant area"},
        {"inconsistency_flags", spec.inconsistency_flags},
        {"item_scores", clin_items},
        {"dialogue_evidence", Json{{"0", Json::array({1})}}},
        {"suspected_direction", spec.suspected_direction},
        {"interpretation", "clinician estimate from observed answers"}};

    Json patient_union{{"thought_trace", "stick to my story, watch the tone"},
                       {"current_state", Json{{"trust", 0.5}, {"stress", 0.3}}},
                       {"strategy_directive", "answer briefly and stay consistent"},
                       {"non_verbal_cues", Json::array({"fidgeting"})},
                       {"item_scores", self_items},
                       {"interpretation", "answers marked by the patient"}};

    const char* empathetic =
        "Thank you for sharing that. Many people feel this way - take your time.";
    const char* neutral = "Noted. Next question: how have things been in that area?";

    Json script{
        {"AssessorCoT/0",
         Json{{"clinician_scales",
               Json::array({Json{{"name", spec.clinician_abbr}, {"reason", "primary domain"}}})},
              {"self_report_scales",
               Json::array({Json{{"name", spec.self_abbr}, {"reason", "baseline"}}})}}
             .dump()},
        {"EvaluatorCoT/*", evaluator_union.dump()},
        {"EvaluatorChat/*", spec.empathetic_doctor ? empathetic : neutral},
        {"PatientCoT/*", patient_union.dump()},
        {"PatientChat/*", spec.patient_reply},
        {"Diagnostician/0",
         Json{{"final_diagnosis", Json{{"status", spec.diag_status}, {"severity", "Moderate"}}},
              {"reasoning",
               Json{{"symptom_match", "pattern consistent with the presenting complaint"},
                    {"discrepancy_resolution", "self and clinician estimates compared"},
                    {"key_evidence",
                     Json::array({"Round 1: chief complaint", "Round 2: symptom detail"})}}}}
             .dump()}};

    for (auto& [key, value] : spec.extra.items()) script[key] = value;
    return script;
}

backends::BackendSet scripted_set(const Json& script, const std::string& name) {
    return backends::BackendSet(backends::ScriptedBackend::from_json(script, name));
}

session::BackendFactory script_factory(const Json& script, const std::string& name) {
    auto master = backends::ScriptedBackend::from_json(script, name);
    return [master](std::size_t) { return backends::BackendSet(master->clone_fresh()); };
}

session::SessionConfig default_config() { return session::SessionConfig{}; }

}  // namespace fixtures
