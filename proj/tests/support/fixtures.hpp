#pragma once
// Shared fixtures: canned profiles, a session script builder for the
// scripted backend, and path helpers for the bundled data files.

#include <string>
#include <vector>

#include "intake/backends.hpp"
#include "intake/profiles.hpp"
#include "intake/prompts.hpp"
#include "intake/scales.hpp"
#include "intake/session.hpp"

namespace fixtures {

using intake::Json;

std::string data_dir();
std::string fixture_dir();

const intake::scales::Repository& repo();
const intake::profiles::FeatureBank& bank();
const intake::prompts::PromptLibrary& prompt_library();

intake::profiles::PatientProfile depressed_profile();
intake::profiles::PatientProfile anxious_profile();
intake::profiles::PatientProfile ptsd_profile();
intake::profiles::PatientProfile healthy_profile();

// depressed_profile augmented from the bundled bank.
intake::profiles::PatientProfile concealing_profile(std::uint64_t seed = 7);
intake::profiles::PatientProfile exaggerating_profile(std::uint64_t seed = 7);

// Knobs for a complete scripted session. Wildcard entries carry the union of
// the turn and rating contracts, so one script drives sessions of any length.
struct ScriptSpec {
    std::string clinician_abbr = "HAM-D";
    std::vector<int> clinician_items;  // defaults to a moderate HAM-D profile
    std::string self_abbr = "PHQ-9";
    std::vector<int> self_items;  // defaults to a moderate PHQ-9 (total 12)
    bool empathetic_doctor = true;
    double suspicion = 0.2;
    std::string suspected_direction = "none";
    std::string target_topic = "sleep";
    std::vector<std::string> inconsistency_flags;
    std::string diag_status = "Depression";
    std::string patient_reply =
        "Some days are rough, mornings mostly. I keep going to work but it drains everything.";
    Json extra = Json::object();  // merged last; explicit keys override wildcards
};

Json build_script(const ScriptSpec& spec = {});

intake::backends::BackendSet scripted_set(const Json& script,
                                          const std::string& name = "fixture");
intake::session::BackendFactory script_factory(const Json& script,
                                               const std::string& name = "fixture");

intake::session::SessionConfig default_config();

}  // namespace fixtures
