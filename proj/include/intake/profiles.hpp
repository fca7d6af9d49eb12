#pragma once
// Patient profile construction: validation, PHQ-8 tiering, honesty state,
// and deterministic injection of concealment/exaggeration features.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intake/json_util.hpp"

namespace intake::backends {
class ModelBackend;
}

namespace intake::profiles {

enum class Gender { Male, Female, Unspecified };
enum class ClinicalStatus { Healthy, Depression, Anxiety, Ptsd };
enum class Severity { NotApplicable, Mild, Moderate, Severe };
enum class DeceptionStrategy { Frankness, Concealment, Exaggeration };
enum class RiskFlag { Denied, Suspected, Endorsed };
enum class Tier { Low, Medium, High };

std::string to_string(Gender g);
std::string to_string(ClinicalStatus s);
std::string to_string(Severity s);
std::string to_string(DeceptionStrategy s);
std::string to_string(RiskFlag f);
std::string to_string(Tier t);
Gender gender_from_string(const std::string& s);
ClinicalStatus status_from_string(const std::string& s);
Severity severity_from_string(const std::string& s);
DeceptionStrategy strategy_from_string(const std::string& s);
RiskFlag risk_flag_from_string(const std::string& s);

// The closed topic vocabulary used for topic-dependent honesty and the
// evaluator's coverage tracking.
const std::vector<std::string>& topic_vocabulary();
bool is_known_topic(const std::string& topic);

struct GroundTruth {
    ClinicalStatus status = ClinicalStatus::Healthy;
    Severity severity = Severity::NotApplicable;
};

struct HonestyState {
    DeceptionStrategy strategy = DeceptionStrategy::Frankness;
    std::vector<std::string> active_features;
    std::map<std::string, DeceptionStrategy> topic_overrides;

    DeceptionStrategy for_topic(const std::string& topic) const {
        auto it = topic_overrides.find(topic);
        return it == topic_overrides.end() ? strategy : it->second;
    }
};

struct Demographics {
    int age = 0;
    Gender gender = Gender::Unspecified;
    std::string occupation;
    std::string living_status;
};

struct PatientProfile {
    Demographics demographics;
    std::string chief_complaint;
    std::string symptom_history;
    std::map<std::string, std::string> psychosocial_factors;  // stressors, coping_mechanism, ...
    std::map<std::string, RiskFlag> risk_flags;               // suicide, self_harm, violence
    std::string behavior_tendency;
    std::string communication_style;
    std::string affect_baseline;
    std::map<std::string, std::string> psychometrics;  // impression_management, ...
    GroundTruth ground_truth;
    HonestyState honesty;
};

struct DeceptionFeature {
    std::string id;  // "C01".."C06", "E01".."E06"
    DeceptionStrategy strategy_class = DeceptionStrategy::Concealment;
    std::string label;
    std::vector<std::string> observables;
    std::vector<std::string> target_fields;  // profile field paths
    std::vector<std::string> tags;
};

class FeatureBank {
public:
    static FeatureBank load(const std::string& path);
    static FeatureBank from_json(const Json& doc, const std::string& context);

    const DeceptionFeature* find(const std::string& id) const;
    const std::vector<DeceptionFeature>& features() const { return features_; }
    std::vector<const DeceptionFeature*> by_class(DeceptionStrategy strategy) const;

private:
    std::vector<DeceptionFeature> features_;
};

struct SeverityTier {
    Tier tier = Tier::Low;
    int source_score = 0;
};

// Fixed PHQ-8 band boundaries: 0-9 Low, 10-19 Medium, 20-24 High.
SeverityTier phq8_to_tier(int score);

// Validation used on load and before a session starts. `bank` resolves
// honesty feature references when provided.
struct ProfileIssue {
    std::string code;
    std::string message;
};
std::vector<ProfileIssue> validate_profile(const PatientProfile& profile,
                                           const FeatureBank* bank = nullptr);

// Rewrite each feature's target fields to embed its observables as behavioral
// constraints. Pure in (base, strategy, feature_ids, seed); ground truth,
// demographics, and risk-flag values are never touched — risk-targeted
// features install a "risk" topic override instead.
PatientProfile augment_profile(const PatientProfile& base, DeceptionStrategy strategy,
                               const std::vector<std::string>& feature_ids,
                               const FeatureBank& bank, std::uint64_t seed);

// LLM-backed extraction of a structured profile from an interview transcript.
PatientProfile extract_profile(const std::string& raw_transcript,
                               backends::ModelBackend& backend);

void to_json(Json& j, const GroundTruth& g);
void from_json(const Json& j, GroundTruth& g);
void to_json(Json& j, const HonestyState& h);
void from_json(const Json& j, HonestyState& h);
void to_json(Json& j, const PatientProfile& p);
void from_json(const Json& j, PatientProfile& p);

}  // namespace intake::profiles
