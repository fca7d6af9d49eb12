#pragma once
// Transcript and termination types shared between the agent kernels and the
// session driver.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "intake/json_util.hpp"

namespace intake::session {

struct ClinicianTrace {
    double xi = 0.0;
    std::string decision;  // Proceed | Investigate | Terminate
    std::string hypothesis_note;
};

struct PatientTrace {
    double trust = 0.0;
    double stress = 0.0;
    std::string strategy;
    std::string directive_text;
};

struct TurnRecord {
    int round = 0;
    std::string doctor_utterance;
    // Absent only on doctor-only rounds: the round-0 greeting and a terminal
    // closing round.
    std::optional<std::string> patient_utterance;
    std::vector<std::string> nonverbal;  // tags, each <= 10 chars
    std::optional<ClinicianTrace> clinician_trace;
    std::optional<PatientTrace> patient_trace;
};

// The four termination conditions; a session may end once at least two hold.
struct SaturationStatus {
    std::set<std::string> domains_covered;
    std::vector<std::string> required_topics;
    int rounds = 0;  // doctor+patient rounds completed (round >= 1)
    int min_rounds = 18;
    bool evidence_sufficient = false;
    bool patient_exhausted = false;

    bool domains_ok() const {
        for (const std::string& t : required_topics)
            if (!domains_covered.count(t)) return false;
        return true;
    }
    int conditions_met() const {
        int n = 0;
        if (domains_ok()) ++n;
        if (rounds >= min_rounds) ++n;
        if (evidence_sufficient) ++n;
        if (patient_exhausted) ++n;
        return n;
    }
    bool terminate_ok() const { return conditions_met() >= 2; }
};

void to_json(Json& j, const TurnRecord& t);
void from_json(const Json& j, TurnRecord& t);

}  // namespace intake::session
