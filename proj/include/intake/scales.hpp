#pragma once
// Psychometric instrument repository: 46 scale definitions with severity
// bands, item-response scoring, and structural plan validation.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "intake/json_util.hpp"

namespace intake::scales {

enum class Domain { Depression, Anxiety, Ptsd, Sleep, MoodPersonality };
enum class Admin { SelfReport, ClinicianRated };

// How a total maps to a severity/interpretation label.
//   SumBands          — higher total, higher band (threshold = smallest total in band)
//   ReverseBands      — lower total, higher band (e.g. PDSS)
//   ConditionalCutoff — binary positive/negative with a context-dependent cutoff
//   Classification    — categorical label, not a severity ladder (e.g. MEQ chronotype)
//   AlgorithmStub     — total recorded, label requires an external algorithm
enum class ScoringMode { SumBands, ReverseBands, ConditionalCutoff, Classification, AlgorithmStub };

std::string to_string(Domain d);
std::string to_string(Admin a);
std::string to_string(ScoringMode m);
Domain domain_from_string(const std::string& s);
Admin admin_from_string(const std::string& s);
ScoringMode mode_from_string(const std::string& s);

struct Band {
    int threshold = 0;  // smallest total belonging to this band
    std::string label;
};

struct ScaleDefinition {
    std::string name;
    std::string abbr;
    Domain domain = Domain::Depression;
    Admin admin = Admin::SelfReport;
    int item_count = 1;
    int item_min = 0;
    int item_max = 0;
    ScoringMode mode = ScoringMode::SumBands;
    std::vector<Band> bands;  // ordered; increasing thresholds (decreasing for ReverseBands)
    std::string condition_key;           // e.g. "gender" for PC-PTSD-5
    std::map<std::string, int> condition_cutoffs;  // context value -> cutoff
    std::optional<int> default_cutoff;   // fallback when context value is unlisted

    int min_total() const { return item_count * item_min; }
    int max_total() const { return item_count * item_max; }
};

enum class Rater { Patient, Evaluator };

struct ScaleResponse {
    std::string scale_abbr;
    std::vector<int> item_scores;
    int total_score = 0;
    std::string severity;
    std::string interpretation;
    // item index -> transcript round indices backing that item's score
    std::map<int, std::vector<int>> dialogue_evidence;
    Rater rater = Rater::Patient;
};

struct PlanEntry {
    std::string abbr;
    std::string reason;
};

struct ScalePlan {
    std::vector<PlanEntry> clinician_scales;
    std::vector<PlanEntry> self_report_scales;
};

struct Violation {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

class Repository {
public:
    static Repository load(const std::string& path);
    static Repository from_json(const Json& doc, const std::string& context);

    const ScaleDefinition* find(const std::string& abbr_or_name) const;
    const ScaleDefinition& get(const std::string& abbr) const;  // throws UnknownLabel
    const std::vector<ScaleDefinition>& definitions() const { return defs_; }
    std::size_t size() const { return defs_.size(); }

    // First clinician / self-report scale of a domain, in file order.
    const ScaleDefinition* first_of(Domain domain, Admin admin) const;
    std::vector<const ScaleDefinition*> by_domain(Domain domain) const;

private:
    std::vector<ScaleDefinition> defs_;
};

struct ScoreResult {
    int total = 0;
    std::string severity;
};

// Sum the items and map the total through the definition's bands. `context`
// supplies the condition key for ConditionalCutoff scales (e.g. gender).
ScoreResult score_scale(const ScaleDefinition& def, const std::vector<int>& item_scores,
                        const std::map<std::string, std::string>& context = {});

ValidationReport validate_plan(const ScalePlan& plan, const Repository& repo);

// Position of a label in the definition's band order; higher = more severe
// for SumBands/ReverseBands. Unknown labels report -1.
int band_index(const ScaleDefinition& def, const std::string& label);

// Coarse clinical severity for a band label: 0 none, 1 mild, 2 moderate, 3 severe.
int severity_rank_from_label(const std::string& label);

const std::string kAlgorithmStubLabel = "requires-external-algorithm";

void to_json(Json& j, const ScaleResponse& r);
void from_json(const Json& j, ScaleResponse& r);
void to_json(Json& j, const ScalePlan& p);
void from_json(const Json& j, ScalePlan& p);

}  // namespace intake::scales
