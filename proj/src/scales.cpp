#include "intake/scales.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace intake::scales {

std::string to_string(Domain d) {
    switch (d) {
        case Domain::Depression: return "Depression";
        case Domain::Anxiety: return "Anxiety";
        case Domain::Ptsd: return "PTSD";
        case Domain::Sleep: return "Sleep";
        case Domain::MoodPersonality: return "MoodPersonality";
    }
    return "Depression";
}

std::string to_string(Admin a) {
    return a == Admin::SelfReport ? "SelfReport" : "ClinicianRated";
}

std::string to_string(ScoringMode m) {
    switch (m) {
        case ScoringMode::SumBands: return "SumBands";
        case ScoringMode::ReverseBands: return "ReverseBands";
        case ScoringMode::ConditionalCutoff: return "ConditionalCutoff";
        case ScoringMode::Classification: return "Classification";
        case ScoringMode::AlgorithmStub: return "AlgorithmStub";
    }
    return "SumBands";
}

Domain domain_from_string(const std::string& s) {
    if (s == "Depression") return Domain::Depression;
    if (s == "Anxiety") return Domain::Anxiety;
    if (s == "PTSD") return Domain::Ptsd;
    if (s == "Sleep") return Domain::Sleep;
    if (s == "MoodPersonality") return Domain::MoodPersonality;
    fail(ErrorCode::ParseError, "unknown domain '" + s + "'");
}

Admin admin_from_string(const std::string& s) {
    if (s == "SelfReport") return Admin::SelfReport;
    if (s == "ClinicianRated") return Admin::ClinicianRated;
    fail(ErrorCode::ParseError, "unknown admin type '" + s + "'");
}

ScoringMode mode_from_string(const std::string& s) {
    if (s == "SumBands") return ScoringMode::SumBands;
    if (s == "ReverseBands") return ScoringMode::ReverseBands;
    if (s == "ConditionalCutoff") return ScoringMode::ConditionalCutoff;
    if (s == "Classification") return ScoringMode::Classification;
    if (s == "AlgorithmStub") return ScoringMode::AlgorithmStub;
    fail(ErrorCode::ParseError, "unknown scoring mode '" + s + "'");
}

namespace {

ScaleDefinition parse_definition(const Json& j, const std::string& context) {
    ScaleDefinition def;
    def.name = require_field(j, "name", context).get<std::string>();
    def.abbr = require_field(j, "abbr", context).get<std::string>();
    def.domain = domain_from_string(require_field(j, "domain", context).get<std::string>());
    def.admin = admin_from_string(require_field(j, "admin", context).get<std::string>());
    def.item_count = require_field(j, "item_count", context).get<int>();
    const Json& range = require_field(j, "item_range", context);
    def.item_min = require_field(range, "min", context).get<int>();
    def.item_max = require_field(range, "max", context).get<int>();
    def.mode = mode_from_string(require_field(j, "scoring_mode", context).get<std::string>());

    if (def.item_count < 1)
        fail(ErrorCode::ParseError, context + ": " + def.abbr + " item_count < 1");
    if (def.item_min > def.item_max)
        fail(ErrorCode::ParseError, context + ": " + def.abbr + " item_range inverted");

    if (j.contains("bands")) {
        for (const Json& b : j.at("bands")) {
            Band band;
            band.threshold = require_field(b, "threshold", context).get<int>();
            band.label = require_field(b, "label", context).get<std::string>();
            def.bands.push_back(band);
        }
    }
    if (j.contains("condition_key")) def.condition_key = j.at("condition_key").get<std::string>();
    if (j.contains("condition_cutoffs")) {
        for (auto& [k, v] : j.at("condition_cutoffs").items())
            def.condition_cutoffs[k] = v.get<int>();
    }
    if (j.contains("default_cutoff")) def.default_cutoff = j.at("default_cutoff").get<int>();

    // Band thresholds must be strictly monotone and start at the reachable extreme,
    // so every in-range total maps to a band.
    if (def.mode == ScoringMode::SumBands || def.mode == ScoringMode::Classification ||
        def.mode == ScoringMode::ReverseBands) {
        if (def.bands.empty())
            fail(ErrorCode::ParseError, context + ": " + def.abbr + " has no bands");
        const bool reverse = def.mode == ScoringMode::ReverseBands;
        for (std::size_t i = 1; i < def.bands.size(); ++i) {
            const bool ordered = reverse ? def.bands[i].threshold < def.bands[i - 1].threshold
                                         : def.bands[i].threshold > def.bands[i - 1].threshold;
            if (!ordered)
                fail(ErrorCode::ParseError,
                     context + ": " + def.abbr + " band thresholds not strictly monotone");
        }
        const int anchor = reverse ? def.bands.back().threshold : def.bands.front().threshold;
        if (anchor > def.min_total())
            fail(ErrorCode::ParseError,
                 context + ": " + def.abbr + " lowest band threshold above minimum total");
    }
    if (def.mode == ScoringMode::ConditionalCutoff && def.condition_key.empty())
        fail(ErrorCode::ParseError, context + ": " + def.abbr + " missing condition_key");
    return def;
}

}  // namespace

Repository Repository::load(const std::string& path) {
    return from_json(load_json_file(path), path);
}

Repository Repository::from_json(const Json& doc, const std::string& context) {
    if (!doc.is_array()) fail(ErrorCode::ParseError, context + ": expected a JSON array");
    Repository repo;
    std::set<std::string> seen;
    for (const Json& entry : doc) {
        ScaleDefinition def = parse_definition(entry, context);
        if (!seen.insert(def.abbr).second)
            fail(ErrorCode::ParseError, context + ": duplicate abbr " + def.abbr);
        repo.defs_.push_back(std::move(def));
    }
    if (repo.defs_.size() != 46)
        fail(ErrorCode::CountMismatch,
             context + ": expected 46 definitions, found " + std::to_string(repo.defs_.size()));
    return repo;
}

const ScaleDefinition* Repository::find(const std::string& abbr_or_name) const {
    for (const ScaleDefinition& def : defs_)
        if (def.abbr == abbr_or_name || def.name == abbr_or_name) return &def;
    return nullptr;
}

const ScaleDefinition& Repository::get(const std::string& abbr) const {
    const ScaleDefinition* def = find(abbr);
    if (!def) fail(ErrorCode::UnknownLabel, "unknown scale '" + abbr + "'");
    return *def;
}

const ScaleDefinition* Repository::first_of(Domain domain, Admin admin) const {
    for (const ScaleDefinition& def : defs_)
        if (def.domain == domain && def.admin == admin) return &def;
    return nullptr;
}

std::vector<const ScaleDefinition*> Repository::by_domain(Domain domain) const {
    std::vector<const ScaleDefinition*> out;
    for (const ScaleDefinition& def : defs_)
        if (def.domain == domain) out.push_back(&def);
    return out;
}

namespace {

// Among bands with threshold <= total pick the largest threshold. Bands are
// stored increasing for SumBands/Classification and decreasing for ReverseBands;
// the same rule yields monotone (resp. antitone) severity in both cases.
const Band& band_for_total(const ScaleDefinition& def, int total) {
    const Band* best = nullptr;
    for (const Band& b : def.bands) {
        if (b.threshold <= total && (!best || b.threshold > best->threshold)) best = &b;
    }
    // Unreachable for validated definitions: the lowest band anchors at min_total.
    if (!best) fail(ErrorCode::OutOfRange, def.abbr + ": no band for total " + std::to_string(total));
    return *best;
}

}  // namespace

ScoreResult score_scale(const ScaleDefinition& def, const std::vector<int>& item_scores,
                        const std::map<std::string, std::string>& context) {
    if (static_cast<int>(item_scores.size()) != def.item_count)
        fail(ErrorCode::ItemCountMismatch,
             def.abbr + ": expected " + std::to_string(def.item_count) + " items, got " +
                 std::to_string(item_scores.size()));
    for (std::size_t i = 0; i < item_scores.size(); ++i) {
        if (item_scores[i] < def.item_min || item_scores[i] > def.item_max)
            fail(ErrorCode::ItemOutOfRange,
                 def.abbr + ": item " + std::to_string(i) + " = " + std::to_string(item_scores[i]) +
                     " outside [" + std::to_string(def.item_min) + "," +
                     std::to_string(def.item_max) + "]");
    }
    ScoreResult result;
    result.total = std::accumulate(item_scores.begin(), item_scores.end(), 0);

    switch (def.mode) {
        case ScoringMode::SumBands:
        case ScoringMode::ReverseBands:
        case ScoringMode::Classification:
            result.severity = band_for_total(def, result.total).label;
            break;
        case ScoringMode::ConditionalCutoff: {
            auto it = context.find(def.condition_key);
            int cutoff = 0;
            if (it != context.end()) {
                auto c = def.condition_cutoffs.find(it->second);
                if (c != def.condition_cutoffs.end())
                    cutoff = c->second;
                else if (def.default_cutoff)
                    cutoff = *def.default_cutoff;
                else
                    fail(ErrorCode::MissingContext,
                         def.abbr + ": no cutoff for " + def.condition_key + "=" + it->second);
            } else if (def.default_cutoff) {
                cutoff = *def.default_cutoff;
            } else {
                fail(ErrorCode::MissingContext,
                     def.abbr + ": context missing '" + def.condition_key + "'");
            }
            result.severity = result.total >= cutoff ? "Positive" : "Negative";
            break;
        }
        case ScoringMode::AlgorithmStub:
            result.severity = kAlgorithmStubLabel;
            break;
    }
    return result;
}

ValidationReport validate_plan(const ScalePlan& plan, const Repository& repo) {
    ValidationReport report;
    auto note = [&report](const std::string& code, const std::string& message) {
        report.violations.push_back({code, message});
    };

    if (plan.clinician_scales.empty())
        note("EmptyClinicianList", "clinician_scales must not be empty");

    std::set<Domain> primaries;
    std::set<std::string> seen_abbrs;
    auto check_list = [&](const std::vector<PlanEntry>& list, Admin expected) {
        for (const PlanEntry& entry : list) {
            const ScaleDefinition* def = repo.find(entry.abbr);
            if (!def) {
                note("UnknownScale", "scale '" + entry.abbr + "' not in repository");
                continue;
            }
            if (!seen_abbrs.insert(def->abbr).second)
                note("DuplicateScale", "scale '" + def->abbr + "' selected twice");
            if (def->admin != expected)
                note("AdminMismatch", "scale '" + def->abbr + "' is " + to_string(def->admin) +
                                          " but listed under " + to_string(expected));
            if (def->domain == Domain::Depression || def->domain == Domain::Anxiety ||
                def->domain == Domain::Ptsd)
                primaries.insert(def->domain);
        }
    };
    check_list(plan.clinician_scales, Admin::ClinicianRated);
    check_list(plan.self_report_scales, Admin::SelfReport);

    if (primaries.size() > 1) {
        std::string names;
        for (Domain d : primaries) names += (names.empty() ? "" : ", ") + to_string(d);
        note("MixedPrimaryDomains", "plan mixes primary domains: " + names);
    }
    return report;
}

int band_index(const ScaleDefinition& def, const std::string& label) {
    for (std::size_t i = 0; i < def.bands.size(); ++i)
        if (def.bands[i].label == label) return static_cast<int>(i);
    return -1;
}

int severity_rank_from_label(const std::string& label) {
    const std::string l = lowercase(label);
    auto has = [&l](const char* needle) { return l.find(needle) != std::string::npos; };
    // "mod" is checked before "sev" so combined labels ("Moderate/Severe",
    // "Moderately severe") grade conservatively.
    if (has("mod")) return 2;
    if (has("sev") || has("high")) return 3;
    if (has("mild") || has("borderline") || has("possible") || has("sub") || has("significant"))
        return 1;
    if (has("probable") || has("clinical") || has("positive") || has("above") || has("poor") ||
        has("excessive") || has("sleepy") || has("generalized"))
        return 2;
    return 0;
}

void to_json(Json& j, const ScaleResponse& r) {
    Json evidence = Json::object();
    for (const auto& [item, rounds] : r.dialogue_evidence)
        evidence[std::to_string(item)] = rounds;
    j = Json{{"scale_abbr", r.scale_abbr},
             {"item_scores", r.item_scores},
             {"total_score", r.total_score},
             {"severity", r.severity},
             {"interpretation", r.interpretation},
             {"dialogue_evidence", evidence},
             {"rater", r.rater == Rater::Patient ? "Patient" : "Evaluator"}};
}

void from_json(const Json& j, ScaleResponse& r) {
    r.scale_abbr = j.at("scale_abbr").get<std::string>();
    r.item_scores = j.at("item_scores").get<std::vector<int>>();
    r.total_score = j.at("total_score").get<int>();
    r.severity = j.at("severity").get<std::string>();
    r.interpretation = j.value("interpretation", "");
    r.dialogue_evidence.clear();
    if (j.contains("dialogue_evidence")) {
        for (auto& [k, v] : j.at("dialogue_evidence").items()) {
            if (k.empty() || k.find_first_not_of("0123456789") != std::string::npos)
                fail(ErrorCode::ParseError,
                     r.scale_abbr + ": dialogue_evidence key '" + k + "' is not an item index");
            r.dialogue_evidence[std::stoi(k)] = v.get<std::vector<int>>();
        }
    }
    r.rater = j.value("rater", "Patient") == std::string("Evaluator") ? Rater::Evaluator
                                                                      : Rater::Patient;
}

void to_json(Json& j, const ScalePlan& p) {
    Json clinician = Json::array();
    for (const PlanEntry& e : p.clinician_scales)
        clinician.push_back(Json{{"abbr", e.abbr}, {"reason", e.reason}});
    Json self = Json::array();
    for (const PlanEntry& e : p.self_report_scales)
        self.push_back(Json{{"abbr", e.abbr}, {"reason", e.reason}});
    j = Json{{"clinician_scales", clinician}, {"self_report_scales", self}};
}

void from_json(const Json& j, ScalePlan& p) {
    p.clinician_scales.clear();
    p.self_report_scales.clear();
    for (const Json& e : j.at("clinician_scales"))
        p.clinician_scales.push_back({e.at("abbr").get<std::string>(), e.value("reason", "")});
    for (const Json& e : j.at("self_report_scales"))
        p.self_report_scales.push_back({e.at("abbr").get<std::string>(), e.value("reason", "")});
}

}  // namespace intake::scales
