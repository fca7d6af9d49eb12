#pragma once
// Measurement apparatus: classification agreement metrics, trust-dynamics
// ablation, suspicion calibration, stratified sampling, inter-rater
// statistics, and the LLM realism rater.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intake/backends.hpp"
#include "intake/prompts.hpp"
#include "intake/session.hpp"

namespace intake::evaluation {

struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<long long>> counts;  // rows = truth, cols = prediction

    long long total() const;
};

ConfusionMatrix confusion(const std::vector<std::string>& truth,
                          const std::vector<std::string>& pred,
                          const std::vector<std::string>& label_order);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long long support = 0;
};

struct MetricsReport {
    std::map<std::string, ClassMetrics> per_class;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
    double kappa = 0.0;  // Cohen, unweighted
    double mcc = 0.0;    // multiclass covariance form
};

// 0/0 ratios resolve to 0 by convention.
MetricsReport classification_metrics(const ConfusionMatrix& cm);

struct AlignmentReport {
    MetricsReport status;
    MetricsReport severity;  // over Mild/Moderate/Severe, non-Healthy ground truth only
    // Cross-category mismatches excluded from the severity matrix.
    long long healthy_truth_graded = 0;   // healthy ground truth judged pathological
    long long graded_truth_healthy = 0;   // graded ground truth judged healthy
};

AlignmentReport diagnostic_alignment(const std::vector<session::CorpusRecord>& records);

struct TrustTrajectory {
    std::vector<double> values;  // per completed round, in order
    double delta_trust = 0.0;    // final - initial
    int rounds_to_saturation = 0;
};

TrustTrajectory trust_trajectory(const session::CorpusRecord& record);

struct ArmReport {
    std::string name;
    int sessions_ok = 0;
    int sessions_failed = 0;
    double mean_delta_trust = 0.0;
    double mean_rounds_to_saturation = 0.0;
    std::vector<double> mean_trust_per_round;  // index = round position
    std::vector<double> delta_trusts;          // per session, paired by profile index
    double status_accuracy = 0.0;
    double severity_accuracy = 0.0;
};

struct AblationArm {
    std::string name;
    session::SessionConfig config;
    session::BackendFactory backends;
};

struct AblationReport {
    std::vector<ArmReport> arms;
};

// Runs each arm over the same profiles with the same per-index seeds, so
// sessions pair by profile.
AblationReport ablation_run(const std::vector<profiles::PatientProfile>& profiles_list,
                            const scales::Repository& repo,
                            const prompts::PromptLibrary& prompts,
                            const std::vector<AblationArm>& arms, std::uint64_t seed);

// Fig.-shaped CSV emitters: {round, mean_trust, arm} and {arm, session, delta_trust}.
std::string trust_curve_csv(const AblationReport& report);
std::string delta_trust_csv(const AblationReport& report);

double pearson_r(const std::vector<double>& x, const std::vector<double>& y);

// Rank-based AUC with half-credit ties; exact, positives = label true.
double auc_rank(const std::vector<double>& scores, const std::vector<bool>& positive);

struct SuspicionAlignment {
    double pearson = 0.0;
    double auc = 0.0;
    std::size_t n = 0;
};

// Human scores are 1-5; 1-2 binarizes to Reliable, 3-5 to Unreliable.
SuspicionAlignment suspicion_alignment(const std::vector<double>& system_scores,
                                       const std::vector<int>& human_scores);

std::vector<session::CorpusRecord> stratified_sample(
    const std::vector<session::CorpusRecord>& records,
    const std::map<std::string, std::size_t>& strata, std::uint64_t seed);

struct DimensionScore {
    int score = 0;  // 1-10
    std::string reason;
};

struct RealismScore {
    std::map<std::string, DimensionScore> dimensions;  // the five fixed keys
};

const std::vector<std::string>& realism_dimensions();

RealismScore rate_realism(const std::string& dialogue_text, backends::ModelBackend& backend,
                          const prompts::PromptLibrary& prompts);

// Render a record's public transcript for the rater.
std::string render_dialogue(const session::CorpusRecord& record);

// ICC(2,1): two-way random effects, absolute agreement, single measure.
// scores[rater][item]; needs >= 2 raters and >= 2 items.
double icc_two_way(const std::vector<std::vector<double>>& scores);

struct MannWhitneyResult {
    double u = 0.0;
    double z = 0.0;
    double p_two_sided = 1.0;  // normal approximation with tie correction
};

MannWhitneyResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);
double cohens_d(const std::vector<double>& x, const std::vector<double>& y);

void to_json(Json& j, const MetricsReport& m);
void to_json(Json& j, const AlignmentReport& a);
void to_json(Json& j, const AblationReport& a);
void to_json(Json& j, const RealismScore& r);

// Plain-text tables in the published row layout.
std::string format_metrics_table(const MetricsReport& status, const MetricsReport& severity);

}  // namespace intake::evaluation
