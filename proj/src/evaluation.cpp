#include "intake/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace intake::evaluation {

// ---------------------------------------------------------------------------
// Confusion and agreement metrics

long long ConfusionMatrix::total() const {
    long long n = 0;
    for (const auto& row : counts)
        for (long long v : row) n += v;
    return n;
}

ConfusionMatrix confusion(const std::vector<std::string>& truth,
                          const std::vector<std::string>& pred,
                          const std::vector<std::string>& label_order) {
    if (truth.size() != pred.size())
        fail(ErrorCode::LengthMismatch, "truth has " + std::to_string(truth.size()) +
                                            " entries, pred has " + std::to_string(pred.size()));
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < label_order.size(); ++i) index[label_order[i]] = i;

    ConfusionMatrix cm;
    cm.labels = label_order;
    cm.counts.assign(label_order.size(), std::vector<long long>(label_order.size(), 0));
    for (std::size_t k = 0; k < truth.size(); ++k) {
        auto ti = index.find(truth[k]);
        auto pi = index.find(pred[k]);
        if (ti == index.end()) fail(ErrorCode::UnknownLabel, "truth label '" + truth[k] + "'");
        if (pi == index.end()) fail(ErrorCode::UnknownLabel, "pred label '" + pred[k] + "'");
        ++cm.counts[ti->second][pi->second];
    }
    return cm;
}

MetricsReport classification_metrics(const ConfusionMatrix& cm) {
    const std::size_t k = cm.labels.size();
    const double total = static_cast<double>(cm.total());
    if (k == 0 || total <= 0) fail(ErrorCode::DegenerateMatrix, "matrix has no counts");

    MetricsReport report;
    double diag = 0.0;
    std::vector<double> row_sum(k, 0.0), col_sum(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const double v = static_cast<double>(cm.counts[i][j]);
            row_sum[i] += v;
            col_sum[j] += v;
            if (i == j) diag += v;
        }

    double macro_f1 = 0.0, weighted_f1 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double tp = static_cast<double>(cm.counts[i][i]);
        ClassMetrics m;
        m.support = static_cast<long long>(row_sum[i]);
        m.precision = col_sum[i] > 0 ? tp / col_sum[i] : 0.0;
        m.recall = row_sum[i] > 0 ? tp / row_sum[i] : 0.0;
        m.f1 = (m.precision + m.recall) > 0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        macro_f1 += m.f1;
        weighted_f1 += m.f1 * row_sum[i];
        report.per_class[cm.labels[i]] = m;
    }
    report.accuracy = diag / total;
    report.macro_f1 = macro_f1 / static_cast<double>(k);
    report.weighted_f1 = weighted_f1 / total;

    // Cohen's kappa: observed vs chance agreement from the marginals.
    const double po = diag / total;
    double pe = 0.0;
    for (std::size_t i = 0; i < k; ++i) pe += (row_sum[i] / total) * (col_sum[i] / total);
    report.kappa = pe >= 1.0 ? 1.0 : (po - pe) / (1.0 - pe);

    // Multiclass MCC, covariance form over the marginals.
    double sum_tp = diag;
    double dot_marginals = 0.0, sum_row_sq = 0.0, sum_col_sq = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        dot_marginals += row_sum[i] * col_sum[i];
        sum_row_sq += row_sum[i] * row_sum[i];
        sum_col_sq += col_sum[i] * col_sum[i];
    }
    const double numerator = sum_tp * total - dot_marginals;
    const double denominator =
        std::sqrt(total * total - sum_col_sq) * std::sqrt(total * total - sum_row_sq);
    report.mcc = denominator > 0 ? numerator / denominator : (numerator == 0.0 ? 1.0 : 0.0);
    if (po == 1.0) report.mcc = 1.0;  // perfect diagonal, even if a class is absent
    return report;
}

// ---------------------------------------------------------------------------
// Diagnostic alignment

AlignmentReport diagnostic_alignment(const std::vector<session::CorpusRecord>& records) {
    if (records.empty()) fail(ErrorCode::EmptyCorpus, "no records to align");
    static const std::vector<std::string> status_labels = {"Healthy", "Depression", "Anxiety",
                                                           "PTSD"};
    static const std::vector<std::string> severity_labels = {"Mild", "Moderate", "Severe"};

    std::vector<std::string> status_truth, status_pred;
    std::vector<std::string> severity_truth, severity_pred;
    AlignmentReport report;

    for (const session::CorpusRecord& r : records) {
        const std::string truth = profiles::to_string(r.profile.ground_truth.status);
        const std::string pred = profiles::to_string(r.diagnosis.status);
        status_truth.push_back(truth);
        status_pred.push_back(pred);

        const bool truth_healthy = r.profile.ground_truth.status == profiles::ClinicalStatus::Healthy;
        const bool pred_healthy = r.diagnosis.status == profiles::ClinicalStatus::Healthy;
        if (truth_healthy) {
            if (!pred_healthy) ++report.healthy_truth_graded;
            continue;  // a healthy case has no true grade
        }
        if (pred_healthy) {
            ++report.graded_truth_healthy;
            continue;  // no predicted grade to compare
        }
        severity_truth.push_back(profiles::to_string(r.profile.ground_truth.severity));
        severity_pred.push_back(profiles::to_string(r.diagnosis.severity));
    }

    report.status = classification_metrics(confusion(status_truth, status_pred, status_labels));
    if (!severity_truth.empty())
        report.severity =
            classification_metrics(confusion(severity_truth, severity_pred, severity_labels));
    return report;
}

// ---------------------------------------------------------------------------
// Trust dynamics / ablation

TrustTrajectory trust_trajectory(const session::CorpusRecord& record) {
    TrustTrajectory t;
    for (const session::TurnRecord& turn : record.final_transcript)
        if (turn.patient_trace) t.values.push_back(turn.patient_trace->trust);
    if (!t.values.empty()) t.delta_trust = t.values.back() - t.values.front();
    t.rounds_to_saturation = static_cast<int>(t.values.size());
    return t;
}

AblationReport ablation_run(const std::vector<profiles::PatientProfile>& profiles_list,
                            const scales::Repository& repo,
                            const prompts::PromptLibrary& prompts,
                            const std::vector<AblationArm>& arms, std::uint64_t seed) {
    AblationReport report;
    for (const AblationArm& arm : arms) {
        auto [records, batch] =
            session::run_batch(profiles_list, repo, arm.backends, prompts, arm.config, seed);
        ArmReport out;
        out.name = arm.name;
        out.sessions_ok = static_cast<int>(batch.successes);
        out.sessions_failed = static_cast<int>(batch.failures);

        double delta_sum = 0.0, rounds_sum = 0.0;
        int status_hits = 0, severity_hits = 0;
        std::vector<double> round_sums;
        std::vector<int> round_counts;
        for (const session::CorpusRecord& r : records) {
            const TrustTrajectory t = trust_trajectory(r);
            out.delta_trusts.push_back(t.delta_trust);
            delta_sum += t.delta_trust;
            rounds_sum += t.rounds_to_saturation;
            for (std::size_t i = 0; i < t.values.size(); ++i) {
                if (round_sums.size() <= i) {
                    round_sums.push_back(0.0);
                    round_counts.push_back(0);
                }
                round_sums[i] += t.values[i];
                ++round_counts[i];
            }
            if (r.diagnosis.status == r.profile.ground_truth.status) ++status_hits;
            if (r.diagnosis.severity == r.profile.ground_truth.severity) ++severity_hits;
        }
        const double n = static_cast<double>(records.size());
        if (n > 0) {
            out.mean_delta_trust = delta_sum / n;
            out.mean_rounds_to_saturation = rounds_sum / n;
            out.status_accuracy = status_hits / n;
            out.severity_accuracy = severity_hits / n;
            for (std::size_t i = 0; i < round_sums.size(); ++i)
                out.mean_trust_per_round.push_back(round_sums[i] / round_counts[i]);
        }
        report.arms.push_back(std::move(out));
    }
    return report;
}

std::string trust_curve_csv(const AblationReport& report) {
    std::ostringstream out;
    out << "round,mean_trust,arm\n";
    for (const ArmReport& arm : report.arms)
        for (std::size_t i = 0; i < arm.mean_trust_per_round.size(); ++i)
            out << (i + 1) << ',' << arm.mean_trust_per_round[i] << ',' << arm.name << '\n';
    return out.str();
}

std::string delta_trust_csv(const AblationReport& report) {
    std::ostringstream out;
    out << "arm,session,delta_trust\n";
    for (const ArmReport& arm : report.arms)
        for (std::size_t i = 0; i < arm.delta_trusts.size(); ++i)
            out << arm.name << ',' << i << ',' << arm.delta_trusts[i] << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Correlation and AUC

double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) fail(ErrorCode::LengthMismatch, "pearson inputs differ in length");
    if (x.size() < 2) fail(ErrorCode::InsufficientData, "pearson needs >= 2 pairs");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        fail(ErrorCode::InsufficientData, "pearson undefined for constant input");
    return sxy / std::sqrt(sxx * syy);
}

double auc_rank(const std::vector<double>& scores, const std::vector<bool>& positive) {
    if (scores.size() != positive.size())
        fail(ErrorCode::LengthMismatch, "scores and labels differ in length");
    std::size_t n_pos = 0;
    for (bool p : positive) n_pos += p ? 1 : 0;
    const std::size_t n_neg = scores.size() - n_pos;
    if (n_pos == 0 || n_neg == 0)
        fail(ErrorCode::DegenerateLabels, "AUC needs both classes present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks over tie runs keep the statistic exact.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k)
            if (positive[order[k]]) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

SuspicionAlignment suspicion_alignment(const std::vector<double>& system_scores,
                                       const std::vector<int>& human_scores) {
    if (system_scores.size() != human_scores.size())
        fail(ErrorCode::LengthMismatch, "system and human score lists differ in length");
    if (system_scores.size() < 3)
        fail(ErrorCode::InsufficientData, "need >= 3 pairs");
    for (double s : system_scores)
        if (s < 0.0 || s > 1.0) fail(ErrorCode::OutOfRange, "system scores must lie in [0,1]");
    for (int h : human_scores)
        if (h < 1 || h > 5) fail(ErrorCode::OutOfRange, "human scores must lie in 1..5");

    SuspicionAlignment out;
    out.n = system_scores.size();
    std::vector<double> human_real(human_scores.begin(), human_scores.end());
    out.pearson = pearson_r(system_scores, human_real);
    std::vector<bool> unreliable;
    unreliable.reserve(human_scores.size());
    for (int h : human_scores) unreliable.push_back(h >= 3);
    out.auc = auc_rank(system_scores, unreliable);
    return out;
}

// ---------------------------------------------------------------------------
// Stratified sampling

std::vector<session::CorpusRecord> stratified_sample(
    const std::vector<session::CorpusRecord>& records,
    const std::map<std::string, std::size_t>& strata, std::uint64_t seed) {
    std::map<std::string, std::vector<std::size_t>> by_strategy;
    for (std::size_t i = 0; i < records.size(); ++i)
        by_strategy[profiles::to_string(records[i].honesty_echo.strategy)].push_back(i);

    std::vector<std::size_t> picked;
    for (const auto& [strategy, want] : strata) {
        auto it = by_strategy.find(strategy);
        const std::size_t have = it == by_strategy.end() ? 0 : it->second.size();
        if (have < want)
            fail(ErrorCode::InsufficientStratum,
                 "stratum '" + strategy + "' holds " + std::to_string(have) + " records, " +
                     std::to_string(want) + " requested");
        if (want == 0) continue;
        const std::vector<std::size_t>& pool = it->second;

        // Secondary balancing over clinical status by largest remainder.
        std::map<std::string, std::vector<std::size_t>> by_status;
        for (std::size_t idx : pool)
            by_status[profiles::to_string(records[idx].profile.ground_truth.status)].push_back(idx);

        std::vector<std::pair<std::string, double>> shares;
        std::map<std::string, std::size_t> quota;
        std::size_t assigned = 0;
        for (const auto& [status, bucket] : by_status) {
            const double share = static_cast<double>(want) * static_cast<double>(bucket.size()) /
                                 static_cast<double>(pool.size());
            quota[status] = static_cast<std::size_t>(share);
            assigned += quota[status];
            shares.emplace_back(status, share - static_cast<double>(quota[status]));
        }
        std::stable_sort(shares.begin(), shares.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        for (std::size_t i = 0; assigned < want; i = (i + 1) % shares.size()) {
            const std::string& status = shares[i].first;
            if (quota[status] < by_status[status].size()) {
                ++quota[status];
                ++assigned;
            }
        }

        std::mt19937_64 rng(seed ^ fnv1a(strategy));
        for (auto& [status, bucket] : by_status) {
            std::shuffle(bucket.begin(), bucket.end(), rng);
            for (std::size_t i = 0; i < quota[status] && i < bucket.size(); ++i)
                picked.push_back(bucket[i]);
        }
    }

    std::sort(picked.begin(), picked.end());
    std::vector<session::CorpusRecord> out;
    out.reserve(picked.size());
    for (std::size_t idx : picked) out.push_back(records[idx]);
    return out;
}

// ---------------------------------------------------------------------------
// Realism rater

const std::vector<std::string>& realism_dimensions() {
    static const std::vector<std::string> dims = {"Discourse_Organicness", "Linguistic_Texture",
                                                  "Emotional_Granularity", "Defense_Resistance",
                                                  "Interaction_Dynamics"};
    return dims;
}

std::string render_dialogue(const session::CorpusRecord& record) {
    std::ostringstream out;
    for (const session::TurnRecord& t : record.final_transcript) {
        out << "Doctor: " << t.doctor_utterance << '\n';
        if (t.patient_utterance) out << "Patient: " << *t.patient_utterance << '\n';
    }
    return out.str();
}

RealismScore rate_realism(const std::string& dialogue_text, backends::ModelBackend& backend,
                          const prompts::PromptLibrary& prompts) {
    if (dialogue_text.empty()) fail(ErrorCode::InvalidArgument, "dialogue text is empty");
    backends::ModelRequest request;
    request.role_tag = backends::RoleTag::Rater;
    request.contract = backends::ResponseContract::json("realism");
    request.messages = {{backends::Speaker::System, prompts.get("rater_system")},
                        {backends::Speaker::User, dialogue_text}};
    const backends::ModelResponse response = backend.complete(request);

    RealismScore score;
    for (const std::string& dim : realism_dimensions()) {
        const Json& entry = response.parsed->at(dim);
        score.dimensions[dim] = {entry.at("score").get<int>(), entry.value("reason", "")};
    }
    return score;
}

// ---------------------------------------------------------------------------
// Inter-rater statistics

double icc_two_way(const std::vector<std::vector<double>>& scores) {
    const std::size_t k = scores.size();  // raters
    if (k < 2) fail(ErrorCode::InsufficientData, "need >= 2 raters");
    const std::size_t n = scores[0].size();  // items / targets
    if (n < 2) fail(ErrorCode::InsufficientData, "need >= 2 items");
    for (const auto& row : scores)
        if (row.size() != n) fail(ErrorCode::LengthMismatch, "ragged score matrix");

    const double dk = static_cast<double>(k), dn = static_cast<double>(n);
    double grand = 0.0;
    for (const auto& row : scores)
        for (double v : row) grand += v;
    grand /= dk * dn;

    std::vector<double> rater_mean(k, 0.0), item_mean(n, 0.0);
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            rater_mean[r] += scores[r][c] / dn;
            item_mean[c] += scores[r][c] / dk;
        }

    double ss_total = 0.0, ss_raters = 0.0, ss_items = 0.0;
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            const double d = scores[r][c] - grand;
            ss_total += d * d;
        }
    for (double m : rater_mean) ss_raters += dn * (m - grand) * (m - grand);
    for (double m : item_mean) ss_items += dk * (m - grand) * (m - grand);
    const double ss_error = ss_total - ss_raters - ss_items;

    const double ms_items = ss_items / (dn - 1.0);             // between targets
    const double ms_raters = ss_raters / (dk - 1.0);           // between raters
    const double ms_error = ss_error / ((dn - 1.0) * (dk - 1.0));

    const double denominator =
        ms_items + (dk - 1.0) * ms_error + dk * (ms_raters - ms_error) / dn;
    if (denominator == 0.0)
        fail(ErrorCode::InsufficientData, "ICC undefined: no variance in the score matrix");
    return (ms_items - ms_error) / denominator;
}

namespace {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

MannWhitneyResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) fail(ErrorCode::InsufficientData, "empty sample");
    const double n1 = static_cast<double>(x.size()), n2 = static_cast<double>(y.size());

    std::vector<double> all;
    all.reserve(x.size() + y.size());
    all.insert(all.end(), x.begin(), x.end());
    all.insert(all.end(), y.begin(), y.end());
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&all](std::size_t a, std::size_t b) { return all[a] < all[b]; });

    std::vector<double> ranks(all.size(), 0.0);
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && all[order[j + 1]] == all[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }

    double rank_sum_x = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) rank_sum_x += ranks[k];

    MannWhitneyResult result;
    result.u = rank_sum_x - n1 * (n1 + 1.0) / 2.0;
    const double mu = n1 * n2 / 2.0;
    const double n = n1 + n2;
    const double sigma_sq = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (sigma_sq > 0.0) {
        result.z = (result.u - mu) / std::sqrt(sigma_sq);
        result.p_two_sided = 2.0 * normal_sf(std::fabs(result.z));
        if (result.p_two_sided > 1.0) result.p_two_sided = 1.0;
    }
    return result;
}

double cohens_d(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2 || y.size() < 2) fail(ErrorCode::InsufficientData, "need >= 2 per group");
    auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    auto var = [&mean](const std::vector<double>& v) {
        const double m = mean(v);
        double s = 0.0;
        for (double e : v) s += (e - m) * (e - m);
        return s / (static_cast<double>(v.size()) - 1.0);
    };
    const double n1 = static_cast<double>(x.size()), n2 = static_cast<double>(y.size());
    const double pooled =
        std::sqrt(((n1 - 1.0) * var(x) + (n2 - 1.0) * var(y)) / (n1 + n2 - 2.0));
    if (pooled == 0.0) return 0.0;
    return (mean(x) - mean(y)) / pooled;
}

// ---------------------------------------------------------------------------
// JSON / tables

void to_json(Json& j, const MetricsReport& m) {
    Json per_class = Json::object();
    for (const auto& [label, c] : m.per_class)
        per_class[label] = Json{{"precision", c.precision},
                                {"recall", c.recall},
                                {"f1", c.f1},
                                {"support", c.support}};
    j = Json{{"per_class", per_class}, {"accuracy", m.accuracy},  {"macro_f1", m.macro_f1},
             {"weighted_f1", m.weighted_f1}, {"kappa", m.kappa}, {"mcc", m.mcc}};
}

void to_json(Json& j, const AlignmentReport& a) {
    j = Json{{"status", a.status},
             {"severity", a.severity},
             {"leakage",
              Json{{"healthy_truth_graded", a.healthy_truth_graded},
                   {"graded_truth_healthy", a.graded_truth_healthy}}}};
}

void to_json(Json& j, const AblationReport& a) {
    Json arms = Json::array();
    for (const ArmReport& arm : a.arms)
        arms.push_back(Json{{"name", arm.name},
                            {"sessions_ok", arm.sessions_ok},
                            {"sessions_failed", arm.sessions_failed},
                            {"mean_delta_trust", arm.mean_delta_trust},
                            {"mean_rounds_to_saturation", arm.mean_rounds_to_saturation},
                            {"mean_trust_per_round", arm.mean_trust_per_round},
                            {"delta_trusts", arm.delta_trusts},
                            {"status_accuracy", arm.status_accuracy},
                            {"severity_accuracy", arm.severity_accuracy}});
    j = Json{{"arms", arms}};
}

void to_json(Json& j, const RealismScore& r) {
    j = Json::object();
    for (const auto& [dim, s] : r.dimensions)
        j[dim] = Json{{"score", s.score}, {"reason", s.reason}};
}

std::string format_metrics_table(const MetricsReport& status, const MetricsReport& severity) {
    std::ostringstream out;
    auto line = [&out](const std::string& name, double s, double v) {
        out << name;
        for (std::size_t i = name.size(); i < 24; ++i) out << ' ';
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%8.3f %8.3f\n", s, v);
        out << buf;
    };
    out << "Metric                  Status     Severity\n";
    line("Accuracy", status.accuracy, severity.accuracy);
    line("Macro F1", status.macro_f1, severity.macro_f1);
    line("Weighted F1", status.weighted_f1, severity.weighted_f1);
    line("Cohen's Kappa", status.kappa, severity.kappa);
    line("MCC", status.mcc, severity.mcc);
    out << "\nCategory                Precision  Recall   F1       Support\n";
    auto block = [&out](const MetricsReport& m) {
        for (const auto& [label, c] : m.per_class) {
            out << label;
            for (std::size_t i = label.size(); i < 24; ++i) out << ' ';
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%8.3f %8.3f %8.3f %8lld\n", c.precision, c.recall,
                          c.f1, c.support);
            out << buf;
        }
    };
    out << "-- Clinical Status --\n";
    block(status);
    out << "-- Severity Grading --\n";
    block(severity);
    return out.str();
}

}  // namespace intake::evaluation
