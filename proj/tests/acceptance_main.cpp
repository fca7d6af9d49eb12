// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Every tolerance is pinned in code; everything runs on the scripted backend.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "intake/agents.hpp"
#include "intake/evaluation.hpp"
#include "intake/session.hpp"
#include "support/fixtures.hpp"

using namespace intake;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, const std::function<void()>& body) {
    try {
        body();
        std::printf("PASS criterion %2d: %s\n", number, name.c_str());
    } catch (const std::exception& e) {
        ++failures;
        std::printf("FAIL criterion %2d: %s\n    %s\n", number, name.c_str(), e.what());
    }
}

void require(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Independent oracle: metrics recomputed from expanded label pairs, kappa from
// raw agreement probabilities, MCC as the correlation of one-hot encodings.
evaluation::MetricsReport oracle_metrics(const std::vector<std::string>& truth,
                                         const std::vector<std::string>& pred,
                                         const std::vector<std::string>& labels) {
    evaluation::MetricsReport m;
    const double n = static_cast<double>(truth.size());
    double correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] == pred[i]) ++correct;
    m.accuracy = correct / n;

    double macro = 0, weighted = 0, pe = 0;
    for (const std::string& label : labels) {
        double tp = 0, fp = 0, fn = 0, support = 0, predicted = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            if (truth[i] == label) ++support;
            if (pred[i] == label) ++predicted;
            if (pred[i] == label && truth[i] == label) ++tp;
            if (pred[i] == label && truth[i] != label) ++fp;
            if (pred[i] != label && truth[i] == label) ++fn;
        }
        evaluation::ClassMetrics c;
        c.support = static_cast<long long>(support);
        c.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        c.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        c.f1 = c.precision + c.recall > 0
                   ? 2 * c.precision * c.recall / (c.precision + c.recall)
                   : 0.0;
        macro += c.f1;
        weighted += c.f1 * support;
        pe += (support / n) * (predicted / n);
        m.per_class[label] = c;
    }
    m.macro_f1 = macro / static_cast<double>(labels.size());
    m.weighted_f1 = weighted / n;
    m.kappa = pe >= 1.0 ? 1.0 : (m.accuracy - pe) / (1.0 - pe);

    double cov = 0, var_t = 0, var_p = 0;
    for (const std::string& label : labels) {
        double mt = 0, mp = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            mt += truth[i] == label ? 1.0 : 0.0;
            mp += pred[i] == label ? 1.0 : 0.0;
        }
        mt /= n;
        mp /= n;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const double t = (truth[i] == label ? 1.0 : 0.0) - mt;
            const double p = (pred[i] == label ? 1.0 : 0.0) - mp;
            cov += t * p;
            var_t += t * t;
            var_p += p * p;
        }
    }
    m.mcc = var_t > 0 && var_p > 0 ? cov / std::sqrt(var_t * var_p)
                                   : (m.accuracy == 1.0 ? 1.0 : 0.0);
    return m;
}

double pair_count_auc(const std::vector<double>& scores, const std::vector<bool>& pos) {
    double wins = 0, ties = 0, pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!pos[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (pos[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) ++wins;
            else if (scores[i] == scores[j]) ++ties;
        }
    }
    return (wins + 0.5 * ties) / pairs;
}

std::vector<profiles::PatientProfile> mixed_profiles(int count) {
    std::vector<profiles::PatientProfile> out;
    for (int i = 0; i < count; ++i) {
        switch (i % 5) {
            case 0: out.push_back(fixtures::depressed_profile()); break;
            case 1: out.push_back(fixtures::concealing_profile(100 + i)); break;
            case 2: out.push_back(fixtures::exaggerating_profile(200 + i)); break;
            case 3: out.push_back(fixtures::healthy_profile()); break;
            default: out.push_back(fixtures::depressed_profile()); break;
        }
    }
    return out;
}

}  // namespace

int main() {
    criterion(1, "metric oracle equivalence (P/R/F1, accuracy, F1 means, kappa, MCC)", [] {
        const auto start = std::chrono::steady_clock::now();
        {
            evaluation::ConfusionMatrix diag;
            diag.labels = {"a", "b", "c", "d"};
            diag.counts = {{9, 0, 0, 0}, {0, 7, 0, 0}, {0, 0, 5, 0}, {0, 0, 0, 4}};
            const auto m = evaluation::classification_metrics(diag);
            require(std::fabs(m.kappa - 1.0) <= 1e-12, "kappa != 1 on a perfect diagonal");
            require(std::fabs(m.mcc - 1.0) <= 1e-12, "MCC != 1 on a perfect diagonal");
        }
        std::mt19937_64 rng(424242);
        for (int trial = 0; trial < 12; ++trial) {
            const int label_count = 2 + static_cast<int>(rng() % 5);  // up to 6 labels
            std::vector<std::string> labels;
            for (int i = 0; i < label_count; ++i) labels.push_back(std::string(1, char('a' + i)));
            const int cases = 40 + static_cast<int>(rng() % 161);  // up to ~200 counts
            std::vector<std::string> truth, pred;
            for (int i = 0; i < cases; ++i) {
                const auto t = rng() % labels.size();
                truth.push_back(labels[t]);
                pred.push_back(rng() % 3 == 0 ? labels[rng() % labels.size()] : labels[t]);
            }
            const auto ours =
                evaluation::classification_metrics(evaluation::confusion(truth, pred, labels));
            const auto oracle = oracle_metrics(truth, pred, labels);
            require(std::fabs(ours.accuracy - oracle.accuracy) <= 1e-12, "accuracy mismatch");
            require(std::fabs(ours.macro_f1 - oracle.macro_f1) <= 1e-12, "macro F1 mismatch");
            require(std::fabs(ours.weighted_f1 - oracle.weighted_f1) <= 1e-12,
                    "weighted F1 mismatch");
            require(std::fabs(ours.kappa - oracle.kappa) <= 1e-12, "kappa mismatch");
            require(std::fabs(ours.mcc - oracle.mcc) <= 1e-12, "MCC mismatch");
            for (const auto& [label, c] : oracle.per_class) {
                const auto& o = ours.per_class.at(label);
                require(std::fabs(o.precision - c.precision) <= 1e-12, "precision mismatch");
                require(std::fabs(o.recall - c.recall) <= 1e-12, "recall mismatch");
                require(std::fabs(o.f1 - c.f1) <= 1e-12, "f1 mismatch");
            }
        }
        require(elapsed_seconds(start) < 1.0, "criterion 1 exceeded 1 s");
    });

    criterion(2, "AUC exactness against the O(n^2) oracle and monotone invariance", [] {
        const auto start = std::chrono::steady_clock::now();
        std::mt19937_64 rng(777);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int checked = 0;
        for (int trial = 0; trial < 140 && checked < 100; ++trial) {
            const int n = 4 + static_cast<int>(rng() % 47);  // n <= 50
            std::vector<double> scores;
            std::vector<bool> labels;
            int pos = 0;
            for (int i = 0; i < n; ++i) {
                scores.push_back(trial % 2 == 0 ? u(rng)
                                                : static_cast<double>(rng() % 8) / 8.0);
                const bool p = u(rng) < 0.5;
                labels.push_back(p);
                pos += p ? 1 : 0;
            }
            if (pos == 0 || pos == n) continue;
            ++checked;
            const double ours = evaluation::auc_rank(scores, labels);
            const double oracle = pair_count_auc(scores, labels);
            require(ours == oracle, "rank AUC differs from pair counting");
        }
        require(checked >= 100, "not enough valid AUC trials generated");

        std::vector<double> base_scores;
        std::vector<bool> base_labels;
        for (int i = 0; i < 40; ++i) {
            base_scores.push_back(u(rng));
            base_labels.push_back(i % 3 == 0);
        }
        const double base = evaluation::auc_rank(base_scores, base_labels);
        for (int t = 0; t < 20; ++t) {
            const double a = 0.5 + u(rng), b = 0.5 + 2.0 * u(rng), c = u(rng) - 0.5;
            std::vector<double> mapped;
            for (double s : base_scores) mapped.push_back(a * std::exp(b * s) + c);
            require(std::fabs(evaluation::auc_rank(mapped, base_labels) - base) <= 1e-12,
                    "AUC not invariant under a strictly increasing transform");
        }
        require(elapsed_seconds(start) < 5.0, "criterion 2 exceeded 5 s");
    });

    criterion(3, "trust/stress state machine: bounds, monotonicity, exact hand value", [] {
        std::mt19937_64 rng(90125);
        std::uniform_real_distribution<double> signal(-1.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int seq = 0; seq < 10000; ++seq) {
            agents::AgentState s{unit(rng), unit(rng)};
            const double lambda = 0.5 * unit(rng);
            for (int step = 0; step < 12; ++step) {
                s = agents::update_state(s, {signal(rng), signal(rng), ""}, lambda, 0.4 * unit(rng),
                                         0.4 * unit(rng));
                require(s.trust >= 0.0 && s.trust <= 1.0, "trust escaped [0,1]");
                require(s.stress >= 0.0 && s.stress <= 1.0, "stress escaped [0,1]");
            }
        }
        for (int i = 0; i < 2000; ++i) {
            const agents::AgentState s{unit(rng), unit(rng)};
            const double lambda = unit(rng);
            const agents::AgentState warm =
                agents::update_state(s, {unit(rng), 0.0, ""}, lambda);
            require(warm.trust >= s.trust, "empathy lowered trust at zero couplings");
            const agents::AgentState hard =
                agents::update_state(s, {0.0, unit(rng), ""}, lambda);
            require(hard.stress >= s.stress, "pressure lowered stress at zero couplings");
        }
        const agents::AgentState hand =
            agents::update_state({0.5, 0.5}, {1.0, 0.0, ""}, 0.1);
        require(std::fabs(hand.trust - 0.6) <= 1e-12, "hand-derived trust update off");
        require(std::fabs(hand.stress - 0.5) <= 1e-12, "hand-derived stress update off");
    });

    criterion(4, "threshold policy exact over the 101x101 (xi, theta) grid", [] {
        session::SaturationStatus unsaturated;
        unsaturated.required_topics = {"mood"};
        unsaturated.min_rounds = 18;
        session::SaturationStatus saturated = unsaturated;
        saturated.domains_covered = {"mood"};
        saturated.evidence_sufficient = true;
        require(saturated.terminate_ok(), "saturated fixture must satisfy two conditions");

        for (int i = 0; i <= 100; ++i) {
            for (int j = 0; j <= 100; ++j) {
                agents::SuspicionTracker t;
                t.xi = i * 0.01;
                t.theta_susp = j * 0.01;
                const auto d = agents::decide(t, unsaturated);
                const auto expected =
                    t.xi > t.theta_susp ? agents::Decision::Investigate : agents::Decision::Proceed;
                require(d == expected, "grid mismatch at xi=" + std::to_string(t.xi) +
                                           " theta=" + std::to_string(t.theta_susp));
                require(agents::decide(t, saturated) == agents::Decision::Terminate,
                        "saturation did not terminate");
            }
        }
    });

    criterion(5, "scale scoring: published cut-offs plus full-repository fuzz", [] {
        const auto& repo = fixtures::repo();
        require(repo.size() == 46, "repository must hold 46 definitions");
        require(scales::score_scale(repo.get("PHQ-9"), {2, 2, 2, 1, 1, 1, 1, 1, 1}).severity ==
                    "Moderate",
                "PHQ-9 total 12 must be Moderate");
        const auto& gad = repo.get("GAD-7");
        require(scales::score_scale(gad, {1, 1, 1, 1, 1, 0, 0}).severity == "Mild",
                "GAD-7 total 5 must be Mild");
        require(scales::score_scale(gad, {2, 2, 2, 2, 2, 0, 0}).severity == "Moderate",
                "GAD-7 total 10 must be Moderate");
        require(scales::score_scale(gad, {3, 3, 3, 3, 3, 0, 0}).severity == "Severe",
                "GAD-7 total 15 must be Severe");
        {
            std::vector<int> items(17, 0);
            items[0] = 4;
            items[1] = 3;
            require(scales::score_scale(repo.get("HAM-D"), items).severity == "Normal",
                    "HAM-D total 7 must be Normal");
        }
        const auto& pc = repo.get("PC-PTSD-5");
        require(scales::score_scale(pc, {1, 1, 1, 0, 0}, {{"gender", "Female"}}).severity ==
                    "Positive",
                "PC-PTSD-5 total 3 must be Positive for women");
        require(scales::score_scale(pc, {1, 1, 1, 0, 0}, {{"gender", "Male"}}).severity ==
                    "Negative",
                "PC-PTSD-5 total 3 must be Negative for men");
        require(scales::score_scale(pc, {1, 1, 1, 1, 0}, {{"gender", "Male"}}).severity ==
                    "Positive",
                "PC-PTSD-5 total 4 must be Positive for men");
        {
            std::vector<int> v(15, 0);
            int rest = 100;
            for (int i = 0; i < 15; ++i) {
                v[i] = std::min(10, rest);
                rest -= v[i];
            }
            require(scales::score_scale(repo.get("PDSS"), v).severity == "Moderate",
                    "PDSS total 100 must be Moderate");
        }

        std::mt19937_64 rng(5150);
        for (const auto& def : repo.definitions()) {
            std::uniform_int_distribution<int> dist(def.item_min, def.item_max);
            int prev_total = 0, prev_band = 0;
            bool first = true;
            for (int trial = 0; trial < 40; ++trial) {
                std::vector<int> items(static_cast<std::size_t>(def.item_count));
                for (int& v : items) v = dist(rng);
                const auto r = scales::score_scale(def, items, {{"gender", "Female"}});
                require(r.total >= def.min_total() && r.total <= def.max_total(),
                        def.abbr + ": total out of range");
                require(!r.severity.empty(), def.abbr + ": empty severity");
                if (def.mode == scales::ScoringMode::SumBands ||
                    def.mode == scales::ScoringMode::ReverseBands) {
                    const int band = scales::band_index(def, r.severity);
                    require(band >= 0, def.abbr + ": unknown band label");
                    if (!first) {
                        const bool forward = def.mode == scales::ScoringMode::SumBands;
                        if (r.total > prev_total)
                            require(forward ? band >= prev_band : band <= prev_band,
                                    def.abbr + ": band assignment not monotone");
                        if (r.total < prev_total)
                            require(forward ? band <= prev_band : band >= prev_band,
                                    def.abbr + ": band assignment not monotone");
                    }
                    prev_total = r.total;
                    prev_band = band;
                    first = false;
                }
            }
        }
    });

    criterion(6, "20 mixed scripted sessions: valid, complete, byte-identical on rerun", [] {
        const auto start = std::chrono::steady_clock::now();
        const auto batch_profiles = mixed_profiles(20);
        session::SessionConfig config;

        const fs::path dir_a = fs::temp_directory_path() / "intake-acceptance-a";
        const fs::path dir_b = fs::temp_directory_path() / "intake-acceptance-b";
        fs::remove_all(dir_a);
        fs::remove_all(dir_b);

        auto run_once = [&](const fs::path& dir) {
            auto [records, report] =
                session::run_batch(batch_profiles, fixtures::repo(),
                                   fixtures::script_factory(fixtures::build_script()),
                                   fixtures::prompt_library(), config, 20240101);
            require(report.failures == 0, "a scripted session failed");
            require(records.size() == 20, "expected 20 records");
            for (const auto& r : records) session::write_record(r, dir.string());
            session::write_manifest(report, dir.string());
            return std::move(records);
        };
        const auto records = run_once(dir_a);
        run_once(dir_b);

        for (const auto& record : records) {
            const auto validation = session::validate_record(record, fixtures::repo());
            std::string detail;
            for (const auto& v : validation.violations) detail += v.code + " ";
            require(validation.ok(), record.record_id + " failed validation: " + detail);
            require(record.patient_self_report.size() == record.plan.self_report_scales.size(),
                    "self-report keys differ from the plan");
            require(record.doctor_clinician_report.size() == record.plan.clinician_scales.size(),
                    "clinician keys differ from the plan");
            for (const auto& e : record.plan.self_report_scales)
                require(record.patient_self_report.count(e.abbr) == 1, "missing self report");
            for (const auto& e : record.plan.clinician_scales)
                require(record.doctor_clinician_report.count(e.abbr) == 1,
                        "missing clinician report");
        }

        for (const auto& entry : fs::directory_iterator(dir_a)) {
            const auto other = dir_b / entry.path().filename();
            require(fs::exists(other), "rerun missing " + entry.path().filename().string());
            require(read_text_file(entry.path().string()) == read_text_file(other.string()),
                    entry.path().filename().string() + " differs between reruns");
        }

        for (const auto& record : records) {
            const auto pub = session::export_public(record);
            require(!pub.tracker.has_value(), "export kept the tracker");
            for (const auto& t : pub.final_transcript)
                require(!t.clinician_trace && !t.patient_trace, "export kept a trace");
            require(session::validate_record(pub, fixtures::repo()).ok(),
                    "public export failed validation");
        }
        fs::remove_all(dir_a);
        fs::remove_all(dir_b);
        require(elapsed_seconds(start) < 30.0, "criterion 6 exceeded 30 s");
    });

    criterion(7, "ablation mechanism: CoT arm gains more trust in fewer rounds (>=9/10 seeds)", [] {
        const std::vector<profiles::PatientProfile> arm_profiles = {
            fixtures::depressed_profile(), fixtures::concealing_profile(),
            fixtures::depressed_profile()};
        session::SessionConfig cot_config;
        session::SessionConfig passive_config;
        passive_config.evaluator_cot = false;

        int wins = 0;
        evaluation::AblationReport last_report;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            std::vector<evaluation::AblationArm> arms;
            arms.push_back({"cot", cot_config, fixtures::script_factory(fixtures::build_script())});
            arms.push_back(
                {"control", passive_config, fixtures::script_factory(fixtures::build_script())});
            const auto report =
                evaluation::ablation_run(arm_profiles, fixtures::repo(),
                                         fixtures::prompt_library(), arms, seed);
            require(report.arms.size() == 2, "expected two arms");
            const auto& cot = report.arms[0];
            const auto& control = report.arms[1];
            require(cot.sessions_failed == 0 && control.sessions_failed == 0,
                    "an ablation session failed");
            if (cot.mean_delta_trust > control.mean_delta_trust &&
                cot.mean_rounds_to_saturation < control.mean_rounds_to_saturation)
                ++wins;
            last_report = report;
        }
        require(wins >= 9, "CoT arm won only " + std::to_string(wins) + "/10 seeded runs");

        const std::string curve = evaluation::trust_curve_csv(last_report);
        require(curve.rfind("round,mean_trust,arm\n", 0) == 0, "trust CSV header wrong");
        require(curve.find(",cot\n") != std::string::npos, "trust CSV lacks the cot arm");
        const std::string delta = evaluation::delta_trust_csv(last_report);
        require(delta.rfind("arm,session,delta_trust\n", 0) == 0, "delta CSV header wrong");
        require(delta.find("control,") != std::string::npos, "delta CSV lacks the control arm");
    });

    criterion(8, "honesty-bias direction in self-reports and clinician ratings", [] {
        session::SessionConfig config;
        auto run_profile = [&](const profiles::PatientProfile& profile) {
            return session::run_session(profile, fixtures::repo(),
                                        fixtures::scripted_set(fixtures::build_script()),
                                        fixtures::prompt_library(), config, 11);
        };
        const auto frank = run_profile(fixtures::depressed_profile());
        const auto conceal = run_profile(fixtures::concealing_profile());
        const auto exagg = run_profile(fixtures::exaggerating_profile());
        const int frank_total = frank.patient_self_report.at("PHQ-9").total_score;
        const int conceal_total = conceal.patient_self_report.at("PHQ-9").total_score;
        const int exagg_total = exagg.patient_self_report.at("PHQ-9").total_score;
        require(conceal_total < frank_total, "concealment did not lower the self-report");
        require(exagg_total > frank_total, "exaggeration did not raise the self-report");

        // Rating-time correction, exercised op-level with a high-suspicion tracker.
        const auto& repo = fixtures::repo();
        scales::ScalePlan plan;
        plan.clinician_scales = {{"HAM-D", ""}};
        plan.self_report_scales = {{"PHQ-9", ""}};
        const std::vector<session::TurnRecord> transcript = {
            {0, "Hello.", std::nullopt, {}, {}, {}},
            {1, "Opening?", std::string("Flat."), {}, {}, {}}};
        const std::vector<int> literal(17, 1);
        const auto literal_scored = scales::score_scale(repo.get("HAM-D"), literal);
        agents::AgentConfig agent_config;

        auto rate_with = [&](const std::string& direction) {
            agents::SuspicionTracker tracker;
            tracker.xi = 0.9;
            auto set = fixtures::scripted_set(
                Json{{"EvaluatorCoT/0",
                      Json{{"item_scores", literal},
                           {"dialogue_evidence", Json{{"0", Json::array({1})}}},
                           {"suspected_direction", direction}}
                          .dump()}});
            return agents::evaluator_rate(plan, transcript, tracker, repo, set,
                                          fixtures::prompt_library(), agent_config);
        };
        const auto up = rate_with("concealment");
        require(up.size() == 1, "rating must cover every clinician scale");
        require(up[0].total_score >= literal_scored.total,
                "concealment rating fell below the literal estimate");
        require(scales::band_index(repo.get("HAM-D"), up[0].severity) >=
                    scales::band_index(repo.get("HAM-D"), literal_scored.severity),
                "concealment severity fell below the literal band");
        const auto down = rate_with("exaggeration");
        require(down[0].total_score <= literal_scored.total,
                "exaggeration rating rose above the literal estimate");
        require(scales::band_index(repo.get("HAM-D"), down[0].severity) <=
                    scales::band_index(repo.get("HAM-D"), literal_scored.severity),
                "exaggeration severity rose above the literal band");
    });

    criterion(9, "diagnostician discrepancy rules (conceal, exaggerate, agreement)", [] {
        const auto& repo = fixtures::repo();
        agents::AgentConfig config;
        const std::vector<session::TurnRecord> transcript = {
            {0, "Hello.", std::nullopt, {}, {}, {}},
            {1, "Opening?", std::string("Flat."), {}, {}, {}},
            {2, "Sleep?", std::string("Poor."), {}, {}, {}}};
        scales::ScalePlan plan;
        plan.clinician_scales = {{"HAM-D", ""}};
        plan.self_report_scales = {{"PHQ-9", ""}};
        const Json diag = Json{
            {"final_diagnosis", Json{{"status", "Depression"}, {"severity", "Moderate"}}},
            {"reasoning", Json{{"symptom_match", "low mood"},
                               {"discrepancy_resolution", ""},
                               {"key_evidence", Json::array({1})}}}};

        auto response = [&](const std::string& abbr, const std::vector<int>& items,
                            scales::Rater rater) {
            const auto& def = repo.get(abbr);
            const auto scored = scales::score_scale(def, items);
            scales::ScaleResponse r;
            r.scale_abbr = abbr;
            r.item_scores = items;
            r.total_score = scored.total;
            r.severity = scored.severity;
            r.rater = rater;
            return r;
        };
        auto run = [&](const std::vector<int>& self_items, const std::vector<int>& clin_items,
                       double xi, agents::SuspectedDirection direction) {
            std::map<std::string, scales::ScaleResponse> self{
                {"PHQ-9", response("PHQ-9", self_items, scales::Rater::Patient)}};
            std::map<std::string, scales::ScaleResponse> clin{
                {"HAM-D", response("HAM-D", clin_items, scales::Rater::Evaluator)}};
            agents::SuspicionTracker tracker;
            tracker.xi = xi;
            tracker.suspected_direction = direction;
            auto set = fixtures::scripted_set(Json{{"Diagnostician/0", diag.dump()}});
            return agents::diagnose(transcript, self, clin, tracker, plan, fixtures::repo(), set,
                                    fixtures::prompt_library(), config);
        };

        std::vector<int> hamd_moderate(17, 0);
        for (int i = 0; i < 15; ++i) hamd_moderate[i] = 1;

        const auto exagg = run(std::vector<int>(9, 3), hamd_moderate, 0.8,
                               agents::SuspectedDirection::Exaggeration);
        require(exagg.severity == profiles::Severity::Moderate,
                "exaggeration case must downgrade to Moderate");

        const auto conceal = run({1, 1, 1, 1, 1, 1, 0, 0, 0}, hamd_moderate, 0.8,
                                 agents::SuspectedDirection::Concealment);
        require(conceal.severity == profiles::Severity::Moderate,
                "concealment case must adopt the clinician severity");

        const auto agree = run({2, 2, 2, 1, 1, 1, 1, 1, 1}, hamd_moderate, 0.2,
                               agents::SuspectedDirection::None);
        require(agree.severity == profiles::Severity::Moderate,
                "agreement case must pass the shared severity through");
    });

    criterion(10, "stratified sampling: {12, 13, 25} exact and seed-stable", [] {
        using PS = profiles::ClinicalStatus;
        using SV = profiles::Severity;
        using DS = profiles::DeceptionStrategy;
        std::vector<session::CorpusRecord> corpus;
        const std::vector<PS> statuses = {PS::Depression, PS::Anxiety, PS::Ptsd, PS::Healthy};
        for (int i = 0; i < 100; ++i) {
            session::CorpusRecord r;
            r.record_id = "rec-" + std::to_string(i);
            r.profile = fixtures::healthy_profile();
            const PS status = statuses[static_cast<std::size_t>(i) % 4];
            r.profile.ground_truth = {status, status == PS::Healthy ? SV::NotApplicable
                                                                    : SV::Moderate};
            r.honesty_echo.strategy =
                i < 30 ? DS::Concealment : (i < 60 ? DS::Exaggeration : DS::Frankness);
            r.run_meta.trace_internal = false;
            corpus.push_back(std::move(r));
        }
        const std::map<std::string, std::size_t> strata = {
            {"Concealment", 12}, {"Exaggeration", 13}, {"Frankness", 25}};
        const auto sample = evaluation::stratified_sample(corpus, strata, 99);
        require(sample.size() == 50, "sample size must be 50");
        std::map<std::string, int> got;
        for (const auto& r : sample) ++got[profiles::to_string(r.honesty_echo.strategy)];
        require(got["Concealment"] == 12, "concealment stratum inexact");
        require(got["Exaggeration"] == 13, "exaggeration stratum inexact");
        require(got["Frankness"] == 25, "frankness stratum inexact");
        const auto again = evaluation::stratified_sample(corpus, strata, 99);
        require(again.size() == sample.size(), "rerun changed the sample size");
        for (std::size_t i = 0; i < sample.size(); ++i)
            require(again[i].record_id == sample[i].record_id, "rerun changed the sample ids");
    });

    criterion(11, "ICC(2,1) matches the mean-squares oracle", [] {
        const std::vector<std::vector<double>> identical = {{2, 7, 4, 9}, {2, 7, 4, 9}, {2, 7, 4, 9}};
        require(std::fabs(evaluation::icc_two_way(identical) - 1.0) <= 1e-12,
                "identical raters must give ICC 1.0");
        const std::vector<std::vector<double>> fixture = {
            {9, 2, 5, 8, 6, 1}, {8, 1, 4, 9, 5, 2}, {7, 3, 6, 7, 4, 1}};
        // Frozen from the hand-computed two-way ANOVA mean squares.
        require(std::fabs(evaluation::icc_two_way(fixture) - 0.8970398970398968) <= 1e-9,
                "3x6 fixture disagrees with the mean-squares oracle");
    });

    if (failures == 0) std::printf("acceptance: all criteria passed\n");
    else std::printf("acceptance: %d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
