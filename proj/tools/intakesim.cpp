// intakesim: synthesize, validate, export, sample, evaluate and rate synthetic
// psychiatric-intake corpora from the command line.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>

#include "intake/agents.hpp"
#include "intake/evaluation.hpp"
#include "intake/session.hpp"

using namespace intake;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartialFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct RunConfig {
    std::string repository_path = std::string(INTAKE_DATA_DIR) + "/scales.json";
    std::string feature_bank_path = std::string(INTAKE_DATA_DIR) + "/feature_bank.json";
    std::string prompts_dir = std::string(INTAKE_DATA_DIR) + "/prompts";
    std::string output_dir = "out";
    Json backend = Json{{"type", "scripted"},
                        {"script", std::string(INTAKE_DATA_DIR) + "/scripts/frank-depression.json"}};
    session::SessionConfig session;
    std::uint64_t seed = 1;
    int default_feature_count = 2;

    static RunConfig load(const std::string& path) {
        RunConfig c;
        if (path.empty()) return c;
        const Json doc = load_json_file(path);
        if (doc.contains("paths")) {
            const Json& p = doc.at("paths");
            c.repository_path = p.value("repository", c.repository_path);
            c.feature_bank_path = p.value("feature_bank", c.feature_bank_path);
            c.prompts_dir = p.value("prompts", c.prompts_dir);
            c.output_dir = p.value("output_dir", c.output_dir);
        }
        if (doc.contains("backend")) c.backend = doc.at("backend");
        if (doc.contains("session"))
            c.session = session::SessionConfig::from_json_value(doc.at("session"));
        c.seed = doc.value("seed", c.seed);
        c.default_feature_count = doc.value("default_feature_count", c.default_feature_count);
        return c;
    }
};

backends::BackendPtr make_backend(const Json& spec) {
    const std::string type = spec.value("type", "scripted");
    if (type == "scripted") {
        const std::string script = spec.value("script", "");
        if (script.empty()) fail(ErrorCode::ConfigError, "scripted backend needs a script path");
        return backends::ScriptedBackend::load(script);
    }
    if (type == "http") {
        backends::HttpBackendConfig config;
        config.endpoint_url = spec.value("endpoint_url", "");
        config.model_name = spec.value("model_name", "");
        config.auth_env = spec.value("auth_env", "");
        config.timeout_ms = spec.value("timeout_ms", config.timeout_ms);
        config.retry.max_retries = spec.value("max_retries", config.retry.max_retries);
        config.retry.backoff_ms = spec.value("backoff_ms", config.retry.backoff_ms);
        if (config.endpoint_url.empty() || config.model_name.empty())
            fail(ErrorCode::ConfigError, "http backend needs endpoint_url and model_name");
        return std::make_shared<backends::HttpBackend>(config);
    }
    fail(ErrorCode::ConfigError, "unknown backend type '" + type + "'");
}

session::BackendFactory make_backend_factory(const Json& spec) {
    const std::string type = spec.value("type", "scripted");
    if (type == "scripted") {
        auto master = std::dynamic_pointer_cast<backends::ScriptedBackend>(make_backend(spec));
        return [master](std::size_t) { return backends::BackendSet(master->clone_fresh()); };
    }
    auto shared = make_backend(spec);
    return [shared](std::size_t) { return backends::BackendSet(shared); };
}

// Profile files may carry an "augment" directive; features are chosen
// deterministically from the bank when only a count is given.
// Startup resources resolve before any work starts; failures there are
// configuration errors, not runtime ones.
template <typename Fn>
auto startup(const std::string& what, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        fail(ErrorCode::ConfigError, "while loading " + what + ": " + e.what());
    }
}

profiles::PatientProfile load_profile_file(const std::string& path,
                                           const profiles::FeatureBank& bank,
                                           int default_feature_count, std::uint64_t seed) {
    Json doc = load_json_file(path);
    Json augment = Json::object();
    if (doc.contains("augment")) {
        augment = doc.at("augment");
        doc.erase("augment");
    }
    profiles::PatientProfile profile = doc.get<profiles::PatientProfile>();
    auto check = [&path, &bank](const profiles::PatientProfile& p) {
        const auto issues = profiles::validate_profile(p, &bank);
        if (!issues.empty())
            fail(ErrorCode::ConfigError,
                 path + ": " + issues.front().code + ": " + issues.front().message);
        return p;
    };
    if (augment.empty()) return check(profile);

    const auto strategy = profiles::strategy_from_string(augment.value("strategy", "Frankness"));
    if (strategy == profiles::DeceptionStrategy::Frankness)
        return profiles::augment_profile(profile, strategy, {}, bank, seed);

    std::vector<std::string> ids = augment.value("feature_ids", std::vector<std::string>{});
    if (ids.empty()) {
        const int count = augment.value("feature_count", default_feature_count);
        auto pool = bank.by_class(strategy);
        if (static_cast<int>(pool.size()) < count)
            fail(ErrorCode::ConfigError, path + ": bank has too few features for the request");
        std::mt19937_64 rng(seed ^ fnv1a(path));
        std::vector<std::size_t> order(pool.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        for (int i = 0; i < count; ++i) ids.push_back(pool[order[static_cast<std::size_t>(i)]]->id);
        std::sort(ids.begin(), ids.end());
    }
    const std::uint64_t augment_seed = augment.value("seed", seed);
    return check(profiles::augment_profile(profile, strategy, ids, bank, augment_seed));
}

std::vector<profiles::PatientProfile> load_profiles_dir(const std::string& dir,
                                                        const profiles::FeatureBank& bank,
                                                        int default_feature_count,
                                                        std::uint64_t seed) {
    if (!fs::is_directory(dir)) fail(ErrorCode::IoError, dir + " is not a directory");
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) fail(ErrorCode::ConfigError, "no profile files in " + dir);
    std::vector<profiles::PatientProfile> out;
    for (const std::string& file : files)
        out.push_back(load_profile_file(file, bank, default_feature_count, seed));
    return out;
}

void emit(const Json& payload, bool as_json, const std::string& fallback_text) {
    if (as_json)
        std::cout << payload.dump(2) << "\n";
    else
        std::cout << fallback_text;
}

int map_error_exit(const Error& e) {
    switch (e.code()) {
        case ErrorCode::ConfigError:
        case ErrorCode::ParseError:
        case ErrorCode::AuthFailure:
            return kExitConfig;
        case ErrorCode::IoError:
            return kExitIo;
        default:
            return kExitPartialFailure;
    }
}

// --- subcommand bodies -------------------------------------------------------

int cmd_synthesize(const RunConfig& config, const std::string& profiles_dir,
                   const std::string& out_dir, std::uint64_t seed, bool strict, bool as_json) {
    const auto repo =
        startup("repository", [&] { return scales::Repository::load(config.repository_path); });
    const auto bank = startup("feature bank",
                              [&] { return profiles::FeatureBank::load(config.feature_bank_path); });
    const prompts::PromptLibrary prompt_lib(config.prompts_dir);
    const auto batch = startup("profiles", [&] {
        return load_profiles_dir(profiles_dir, bank, config.default_feature_count, seed);
    });

    auto [records, report] = session::run_batch(batch, repo, make_backend_factory(config.backend),
                                                prompt_lib, config.session, seed);
    const std::string dir = out_dir.empty() ? config.output_dir : out_dir;
    for (const auto& record : records) session::write_record(record, dir);
    session::write_manifest(report, dir);

    std::ostringstream text;
    text << "synthesized " << report.successes << "/" << report.entries.size()
         << " sessions into " << dir << "\n";
    for (const auto& entry : report.entries)
        if (!entry.ok) text << "  failed " << entry.record_id << ": " << entry.error << "\n";
    Json payload = report;
    payload["output_dir"] = dir;
    emit(payload, as_json, text.str());

    if (report.successes == 0) return kExitPartialFailure;
    if (strict && report.failures > 0) return kExitPartialFailure;
    return kExitOk;
}

// Rows of "truth,pred"; labels keep first-appearance order.
evaluation::MetricsReport metrics_from_pairs_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path);
    std::vector<std::string> truth, pred, labels;
    std::string line;
    auto note_label = [&labels](const std::string& l) {
        if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
    };
    while (std::getline(in, line)) {
        if (line.empty() || line == "truth,pred") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            fail(ErrorCode::ParseError, path + ": bad row '" + line + "'");
        truth.push_back(line.substr(0, comma));
        pred.push_back(line.substr(comma + 1));
        note_label(truth.back());
        note_label(pred.back());
    }
    return evaluation::classification_metrics(evaluation::confusion(truth, pred, labels));
}

int cmd_evaluate(const std::string& corpus_dir, const std::string& pairs_csv,
                 const std::string& out_file, const std::string& suspicion_csv,
                 const std::string& icc_csv, bool as_json) {
    if (!pairs_csv.empty()) {
        const auto metrics = metrics_from_pairs_csv(pairs_csv);
        const Json payload = metrics;
        if (!out_file.empty()) write_text_file(out_file, payload.dump(2) + "\n");
        emit(payload, as_json, evaluation::format_metrics_table(metrics, {}));
        return kExitOk;
    }
    std::vector<std::string> warnings;
    const auto records = session::load_corpus_dir(corpus_dir, &warnings);
    if (records.empty()) fail(ErrorCode::EmptyCorpus, "no readable records in " + corpus_dir);

    const auto alignment = evaluation::diagnostic_alignment(records);
    Json payload = alignment;
    payload["n_records"] = records.size();
    payload["skipped_files"] = warnings;

    std::ostringstream text;
    for (const std::string& w : warnings) text << "warning: skipped " << w << "\n";
    text << evaluation::format_metrics_table(alignment.status, alignment.severity);

    if (!suspicion_csv.empty()) {
        // CSV rows: record_id,rater_id,score (1-5). System score = final xi.
        std::map<std::string, std::vector<int>> human;
        std::ifstream in(suspicion_csv);
        if (!in) fail(ErrorCode::IoError, "cannot open " + suspicion_csv);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line.rfind("record_id", 0) == 0) continue;
            std::istringstream row(line);
            std::string id, rater, score;
            if (!std::getline(row, id, ',') || !std::getline(row, rater, ',') ||
                !std::getline(row, score, ','))
                fail(ErrorCode::ParseError, suspicion_csv + ": bad row '" + line + "'");
            human[id].push_back(std::stoi(score));
        }
        std::vector<double> system_scores;
        std::vector<int> human_scores;
        for (const auto& record : records) {
            auto it = human.find(record.record_id);
            if (it == human.end() || !record.tracker) continue;
            for (int h : it->second) {
                system_scores.push_back(record.tracker->xi);
                human_scores.push_back(h);
            }
        }
        const auto alignment2 = evaluation::suspicion_alignment(system_scores, human_scores);
        payload["suspicion"] = Json{
            {"pearson_r", alignment2.pearson}, {"auc", alignment2.auc}, {"n", alignment2.n}};
        text << "suspicion alignment: r=" << alignment2.pearson << " auc=" << alignment2.auc
             << " n=" << alignment2.n << "\n";
    }
    if (!icc_csv.empty()) {
        // CSV matrix: one row per rater, comma-separated item scores.
        std::ifstream in(icc_csv);
        if (!in) fail(ErrorCode::IoError, "cannot open " + icc_csv);
        std::vector<std::vector<double>> matrix;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<double> row;
            std::istringstream cells(line);
            std::string cell;
            while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
            matrix.push_back(std::move(row));
        }
        const double icc = evaluation::icc_two_way(matrix);
        payload["icc_2_1"] = icc;
        text << "ICC(2,1)=" << icc << "\n";
    }

    if (!out_file.empty()) write_text_file(out_file, payload.dump(2) + "\n");
    emit(payload, as_json, text.str());
    return kExitOk;
}

int cmd_ablate(const RunConfig& config, const std::string& profiles_dir,
               const std::string& out_dir, std::uint64_t seed, const std::string& arms_arg,
               bool as_json) {
    const auto repo =
        startup("repository", [&] { return scales::Repository::load(config.repository_path); });
    const auto bank = startup("feature bank",
                              [&] { return profiles::FeatureBank::load(config.feature_bank_path); });
    const prompts::PromptLibrary prompt_lib(config.prompts_dir);
    const auto batch = startup("profiles", [&] {
        return load_profiles_dir(profiles_dir, bank, config.default_feature_count, seed);
    });

    session::SessionConfig cot_config = config.session;
    cot_config.evaluator_cot = true;
    session::SessionConfig control_config = config.session;
    control_config.evaluator_cot = false;

    std::vector<evaluation::AblationArm> arms;
    std::istringstream arm_names(arms_arg);
    std::string arm_name;
    while (std::getline(arm_names, arm_name, ',')) {
        if (arm_name == "cot")
            arms.push_back({"cot", cot_config, make_backend_factory(config.backend)});
        else if (arm_name == "control")
            arms.push_back({"control", control_config, make_backend_factory(config.backend)});
        else
            fail(ErrorCode::ConfigError, "unknown arm '" + arm_name + "' (use cot, control)");
    }
    if (arms.empty()) fail(ErrorCode::ConfigError, "--arms selected no arms");
    const auto report = evaluation::ablation_run(batch, repo, prompt_lib, arms, seed);

    const std::string dir = out_dir.empty() ? config.output_dir : out_dir;
    fs::create_directories(dir);
    write_text_file(dir + "/trust_curves.csv", evaluation::trust_curve_csv(report));
    write_text_file(dir + "/delta_trust.csv", evaluation::delta_trust_csv(report));
    const Json payload = report;
    write_text_file(dir + "/ablation.json", payload.dump(2) + "\n");

    std::ostringstream text;
    for (const auto& arm : report.arms)
        text << arm.name << ": mean dTrust=" << arm.mean_delta_trust
             << " rounds=" << arm.mean_rounds_to_saturation
             << " status_acc=" << arm.status_accuracy
             << " severity_acc=" << arm.severity_accuracy << "\n";
    emit(payload, as_json, text.str());
    return kExitOk;
}

int cmd_validate(const std::string& corpus_dir, const std::string& repository_path, bool as_json) {
    const auto repo =
        startup("repository", [&] { return scales::Repository::load(repository_path); });
    std::vector<std::string> warnings;
    const auto records = session::load_corpus_dir(corpus_dir, &warnings);
    Json results = Json::array();
    std::size_t invalid = warnings.size();
    std::ostringstream text;
    for (const std::string& w : warnings) text << "unreadable: " << w << "\n";
    for (const auto& record : records) {
        const auto validation = session::validate_record(record, repo);
        if (!validation.ok()) {
            ++invalid;
            Json violations = Json::array();
            for (const auto& v : validation.violations) {
                violations.push_back(Json{{"code", v.code}, {"message", v.message}});
                text << record.record_id << ": " << v.code << " (" << v.message << ")\n";
            }
            results.push_back(Json{{"record_id", record.record_id}, {"violations", violations}});
        }
    }
    text << (records.size() - (invalid - warnings.size())) << "/" << records.size()
         << " records valid\n";
    emit(Json{{"checked", records.size()}, {"invalid", invalid}, {"details", results}}, as_json,
         text.str());
    return invalid == 0 ? kExitOk : kExitPartialFailure;
}

int cmd_stats(const std::string& corpus_dir, bool as_json) {
    const auto records = session::load_corpus_dir(corpus_dir);
    const auto stats = session::corpus_stats(records);
    std::ostringstream text;
    text << "total dialogues:  " << stats.total_dialogues << "\n"
         << "total tokens:     " << stats.total_tokens << "\n"
         << "avg turns:        " << stats.avg_turns << "\n"
         << "avg tokens/turn:  " << stats.avg_tokens_per_turn << "\n"
         << "age mean:         " << stats.age_mean << "\n";
    text << "pathology:";
    for (const auto& [k, v] : stats.pathology_pct) text << "  " << k << " " << v << "%";
    text << "\nseverity:";
    for (const auto& [k, v] : stats.severity_pct) text << "  " << k << " " << v << "%";
    text << "\ngender:";
    for (const auto& [k, v] : stats.gender_pct) text << "  " << k << " " << v << "%";
    text << "\n";
    emit(stats, as_json, text.str());
    return kExitOk;
}

int cmd_export(const std::string& corpus_dir, const std::string& out_dir, bool public_view,
               const std::string& repository_path, bool as_json) {
    const auto repo =
        startup("repository", [&] { return scales::Repository::load(repository_path); });
    const auto records = session::load_corpus_dir(corpus_dir);
    if (records.empty()) fail(ErrorCode::EmptyCorpus, "no records in " + corpus_dir);
    fs::create_directories(out_dir);
    std::size_t written = 0;
    for (const auto& record : records) {
        const auto out = public_view ? session::export_public(record) : record;
        const auto validation = session::validate_record(out, repo);
        if (!validation.ok())
            fail(ErrorCode::InvalidArgument,
                 record.record_id + " fails validation after projection");
        session::write_record(out, out_dir);
        ++written;
    }
    emit(Json{{"exported", written}, {"public", public_view}, {"output_dir", out_dir}}, as_json,
         "exported " + std::to_string(written) + " records to " + out_dir + "\n");
    return kExitOk;
}

int cmd_sample(const std::string& corpus_dir, const std::string& strata_arg, std::uint64_t seed,
               const std::string& out_file, bool as_json) {
    const auto records = session::load_corpus_dir(corpus_dir);
    std::vector<std::size_t> counts;
    std::istringstream parts(strata_arg);
    std::string token;
    while (std::getline(parts, token, ',')) counts.push_back(std::stoul(token));
    if (counts.size() != 3)
        fail(ErrorCode::ConfigError,
             "--strata expects three counts: concealment,exaggeration,frankness");
    const std::map<std::string, std::size_t> strata = {{"Concealment", counts[0]},
                                                       {"Exaggeration", counts[1]},
                                                       {"Frankness", counts[2]}};
    const auto sample = evaluation::stratified_sample(records, strata, seed);
    Json ids = Json::array();
    for (const auto& r : sample) ids.push_back(r.record_id);
    const Json payload{{"seed", seed}, {"strata", strata}, {"record_ids", ids}};
    if (!out_file.empty()) write_text_file(out_file, payload.dump(2) + "\n");
    emit(payload, as_json, "sampled " + std::to_string(sample.size()) + " records\n");
    return kExitOk;
}

int cmd_rate(const RunConfig& config, const std::string& corpus_dir, std::uint64_t seed,
             const std::string& out_file, bool as_json) {
    const auto records = session::load_corpus_dir(corpus_dir);
    if (records.empty()) fail(ErrorCode::EmptyCorpus, "no records in " + corpus_dir);
    const prompts::PromptLibrary prompt_lib(config.prompts_dir);
    auto backend = make_backend(config.backend);

    // Blind the rater to corpus order.
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::map<std::string, std::vector<double>> per_dimension;
    Json per_record = Json::array();
    for (const std::size_t index : order) {
        const auto score = evaluation::rate_realism(evaluation::render_dialogue(records[index]),
                                                    *backend, prompt_lib);
        Json entry{{"record_id", records[index].record_id}};
        for (const auto& [dim, s] : score.dimensions) {
            per_dimension[dim].push_back(s.score);
            entry[dim] = s.score;
        }
        per_record.push_back(std::move(entry));
    }

    Json summary = Json::object();
    std::ostringstream text;
    for (const auto& [dim, values] : per_dimension) {
        const double n = static_cast<double>(values.size());
        double mean = 0;
        for (double v : values) mean += v;
        mean /= n;
        double var = 0;
        for (double v : values) var += (v - mean) * (v - mean);
        const double sd = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
        summary[dim] = Json{{"mean", mean}, {"sd", sd}};
        text << dim << ": " << mean << " (" << sd << ")\n";
    }
    const Json payload{{"summary", summary}, {"per_record", per_record}, {"n", records.size()}};
    if (!out_file.empty()) write_text_file(out_file, payload.dump(2) + "\n");
    emit(payload, as_json, text.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"honesty-aware synthetic psychiatric intake simulator"};
    app.require_subcommand(1);

    std::string config_path, profiles_dir, corpus_dir, out_path, strata = "12,13,25";
    std::string suspicion_csv, icc_csv, pairs_csv, arms = "cot,control";
    std::uint64_t seed = 0;
    bool seed_set = false, strict = false, as_json = false, public_view = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration JSON");
        cmd->add_flag("--json", as_json, "machine-readable JSON output");
        cmd->add_option_function<std::uint64_t>(
               "--seed", [&](std::uint64_t v) { seed = v; seed_set = true; }, "master seed");
        return cmd;
    };

    auto* synthesize = add_common(app.add_subcommand("synthesize", "generate a corpus"));
    synthesize->add_option("--profiles", profiles_dir, "directory of profile JSON files")
        ->required();
    synthesize->add_option("--out", out_path, "output directory");
    synthesize->add_flag("--strict", strict, "nonzero exit on any session failure");

    auto* evaluate = add_common(app.add_subcommand("evaluate", "diagnostic alignment metrics"));
    evaluate->add_option("--corpus", corpus_dir, "corpus directory");
    evaluate->add_option("--pairs-csv", pairs_csv, "raw truth,pred label pairs");
    evaluate->add_option("--out", out_path, "write the metrics JSON here");
    evaluate->add_option("--suspicion-csv", suspicion_csv,
                         "human suspicion scores: record_id,rater_id,score");
    evaluate->add_option("--icc-csv", icc_csv, "rater-by-item score matrix");

    auto* ablate = add_common(app.add_subcommand("ablate", "CoT vs passive evaluator arms"));
    ablate->add_option("--profiles", profiles_dir, "directory of profile JSON files")->required();
    ablate->add_option("--out", out_path, "output directory");
    ablate->add_option("--arms", arms, "comma list of arms to run (cot, control)");

    auto* validate = add_common(app.add_subcommand("validate", "validate corpus records"));
    validate->add_option("--corpus", corpus_dir, "corpus directory")->required();

    auto* stats = add_common(app.add_subcommand("stats", "corpus statistics"));
    stats->add_option("--corpus", corpus_dir, "corpus directory")->required();

    auto* export_cmd = add_common(app.add_subcommand("export", "re-write records"));
    export_cmd->add_option("--corpus", corpus_dir, "corpus directory")->required();
    export_cmd->add_option("--out", out_path, "output directory")->required();
    export_cmd->add_flag("--public", public_view, "strip internal traces");

    auto* sample = add_common(app.add_subcommand("sample", "stratified evaluation sample"));
    sample->add_option("--corpus", corpus_dir, "corpus directory")->required();
    sample->add_option("--strata", strata, "concealment,exaggeration,frankness counts");
    sample->add_option("--out", out_path, "write the sample manifest here");

    auto* rate = add_common(app.add_subcommand("rate", "LLM realism rating"));
    rate->add_option("--corpus", corpus_dir, "corpus directory")->required();
    rate->add_option("--out", out_path, "write the rating report here");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config = RunConfig::load(config_path);
        if (seed_set) config.seed = seed;
        config.session.validate();

        if (synthesize->parsed())
            return cmd_synthesize(config, profiles_dir, out_path, config.seed, strict, as_json);
        if (evaluate->parsed()) {
            if (corpus_dir.empty() && pairs_csv.empty())
                fail(ErrorCode::ConfigError, "evaluate needs --corpus or --pairs-csv");
            return cmd_evaluate(corpus_dir, pairs_csv, out_path, suspicion_csv, icc_csv, as_json);
        }
        if (ablate->parsed())
            return cmd_ablate(config, profiles_dir, out_path, config.seed, arms, as_json);
        if (validate->parsed())
            return cmd_validate(corpus_dir, config.repository_path, as_json);
        if (stats->parsed()) return cmd_stats(corpus_dir, as_json);
        if (export_cmd->parsed())
            return cmd_export(corpus_dir, out_path, public_view, config.repository_path, as_json);
        if (sample->parsed())
            return cmd_sample(corpus_dir, strata, config.seed, out_path, as_json);
        if (rate->parsed()) return cmd_rate(config, corpus_dir, config.seed, out_path, as_json);
    } catch (const Error& e) {
        const Json err{{"error", e.what()}};
        if (as_json) std::cout << err.dump(2) << "\n";
        else std::cerr << "error: " << e.what() << "\n";
        return map_error_exit(e);
    } catch (const std::exception& e) {
        if (as_json) std::cout << Json{{"error", e.what()}}.dump(2) << "\n";
        else std::cerr << "error: " << e.what() << "\n";
        return kExitPartialFailure;
    }
    return kExitOk;
}
