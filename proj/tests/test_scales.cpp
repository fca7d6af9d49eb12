#include <doctest.h>

#include <map>
#include <random>

#include "intake/scales.hpp"
#include "support/fixtures.hpp"

using namespace intake;
using namespace intake::scales;

TEST_CASE("repository loads 46 definitions with the expected domain split") {
    const Repository& repo = fixtures::repo();
    CHECK(repo.size() == 46);

    std::map<Domain, int> by_domain;
    std::map<Admin, int> by_admin;
    for (const ScaleDefinition& def : repo.definitions()) {
        ++by_domain[def.domain];
        ++by_admin[def.admin];
    }
    CHECK(by_domain[Domain::Ptsd] == 7);  // the six table rows plus PCL-5
    CHECK(by_domain[Domain::Anxiety] == 7);
    CHECK(by_domain[Domain::Depression] == 17);
    CHECK(by_domain[Domain::MoodPersonality] == 4);
    CHECK(by_domain[Domain::Sleep] == 11);
    CHECK(by_admin[Admin::ClinicianRated] == 6);

    CHECK(repo.get("PHQ-9").item_count == 9);
    CHECK(repo.get("HAM-D").admin == Admin::ClinicianRated);
    CHECK(repo.find("Patient Health Questionnaire-9") != nullptr);  // full-name lookup
}

TEST_CASE("truncated repository fails with CountMismatch") {
    Json doc = load_json_file(fixtures::data_dir() + "/scales.json");
    doc.erase(doc.size() - 1);
    CHECK_THROWS_WITH_AS(Repository::from_json(doc, "truncated"),
                         doctest::Contains("expected 46"), Error);
    try {
        Repository::from_json(doc, "truncated");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CountMismatch);
    }
}

TEST_CASE("score_scale matches the published cut-offs") {
    const Repository& repo = fixtures::repo();

    SUBCASE("PHQ-9 total 12 is Moderate") {
        auto r = score_scale(repo.get("PHQ-9"), {2, 2, 2, 1, 1, 1, 1, 1, 1});
        CHECK(r.total == 12);
        CHECK(r.severity == "Moderate");
    }
    SUBCASE("GAD-7 floor and band boundaries") {
        const ScaleDefinition& gad = repo.get("GAD-7");
        CHECK(score_scale(gad, {0, 0, 0, 0, 0, 0, 0}).severity == "Minimal");
        CHECK(score_scale(gad, {1, 1, 1, 1, 1, 0, 0}).severity == "Mild");      // 5
        CHECK(score_scale(gad, {2, 2, 2, 2, 2, 0, 0}).severity == "Moderate");  // 10
        CHECK(score_scale(gad, {3, 3, 3, 3, 3, 0, 0}).severity == "Severe");    // 15
        CHECK(score_scale(gad, {1, 1, 1, 1, 0, 0, 0}).severity == "Minimal");   // 4
    }
    SUBCASE("HAM-D 0-7 is Normal") {
        std::vector<int> items(17, 0);
        items[0] = 4;
        items[1] = 3;  // total 7
        CHECK(score_scale(repo.get("HAM-D"), items).severity == "Normal");
        items[2] = 1;  // total 8
        CHECK(score_scale(repo.get("HAM-D"), items).severity == "Mild");
    }
    SUBCASE("PC-PTSD-5 cutoff depends on gender") {
        const ScaleDefinition& pc = repo.get("PC-PTSD-5");
        auto female = score_scale(pc, {1, 1, 1, 0, 0}, {{"gender", "Female"}});
        CHECK(female.total == 3);
        CHECK(female.severity == "Positive");
        CHECK(score_scale(pc, {1, 1, 1, 0, 0}, {{"gender", "Male"}}).severity == "Negative");
        CHECK(score_scale(pc, {1, 1, 1, 1, 0}, {{"gender", "Male"}}).severity == "Positive");
        // Unspecified gender falls back to the default cutoff.
        CHECK(score_scale(pc, {1, 1, 1, 0, 0}, {{"gender", "Unspecified"}}).severity ==
              "Positive");
    }
    SUBCASE("PDSS bands reverse: lower totals are worse") {
        const ScaleDefinition& pdss = repo.get("PDSS");
        std::vector<int> items(15, 0);
        auto at_total = [&](int total) {
            std::vector<int> v(15, 0);
            int rest = total;
            for (int i = 0; i < 15; ++i) {
                v[i] = std::min(10, rest);
                rest -= v[i];
            }
            return score_scale(pdss, v).severity;
        };
        CHECK(at_total(100) == "Moderate");
        CHECK(at_total(130) == "Normal");
        CHECK(at_total(110) == "Mild");
        CHECK(at_total(40) == "Severe");
    }
    SUBCASE("AlgorithmStub keeps the total and flags the label") {
        auto r = score_scale(repo.get("MDI"), std::vector<int>(10, 3));
        CHECK(r.total == 30);
        CHECK(r.severity == kAlgorithmStubLabel);
    }
}

TEST_CASE("score_scale rejects malformed responses") {
    const Repository& repo = fixtures::repo();
    CHECK_THROWS_AS(score_scale(repo.get("PHQ-9"), {1, 1, 1, 1, 1, 1, 1, 1}), Error);
    try {
        score_scale(repo.get("PHQ-9"), {1, 1, 1, 1, 1, 1, 1, 1});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ItemCountMismatch);
    }
    try {
        score_scale(repo.get("PHQ-9"), {1, 1, 1, 1, 1, 1, 1, 1, 9});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ItemOutOfRange);
    }
    try {
        score_scale(repo.get("PC-PTSD-5"), {1, 1, 1, 0, 0});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingContext);
    }
}

TEST_CASE("validate_plan enforces the structural rules") {
    const Repository& repo = fixtures::repo();

    ScalePlan ok;
    ok.clinician_scales = {{"HAM-D", "core"}};
    ok.self_report_scales = {{"PHQ-9", "baseline"}, {"ISI", "sleep supplement"}};
    CHECK(validate_plan(ok, repo).ok());

    ScalePlan mixed = ok;
    mixed.self_report_scales = {{"GAD-7", "anxiety"}};
    auto mixed_report = validate_plan(mixed, repo);
    REQUIRE_FALSE(mixed_report.ok());
    CHECK(mixed_report.violations.front().code == "MixedPrimaryDomains");

    ScalePlan empty;
    empty.self_report_scales = {{"PHQ-9", ""}};
    auto empty_report = validate_plan(empty, repo);
    REQUIRE_FALSE(empty_report.ok());
    CHECK(empty_report.violations.front().code == "EmptyClinicianList");

    ScalePlan unknown = ok;
    unknown.self_report_scales.push_back({"NOPE-3", ""});
    bool saw_unknown = false;
    for (const auto& v : validate_plan(unknown, repo).violations)
        if (v.code == "UnknownScale") saw_unknown = true;
    CHECK(saw_unknown);

    ScalePlan admin_swap;
    admin_swap.clinician_scales = {{"PHQ-9", "wrong slot"}};
    admin_swap.self_report_scales = {{"HAM-D", "wrong slot"}};
    bool saw_admin = false;
    for (const auto& v : validate_plan(admin_swap, repo).violations)
        if (v.code == "AdminMismatch") saw_admin = true;
    CHECK(saw_admin);
}

TEST_CASE("fuzz: every definition scores all valid vectors with monotone bands") {
    const Repository& repo = fixtures::repo();
    std::mt19937_64 rng(20240917);
    for (const ScaleDefinition& def : repo.definitions()) {
        std::uniform_int_distribution<int> dist(def.item_min, def.item_max);
        int prev_total = def.min_total();
        int prev_band = 0;
        bool first = true;
        std::map<std::string, std::string> ctx{{"gender", "Female"}};
        for (int trial = 0; trial < 60; ++trial) {
            std::vector<int> items(static_cast<std::size_t>(def.item_count));
            for (int& v : items) v = dist(rng);
            const auto r = score_scale(def, items, ctx);
            CHECK(r.total >= def.min_total());
            CHECK(r.total <= def.max_total());
            CHECK_FALSE(r.severity.empty());
            if (def.mode == ScoringMode::SumBands || def.mode == ScoringMode::ReverseBands) {
                const int band = band_index(def, r.severity);
                REQUIRE(band >= 0);
                if (!first) {
                    // Band order follows total order (reversed for ReverseBands).
                    if (def.mode == ScoringMode::SumBands) {
                        if (r.total >= prev_total) CHECK(band >= prev_band);
                        if (r.total <= prev_total) CHECK(band <= prev_band);
                    } else {
                        if (r.total >= prev_total) CHECK(band <= prev_band);
                        if (r.total <= prev_total) CHECK(band >= prev_band);
                    }
                }
                prev_total = r.total;
                prev_band = band;
                first = false;
            }
        }
    }
}

TEST_CASE("stored responses recompute to the same severity") {
    const Repository& repo = fixtures::repo();
    std::mt19937_64 rng(7);
    for (const ScaleDefinition& def : repo.definitions()) {
        std::uniform_int_distribution<int> dist(def.item_min, def.item_max);
        std::vector<int> items(static_cast<std::size_t>(def.item_count));
        for (int& v : items) v = dist(rng);
        const auto first = score_scale(def, items, {{"gender", "Male"}});
        const auto again = score_scale(def, items, {{"gender", "Male"}});
        CHECK(first.total == again.total);
        CHECK(first.severity == again.severity);
    }
}

TEST_CASE("severity ranks map band labels conservatively") {
    CHECK(severity_rank_from_label("Severe") == 3);
    CHECK(severity_rank_from_label("Moderately severe") == 2);
    CHECK(severity_rank_from_label("Moderate/Severe") == 2);
    CHECK(severity_rank_from_label("Mild") == 1);
    CHECK(severity_rank_from_label("Normal") == 0);
    CHECK(severity_rank_from_label("Minimal") == 0);
    CHECK(severity_rank_from_label("Positive") == 2);
    CHECK(severity_rank_from_label("Below cut-off") == 0);
    CHECK(severity_rank_from_label(kAlgorithmStubLabel) == 0);
}
