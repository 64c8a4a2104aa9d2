#include <doctest.h>

#include <cmath>
#include <cstring>

#include "helpers.hpp"
#include "tsel/budget.hpp"
#include "tsel/selection.hpp"
#include "tsel/synthetic.hpp"

using namespace tsel;
using namespace tsel::test;

TEST_CASE("judging time per document") {
    CHECK(judging_time_per_doc(10) == 15.0);
    CHECK(judging_time_per_doc(32) == 15.0);
    CHECK(judging_time_per_doc(64) == doctest::Approx(10.99).epsilon(1e-3));
    CHECK(judging_time_per_doc(127) == 9.0);
    CHECK(judging_time_per_doc(200) == 9.0);
    CHECK_THROWS_AS(judging_time_per_doc(0), std::invalid_argument);

    // non-increasing, bounded to [9, 15]
    double prev = 15.0;
    for (int x = 1; x <= 300; ++x) {
        const double f = judging_time_per_doc(x);
        CHECK(f <= prev + 1e-12);
        CHECK(f >= 9.0);
        CHECK(f <= 15.0);
        prev = f;
    }
}

TEST_CASE("judgments per topic reproduce the worked examples") {
    const long hours100 = 100L * 3600L;
    SUBCASE("constant speed: 240 judgments") {
        auto q = judgments_per_topic(hours100, 100, 0, SpeedModel::Constant);
        CHECK(q.judgments == 240);
        CHECK_FALSE(q.insufficient);
    }
    SUBCASE("variable speed: 400 judgments") {
        auto q = judgments_per_topic(hours100, 100, 0, SpeedModel::Variable);
        CHECK(q.judgments == 400);
        CHECK_FALSE(q.insufficient);
    }
    SUBCASE("development cost exhausting the budget flags insufficiency") {
        const long hours40 = 40L * 3600L;
        auto q = judgments_per_topic(hours40, 119, 1216, SpeedModel::Constant);
        CHECK(q.insufficient);
        CHECK(q.judgments == 0);
        auto ok = judgments_per_topic(hours40, 118, 1216, SpeedModel::Constant);
        CHECK_FALSE(ok.insufficient);
    }
}

TEST_CASE("judgments per topic monotonicity") {
    const long budget = 30L * 3600L;
    for (SpeedModel model : {SpeedModel::Constant, SpeedModel::Variable}) {
        int prev = judgments_per_topic(budget, 1, 60, model).judgments;
        for (int n = 2; n <= 120; ++n) {
            const int cur = judgments_per_topic(budget, n, 60, model).judgments;
            CHECK(cur <= prev);
            prev = cur;
        }
        CHECK(judgments_per_topic(budget, 50, 0, model).judgments >=
              judgments_per_topic(budget, 50, 120, model).judgments);
        CHECK(judgments_per_topic(budget * 2, 50, 60, model).judgments >=
              judgments_per_topic(budget, 50, 60, model).judgments);
    }
}

TEST_CASE("accuracy for topic development cost") {
    CHECK(accuracy_for_tdc(76) == doctest::Approx(0.92).epsilon(1e-12));
    CHECK(accuracy_for_tdc(152) == doctest::Approx(0.94).epsilon(1e-12));
    CHECK(accuracy_for_tdc(304) == doctest::Approx(0.96).epsilon(1e-12));
    CHECK(accuracy_for_tdc(608) == doctest::Approx(0.98).epsilon(1e-12));
    CHECK(accuracy_for_tdc(1216) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(accuracy_for_tdc(2432) == 1.0);
    CHECK_THROWS_AS(accuracy_for_tdc(75), std::invalid_argument);
}

TEST_CASE("flip_judgments") {
    Qrels q;
    for (int i = 0; i < 200; ++i) q.set("t", "d" + std::to_string(i), i % 2);
    SUBCASE("accuracy 1 is the identity") {
        auto flipped = flip_judgments(q, 1.0, 9);
        CHECK(flipped.by_topic() == q.by_topic());
    }
    SUBCASE("accuracy 0 flips every judgment") {
        auto flipped = flip_judgments(q, 0.0, 9);
        for (const auto& [topic, docs] : q.by_topic())
            for (const auto& [doc, rel] : docs) CHECK(flipped.get(topic, doc) == 1 - rel);
    }
    SUBCASE("same seed reproduces the flips") {
        auto a = flip_judgments(q, 0.7, 21);
        auto b = flip_judgments(q, 0.7, 21);
        CHECK(a.by_topic() == b.by_topic());
    }
}

TEST_CASE("flip fraction concentrates near 1 - accuracy") {
    Qrels q;
    for (int i = 0; i < 10000; ++i) q.set("t" + std::to_string(i % 50), "d" + std::to_string(i), i % 3 == 0);
    double total_flipped = 0.0;
    const int seeds = 50;
    for (int s = 0; s < seeds; ++s) {
        auto flipped = flip_judgments(q, 0.92, static_cast<std::uint64_t>(s));
        int n = 0;
        for (const auto& [topic, docs] : q.by_topic())
            for (const auto& [doc, rel] : docs)
                if (flipped.get(topic, doc) != rel) ++n;
        total_flipped += n;
    }
    const double fraction = total_flipped / (seeds * 10000.0);
    CHECK(std::abs(fraction - 0.08) < 0.01);
}

namespace {

SynthCollection curve_collection() {
    SynthConfig cfg;
    cfg.n_topics = 6;
    cfg.n_systems = 5;
    cfg.list_depth = 15;
    cfg.seed = 81;
    return generate_collection(cfg);
}

BudgetScenario lavish_scenario() {
    BudgetScenario s;
    s.total_budget_seconds = 1000L * 3600L; // quota far above any pool size
    s.tdc_seconds = 0;
    s.speed_model = SpeedModel::Constant;
    s.judgments_repeats = 3;
    s.pool_depth = 15;
    s.map_cutoff = 15;
    s.seed = 13;
    return s;
}

} // namespace

TEST_CASE("simulate_curve reaches tau 1 when the quota covers the full pool at n = N") {
    auto coll = curve_collection();
    auto trace = greedy_oracle_select(coll.runs, coll.qrels, coll.runs.topics.size(), 15);
    auto rows = simulate_curve(coll.runs, coll.qrels, lavish_scenario(), trace,
                               {static_cast<int>(coll.runs.topics.size())});
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].insufficient);
    CHECK(rows[0].mean_tau == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rows[0].std_tau == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("simulate_curve quotas follow the speed model") {
    auto coll = curve_collection();
    auto trace = greedy_oracle_select(coll.runs, coll.qrels, coll.runs.topics.size(), 15);
    BudgetScenario s = lavish_scenario();
    s.total_budget_seconds = 2L * 3600L;
    const int n = 6;
    auto constant_rows = simulate_curve(coll.runs, coll.qrels, s, trace, {n});
    s.speed_model = SpeedModel::Variable;
    auto variable_rows = simulate_curve(coll.runs, coll.qrels, s, trace, {n});
    const auto expect_constant = judgments_per_topic(s.total_budget_seconds, n, 0, SpeedModel::Constant);
    const auto expect_variable = judgments_per_topic(s.total_budget_seconds, n, 0, SpeedModel::Variable);
    CHECK(constant_rows[0].quota == expect_constant.judgments);
    CHECK(variable_rows[0].quota == expect_variable.judgments);
    CHECK(variable_rows[0].quota > constant_rows[0].quota);
}

TEST_CASE("simulate_curve marks insufficient rows invalid") {
    auto coll = curve_collection();
    auto trace = greedy_oracle_select(coll.runs, coll.qrels, coll.runs.topics.size(), 15);
    BudgetScenario s = lavish_scenario();
    s.total_budget_seconds = 100; // cannot even develop the topics
    s.tdc_seconds = 1216;
    auto rows = simulate_curve(coll.runs, coll.qrels, s, trace, {3});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].insufficient);
    CHECK(std::isnan(rows[0].mean_tau));
}

TEST_CASE("error model at accuracy 1 is bit-identical to the no-error path") {
    auto coll = curve_collection();
    auto trace = greedy_oracle_select(coll.runs, coll.qrels, coll.runs.topics.size(), 15);
    BudgetScenario plain = lavish_scenario();
    plain.total_budget_seconds = 3600;
    BudgetScenario with_error = plain;
    with_error.error_model = ErrorModel::TdcLinked;
    with_error.tdc_seconds = 1216; // accuracy 1.0
    plain.tdc_seconds = 1216;
    auto same_bits = [](double x, double y) {
        return std::memcmp(&x, &y, sizeof(double)) == 0;
    };
    // n=4 is budget-starved here; its NaN row must match bitwise too
    auto a = simulate_curve(coll.runs, coll.qrels, plain, trace, {2, 4});
    auto b = simulate_curve(coll.runs, coll.qrels, with_error, trace, {2, 4});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(same_bits(a[i].mean_tau, b[i].mean_tau));
        CHECK(same_bits(a[i].std_tau, b[i].std_tau));
        CHECK(a[i].quota == b[i].quota);
        CHECK(a[i].insufficient == b[i].insufficient);
    }
    CHECK_FALSE(a[0].insufficient);
    CHECK(a[1].insufficient);
}

TEST_CASE("error flipping degrades mean tau") {
    auto coll = curve_collection();
    auto trace = greedy_oracle_select(coll.runs, coll.qrels, coll.runs.topics.size(), 15);
    BudgetScenario clean = lavish_scenario();
    clean.tdc_seconds = 76;
    clean.judgments_repeats = 5;
    BudgetScenario noisy = clean;
    noisy.error_model = ErrorModel::TdcLinked; // accuracy 0.92
    noisy.flip_repeats = 10;
    auto a = simulate_curve(coll.runs, coll.qrels, clean, trace, {6});
    auto b = simulate_curve(coll.runs, coll.qrels, noisy, trace, {6});
    CHECK(b[0].mean_tau < a[0].mean_tau + 1e-9);
}

TEST_CASE("random-subset curve runs and stays in range") {
    auto coll = curve_collection();
    BudgetScenario s = lavish_scenario();
    s.total_budget_seconds = 3600;
    auto rows = simulate_curve_random(coll.runs, coll.qrels, s, 5, {2, 4});
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.mean_tau >= -1.0);
        CHECK(row.mean_tau <= 1.0);
        CHECK(row.std_tau >= 0.0);
    }
}

TEST_CASE("curve CSV writes invalid rows with empty tau cells") {
    std::vector<CurveRow> rows{{10, 0.5, 0.25, 30, false}, {20, std::nan(""), std::nan(""), 0, true}};
    TempDir tmp("curve");
    write_curve_csv(rows, tmp.path("curve.csv"), "# test\n");
    const std::string text = read_text(tmp.path("curve.csv"));
    CHECK(text.find("20,,,0,1") != std::string::npos);
    CHECK(text.find("10,0.5,0.25,30,0") != std::string::npos);
}
