#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "tsel/metrics.hpp"
#include "tsel/rng.hpp"

using namespace tsel;
using namespace tsel::test;

TEST_CASE("average precision formula") {
    Qrels q;
    q.set("t", "A", 1);
    q.set("t", "B", 0);
    q.set("t", "C", 1);
    SUBCASE("rel, non, rel with R=2") {
        CHECK(average_precision({"A", "B", "C"}, q, "t") ==
              doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-12));
    }
    SUBCASE("all retrieved non-relevant") {
        CHECK(average_precision({"B", "X", "Y"}, q, "t") == 0.0);
    }
    SUBCASE("empty list") { CHECK(average_precision({}, q, "t") == 0.0); }
    SUBCASE("no relevant at all -> 0") {
        Qrels empty;
        CHECK(average_precision({"A"}, empty, "t") == 0.0);
    }
    SUBCASE("cutoff truncates the list but not R") {
        // relevant doc at rank 2 outside cutoff 1
        CHECK(average_precision({"B", "A", "C"}, q, "t", 1) == 0.0);
    }
}

TEST_CASE("average precision matches an exhaustive oracle on random lists") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        Qrels q;
        std::vector<std::string> docs;
        for (int d = 0; d < 10; ++d) {
            docs.push_back("d" + std::to_string(d));
            q.set("t", docs.back(), rng.uniform() < 0.4 ? 1 : 0);
        }
        rng.shuffle(docs);
        // brute force: precision at each relevant rank, averaged over R
        double r_total = static_cast<double>(q.relevant_count("t"));
        double expected = 0.0;
        if (r_total > 0) {
            for (std::size_t k = 0; k < docs.size(); ++k) {
                if (q.get("t", docs[k]) != 1) continue;
                int hits = 0;
                for (std::size_t j = 0; j <= k; ++j) hits += q.get("t", docs[j]);
                expected += static_cast<double>(hits) / static_cast<double>(k + 1);
            }
            expected /= r_total;
        }
        CHECK(average_precision(docs, q, "t") == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("kendall tau basics") {
    std::vector<std::string> a{"x", "y", "z"};
    CHECK(kendall_tau(a, a) == 1.0);
    std::vector<std::string> rev{"z", "y", "x"};
    CHECK(kendall_tau(a, rev) == -1.0);
    CHECK(kendall_tau(a, rev) == kendall_tau(rev, a));
    CHECK_THROWS_AS(kendall_tau(a, {"x", "y", "w"}), std::invalid_argument);
    CHECK_THROWS_AS(kendall_tau({"x"}, {"x"}), std::invalid_argument);
}

TEST_CASE("kendall tau on the concatenated-list example") {
    // completed lists for B={a,b,c,d} and R={e,a,f,c}
    std::vector<std::string> b{"a", "b", "c", "d", "e", "f"};
    std::vector<std::string> r{"e", "a", "f", "c", "b", "d"};
    CHECK(kendall_tau(b, r) == doctest::Approx(-1.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("kendall tau agrees with pair-counting oracle on all permutations up to n=6") {
    for (int n = 2; n <= 6; ++n) {
        std::vector<std::string> base;
        for (int i = 0; i < n; ++i) base.push_back(std::string(1, static_cast<char>('a' + i)));
        std::vector<std::string> perm = base;
        std::sort(perm.begin(), perm.end());
        do {
            CHECK(kendall_tau(base, perm) == doctest::Approx(kendall_oracle(base, perm)).epsilon(1e-14));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

TEST_CASE("rank_systems orders by mean AP with deterministic ties") {
    auto rs = make_runs({
        {"sysB", {{"1", ranked({"R1", "X"})}, {"2", ranked({"R2", "X"})}}},
        {"sysA", {{"1", ranked({"R1", "X"})}, {"2", ranked({"R2", "X"})}}},
        {"sysC", {{"1", ranked({"X", "R1"})}, {"2", ranked({"X", "R2"})}}},
    });
    Qrels q;
    q.set("1", "R1", 1);
    q.set("2", "R2", 1);
    auto ranking = rank_systems(rs, q, {"1", "2"});
    REQUIRE(ranking.entries.size() == 3);
    // A and B tie at AP 1.0; tie broken by ascending id
    CHECK(ranking.entries[0].first == "sysA");
    CHECK(ranking.entries[1].first == "sysB");
    CHECK(ranking.entries[2].first == "sysC");
    CHECK(ranking.entries[0].second == doctest::Approx(1.0));
    CHECK(ranking.entries[2].second == doctest::Approx(0.5));
}

TEST_CASE("rank_systems single system and dominance") {
    auto rs = make_runs({
        {"good", {{"1", ranked({"R", "X"})}}},
        {"bad", {{"1", ranked({"X", "R"})}}},
    });
    Qrels q;
    q.set("1", "R", 1);
    auto ranking = rank_systems(rs, q, {"1"});
    CHECK(ranking.entries[0].first == "good");
}

TEST_CASE("rank via ApTable equals direct recomputation and is permutation-invariant") {
    Rng rng(7);
    auto make_random_collection = [&] {
        std::vector<std::pair<std::string,
                              std::map<std::string, std::vector<std::pair<std::string, double>>>>>
            sys;
        for (int s = 0; s < 5; ++s) {
            std::map<std::string, std::vector<std::pair<std::string, double>>> lists;
            for (int t = 0; t < 4; ++t) {
                std::vector<std::string> docs;
                for (int d = 0; d < 8; ++d) docs.push_back("d" + std::to_string(d));
                rng.shuffle(docs);
                lists["t" + std::to_string(t)] = ranked(docs);
            }
            sys.emplace_back("s" + std::to_string(s), lists);
        }
        return make_runs(sys);
    };
    auto rs = make_random_collection();
    Qrels q;
    for (int t = 0; t < 4; ++t)
        for (int d = 0; d < 3; ++d) q.set("t" + std::to_string(t), "d" + std::to_string(d), 1);

    ApTable table(rs, q);
    auto direct = rank_systems(rs, q, rs.topics);
    CHECK(table.rank_all().order() == direct.order());
    for (std::size_t i = 0; i < direct.entries.size(); ++i)
        CHECK(table.rank_all().entries[i].second ==
              doctest::Approx(direct.entries[i].second).epsilon(1e-12));

    // permutation invariance in the topics argument
    auto fwd = rank_systems(rs, q, {"t0", "t1", "t2"});
    auto bwd = rank_systems(rs, q, {"t2", "t0", "t1"});
    CHECK(fwd.order() == bwd.order());
    for (std::size_t i = 0; i < fwd.entries.size(); ++i)
        CHECK(fwd.entries[i].second == doctest::Approx(bwd.entries[i].second).epsilon(1e-12));
}
