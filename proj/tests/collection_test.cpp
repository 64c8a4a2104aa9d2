#include <doctest.h>

#include <zlib.h>

#include "helpers.hpp"
#include "tsel/collection.hpp"
#include "tsel/errors.hpp"
#include "tsel/synthetic.hpp"

using namespace tsel;
using namespace tsel::test;

TEST_CASE("parse_runs maps the TREC format directly") {
    TempDir tmp("parse_runs");
    write_text(tmp.path("a.run"),
               "601 Q0 DOCA 1 5.0 runX\n"
               "601 Q0 DOCB 2 4.0 runX\n");
    RunSet rs = parse_runs({tmp.path("a.run")}, 100);
    REQUIRE(rs.runs.size() == 1);
    CHECK(rs.runs[0].system_id == "runX");
    REQUIRE(rs.topics == std::vector<TopicId>{"601"});
    const auto& list = rs.runs[0].lists.at("601");
    REQUIRE(list.size() == 2);
    CHECK(list[0].doc_id == "DOCA");
    CHECK(list[1].doc_id == "DOCB");
    CHECK(rs.report.issues.empty());
}

TEST_CASE("parse_runs rejects a duplicate document within a topic") {
    TempDir tmp("dup_doc");
    write_text(tmp.path("a.run"),
               "601 Q0 DOCA 1 5.0 runX\n"
               "601 Q0 DOCA 2 4.0 runX\n");
    CHECK_THROWS_WITH_AS(parse_runs({tmp.path("a.run")}, 100),
                         doctest::Contains("DOCA"), DataError);
}

TEST_CASE("parse_runs re-sorts shuffled scores and logs an anomaly") {
    TempDir tmp("shuffled");
    write_text(tmp.path("a.run"),
               "601 Q0 DOCB 1 4.0 runX\n"
               "601 Q0 DOCA 2 5.0 runX\n"
               "601 Q0 DOCC 3 3.0 runX\n");
    RunSet rs = parse_runs({tmp.path("a.run")}, 100);
    const auto& list = rs.runs[0].lists.at("601");
    CHECK(list[0].doc_id == "DOCA");
    CHECK(list[1].doc_id == "DOCB");
    CHECK(list[2].doc_id == "DOCC");
    CHECK(rs.report.warning_count() >= 1);
}

TEST_CASE("parse_runs reports malformed lines with location") {
    TempDir tmp("malformed");
    write_text(tmp.path("a.run"), "601 Q0 DOCA 1 5.0 runX\n601 Q0 DOCB\n");
    try {
        parse_runs({tmp.path("a.run")}, 100);
        FAIL("expected ParseError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
}

TEST_CASE("parse_runs truncates to max depth and breaks score ties stably") {
    TempDir tmp("ties");
    write_text(tmp.path("a.run"),
               "601 Q0 D1 1 2.0 r\n"
               "601 Q0 D2 2 2.0 r\n"
               "601 Q0 D3 3 1.0 r\n");
    RunSet rs = parse_runs({tmp.path("a.run")}, 2);
    const auto& list = rs.runs[0].lists.at("601");
    REQUIRE(list.size() == 2);
    CHECK(list[0].doc_id == "D1"); // equal scores keep input order
    CHECK(list[1].doc_id == "D2");
}

TEST_CASE("parse_qrels binarizes grades") {
    TempDir tmp("qrels");
    write_text(tmp.path("q.txt"),
               "601 0 DOCA 2\n"
               "601 0 DOCB 0\n"
               "601 0 DOCC -1\n");
    ValidationReport report;
    Qrels q = parse_qrels(tmp.path("q.txt"), &report);
    CHECK(q.get("601", "DOCA") == 1);
    CHECK(q.get("601", "DOCB") == 0);
    CHECK(q.get("601", "DOCC") == 0);
    CHECK(q.is_judged("601", "DOCC"));
    CHECK(report.warning_count() == 1); // the negative grade
    CHECK(q.relevant_count("601") == 1);
}

TEST_CASE("parse_qrels last-wins on duplicates with a warning") {
    TempDir tmp("qrels_dup");
    write_text(tmp.path("q.txt"), "601 0 DOCA 1\n601 0 DOCA 0\n");
    ValidationReport report;
    Qrels q = parse_qrels(tmp.path("q.txt"), &report);
    CHECK(q.get("601", "DOCA") == 0);
    CHECK(report.warning_count() == 1);
}

TEST_CASE("gzip runs and qrels read transparently") {
    TempDir tmp("gz");
    const std::string content = "601 Q0 DOCA 1 5.0 runX\n601 Q0 DOCB 2 4.0 runX\n";
    gzFile gz = gzopen(tmp.path("a.run.gz").c_str(), "wb");
    REQUIRE(gz != nullptr);
    gzwrite(gz, content.data(), static_cast<unsigned>(content.size()));
    gzclose(gz);
    RunSet rs = parse_runs({tmp.path("a.run.gz")}, 100);
    CHECK(rs.runs[0].lists.at("601").size() == 2);
}

TEST_CASE("build_pool unions top-depth documents") {
    auto rs = make_runs({
        {"s1", {{"601", ranked({"A", "B", "C"})}}},
        {"s2", {{"601", ranked({"A", "B", "D"})}}},
    });
    SUBCASE("identical top-2 lists") {
        CHECK(build_pool(rs, "601", 2).docs == std::set<std::string>{"A", "B"});
    }
    SUBCASE("disjoint lists") {
        auto rs2 = make_runs({
            {"s1", {{"601", ranked({"A", "B"})}}},
            {"s2", {{"601", ranked({"C", "D"})}}},
        });
        CHECK(build_pool(rs2, "601", 2).docs.size() == 4);
    }
    SUBCASE("unknown topic") { CHECK_THROWS_AS(build_pool(rs, "999", 2), DataError); }
}

TEST_CASE("pool depth monotonicity and size bound") {
    SynthConfig cfg;
    cfg.n_topics = 6;
    cfg.n_systems = 4;
    cfg.list_depth = 25;
    cfg.seed = 99;
    auto coll = generate_collection(cfg);
    for (const auto& topic : coll.runs.topics) {
        std::set<std::string> prev;
        for (int depth : {1, 3, 7, 15, 25}) {
            Pool pool = build_pool(coll.runs, topic, depth);
            CHECK(pool.docs.size() <= static_cast<std::size_t>(4 * depth));
            CHECK(std::includes(pool.docs.begin(), pool.docs.end(), prev.begin(), prev.end()));
            prev = pool.docs;
        }
        // brute-force union oracle at full depth
        std::set<std::string> expected;
        for (const auto& run : coll.runs.runs)
            for (const auto& e : run.lists.at(topic)) expected.insert(e.doc_id);
        CHECK(build_pool(coll.runs, topic, 25).docs == expected);
    }
}

TEST_CASE("run serialization round-trips") {
    SynthConfig cfg;
    cfg.n_topics = 4;
    cfg.n_systems = 3;
    cfg.list_depth = 12;
    cfg.seed = 7;
    auto coll = generate_collection(cfg);
    TempDir tmp("roundtrip");
    std::vector<std::string> paths;
    for (const auto& run : coll.runs.runs) {
        paths.push_back(tmp.path(run.system_id + ".run"));
        write_run_file(run, paths.back());
    }
    RunSet parsed = parse_runs(paths, cfg.list_depth);
    REQUIRE(parsed.runs.size() == coll.runs.runs.size());
    for (std::size_t s = 0; s < parsed.runs.size(); ++s) {
        CHECK(parsed.runs[s].system_id == coll.runs.runs[s].system_id);
        CHECK(parsed.runs[s].lists == coll.runs.runs[s].lists);
    }

    write_qrels_file(coll.qrels, tmp.path("qrels.txt"));
    Qrels q2 = parse_qrels(tmp.path("qrels.txt"));
    CHECK(q2.by_topic() == coll.qrels.by_topic());
}

TEST_CASE("validation flags topics absent from qrels") {
    auto rs = make_runs({
        {"s1", {{"601", ranked({"A"})}, {"602", ranked({"B"})}}},
        {"s2", {{"601", ranked({"A"})}, {"602", ranked({"B"})}}},
    });
    Qrels q;
    q.set("601", "A", 1);
    validate_collection(rs, q);
    CHECK(rs.report.warning_count() == 1);
}
