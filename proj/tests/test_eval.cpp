#include <doctest.h>

#include <json.hpp>

#include "lightretriever/eval.hpp"
#include "lightretriever/io.hpp"

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace lightretriever;
using testsupport::Rng;

#ifndef LIGHTRETRIEVER_TEST_DATA
#error "LIGHTRETRIEVER_TEST_DATA must point at tests/data"
#endif

TEST_CASE("perfect single-relevant ranking scores 1") {
    CHECK(ndcg_at_k({"d1"}, {{"d1", 1}}, 10) == 1.0);
}

TEST_CASE("no relevant retrieved scores 0") {
    CHECK(ndcg_at_k({"d2", "d3"}, {{"d1", 2}}, 10) == 0.0);
    CHECK(ndcg_at_k({"d1"}, {{"d1", 0}}, 10) == 0.0);  // nothing relevant at all
}

TEST_CASE("graded ndcg matches the direct-formula oracle") {
    const std::map<std::string, int> judged = {{"d1", 3}, {"d2", 1}};
    const std::vector<std::string> ranking = {"d2", "d1", "d3"};
    const double expected = testsupport::oracle::ndcg(ranking, judged, 3);
    CHECK(ndcg_at_k(ranking, judged, 3) == doctest::Approx(expected).epsilon(1e-6));

    // spot-check the oracle itself against a hand computation:
    // DCG = (2^1-1)/log2(2) + (2^3-1)/log2(3); IDCG = 7/log2(2) + 1/log2(3)
    const double dcg = 1.0 + 7.0 / std::log2(3.0);
    const double idcg = 7.0 + 1.0 / std::log2(3.0);
    CHECK(expected == doctest::Approx(dcg / idcg).epsilon(1e-12));
}

TEST_CASE("recall counts relevant docs inside the cutoff") {
    const std::map<std::string, int> judged = {{"a", 1}, {"b", 2}, {"c", 1}, {"x", 0}};
    CHECK(recall_at_k({"a", "b", "c"}, judged, 20) == 1.0);
    CHECK(recall_at_k({"x", "a"}, judged, 1) == 0.0);
    CHECK(recall_at_k({"x", "a"}, judged, 2) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("recall matches the set-intersection oracle on random rankings") {
    Rng rng(50);
    for (int it = 0; it < 200; ++it) {
        std::map<std::string, int> judged;
        for (size_t pick : rng.sample(80, 12))
            judged["d" + std::to_string(pick)] = static_cast<int>(rng.index(3));
        std::vector<std::string> ranking;
        for (size_t pick : rng.sample(80, 50)) ranking.push_back("d" + std::to_string(pick));
        for (size_t k : {1ul, 5ul, 20ul, 50ul})
            CHECK(recall_at_k(ranking, judged, k) ==
                  testsupport::oracle::recall(ranking, judged, k));
    }
}

TEST_CASE("metrics never leave [0,1] and promotion never hurts") {
    Rng rng(51);
    for (int it = 0; it < 100; ++it) {
        std::map<std::string, int> judged;
        for (size_t pick : rng.sample(40, 10))
            judged["d" + std::to_string(pick)] = static_cast<int>(rng.index(4));
        std::vector<std::string> ranking;
        for (size_t pick : rng.sample(40, 30)) ranking.push_back("d" + std::to_string(pick));

        const double base_ndcg = ndcg_at_k(ranking, judged, 10);
        const double base_recall = recall_at_k(ranking, judged, 10);
        CHECK(base_ndcg >= 0.0);
        CHECK(base_ndcg <= 1.0);
        CHECK(base_recall >= 0.0);
        CHECK(base_recall <= 1.0);

        // promote a relevant doc one rank above a non-relevant one
        for (size_t i = 1; i < ranking.size(); ++i) {
            auto below = judged.find(ranking[i]);
            auto above = judged.find(ranking[i - 1]);
            const int rel_below = below == judged.end() ? 0 : below->second;
            const int rel_above = above == judged.end() ? 0 : above->second;
            if (rel_below > 0 && rel_above == 0) {
                std::swap(ranking[i - 1], ranking[i]);
                CHECK(ndcg_at_k(ranking, judged, 10) >= base_ndcg - 1e-12);
                CHECK(recall_at_k(ranking, judged, 10) >= base_recall - 1e-12);
                break;
            }
        }
    }
}

TEST_CASE("ranks below the cutoff never matter") {
    Rng rng(52);
    std::map<std::string, int> judged;
    for (size_t pick : rng.sample(60, 15))
        judged["d" + std::to_string(pick)] = static_cast<int>(rng.index(4));
    std::vector<std::string> ranking;
    for (size_t pick : rng.sample(60, 40)) ranking.push_back("d" + std::to_string(pick));

    const size_t k = 10;
    const double base_n = ndcg_at_k(ranking, judged, k);
    const double base_r = recall_at_k(ranking, judged, k);
    // shuffle the tail only
    for (int it = 0; it < 10; ++it) {
        for (size_t i = ranking.size() - 1; i > k; --i)
            std::swap(ranking[i], ranking[k + 1 + rng.index(i - k)]);
        CHECK(ndcg_at_k(ranking, judged, k) == base_n);
        CHECK(recall_at_k(ranking, judged, k) == base_r);
    }
}

TEST_CASE("evaluate_run aggregates per query and macro-averages") {
    Qrels qrels;
    qrels.judgments["q1"] = {{"d1", 2}, {"d2", 1}};
    qrels.judgments["q2"] = {{"d9", 1}};
    RunFile run;
    run.queries["q1"] = {Hit{"d1", 2.0, 1}, Hit{"d2", 1.0, 2}};  // ideal order
    run.queries["q2"] = {Hit{"d9", 1.0, 1}};

    const auto report = evaluate_run(run, qrels, {10});
    CHECK(report.query_count == 2);
    CHECK(report.means.at("ndcg@10") == 1.0);
    CHECK(report.means.at("recall@10") == 1.0);
    CHECK(report.per_query.at("q1").at("judged@10") == 1.0);
}

TEST_CASE("missing and empty runs score zero") {
    Qrels qrels;
    qrels.judgments["q1"] = {{"d1", 1}};
    qrels.judgments["q2"] = {{"d2", 1}};
    RunFile run;  // empty
    const auto report = evaluate_run(run, qrels, {10, 20});
    CHECK(report.means.at("ndcg@10") == 0.0);
    CHECK(report.means.at("recall@20") == 0.0);

    // run-only queries are ignored
    run.queries["q9"] = {Hit{"dx", 1.0, 1}};
    CHECK(evaluate_run(run, qrels, {10}).per_query.count("q9") == 0);
}

TEST_CASE("20-query golden suite matches the frozen oracle values") {
    const std::string dir = LIGHTRETRIEVER_TEST_DATA;
    const RunFile run = read_run(dir + "/golden.run");
    const Qrels qrels = read_qrels(dir + "/golden.qrels");
    const auto report = evaluate_run(run, qrels, {10, 20, 50, 100});

    const auto golden = nlohmann::json::parse(testsupport::read_text(dir + "/golden.json"));
    for (const auto& [name, value] : golden["means"].items())
        CHECK(report.means.at(name) == doctest::Approx(value.get<double>()).epsilon(1e-6));
    for (const auto& [qid, metrics] : golden["per_query"].items())
        for (const auto& [name, value] : metrics.items())
            CHECK(report.per_query.at(qid).at(name) ==
                  doctest::Approx(value.get<double>()).epsilon(1e-6));

    // double-check the frozen file against a fresh oracle pass
    for (const auto& [qid, judged] : qrels.judgments) {
        std::vector<std::string> ranking;
        for (const Hit& h : run.queries.at(qid)) ranking.push_back(h.doc_id);
        CHECK(golden["per_query"][qid]["ndcg@10"].get<double>() ==
              doctest::Approx(testsupport::oracle::ndcg(ranking, judged, 10)).epsilon(1e-9));
        CHECK(golden["per_query"][qid]["recall@100"].get<double>() ==
              doctest::Approx(testsupport::oracle::recall(ranking, judged, 100)).epsilon(1e-9));
    }

    // report formats stay parseable
    CHECK(nlohmann::json::parse(report.to_json()).contains("means"));
    CHECK(report.to_table().find("ndcg@10") != std::string::npos);
}
