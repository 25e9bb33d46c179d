// Generates the frozen 20-query evaluation suite under tests/data/: a run
// file, qrels, and the expected metrics computed by the independent oracle
// implementations (never by the engine). Run manually when the fixtures need
// regenerating:   golden_gen <output-dir>

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "lightretriever/io.hpp"
#include "lightretriever/types.hpp"

#include "support/oracles.hpp"
#include "support/test_rng.hpp"

using namespace lightretriever;
using testsupport::Rng;

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: golden_gen <output-dir>\n");
        return 2;
    }
    const std::string out_dir = argv[1];
    Rng rng(20240817);

    const std::vector<size_t> ks = {10, 20, 50, 100};
    Qrels qrels;
    RunFile run;

    for (int q = 1; q <= 20; ++q) {
        char qid[16];
        std::snprintf(qid, sizeof(qid), "q%02d", q);

        // 120-doc universe per query; judge ~25 docs with relevance 0..3
        std::vector<std::string> universe;
        for (int d = 0; d < 120; ++d) {
            char did[32];
            std::snprintf(did, sizeof(did), "%s_d%03d", qid, d);
            universe.push_back(did);
        }
        for (size_t pick : rng.sample(universe.size(), 25))
            qrels.judgments[qid][universe[pick]] = static_cast<int>(rng.index(4));

        // ranked list of 100 docs with strictly decreasing scores (two
        // decimals keep the text round-trip exact)
        auto order = rng.sample(universe.size(), 100);
        std::vector<Hit> hits;
        double score = 5000.0;
        for (size_t i = 0; i < order.size(); ++i) {
            score -= 1.0 + static_cast<double>(rng.index(50));
            hits.push_back(Hit{universe[order[i]], score / 100.0, static_cast<int>(i) + 1});
        }
        run.queries[qid] = std::move(hits);
    }

    write_qrels(qrels, out_dir + "/golden.qrels");
    write_run(run, out_dir + "/golden.run", "golden");

    // expected values from the oracle formulas only
    std::string json = "{\n  \"per_query\": {\n";
    std::map<std::string, double> sums;
    bool first_q = true;
    for (const auto& [qid, judged] : qrels.judgments) {
        std::vector<std::string> ranking;
        for (const Hit& h : run.queries.at(qid)) ranking.push_back(h.doc_id);
        if (!first_q) json += ",\n";
        first_q = false;
        json += "    \"" + qid + "\": {";
        bool first_m = true;
        for (size_t k : ks) {
            const double n = testsupport::oracle::ndcg(ranking, judged, k);
            const double r = testsupport::oracle::recall(ranking, judged, k);
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%s\"ndcg@%zu\": %.12f, \"recall@%zu\": %.12f",
                          first_m ? "" : ", ", k, n, k, r);
            json += buf;
            first_m = false;
            sums["ndcg@" + std::to_string(k)] += n;
            sums["recall@" + std::to_string(k)] += r;
        }
        json += "}";
    }
    json += "\n  },\n  \"means\": {";
    bool first_m = true;
    for (const auto& [name, total] : sums) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s\"%s\": %.12f", first_m ? "" : ", ", name.c_str(),
                      total / 20.0);
        json += buf;
        first_m = false;
    }
    json += "}\n}\n";

    std::ofstream out(out_dir + "/golden.json");
    out << json;
    std::printf("wrote golden.{qrels,run,json} to %s\n", out_dir.c_str());
    return 0;
}
