#pragma once

#include <map>
#include <string>
#include <vector>

#include "lightretriever/types.hpp"

namespace lightretriever {

struct EvalReport {
    // query id -> metric name -> value, metric names like "ndcg@10",
    // "recall@50", "judged@10".
    std::map<std::string, std::map<std::string, double>> per_query;
    std::map<std::string, double> means;  // macro average over qrels queries
    size_t query_count = 0;               // queries in the qrels
    size_t queries_without_relevant = 0;

    std::string to_json() const;
    std::string to_table() const;
};

// Exponential-gain nDCG: DCG = sum_{i<=k} (2^rel_i - 1) / log2(i + 1), IDCG
// from the query's relevance values sorted descending and truncated at k.
// Unjudged documents count as rel 0; queries with no relevant document
// score 0.
double ndcg_at_k(const std::vector<std::string>& ranked_ids,
                 const std::map<std::string, int>& qrels_for_query, size_t k);

// |relevant docs in the top k| / |relevant docs|; 0 when nothing is relevant.
double recall_at_k(const std::vector<std::string>& ranked_ids,
                   const std::map<std::string, int>& qrels_for_query, size_t k);

// Fraction of the top min(k, len) ranked docs that are judged at all.
double judged_at_k(const std::vector<std::string>& ranked_ids,
                   const std::map<std::string, int>& qrels_for_query, size_t k);

// nDCG@k and recall@k for every k in ks, macro-averaged over the queries in
// the qrels; queries missing from the run score 0, run-only queries are
// ignored.
EvalReport evaluate_run(const RunFile& run, const Qrels& qrels, const std::vector<size_t>& ks);

}  // namespace lightretriever
