#include "lightretriever/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "lightretriever/error.hpp"

namespace lightretriever {

namespace {

double gain(int rel) { return static_cast<double>((1ll << rel) - 1); }

}  // namespace

double ndcg_at_k(const std::vector<std::string>& ranked_ids,
                 const std::map<std::string, int>& qrels_for_query, size_t k) {
    if (k == 0) throw InvalidArgument("ndcg_at_k: k must be >= 1");
    std::vector<int> rels;
    rels.reserve(qrels_for_query.size());
    for (const auto& [did, rel] : qrels_for_query)
        if (rel > 0) rels.push_back(rel);
    if (rels.empty()) return 0.0;

    double dcg = 0.0;
    const size_t depth = std::min(k, ranked_ids.size());
    for (size_t i = 0; i < depth; ++i) {
        auto it = qrels_for_query.find(ranked_ids[i]);
        const int rel = it == qrels_for_query.end() ? 0 : it->second;
        if (rel > 0) dcg += gain(rel) / std::log2(static_cast<double>(i) + 2.0);
    }

    std::sort(rels.begin(), rels.end(), std::greater<int>());
    double idcg = 0.0;
    for (size_t i = 0; i < std::min(k, rels.size()); ++i)
        idcg += gain(rels[i]) / std::log2(static_cast<double>(i) + 2.0);
    return dcg / idcg;
}

double recall_at_k(const std::vector<std::string>& ranked_ids,
                   const std::map<std::string, int>& qrels_for_query, size_t k) {
    if (k == 0) throw InvalidArgument("recall_at_k: k must be >= 1");
    size_t relevant = 0;
    for (const auto& [did, rel] : qrels_for_query)
        if (rel > 0) ++relevant;
    if (relevant == 0) return 0.0;

    size_t found = 0;
    const size_t depth = std::min(k, ranked_ids.size());
    for (size_t i = 0; i < depth; ++i) {
        auto it = qrels_for_query.find(ranked_ids[i]);
        if (it != qrels_for_query.end() && it->second > 0) ++found;
    }
    return static_cast<double>(found) / static_cast<double>(relevant);
}

double judged_at_k(const std::vector<std::string>& ranked_ids,
                   const std::map<std::string, int>& qrels_for_query, size_t k) {
    if (k == 0) throw InvalidArgument("judged_at_k: k must be >= 1");
    const size_t depth = std::min(k, ranked_ids.size());
    if (depth == 0) return 0.0;
    size_t judged = 0;
    for (size_t i = 0; i < depth; ++i)
        if (qrels_for_query.count(ranked_ids[i])) ++judged;
    return static_cast<double>(judged) / static_cast<double>(depth);
}

EvalReport evaluate_run(const RunFile& run, const Qrels& qrels, const std::vector<size_t>& ks) {
    EvalReport report;
    report.query_count = qrels.judgments.size();

    std::map<std::string, double> sums;
    for (const auto& [qid, judged_docs] : qrels.judgments) {
        std::vector<std::string> ranked;
        auto rit = run.queries.find(qid);
        if (rit != run.queries.end()) {
            ranked.reserve(rit->second.size());
            for (const Hit& h : rit->second) ranked.push_back(h.doc_id);
        }
        bool has_relevant = false;
        for (const auto& [did, rel] : judged_docs)
            if (rel > 0) has_relevant = true;
        if (!has_relevant) ++report.queries_without_relevant;

        auto& per = report.per_query[qid];
        for (size_t k : ks) {
            const std::string suffix = "@" + std::to_string(k);
            per["ndcg" + suffix] = ndcg_at_k(ranked, judged_docs, k);
            per["recall" + suffix] = recall_at_k(ranked, judged_docs, k);
            per["judged" + suffix] = judged_at_k(ranked, judged_docs, k);
        }
        for (const auto& [name, value] : per) sums[name] += value;
    }

    if (report.query_count > 0)
        for (const auto& [name, total] : sums)
            report.means[name] = total / static_cast<double>(report.query_count);
    else
        for (size_t k : ks) {
            const std::string suffix = "@" + std::to_string(k);
            report.means["ndcg" + suffix] = 0.0;
            report.means["recall" + suffix] = 0.0;
            report.means["judged" + suffix] = 0.0;
        }
    return report;
}

std::string EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["query_count"] = query_count;
    j["queries_without_relevant"] = queries_without_relevant;
    j["means"] = nlohmann::ordered_json::object();
    for (const auto& [name, value] : means) j["means"][name] = value;
    j["per_query"] = nlohmann::ordered_json::object();
    for (const auto& [qid, metrics] : per_query) {
        nlohmann::ordered_json q = nlohmann::ordered_json::object();
        for (const auto& [name, value] : metrics) q[name] = value;
        j["per_query"][qid] = std::move(q);
    }
    return j.dump(2);
}

std::string EvalReport::to_table() const {
    std::ostringstream out;
    out << "metric              mean\n";
    out << "------------------  ----------\n";
    char buf[64];
    for (const auto& [name, value] : means) {
        std::snprintf(buf, sizeof(buf), "%-18s  %.6f\n", name.c_str(), value);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "queries: %zu", query_count);
    out << buf;
    if (queries_without_relevant > 0)
        out << " (" << queries_without_relevant << " without relevant docs)";
    out << '\n';
    return out.str();
}

}  // namespace lightretriever
