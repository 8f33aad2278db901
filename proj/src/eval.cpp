#include "evifuse/eval.hpp"

#include <algorithm>

namespace evifuse {

std::set<PageRef> tuple_pages(const EvidenceTuple& t) {
    std::set<PageRef> pages;
    if (t.text) pages.emplace(t.text->doc_id, t.text->page);
    if (t.image) pages.emplace(t.image->doc_id, t.image->page);
    if (t.screenshot) pages.emplace(t.screenshot->doc_id, t.screenshot->page);
    return pages;
}

EvidenceTuple as_single_slot_tuple(const Candidate& c) {
    EvidenceTuple t;
    switch (c.modality) {
        case Modality::Text: t.text = c; break;
        case Modality::Image: t.image = c; break;
        case Modality::Screenshot: t.screenshot = c; break;
    }
    t.likelihood = c.norm_score;
    t.prior = 1.0;
    t.posterior = c.norm_score;
    return t;
}

QueryRecall recall_at_k(const std::string& query_id, const std::vector<EvidenceTuple>& ranked,
                        const std::set<PageRef>& relevant, const std::vector<int>& ks,
                        RecallMode mode) {
    if (relevant.empty())
        throw UnknownQueryError("query '" + query_id + "' has no relevance judgments");
    for (int k : ks)
        if (k < 1) throw InputError("recall cutoffs must be positive integers");

    QueryRecall qr;
    qr.query_id = query_id;
    // prefix page coverage: covered[i] = pages touched by the top-(i+1) tuples
    std::set<PageRef> covered;
    std::vector<std::size_t> hits_by_prefix;   // relevant pages covered after each rank
    hits_by_prefix.reserve(ranked.size());
    std::size_t relevant_covered = 0;
    for (const EvidenceTuple& t : ranked) {
        for (const PageRef& p : tuple_pages(t)) {
            if (covered.insert(p).second && relevant.count(p)) ++relevant_covered;
        }
        hits_by_prefix.push_back(relevant_covered);
    }
    for (int k : ks) {
        const std::size_t depth = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
        const std::size_t found = depth == 0 ? 0 : hits_by_prefix[depth - 1];
        if (mode == RecallMode::Hit)
            qr.at_k[k] = found > 0 ? 1.0 : 0.0;
        else
            qr.at_k[k] = static_cast<double>(found) / static_cast<double>(relevant.size());
    }
    return qr;
}

RecallReport evaluate_runs(const std::map<std::string, std::vector<EvidenceTuple>>& runs,
                           const Qrels& qrels, const std::vector<int>& ks, RecallMode mode) {
    for (const auto& [qid, ranked] : runs) {
        (void)ranked;
        if (!qrels.relevant.count(qid))
            throw UnknownQueryError("run contains query '" + qid + "' with no relevance judgments");
    }
    RecallReport report;
    report.ks = ks;
    static const std::vector<EvidenceTuple> empty_ranking;
    for (const auto& [qid, relevant] : qrels.relevant) {
        auto it = runs.find(qid);
        const std::vector<EvidenceTuple>& ranked = it == runs.end() ? empty_ranking : it->second;
        report.per_query.push_back(recall_at_k(qid, ranked, relevant, ks, mode));
    }
    const double n = static_cast<double>(report.per_query.size());
    for (int k : ks) {
        double sum = 0.0;
        for (const QueryRecall& qr : report.per_query) sum += qr.at_k.at(k);
        report.recall[k] = n == 0.0 ? 0.0 : sum / n;
    }
    return report;
}

std::map<int, double> compare_runs(const RecallReport& a, const RecallReport& b) {
    if (a.ks != b.ks)
        throw GridMismatchError("recall reports use different k grids");
    auto query_set = [](const RecallReport& r) {
        std::set<std::string> qs;
        for (const QueryRecall& q : r.per_query) qs.insert(q.query_id);
        return qs;
    };
    if (query_set(a) != query_set(b))
        throw GridMismatchError("recall reports cover different query sets");
    std::map<int, double> delta;
    for (int k : a.ks) delta[k] = b.recall.at(k) - a.recall.at(k);
    return delta;
}

}  // namespace evifuse
