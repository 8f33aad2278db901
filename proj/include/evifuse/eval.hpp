#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evifuse/core.hpp"
#include "evifuse/ranker.hpp"

namespace evifuse {

/// A (doc_id, page) pair — the unit of relevance judgment.
using PageRef = std::pair<std::string, int>;

/// Relevance judgments: query_id -> set of relevant evidence pages.
struct Qrels {
    std::map<std::string, std::set<PageRef>> relevant;
};

/// Hit  — a query scores 1 at k iff any top-k tuple touches a relevant page.
/// Set  — a query scores the fraction of its relevant pages covered by the
///        union of the top-k tuples' pages.
enum class RecallMode { Hit, Set };

/// Pages an evidence tuple touches: union of (doc_id, page) over its
/// present slots (duplicates collapse).
std::set<PageRef> tuple_pages(const EvidenceTuple& t);

/// Wraps a flat baseline candidate as a single-slot tuple so baseline runs
/// flow through the same tuple_pages evaluation path.
EvidenceTuple as_single_slot_tuple(const Candidate& c);

/// Recall of one query at each cutoff.
struct QueryRecall {
    std::string query_id;
    std::map<int, double> at_k;
};

/// Aggregated recall over a query set: recall[k] is the mean of the
/// per-query values at k. Monotone non-decreasing in k by construction.
struct RecallReport {
    std::vector<int> ks;
    std::map<int, double> recall;
    std::vector<QueryRecall> per_query;
};

/// Per-query recall at the given cutoffs. `relevant` must be the query's
/// non-empty judgment set (throws UnknownQueryError when empty — the query
/// has no usable judgments). ks must be positive.
QueryRecall recall_at_k(const std::string& query_id, const std::vector<EvidenceTuple>& ranked,
                        const std::set<PageRef>& relevant, const std::vector<int>& ks,
                        RecallMode mode = RecallMode::Hit);

/// Evaluates every query in `qrels` against the per-query rankings in
/// `runs`. A run query absent from the qrels throws UnknownQueryError; a
/// qrels query absent from the run counts as a miss at every k.
RecallReport evaluate_runs(const std::map<std::string, std::vector<EvidenceTuple>>& runs,
                           const Qrels& qrels, const std::vector<int>& ks,
                           RecallMode mode = RecallMode::Hit);

/// Per-k recall difference (b - a). Throws GridMismatchError unless both
/// reports share the same k grid and query set.
std::map<int, double> compare_runs(const RecallReport& a, const RecallReport& b);

}  // namespace evifuse
