#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "evifuse/core.hpp"

namespace evifuse {

/// Page geometry of one chunk, as read from the layout file. The bbox is
/// optional so callers can signal "layout signal unavailable" instead of
/// failing hard (the prior then degrades to epsilon).
struct LayoutRecord {
    std::string chunk_id;
    std::string doc_id;
    int page = 0;
    std::optional<BBox> bbox;
    double page_width = 0.0;
    double page_height = 0.0;
};

/// One relation between two chunks, as read from the knowledge-graph edge
/// file. Weight defaults to 1 when the file omits it.
struct GraphRelation {
    std::string u;
    std::string v;
    double weight = 1.0;
};

/// Aggregated symmetric edge weights keyed by unordered chunk-id pair.
/// Built once, then read-only; missing pairs read as weight 0.
class GraphEdgeStore {
public:
    /// Adds w to the aggregated weight of the unordered pair {u, v}.
    /// Throws NegativeWeightError when w < 0.
    void add_relation(const std::string& u, const std::string& v, double w);

    /// Aggregated weight S_uv; 0 when the pair has no relations.
    double lookup(const std::string& u, const std::string& v) const;

    std::size_t pair_count() const { return weights_.size(); }

private:
    std::map<std::pair<std::string, std::string>, double> weights_;
};

/// Folds a relation list into a GraphEdgeStore (order-insensitive,
/// orientation-insensitive). Throws NegativeWeightError on negative weights.
GraphEdgeStore aggregate_relation_weights(const std::vector<GraphRelation>& relations);

/// Saturating map from aggregated edge weight to probability:
/// 1 - exp(-kappa * s_uv). Strictly increasing, bounded in [0, 1).
double edge_probability(double s_uv, const FusionConfig& cfg);

/// Mean pairwise edge probability over the three chunk pairs of a tuple.
/// Missing edges contribute 0; a fully disconnected triplet scores 0.
double graph_prior(const std::string& e1, const std::string& e2, const std::string& e3,
                   const GraphEdgeStore& store, const FusionConfig& cfg);

/// Binary layout coherence with a penalty floor: returns 1.0 iff
///   C_dist: dist(center(t.bbox), center(v.bbox)) < tau * diag(t's page), and
///   C_page: max(|pg(t)-pg(s)|, |pg(v)-pg(s)|) < tau_page,
/// otherwise epsilon. A missing bbox on t or v makes the layout signal
/// unavailable: the result is epsilon and *missing_bbox (when given) is set.
double layout_prior(const LayoutRecord& t, const LayoutRecord& v, const LayoutRecord& s,
                    const FusionConfig& cfg, bool* missing_bbox = nullptr);

enum class PriorMode { Graph, Layout, None };

PriorMode prior_mode_from_string(const std::string& s);
std::string to_string(PriorMode m);

/// Read-only handles to whichever stores the selected prior mode needs.
struct PriorStores {
    const GraphEdgeStore* graph = nullptr;
    const std::map<std::string, LayoutRecord>* layout = nullptr;
};

/// Prior of one evidence tuple (slots may be null when absent):
///   - mode None: uniform prior 1.0;
///   - fewer than two present slots: cfg.default_prior;
///   - mode Graph: mean pairwise edge probability over the present pairs;
///   - mode Layout: the layout gates restricted to the present slots
///     (conditions whose participants are absent hold vacuously); chunks
///     without a layout record degrade the tuple to epsilon.
/// *degraded (when given) is set if any layout signal was unavailable.
double prior_of_tuple(const Candidate* t, const Candidate* v, const Candidate* s,
                      PriorMode mode, const PriorStores& stores, const FusionConfig& cfg,
                      bool* degraded = nullptr);

}  // namespace evifuse
