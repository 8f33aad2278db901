#include "evifuse/priors.hpp"

#include <algorithm>
#include <cmath>

namespace evifuse {

namespace {

std::pair<std::string, std::string> canonical_pair(const std::string& u, const std::string& v) {
    return u <= v ? std::make_pair(u, v) : std::make_pair(v, u);
}

}  // namespace

void GraphEdgeStore::add_relation(const std::string& u, const std::string& v, double w) {
    if (!std::isfinite(w) || w < 0.0)
        throw NegativeWeightError("relation weight must be non-negative (edge " + u + " -- " + v + ")");
    weights_[canonical_pair(u, v)] += w;
}

double GraphEdgeStore::lookup(const std::string& u, const std::string& v) const {
    auto it = weights_.find(canonical_pair(u, v));
    return it == weights_.end() ? 0.0 : it->second;
}

GraphEdgeStore aggregate_relation_weights(const std::vector<GraphRelation>& relations) {
    GraphEdgeStore store;
    for (const GraphRelation& r : relations) store.add_relation(r.u, r.v, r.weight);
    return store;
}

double edge_probability(double s_uv, const FusionConfig& cfg) {
    if (!std::isfinite(s_uv) || s_uv < 0.0)
        throw NegativeWeightError("aggregated edge weight must be non-negative");
    // 1 - exp(-kappa*s) computed as -expm1 for precision near 0; once
    // exp(-kappa*s) underflows the result would round to 1.0 exactly, so
    // saturate one ulp below to keep the declared [0, 1) range
    return std::min(-std::expm1(-cfg.kappa * s_uv), std::nextafter(1.0, 0.0));
}

double graph_prior(const std::string& e1, const std::string& e2, const std::string& e3,
                   const GraphEdgeStore& store, const FusionConfig& cfg) {
    const double p12 = edge_probability(store.lookup(e1, e2), cfg);
    const double p23 = edge_probability(store.lookup(e2, e3), cfg);
    const double p13 = edge_probability(store.lookup(e1, e3), cfg);
    return (p12 + p23 + p13) / 3.0;
}

namespace {

double page_diagonal(const LayoutRecord& r) {
    return std::sqrt(r.page_width * r.page_width + r.page_height * r.page_height);
}

bool dist_gate(const LayoutRecord& t, const LayoutRecord& v, const FusionConfig& cfg) {
    const double dx = t.bbox->center_x() - v.bbox->center_x();
    const double dy = t.bbox->center_y() - v.bbox->center_y();
    return std::sqrt(dx * dx + dy * dy) < cfg.tau * page_diagonal(t);
}

bool page_gate(int pg_t, int pg_v, int pg_s, const FusionConfig& cfg) {
    const int spread = std::max(std::abs(pg_t - pg_s), std::abs(pg_v - pg_s));
    return spread < cfg.tau_page;
}

}  // namespace

double layout_prior(const LayoutRecord& t, const LayoutRecord& v, const LayoutRecord& s,
                    const FusionConfig& cfg, bool* missing_bbox) {
    if (!t.bbox.has_value() || !v.bbox.has_value()) {
        if (missing_bbox) *missing_bbox = true;
        return cfg.epsilon;
    }
    const bool ok = dist_gate(t, v, cfg) && page_gate(t.page, v.page, s.page, cfg);
    return ok ? 1.0 : cfg.epsilon;
}

PriorMode prior_mode_from_string(const std::string& s) {
    if (s == "graph") return PriorMode::Graph;
    if (s == "layout") return PriorMode::Layout;
    if (s == "none") return PriorMode::None;
    throw InputError("unknown prior mode '" + s + "' (expected graph|layout|none)");
}

std::string to_string(PriorMode m) {
    switch (m) {
        case PriorMode::Graph: return "graph";
        case PriorMode::Layout: return "layout";
        case PriorMode::None: return "none";
    }
    throw InputError("unknown prior mode value");
}

namespace {

// Looks up the layout record for a candidate; nullptr when unavailable.
const LayoutRecord* find_layout(const Candidate* c,
                                const std::map<std::string, LayoutRecord>& layout) {
    if (!c) return nullptr;
    auto it = layout.find(c->chunk_id);
    return it == layout.end() ? nullptr : &it->second;
}

// Layout gates over a possibly partial tuple: a condition whose
// participants are absent holds vacuously.
double partial_layout_prior(const Candidate* t, const Candidate* v, const Candidate* s,
                            const std::map<std::string, LayoutRecord>& layout,
                            const FusionConfig& cfg, bool* degraded) {
    const LayoutRecord* rt = find_layout(t, layout);
    const LayoutRecord* rv = find_layout(v, layout);
    const LayoutRecord* rs = find_layout(s, layout);
    // every present slot needs a layout record, else the signal is unusable
    if ((t && !rt) || (v && !rv) || (s && !rs)) {
        if (degraded) *degraded = true;
        return cfg.epsilon;
    }
    if (rt && rv) {
        if (!rt->bbox.has_value() || !rv->bbox.has_value()) {
            if (degraded) *degraded = true;
            return cfg.epsilon;
        }
        if (!dist_gate(*rt, *rv, cfg)) return cfg.epsilon;
    }
    if (rs) {
        const int pg_t = rt ? rt->page : rs->page;  // absent slot never widens the spread
        const int pg_v = rv ? rv->page : rs->page;
        if (!page_gate(pg_t, pg_v, rs->page, cfg)) return cfg.epsilon;
    }
    return 1.0;
}

double partial_graph_prior(const Candidate* t, const Candidate* v, const Candidate* s,
                           const GraphEdgeStore& store, const FusionConfig& cfg) {
    std::vector<const Candidate*> present;
    for (const Candidate* c : {t, v, s})
        if (c) present.push_back(c);
    if (present.size() == 3)
        return graph_prior(present[0]->chunk_id, present[1]->chunk_id, present[2]->chunk_id,
                           store, cfg);
    // exactly two slots: the single pairwise edge probability
    return edge_probability(store.lookup(present[0]->chunk_id, present[1]->chunk_id), cfg);
}

}  // namespace

double prior_of_tuple(const Candidate* t, const Candidate* v, const Candidate* s,
                      PriorMode mode, const PriorStores& stores, const FusionConfig& cfg,
                      bool* degraded) {
    if (mode == PriorMode::None) return 1.0;
    const int present = (t ? 1 : 0) + (v ? 1 : 0) + (s ? 1 : 0);
    if (present < 2) return cfg.default_prior;
    if (mode == PriorMode::Graph) {
        if (!stores.graph)
            throw DependencyError("graph prior selected but no knowledge-graph edges loaded");
        return partial_graph_prior(t, v, s, *stores.graph, cfg);
    }
    if (!stores.layout)
        throw DependencyError("layout prior selected but no layout records loaded");
    return partial_layout_prior(t, v, s, *stores.layout, cfg, degraded);
}

}  // namespace evifuse
