#include "evifuse/ranker.hpp"

#include <algorithm>
#include <cstdint>

namespace evifuse {

std::string EvidenceTuple::doc_id() const {
    if (text) return text->doc_id;
    if (image) return image->doc_id;
    if (screenshot) return screenshot->doc_id;
    return {};
}

FusionMode fusion_mode_from_string(const std::string& s) {
    if (s == "ds") return FusionMode::DempsterShafer;
    if (s == "linear") return FusionMode::Linear;
    throw InputError("unknown fusion mode '" + s + "' (expected ds|linear)");
}

std::string to_string(FusionMode m) {
    switch (m) {
        case FusionMode::DempsterShafer: return "ds";
        case FusionMode::Linear: return "linear";
    }
    throw InputError("unknown fusion mode value");
}

namespace {

bool pool_order(const Candidate& a, const Candidate& b) {
    if (a.norm_score != b.norm_score) return a.norm_score > b.norm_score;
    return a.chunk_id < b.chunk_id;
}

void normalize_pool(std::vector<Candidate>& pool, Modality modality, const FusionConfig& cfg) {
    if (pool.empty()) return;
    NormalizationStats stats;
    auto fixed = cfg.fixed_stats.find(modality);
    if (fixed != cfg.fixed_stats.end()) {
        stats = fixed->second;
        stats.modality = modality;
    } else {
        stats = compute_stats(pool, modality);
    }
    for (Candidate& c : pool) {
        if (c.modality != modality)
            throw InputError("candidate " + c.chunk_id + " is not a " + to_string(modality) +
                             " candidate");
        c.norm_score = normalize_score(c.raw_score, stats);
    }
    std::sort(pool.begin(), pool.end(), pool_order);
}

}  // namespace

CandidatePool build_pool(std::vector<Candidate> text, std::vector<Candidate> image,
                         std::vector<Candidate> screenshot, const FusionConfig& cfg) {
    CandidatePool pool;
    pool.text = std::move(text);
    pool.image = std::move(image);
    pool.screenshot = std::move(screenshot);
    normalize_pool(pool.text, Modality::Text, cfg);
    normalize_pool(pool.image, Modality::Image, cfg);
    normalize_pool(pool.screenshot, Modality::Screenshot, cfg);
    return pool;
}

namespace {

struct DocGroup {
    std::vector<const Candidate*> text;
    std::vector<const Candidate*> image;
    std::vector<const Candidate*> screenshot;

    bool full_triple() const { return !text.empty() && !image.empty() && !screenshot.empty(); }
};

// Group candidates per document, preserving the pool (rank) order inside
// each modality list.
std::map<std::string, DocGroup> group_by_doc(const CandidatePool& pool) {
    std::map<std::string, DocGroup> groups;
    for (const Candidate& c : pool.text) groups[c.doc_id].text.push_back(&c);
    for (const Candidate& c : pool.image) groups[c.doc_id].image.push_back(&c);
    for (const Candidate& c : pool.screenshot) groups[c.doc_id].screenshot.push_back(&c);
    return groups;
}

}  // namespace

std::vector<TupleSlots> enumerate_tuples(const CandidatePool& pool, const FusionConfig& cfg) {
    (void)cfg;
    if (pool.all_empty())
        throw EmptyPoolsError("cannot enumerate evidence tuples from empty candidate pools");
    std::vector<TupleSlots> out;
    for (const auto& [doc, group] : group_by_doc(pool)) {
        if (group.full_triple()) {
            for (const Candidate* t : group.text)
                for (const Candidate* v : group.image)
                    for (const Candidate* s : group.screenshot)
                        out.push_back(TupleSlots{t, v, s});
        } else {
            // partial tuple: the document's best candidate per present modality
            TupleSlots slots;
            if (!group.text.empty()) slots.text = group.text.front();
            if (!group.image.empty()) slots.image = group.image.front();
            if (!group.screenshot.empty()) slots.screenshot = group.screenshot.front();
            out.push_back(slots);
        }
    }
    return out;
}

EvidenceTuple score_tuple(const TupleSlots& slots, FusionMode fusion, PriorMode prior_mode,
                          const PriorStores& stores, const FusionConfig& cfg) {
    std::vector<std::pair<Modality, double>> scores;
    if (slots.text) scores.emplace_back(Modality::Text, slots.text->norm_score);
    if (slots.image) scores.emplace_back(Modality::Image, slots.image->norm_score);
    if (slots.screenshot) scores.emplace_back(Modality::Screenshot, slots.screenshot->norm_score);

    EvidenceTuple tuple;
    if (slots.text) tuple.text = *slots.text;
    if (slots.image) tuple.image = *slots.image;
    if (slots.screenshot) tuple.screenshot = *slots.screenshot;

    if (fusion == FusionMode::DempsterShafer) {
        const LikelihoodResult res = likelihood_ds(scores, cfg);
        tuple.likelihood = res.value;
        tuple.conflict_aborted = res.aborted;
    } else {
        tuple.likelihood = likelihood_linear(scores, cfg);
    }
    tuple.prior = prior_of_tuple(slots.text, slots.image, slots.screenshot, prior_mode, stores, cfg);
    tuple.posterior = tuple.likelihood * tuple.prior;
    return tuple;
}

namespace {

const std::string& slot_id(const std::optional<Candidate>& slot) {
    static const std::string absent;
    return slot ? slot->chunk_id : absent;
}

}  // namespace

bool ranks_before(const EvidenceTuple& a, const EvidenceTuple& b) {
    if (a.posterior != b.posterior) return a.posterior > b.posterior;
    if (a.likelihood != b.likelihood) return a.likelihood > b.likelihood;
    if (slot_id(a.text) != slot_id(b.text)) return slot_id(a.text) < slot_id(b.text);
    if (slot_id(a.image) != slot_id(b.image)) return slot_id(a.image) < slot_id(b.image);
    return slot_id(a.screenshot) < slot_id(b.screenshot);
}

std::vector<EvidenceTuple> rank_top_k(const CandidatePool& pool, int k, FusionMode fusion,
                                      PriorMode prior_mode, const PriorStores& stores,
                                      const FusionConfig& cfg, Execution exec) {
    if (k < 1) throw InputError("k must be a positive integer");
    const std::vector<TupleSlots> slots = enumerate_tuples(pool, cfg);
    std::vector<EvidenceTuple> scored(slots.size());
    const std::int64_t n = static_cast<std::int64_t>(slots.size());
#pragma omp parallel for schedule(static) if (exec == Execution::Parallel)
    for (std::int64_t i = 0; i < n; ++i)
        scored[static_cast<std::size_t>(i)] =
            score_tuple(slots[static_cast<std::size_t>(i)], fusion, prior_mode, stores, cfg);

    std::vector<EvidenceTuple> kept;
    kept.reserve(scored.size());
    for (EvidenceTuple& t : scored) {
        if (t.prior < cfg.prior_floor || t.likelihood < cfg.likelihood_floor) continue;
        kept.push_back(std::move(t));
    }
    std::sort(kept.begin(), kept.end(), ranks_before);
    if (kept.size() > static_cast<std::size_t>(k)) kept.resize(static_cast<std::size_t>(k));
    return kept;
}

namespace {

// Best candidate a document has in one pool, by pool order; nullptr if none.
const Candidate* doc_top(const std::vector<Candidate>& pool, const std::string& doc) {
    const Candidate* best = nullptr;
    for (const Candidate& c : pool) {
        if (c.doc_id != doc) continue;
        if (!best || pool_order(c, *best)) best = &c;
    }
    return best;
}

bool doc_has(const std::vector<Candidate>& pool, const std::string& doc) {
    return doc_top(pool, doc) != nullptr;
}

// Whether this (possibly partial) combination is one the enumeration policy
// admits. Written as a standalone predicate over the dense cross product so
// it can disagree with enumerate_tuples if either is wrong.
bool admissible(const CandidatePool& pool, const TupleSlots& slots) {
    std::vector<const Candidate*> present;
    for (const Candidate* c : {slots.text, slots.image, slots.screenshot})
        if (c) present.push_back(c);
    if (present.empty()) return false;
    const std::string doc = present.front()->doc_id;
    for (const Candidate* c : present)
        if (c->doc_id != doc) return false;

    const bool has_t = doc_has(pool.text, doc);
    const bool has_v = doc_has(pool.image, doc);
    const bool has_s = doc_has(pool.screenshot, doc);
    if (has_t && has_v && has_s) return present.size() == 3;  // full triples only

    // document lacks a modality: the single partial tuple covers exactly the
    // modalities the document has, each by its top candidate
    if ((slots.text != nullptr) != has_t) return false;
    if ((slots.image != nullptr) != has_v) return false;
    if ((slots.screenshot != nullptr) != has_s) return false;
    if (slots.text && slots.text != doc_top(pool.text, doc)) return false;
    if (slots.image && slots.image != doc_top(pool.image, doc)) return false;
    if (slots.screenshot && slots.screenshot != doc_top(pool.screenshot, doc)) return false;
    return true;
}

}  // namespace

std::vector<EvidenceTuple> brute_force_rank(const CandidatePool& pool, int k, FusionMode fusion,
                                            PriorMode prior_mode, const PriorStores& stores,
                                            const FusionConfig& cfg) {
    if (k < 1) throw InputError("k must be a positive integer");
    std::vector<EvidenceTuple> scored;
    const std::size_t nt = pool.text.size();
    const std::size_t nv = pool.image.size();
    const std::size_t ns = pool.screenshot.size();
    // index 0 encodes "absent"; i >= 1 selects pool[i-1]
    for (std::size_t ti = 0; ti <= nt; ++ti) {
        for (std::size_t vi = 0; vi <= nv; ++vi) {
            for (std::size_t si = 0; si <= ns; ++si) {
                TupleSlots slots;
                if (ti > 0) slots.text = &pool.text[ti - 1];
                if (vi > 0) slots.image = &pool.image[vi - 1];
                if (si > 0) slots.screenshot = &pool.screenshot[si - 1];
                if (!admissible(pool, slots)) continue;
                scored.push_back(score_tuple(slots, fusion, prior_mode, stores, cfg));
            }
        }
    }
    std::sort(scored.begin(), scored.end(), ranks_before);
    if (scored.size() > static_cast<std::size_t>(k)) scored.resize(static_cast<std::size_t>(k));
    return scored;
}

std::vector<Candidate> rank_baseline_raw(const CandidatePool& pool, int k) {
    if (k < 1) throw InputError("k must be a positive integer");
    if (pool.all_empty())
        throw EmptyPoolsError("cannot rank a baseline over empty candidate pools");
    std::vector<Candidate> merged;
    merged.reserve(pool.text.size() + pool.image.size() + pool.screenshot.size());
    merged.insert(merged.end(), pool.text.begin(), pool.text.end());
    merged.insert(merged.end(), pool.image.begin(), pool.image.end());
    merged.insert(merged.end(), pool.screenshot.begin(), pool.screenshot.end());
    std::sort(merged.begin(), merged.end(), [](const Candidate& a, const Candidate& b) {
        if (a.norm_score != b.norm_score) return a.norm_score > b.norm_score;
        if (a.modality != b.modality)
            return static_cast<int>(a.modality) < static_cast<int>(b.modality);
        return a.chunk_id < b.chunk_id;
    });
    if (merged.size() > static_cast<std::size_t>(k)) merged.resize(static_cast<std::size_t>(k));
    return merged;
}

void apply_reranked_scores(std::vector<Candidate>& text_candidates,
                           const std::map<std::string, double>& chunk_to_score) {
    for (Candidate& c : text_candidates) {
        auto it = chunk_to_score.find(c.chunk_id);
        if (it != chunk_to_score.end()) c.raw_score = it->second;
    }
}

}  // namespace evifuse
