#pragma once

#include <map>
#include <string>
#include <vector>

#include "evifuse/core.hpp"
#include "evifuse/fusion.hpp"
#include "evifuse/priors.hpp"

namespace evifuse {

/// Per-modality candidate pools for one query. Invariant: each pool is
/// normalized and sorted by (norm_score descending, chunk_id ascending)
/// so enumeration order is deterministic.
struct CandidatePool {
    std::vector<Candidate> text;
    std::vector<Candidate> image;
    std::vector<Candidate> screenshot;

    bool all_empty() const { return text.empty() && image.empty() && screenshot.empty(); }
};

/// Normalizes raw scores per modality (min-max over the given pool, or
/// cfg.fixed_stats when provided for a modality) and sorts each pool into
/// the canonical order. Empty modality lists are allowed and stay empty.
CandidatePool build_pool(std::vector<Candidate> text, std::vector<Candidate> image,
                         std::vector<Candidate> screenshot, const FusionConfig& cfg);

/// One enumerated combination of candidates; null means the slot is absent.
/// Pointers refer into the CandidatePool that produced them.
struct TupleSlots {
    const Candidate* text = nullptr;
    const Candidate* image = nullptr;
    const Candidate* screenshot = nullptr;
};

/// A scored evidence tuple: up to one candidate per modality, all from the
/// same document, with likelihood x prior = posterior.
struct EvidenceTuple {
    std::optional<Candidate> text;
    std::optional<Candidate> image;
    std::optional<Candidate> screenshot;
    double likelihood = 0.0;
    double prior = 0.0;
    double posterior = 0.0;
    bool conflict_aborted = false;

    /// doc_id shared by the present slots.
    std::string doc_id() const;
};

enum class FusionMode { DempsterShafer, Linear };

FusionMode fusion_mode_from_string(const std::string& s);
std::string to_string(FusionMode m);

/// Yields every same-document combination: for documents carrying all three
/// modalities, the full per-document cross product; for documents lacking a
/// modality, a single partial tuple built from the top candidate of each
/// modality the document does have. Cost is the sum of per-document products,
/// never the dense cross product. Throws EmptyPoolsError when all pools are
/// empty. Returned pointers refer into `pool`, which must outlive them.
std::vector<TupleSlots> enumerate_tuples(const CandidatePool& pool, const FusionConfig& cfg);

/// Scores one slot combination: fused likelihood over the present slots'
/// normalized scores, consistency prior, and their product as posterior.
EvidenceTuple score_tuple(const TupleSlots& slots, FusionMode fusion, PriorMode prior_mode,
                          const PriorStores& stores, const FusionConfig& cfg);

/// Total order used for ranking: posterior descending, then likelihood
/// descending, then text/image/screenshot chunk ids ascending (absent slots
/// sort as empty ids). Returns true when a ranks strictly before b.
bool ranks_before(const EvidenceTuple& a, const EvidenceTuple& b);

/// Enumerates, scores (in parallel when exec is Parallel), prunes tuples
/// whose prior or likelihood falls below the configured floors, sorts by
/// ranks_before and returns the first k. Serial and parallel execution
/// produce identical output. Throws EmptyPoolsError, InputError (k < 1).
std::vector<EvidenceTuple> rank_top_k(const CandidatePool& pool, int k, FusionMode fusion,
                                      PriorMode prior_mode, const PriorStores& stores,
                                      const FusionConfig& cfg,
                                      Execution exec = Execution::Serial);

/// Verification oracle: dense enumeration over (candidate-or-absent)^3 with
/// the same-document and partial-tuple rules applied as filters, identical
/// scoring, no pruning floors, same sort. Quadratic-ish and serial on
/// purpose; run it at desk scale only. Empty pools yield an empty ranking.
std::vector<EvidenceTuple> brute_force_rank(const CandidatePool& pool, int k, FusionMode fusion,
                                            PriorMode prior_mode, const PriorStores& stores,
                                            const FusionConfig& cfg);

/// The unfused baseline: all candidates of all modalities merged and sorted
/// by norm_score descending (ties: modality order text < image < screenshot,
/// then chunk_id). Throws EmptyPoolsError when all pools are empty.
std::vector<Candidate> rank_baseline_raw(const CandidatePool& pool, int k);

/// Replaces raw_score on matching text candidates with an externally
/// supplied reranker score (applied before normalization).
void apply_reranked_scores(std::vector<Candidate>& text_candidates,
                           const std::map<std::string, double>& chunk_to_score);

}  // namespace evifuse
