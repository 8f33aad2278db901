#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "evifuse/core.hpp"

namespace evifuse {

/// Result of combining two mass functions. When the pairwise conflict K
/// reaches the configured threshold (or the normalizer 1-K underflows),
/// `mass` is empty and the evidence pair is treated as contradictory.
struct CombineOutcome {
    std::optional<MassFunction> mass;
    double conflict = 0.0;

    bool extreme_conflict() const { return !mass.has_value(); }
};

/// Fused relevance estimate for one evidence tuple, with the per-step
/// conflict values in fold order. `aborted` is set when any step hit
/// extreme conflict, in which case `value` is 0.
struct LikelihoodResult {
    double value = 0.0;
    std::vector<double> conflict_trace;
    bool aborted = false;
};

/// Turns one normalized retrieval score into a mass function:
///   m(yes) = alpha * s,  m(no) = beta * (1 - s),  m(frame) = remainder.
/// If the two committed masses exceed 1 (only reachable with alpha+beta > 1)
/// they are rescaled proportionally and the frame gets nothing.
/// Throws ScoreRangeError unless s lies in [0, 1].
MassFunction bpa_from_score(double norm_score, const FusionConfig& cfg);

/// Dempster's rule on the binary frame. Conflict K = m1(Y)m2(N) + m1(N)m2(Y);
/// masses renormalize by 1-K. K >= cfg.conflict_threshold (or 1-K < 1e-12)
/// yields an extreme-conflict outcome instead of a mass.
CombineOutcome combine_dempster(const MassFunction& a, const MassFunction& b,
                                const FusionConfig& cfg);

/// Pignistic transform on the binary frame: the frame mass splits evenly,
/// so the betting probability of relevance is m(Y) + m(frame)/2.
double pignistic(const MassFunction& m);

/// Folds per-modality scores into a single relevance likelihood via
/// Dempster combination, starting from the vacuous mass and folding in
/// text, then image, then screenshot order (stable within a modality).
/// An extreme-conflict step aborts the fold and pins the value to 0.
/// Throws EmptyScoresError when no scores are given.
LikelihoodResult likelihood_ds(const std::vector<std::pair<Modality, double>>& scores,
                               const FusionConfig& cfg);

/// Weighted-average fallback: sum(w_m * s_m) / sum(w_m) over the modalities
/// present. Throws MissingWeightError when a present modality has no weight
/// configured, EmptyScoresError when no scores are given.
double likelihood_linear(const std::vector<std::pair<Modality, double>>& scores,
                         const FusionConfig& cfg);

}  // namespace evifuse
