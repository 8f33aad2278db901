#include "evifuse/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace evifuse {

MassFunction bpa_from_score(double norm_score, const FusionConfig& cfg) {
    if (!std::isfinite(norm_score) || norm_score < 0.0 || norm_score > 1.0)
        throw ScoreRangeError("normalized score must lie in [0, 1], got " +
                              std::to_string(norm_score));
    double y = cfg.alpha * norm_score;
    double n = cfg.beta * (1.0 - norm_score);
    const double committed = y + n;
    if (committed > 1.0) {
        // only reachable when alpha + beta > 1; keep the y:n ratio
        y /= committed;
        n /= committed;
        return MassFunction{y, n, 0.0};
    }
    return MassFunction{y, n, std::max(0.0, 1.0 - committed)};
}

CombineOutcome combine_dempster(const MassFunction& a, const MassFunction& b,
                                const FusionConfig& cfg) {
    const double k = a.y * b.n + a.n * b.y;
    if (k >= cfg.conflict_threshold) return CombineOutcome{std::nullopt, k};
    const double d = 1.0 - k;
    if (d < 1e-12) return CombineOutcome{std::nullopt, k};
    MassFunction out;
    out.y = (a.y * b.y + a.y * b.omega + a.omega * b.y) / d;
    out.n = (a.n * b.n + a.n * b.omega + a.omega * b.n) / d;
    out.omega = (a.omega * b.omega) / d;
    return CombineOutcome{out, k};
}

double pignistic(const MassFunction& m) { return m.y + 0.5 * m.omega; }

namespace {

// text < image < screenshot; stable sort keeps input order within a modality
std::vector<std::pair<Modality, double>> fold_order(
    const std::vector<std::pair<Modality, double>>& scores) {
    std::vector<std::pair<Modality, double>> sorted = scores;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& l, const auto& r) {
                         return static_cast<int>(l.first) < static_cast<int>(r.first);
                     });
    return sorted;
}

}  // namespace

LikelihoodResult likelihood_ds(const std::vector<std::pair<Modality, double>>& scores,
                               const FusionConfig& cfg) {
    if (scores.empty())
        throw EmptyScoresError("likelihood requires at least one modality score");
    LikelihoodResult res;
    MassFunction acc = vacuous_mass();
    for (const auto& [mod, s] : fold_order(scores)) {
        (void)mod;
        const CombineOutcome step = combine_dempster(acc, bpa_from_score(s, cfg), cfg);
        res.conflict_trace.push_back(step.conflict);
        if (step.extreme_conflict()) {
            res.aborted = true;
            res.value = 0.0;
            return res;
        }
        acc = *step.mass;
    }
    res.value = pignistic(acc);
    return res;
}

double likelihood_linear(const std::vector<std::pair<Modality, double>>& scores,
                         const FusionConfig& cfg) {
    if (scores.empty())
        throw EmptyScoresError("likelihood requires at least one modality score");
    double num = 0.0;
    double den = 0.0;
    for (const auto& [mod, s] : scores) {
        if (!std::isfinite(s) || s < 0.0 || s > 1.0)
            throw ScoreRangeError("normalized score must lie in [0, 1], got " +
                                  std::to_string(s));
        auto it = cfg.linear_weights.find(mod);
        if (it == cfg.linear_weights.end())
            throw MissingWeightError("no linear weight configured for modality " +
                                     to_string(mod));
        if (it->second < 0.0)
            throw NegativeWeightError("linear weight for " + to_string(mod) +
                                      " must be non-negative");
        num += it->second * s;
        den += it->second;
    }
    if (den <= 0.0)
        throw InputError("linear weights of the present modalities sum to zero");
    return num / den;
}

}  // namespace evifuse
