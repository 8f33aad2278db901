#include "evifuse/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evifuse {

std::string to_string(Modality m) {
    switch (m) {
        case Modality::Text: return "text";
        case Modality::Image: return "image";
        case Modality::Screenshot: return "screenshot";
    }
    throw InputError("unknown modality value");
}

Modality modality_from_string(const std::string& s) {
    if (s == "text") return Modality::Text;
    if (s == "image") return Modality::Image;
    if (s == "screenshot") return Modality::Screenshot;
    throw InputError("unknown modality '" + s + "' (expected text|image|screenshot)");
}

MassFunction make_mass(double y, double n, double omega) {
    if (!(std::isfinite(y) && std::isfinite(n) && std::isfinite(omega)))
        throw InputError("mass components must be finite");
    if (y < 0.0 || n < 0.0 || omega < 0.0)
        throw InputError("mass components must be non-negative");
    const double sum = y + n + omega;
    if (std::abs(sum - 1.0) > 1e-9)
        throw InputError("mass components must sum to 1 (got " + std::to_string(sum) + ")");
    return MassFunction{y, n, omega};
}

MassFunction vacuous_mass() { return MassFunction{0.0, 0.0, 1.0}; }

void FusionConfig::validate() const {
    auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (!in_unit(alpha)) throw InputError("alpha must lie in [0, 1]");
    if (!in_unit(beta)) throw InputError("beta must lie in [0, 1]");
    if (!std::isfinite(conflict_threshold) || conflict_threshold <= 0.0 || conflict_threshold > 1.0)
        throw InputError("conflict_threshold must lie in (0, 1]");
    if (!std::isfinite(kappa) || kappa <= 0.0) throw InputError("kappa must be positive");
    if (!std::isfinite(tau) || tau <= 0.0) throw InputError("tau must be positive");
    if (tau_page < 1) throw InputError("tau_page must be a positive integer");
    if (!std::isfinite(epsilon) || epsilon <= 0.0 || epsilon >= 1.0)
        throw InputError("epsilon must lie in (0, 1)");
    double weight_sum = 0.0;
    for (const auto& [mod, w] : linear_weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw NegativeWeightError("linear weight for " + to_string(mod) + " must be non-negative");
        weight_sum += w;
    }
    if (!linear_weights.empty() && std::abs(weight_sum - 1.0) > 1e-9)
        throw InputError("linear weights must sum to 1 (got " + std::to_string(weight_sum) + ")");
    if (!in_unit(prior_floor)) throw InputError("prior_floor must lie in [0, 1]");
    if (!in_unit(likelihood_floor)) throw InputError("likelihood_floor must lie in [0, 1]");
    if (!std::isfinite(default_prior) || default_prior <= 0.0 || default_prior > 1.0)
        throw InputError("default_prior must lie in (0, 1]");
    for (const auto& [mod, st] : fixed_stats) {
        if (!std::isfinite(st.s_min) || !std::isfinite(st.s_max) || st.s_max < st.s_min)
            throw InputError("fixed stats for " + to_string(mod) + " must satisfy s_min <= s_max");
    }
}

NormalizationStats compute_stats(const std::vector<Candidate>& pool, Modality modality) {
    NormalizationStats st;
    st.modality = modality;
    st.s_min = std::numeric_limits<double>::infinity();
    st.s_max = -std::numeric_limits<double>::infinity();
    bool seen = false;
    for (const Candidate& c : pool) {
        if (c.modality != modality) continue;
        if (!std::isfinite(c.raw_score)) throw InputError("raw scores must be finite");
        st.s_min = std::min(st.s_min, c.raw_score);
        st.s_max = std::max(st.s_max, c.raw_score);
        seen = true;
    }
    if (!seen)
        throw EmptyPoolError("no " + to_string(modality) +
                             " candidates to compute normalization stats from");
    return st;
}

double normalize_score(double raw, const NormalizationStats& stats) {
    if (stats.s_max == stats.s_min) return 0.5;
    const double v = (raw - stats.s_min) / (stats.s_max - stats.s_min);
    return std::clamp(v, 0.0, 1.0);
}

}  // namespace evifuse
