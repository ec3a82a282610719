#pragma once

// Monte Carlo check of the walk-domination inequality
// P[d(X_0,X_k) <= 2R] <= P[sum_{i=1}^{k-1} Y_i <= 2R].

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "hypercol/sampler.hpp"

namespace hypercol::bounds {

struct WalkDomination {
    double p_walk = 0.0;
    double p_sum = 0.0;
    double margin = 0.0;  // (p_sum - p_walk) / se, one-sided z of the inequality
};

inline WalkDomination walk_domination_check(int n, double R, int k, int trials,
                                            std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("walk_domination_check: k must be >= 2");
    if (trials < 1) throw std::invalid_argument("walk_domination_check: trials must be >= 1");
    long walk_hits = 0, sum_hits = 0;
    for (int t = 0; t < trials; ++t) {
        rng::Stream stream(seed, static_cast<std::uint64_t>(t));
        const auto chain = sampler::sample_chain(n, R, k, stream);
        walk_hits += chain.dist_from_origin.back() <= 2.0 * R;
        double y_sum = 0.0;
        for (int i = 1; i < k; ++i) y_sum += chain.y_values[static_cast<std::size_t>(i)];
        sum_hits += y_sum <= 2.0 * R;
    }
    WalkDomination out;
    out.p_walk = static_cast<double>(walk_hits) / trials;
    out.p_sum = static_cast<double>(sum_hits) / trials;
    const double var = out.p_walk * (1.0 - out.p_walk) + out.p_sum * (1.0 - out.p_sum);
    const double se = std::sqrt(std::max(var / trials, 1e-300));
    out.margin = (out.p_sum - out.p_walk) / se;
    return out;
}

}  // namespace hypercol::bounds
