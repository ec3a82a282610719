#pragma once

// Reproducible random generation: Poisson point processes in hyperbolic
// ball windows and the random-walk chain (d_i, theta_i, Y_i).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hypercol/bounds.hpp"
#include "hypercol/hypgeo.hpp"
#include "hypercol/rng.hpp"

namespace hypercol::sampler {

struct ModelParams {
    int n = 2;
    double R = 1.0;
    double lambda = 0.0;

    void validate() const {
        hypgeo::check_dimension(n);
        if (!(R > 0.0)) throw std::invalid_argument("ModelParams: R must be positive");
        if (!(lambda >= 0.0)) throw std::invalid_argument("ModelParams: lambda must be nonnegative");
    }
};

struct Realization {
    ModelParams params;
    double window_radius = 0.0;
    std::vector<hypgeo::Point> centers;
    std::uint64_t seed = 0;
    std::uint64_t trial_index = 0;
};

struct WalkChain {
    int n = 2;
    double R = 1.0;
    std::vector<std::pair<double, double>> steps;  // (d_i, theta_i)
    std::vector<double> dist_from_origin;          // running d(0, X_i)
    std::vector<double> y_values;                  // Y_i = g(d_i, theta_i)
};

// Poisson sample: inversion below mean 30, Hormann's PTRS rejection above.
inline std::uint64_t poisson_count(double mean, rng::Stream& stream) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw std::invalid_argument("poisson_count: mean must be finite and nonnegative");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double prod = stream.uniform01();
        while (prod > limit) {
            ++k;
            prod *= stream.uniform01();
        }
        return k;
    }
    // PTRS (Hormann 1993, transformed rejection with squeeze).
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        double u = stream.uniform01() - 0.5;
        const double v = stream.uniform01();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = -mean + kf * log_mean - std::lgamma(kf + 1.0);
        if (lhs <= rhs) return static_cast<std::uint64_t>(kf);
    }
}

namespace detail {

// Uniform direction on the unit (n-1)-sphere via a normalized Gaussian.
inline std::vector<double> random_direction(int n, rng::Stream& stream) {
    std::vector<double> dir(static_cast<std::size_t>(n));
    double norm_sq = 0.0;
    do {
        norm_sq = 0.0;
        for (auto& c : dir) {
            c = stream.normal();
            norm_sq += c * c;
        }
    } while (norm_sq == 0.0);
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& c : dir) c *= inv;
    return dir;
}

}  // namespace detail

// One Poisson configuration in the window S(0, rho), deterministic in
// (seed, trial).
inline Realization sample_realization(const ModelParams& params, double rho,
                                      std::uint64_t seed, std::uint64_t trial) {
    params.validate();
    if (!(rho > 0.0)) throw std::invalid_argument("sample_realization: rho must be positive");
    Realization real;
    real.params = params;
    real.window_radius = rho;
    real.seed = seed;
    real.trial_index = trial;
    rng::Stream stream(seed, trial);
    const std::uint64_t count = poisson_count(params.lambda * hypgeo::ball_volume(params.n, rho), stream);
    real.centers.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const double r = hypgeo::radial_quantile(params.n, rho, stream.uniform01());
        const double e = hypgeo::euclidean_from_radius(r);
        auto dir = detail::random_direction(params.n, stream);
        for (auto& c : dir) c *= e;
        hypgeo::Point p;
        p.coords = std::move(dir);
        real.centers.push_back(std::move(p));
    }
    return real;
}

// One draw of Y = g(d, theta) with d from the radial law on [0, 2R] and
// theta uniform on [0, pi].
inline double sample_Y(int n, double R, rng::Stream& stream) {
    if (!(R > 0.0)) throw std::invalid_argument("sample_Y: R must be positive");
    const double d = hypgeo::radial_quantile(n, 2.0 * R, stream.uniform01());
    const double theta = stream.uniform(0.0, std::numbers::pi);
    return bounds::g_value(d, theta);
}

// The idealized uniform-step chain: step lengths from the radial law on
// [0,2R], angles uniform on [0,pi] with theta_0 = pi, running distances by
// the first law of cosines.
inline WalkChain sample_chain(int n, double R, int k, rng::Stream& stream) {
    hypgeo::check_dimension(n);
    if (!(R > 0.0)) throw std::invalid_argument("sample_chain: R must be positive");
    if (k < 1) throw std::invalid_argument("sample_chain: k must be >= 1");
    WalkChain chain;
    chain.n = n;
    chain.R = R;
    chain.steps.reserve(static_cast<std::size_t>(k));
    chain.dist_from_origin.reserve(static_cast<std::size_t>(k));
    chain.y_values.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const double d = hypgeo::radial_quantile(n, 2.0 * R, stream.uniform01());
        const double theta = (i == 0) ? std::numbers::pi : stream.uniform(0.0, std::numbers::pi);
        chain.steps.emplace_back(d, theta);
        const double prev = (i == 0) ? 0.0 : chain.dist_from_origin.back();
        chain.dist_from_origin.push_back(hypgeo::triangle_side(d, prev, theta));
        chain.y_values.push_back(bounds::g_value(d, theta));
    }
    return chain;
}

}  // namespace hypercol::sampler
