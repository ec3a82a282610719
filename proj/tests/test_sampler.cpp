#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hypercol/bounds.hpp"
#include "hypercol/hypgeo.hpp"
#include "hypercol/rng.hpp"
#include "hypercol/sampler.hpp"

using namespace hypercol;

TEST_CASE("poisson_count mean and variance") {
    rng::Stream s(42, 0);
    for (double mean : {0.5, 5.0, 25.0, 80.0, 400.0}) {
        const int trials = 20000;
        double sum = 0.0, sum_sq = 0.0;
        for (int t = 0; t < trials; ++t) {
            const double k = static_cast<double>(sampler::poisson_count(mean, s));
            sum += k;
            sum_sq += k * k;
        }
        const double m = sum / trials;
        const double var = sum_sq / trials - m * m;
        const double se_mean = std::sqrt(mean / trials);
        CHECK(std::abs(m - mean) < 5.0 * se_mean);
        // Var of the variance estimator for Poisson ~ (mean + 2 mean^2)/trials
        const double se_var = std::sqrt((mean + 2.0 * mean * mean) / trials);
        CHECK(std::abs(var - mean) < 6.0 * se_var);
    }
    CHECK(sampler::poisson_count(0.0, s) == 0);
}

TEST_CASE("sample_realization is deterministic") {
    sampler::ModelParams params{2, 1.0, 0.5};
    const auto a = sampler::sample_realization(params, 5.0, 99, 3);
    const auto b = sampler::sample_realization(params, 5.0, 99, 3);
    REQUIRE(a.centers.size() == b.centers.size());
    for (std::size_t i = 0; i < a.centers.size(); ++i)
        for (int c = 0; c < 2; ++c)
            CHECK(a.centers[i].coords[static_cast<std::size_t>(c)] ==
                  b.centers[i].coords[static_cast<std::size_t>(c)]);
    const auto other = sampler::sample_realization(params, 5.0, 99, 4);
    const bool differs = other.centers.size() != a.centers.size() ||
                         other.centers[0].coords != a.centers[0].coords;
    CHECK(differs);
}

TEST_CASE("trial streams look independent") {
    const int trials = 2000;
    double sx = 0.0, sy = 0.0, sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int t = 0; t < trials; ++t) {
        rng::Stream a(7, static_cast<std::uint64_t>(t));
        rng::Stream b(7, static_cast<std::uint64_t>(t) + 1);
        const double x = a.uniform01();
        const double y = b.uniform01();
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    const double mx = sx / trials, my = sy / trials;
    const double corr = (sxy / trials - mx * my) /
                        std::sqrt((sxx / trials - mx * mx) * (syy / trials - my * my));
    CHECK(std::abs(corr) < 0.05);
}

TEST_CASE("point count matches the window volume") {
    sampler::ModelParams params{2, 1.0, 0.3};
    const double rho = 6.0;
    const double mean = params.lambda * hypgeo::ball_volume(2, rho);
    const int trials = 400;
    double total = 0.0;
    for (int t = 0; t < trials; ++t)
        total += static_cast<double>(
            sampler::sample_realization(params, rho, 11, static_cast<std::uint64_t>(t)).centers.size());
    const double m = total / trials;
    CHECK(std::abs(m - mean) < 4.0 * std::sqrt(mean / trials));
}

TEST_CASE("counts in nested windows scale with volume") {
    sampler::ModelParams params{2, 1.0, 0.4};
    const double rho = 6.0, rho_in = 3.0;
    const int trials = 500;
    double inner_total = 0.0;
    for (int t = 0; t < trials; ++t) {
        const auto real =
            sampler::sample_realization(params, rho, 21, static_cast<std::uint64_t>(t));
        const double e_in = hypgeo::euclidean_from_radius(rho_in);
        for (const auto& c : real.centers)
            if (c.norm_sq() < e_in * e_in) inner_total += 1.0;
    }
    const double mean_in = params.lambda * hypgeo::ball_volume(2, rho_in);
    const double m = inner_total / trials;
    CHECK(std::abs(m - mean_in) < 4.0 * std::sqrt(mean_in / trials));
}

TEST_CASE("radial law passes a KS check") {
    sampler::ModelParams params{3, 1.0, 0.0};
    const double rho = 4.0;
    std::vector<double> radii;
    rng::Stream s(5, 0);
    for (int i = 0; i < 20000; ++i) {
        const double u = s.uniform01();
        radii.push_back(hypgeo::radial_quantile(3, rho, u));
    }
    // also collect radii the sampler actually produces
    std::vector<double> sampled;
    sampler::ModelParams p2{3, 1.0, 0.05};
    for (int t = 0; t < 200 && sampled.size() < 20000; ++t) {
        const auto real = sampler::sample_realization(p2, rho, 777, static_cast<std::uint64_t>(t));
        for (const auto& c : real.centers)
            sampled.push_back(hypgeo::radius_from_euclidean(std::sqrt(c.norm_sq())));
    }
    std::sort(sampled.begin(), sampled.end());
    const double total = hypgeo::ball_volume(3, rho);
    double ks = 0.0;
    const auto nsamp = static_cast<double>(sampled.size());
    for (std::size_t i = 0; i < sampled.size(); ++i) {
        const double cdf = hypgeo::ball_volume(3, sampled[i]) / total;
        const double emp_hi = (static_cast<double>(i) + 1.0) / nsamp;
        const double emp_lo = static_cast<double>(i) / nsamp;
        ks = std::max({ks, std::abs(cdf - emp_hi), std::abs(cdf - emp_lo)});
    }
    REQUIRE(sampled.size() > 5000);
    // KS 0.001 significance threshold ~ 1.95 / sqrt(n)
    CHECK(ks < 1.95 / std::sqrt(nsamp));
}

TEST_CASE("Y respects its pointwise lower bound") {
    rng::Stream s(13, 0);
    for (int i = 0; i < 5000; ++i) {
        const double d = hypgeo::radial_quantile(2, 2.0, s.uniform01());
        const double theta = s.uniform(0.0, std::numbers::pi);
        const double y = bounds::g_value(d, theta);
        CHECK(y >= -d - 1e-12);
        CHECK(y <= d + 1e-12);
        const double ys = sampler::sample_Y(2, 1.0, s);
        CHECK(ys >= -2.0 - 1e-12);
        CHECK(ys <= 2.0 + 1e-12);
    }
}

TEST_CASE("mean of exp(-Y/2) matches the quadrature value in 2-D") {
    const int trials = 400000;
    rng::Stream s(31, 0);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < trials; ++i) {
        const double y = sampler::sample_Y(2, 1.0, s);
        const double v = std::exp(-0.5 * y);
        sum += v;
        sum_sq += v * v;
    }
    const double m = sum / trials;
    const double se = std::sqrt((sum_sq / trials - m * m) / trials);
    const double exact = bounds::mgf_expectation(2, 1.0);
    CHECK(std::abs(m - exact) < 4.0 * se + 1e-6);
}

TEST_CASE("chains have the right shape") {
    rng::Stream s(17, 0);
    const auto chain = sampler::sample_chain(2, 1.0, 6, s);
    REQUIRE(chain.steps.size() == 6);
    REQUIRE(chain.y_values.size() == 6);
    REQUIRE(chain.dist_from_origin.size() == 6);
    CHECK(chain.steps[0].second == doctest::Approx(std::numbers::pi));
    CHECK(chain.dist_from_origin[0] == doctest::Approx(chain.steps[0].first));
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(chain.steps[i].first >= 0.0);
        CHECK(chain.steps[i].first <= 2.0);
        CHECK(chain.dist_from_origin[i] >= 0.0);
    }
    // geodesic triangle inequality along the chain
    for (std::size_t i = 1; i < 6; ++i)
        CHECK(chain.dist_from_origin[i] <=
              chain.dist_from_origin[i - 1] + chain.steps[i].first + 1e-9);
}

TEST_CASE("parameter validation") {
    sampler::ModelParams bad{1, 1.0, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    sampler::ModelParams bad2{2, -1.0, 0.5};
    CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
    sampler::ModelParams bad3{2, 1.0, -0.5};
    CHECK_THROWS_AS(bad3.validate(), std::invalid_argument);
    sampler::ModelParams ok{2, 1.0, 0.5};
    CHECK_THROWS_AS(sampler::sample_realization(ok, -1.0, 0, 0), std::invalid_argument);
}
