#pragma once

// Quantitative machinery behind the critical-intensity bounds: the f/g
// step functions, the elliptic-integral moment formula, h(R,eps), the
// Chernoff chain bound, the branching-process criterion and the
// non-uniqueness series certificate.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hypercol/hypgeo.hpp"
#include "hypercol/rng.hpp"

namespace hypercol::bounds {

namespace detail {

inline void check_theta(double theta) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi))
        throw std::invalid_argument("theta outside [0, pi]");
}

// cosh(x) - sinh(x)*cos(theta), written so the theta -> 0 limit e^{-x}
// survives in floating point.
inline double cosh_minus_sinh_cos(double x, double theta) {
    const double s = std::sin(0.5 * theta);
    return std::exp(-x) + 2.0 * std::sinh(x) * s * s;
}

// cosh(x) + sinh(x)*cos(theta), same treatment for theta -> pi.
inline double cosh_plus_sinh_cos(double x, double theta) {
    const double c = std::cos(0.5 * theta);
    return std::exp(-x) + 2.0 * std::sinh(x) * c * c;
}

// AGM(a, b) to full double precision.
inline double agm(double a, double b) {
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
        const double a1 = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = a1;
    }
    return 0.5 * (a + b);
}

}  // namespace detail

inline double g_value(double x, double theta) {
    if (!(x >= 0.0)) throw std::invalid_argument("g_value: x must be nonnegative");
    detail::check_theta(theta);
    return std::log(detail::cosh_minus_sinh_cos(x, theta));
}

// f(x,y,theta) = acosh(cosh x cosh y - sinh x sinh y cos theta) - y,
// evaluated through the log form so large y cannot overflow the acosh
// argument.
inline double f_value(double x, double y, double theta) {
    if (!(x >= 0.0) || !(y >= 0.0)) throw std::invalid_argument("f_value: negative argument");
    detail::check_theta(theta);
    const double amb = detail::cosh_minus_sinh_cos(x, theta);  // a - b
    const double apb = detail::cosh_plus_sinh_cos(x, theta);   // a + b
    const double e2y = std::exp(-2.0 * y);
    const double u = 0.5 * (amb + apb * e2y);
    return std::log(u + std::sqrt(std::max(u * u - e2y, 0.0)));
}

// Complete elliptic integral of the first kind,
// K(k) = int_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t), via the AGM.
inline double elliptic_K(double k) {
    if (!(k >= 0.0 && k < 1.0)) throw std::invalid_argument("elliptic_K: modulus outside [0,1)");
    const double kp = std::sqrt((1.0 - k) * (1.0 + k));
    return 0.5 * std::numbers::pi / detail::agm(1.0, kp);
}

// E[e^{-Y/2} | d] = (2/pi) e^{-d/2} K(sqrt(1 - e^{-2d})). The complementary
// modulus is e^{-d} exactly, so the AGM form stays accurate for large d.
inline double mgf_given_d(double d) {
    if (!(d >= 0.0)) throw std::invalid_argument("mgf_given_d: negative d");
    return std::exp(-0.5 * d) / detail::agm(1.0, std::exp(-d));
}

// E[e^{-s Y} | d] by quadrature over theta; agrees with mgf_given_d at
// s = 1/2 and supports the exploratory exponent in the chain series.
inline double mgf_given_d_s(double d, double s) {
    if (!(d >= 0.0)) throw std::invalid_argument("mgf_given_d_s: negative d");
    return hypgeo::detail::integrate(
               [d, s](double th) {
                   return std::exp(-s * std::log(detail::cosh_minus_sinh_cos(d, th)));
               },
               0.0, std::numbers::pi, 1e-14, 1e-12) /
           std::numbers::pi;
}

// E[e^{-s Y}] with d drawn from the sinh^{n-1} radial law on [0, 2R].
inline double mgf_expectation_s(int n, double R, double s) {
    hypgeo::check_dimension(n);
    if (!(R > 0.0)) throw std::invalid_argument("mgf_expectation: R must be positive");
    const auto weight = [n](double t) { return std::pow(std::sinh(t), n - 1); };
    const auto conditional = (s == 0.5)
        ? std::function<double(double)>([](double t) { return mgf_given_d(t); })
        : std::function<double(double)>([s](double t) { return mgf_given_d_s(t, s); });
    const double num = hypgeo::detail::integrate(
        [&](double t) { return conditional(t) * weight(t); }, 0.0, 2.0 * R, 1e-13, 1e-10);
    const double den = hypgeo::detail::integrate(weight, 0.0, 2.0 * R, 1e-13, 1e-10);
    return num / den;
}

inline double mgf_expectation(int n, double R) { return mgf_expectation_s(n, R, 0.5); }

// A_4(eps): numerically realized as the grid supremum of
// mgf_given_d(d) e^{(1-eps)d/2} over d in [0, 200], inflated by 1%.
inline double a4_constant(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("a4_constant: eps outside (0,1)");
    double sup = 1.0;  // d = 0 term
    const int grid = 4000;
    for (int i = 0; i <= grid; ++i) {
        // log-spaced from 1e-4 to 200
        const double d = 1e-4 * std::pow(2.0e6, static_cast<double>(i) / grid);
        const double v = mgf_given_d(d) * std::exp(0.5 * (1.0 - eps) * d);
        if (v > sup) sup = v;
    }
    return 1.01 * sup;
}

// h(R,eps) = A_4 int_0^{2R} sinh^{n-1} e^{-t(1-eps)/2} dt / int_0^{2R} sinh^{n-1} dt.
inline double h_value(int n, double R, double eps) {
    hypgeo::check_dimension(n);
    if (!(R > 0.0)) throw std::invalid_argument("h_value: R must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("h_value: eps outside (0,1)");
    const double num = hypgeo::detail::integrate(
        [n, eps](double t) { return std::pow(std::sinh(t), n - 1) * std::exp(-0.5 * (1.0 - eps) * t); },
        0.0, 2.0 * R, 1e-13, 1e-10);
    const double den = hypgeo::detail::integrate(
        [n](double t) { return std::pow(std::sinh(t), n - 1); }, 0.0, 2.0 * R, 1e-13, 1e-10);
    return a4_constant(eps) * num / den;
}

// P[sum_{i=1}^k Y_i < 2R] <= e^R E[e^{-Y/2}]^k, clamped to 1.
inline double chernoff_chain_bound(int n, double R, int k) {
    if (k < 1) throw std::invalid_argument("chernoff_chain_bound: k must be >= 1");
    const double v = std::exp(R) * std::pow(mgf_expectation(n, R), k);
    return std::min(v, 1.0);
}

inline double lambda_lower(int n, double R) {
    return 1.0 / hypgeo::ball_volume(n, 2.0 * R);
}

inline double lambda_upper(int n, double R) {
    return std::numbers::ln2 / hypgeo::cell_volume(n, R);
}

inline double sqrt_trick_bound(double p_union, int m) {
    if (!(p_union >= 0.0 && p_union <= 1.0))
        throw std::invalid_argument("sqrt_trick_bound: p outside [0,1]");
    if (m < 1) throw std::invalid_argument("sqrt_trick_bound: m must be >= 1");
    return 1.0 - std::pow(1.0 - p_union, 1.0 / m);
}

// Branching process from the upper-bound proof: the root sees 3 candidate
// cells, every later individual sees 2, each cell is occupied independently
// with p = 1 - e^{-lambda mu(B_R)}. Returns the surviving fraction of
// trials after `generations`. Populations beyond the cap are counted as
// survived; the extinction probability from there is q^cap.
inline double gw_survival(double lambda, int n, double R, int generations, int trials,
                          std::uint64_t seed) {
    if (generations < 1) throw std::invalid_argument("gw_survival: generations must be >= 1");
    if (trials < 1) throw std::invalid_argument("gw_survival: trials must be >= 1");
    if (!(lambda >= 0.0)) throw std::invalid_argument("gw_survival: negative lambda");
    const double p = 1.0 - std::exp(-lambda * hypgeo::cell_volume(n, R));
    const long pop_cap = 10000;
    long alive_trials = 0;
    for (int t = 0; t < trials; ++t) {
        rng::Stream stream(seed, static_cast<std::uint64_t>(t));
        long pop = 0;
        for (int c = 0; c < 3; ++c) pop += stream.uniform01() < p;
        bool escaped = false;
        for (int g = 1; g < generations && pop > 0; ++g) {
            if (pop >= pop_cap) {
                escaped = true;
                break;
            }
            long next = 0;
            for (long i = 0; i < 2 * pop; ++i) next += stream.uniform01() < p;
            pop = next;
        }
        alive_trials += (escaped || pop > 0);
    }
    return static_cast<double>(alive_trials) / trials;
}

// Exact survival probability of the same process: q_child solves
// q = (1 - p + p q)^2, root survival = 1 - (1 - p + p q_child)^3.
inline double gw_survival_exact(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gw_survival_exact: p outside [0,1]");
    double q = (p <= 0.5 || p == 0.0) ? 1.0 : ((1.0 - p) / p) * ((1.0 - p) / p);
    const double dead_cell = 1.0 - p + p * q;
    return 1.0 - dead_cell * dead_cell * dead_cell;
}

struct SeriesBound {
    bool converges = false;
    double q = std::numeric_limits<double>::quiet_NaN();  // lambda mu(S(0,2R)) E[e^{-sY}]
    double value = std::numeric_limits<double>::infinity();
};

// Closed geometric sum of the chain-counting bound
//   sum_{l >= 2k} (lambda mu(S(0,2R)))^l e^{2sR} m(s)^{l-1},
// with the Markov exponent s defaulting to 1/2 (prefactor e^R).
inline SeriesBound chain_tail_series(double lambda, int n, double R, int k, double s = 0.5) {
    if (k < 1) throw std::invalid_argument("chain_tail_series: k must be >= 1");
    if (!(lambda >= 0.0)) throw std::invalid_argument("chain_tail_series: negative lambda");
    if (!(s > 0.0)) throw std::invalid_argument("chain_tail_series: exponent must be positive");
    SeriesBound out;
    if (lambda == 0.0) {
        out.converges = true;
        out.q = 0.0;
        out.value = 0.0;
        return out;
    }
    const double m = mgf_expectation_s(n, R, s);
    const double lmu = lambda * hypgeo::ball_volume(n, 2.0 * R);
    out.q = lmu * m;
    if (out.q >= 1.0) return out;
    out.converges = true;
    out.value = std::exp(2.0 * s * R) * std::pow(lmu, 2 * k) * std::pow(m, 2 * k - 1) / (1.0 - out.q);
    return out;
}

struct Certificate {
    bool found = false;
    double R = std::numeric_limits<double>::quiet_NaN();
    double lambda = std::numeric_limits<double>::quiet_NaN();  // t * lambda_upper(n, R)
    double q = std::numeric_limits<double>::quiet_NaN();
    double margin = std::numeric_limits<double>::quiet_NaN();  // 1 - q
};

// Smallest grid R (step 0.25 on [1, 40]) with
// t * lambda_upper(n,R) * mu(S(0,2R)) * mgf_expectation(n,R) < 1.
inline Certificate nonuniqueness_certificate(int n, double t) {
    if (!(t > 1.0)) throw std::invalid_argument("nonuniqueness_certificate: t must be > 1");
    hypgeo::check_dimension(n);
    Certificate cert;
    for (double R = 1.0; R <= 40.0 + 1e-9; R += 0.25) {
        const double lam = t * lambda_upper(n, R);
        const double q = lam * hypgeo::ball_volume(n, 2.0 * R) * mgf_expectation(n, R);
        if (q < 1.0) {
            cert.found = true;
            cert.R = R;
            cert.lambda = lam;
            cert.q = q;
            cert.margin = 1.0 - q;
            return cert;
        }
    }
    return cert;
}

struct BoundsReport {
    int n = 2;
    double R = 1.0;
    double mu_2R = 0.0;
    double mu_cell = 0.0;
    double lambda_lower = 0.0;
    double lambda_upper = 0.0;
    double mgf = 0.0;
    std::vector<double> eps;
    std::vector<double> h_eps;
    std::vector<double> a4;
};

inline BoundsReport make_bounds_report(int n, double R, const std::vector<double>& eps_list) {
    BoundsReport rep;
    rep.n = n;
    rep.R = R;
    rep.mu_2R = hypgeo::ball_volume(n, 2.0 * R);
    rep.mu_cell = hypgeo::cell_volume(n, R);
    rep.lambda_lower = lambda_lower(n, R);
    rep.lambda_upper = lambda_upper(n, R);
    rep.mgf = mgf_expectation(n, R);
    for (double eps : eps_list) {
        rep.eps.push_back(eps);
        rep.h_eps.push_back(h_value(n, R, eps));
        rep.a4.push_back(a4_constant(eps));
    }
    return rep;
}

}  // namespace hypercol::bounds
