#pragma once

// Hyperbolic geometry in the Poincare ball model: distances, ball volumes,
// triangle relations, radial quantiles and the branching-cell volume.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypercol::hypgeo {

namespace detail {

// acosh(1 + t) for t >= 0, accurate near t = 0.
inline double acosh1p(double t) {
    if (t < 0.0) t = 0.0;
    return std::log1p(t + std::sqrt(t * (t + 2.0)));
}

// Adaptive Simpson quadrature. Integrands here are smooth, so the
// classic recursive scheme converges quickly.
template <typename F>
double simpson(F&& f, double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adapt(F&& f, double a, double b, double fa, double fm, double fb,
             double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-12,
                 double rel_tol = 1e-10, int max_depth = 60) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(f, a, b, fa, fm, fb);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
    return adapt(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace detail

inline void check_dimension(int n) {
    if (n < 2) throw std::invalid_argument("dimension must be >= 2, got " + std::to_string(n));
}

// A point of H^n housed in the open unit ball of R^n.
struct Point {
    std::vector<double> coords;

    Point() = default;
    explicit Point(std::vector<double> c) : coords(std::move(c)) { validate(); }

    int dim() const { return static_cast<int>(coords.size()); }

    double norm_sq() const {
        double s = 0.0;
        for (double c : coords) s += c * c;
        return s;
    }

    void validate() const {
        check_dimension(dim());
        if (!(norm_sq() < 1.0))
            throw std::invalid_argument("point lies outside the open unit ball");
    }

    static Point origin(int n) {
        check_dimension(n);
        Point p;
        p.coords.assign(static_cast<std::size_t>(n), 0.0);
        return p;
    }
};

// Surface measure of the Euclidean unit (n-1)-sphere; this is the B(n)
// normalization that makes mu the canonical hyperbolic volume.
inline double sphere_surface(int n) {
    check_dimension(n);
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

inline double distance(const Point& x, const Point& y) {
    x.validate();
    y.validate();
    if (x.dim() != y.dim()) throw std::invalid_argument("dimension mismatch in distance");
    double diff_sq = 0.0;
    for (int i = 0; i < x.dim(); ++i) {
        const double d = x.coords[static_cast<std::size_t>(i)] - y.coords[static_cast<std::size_t>(i)];
        diff_sq += d * d;
    }
    const double denom = (1.0 - x.norm_sq()) * (1.0 - y.norm_sq());
    return detail::acosh1p(2.0 * diff_sq / denom);
}

// Hyperbolic distance from the origin of a point at Euclidean radius e.
inline double radius_from_euclidean(double e) { return 2.0 * std::atanh(e); }
inline double euclidean_from_radius(double r) { return std::tanh(0.5 * r); }

// mu(S(0,r)) = B(n) * int_0^r sinh(t)^{n-1} dt. Closed forms for n = 2, 3.
inline double ball_volume(int n, double r) {
    check_dimension(n);
    if (!(r >= 0.0)) throw std::invalid_argument("ball_volume: negative radius");
    if (n == 2) return 2.0 * std::numbers::pi * (std::cosh(r) - 1.0);
    if (n == 3) return std::numbers::pi * (std::sinh(2.0 * r) - 2.0 * r);
    return sphere_surface(n) *
           detail::integrate([n](double t) { return std::pow(std::sinh(t), n - 1); }, 0.0, r);
}

inline double annulus_ratio(int n, double r, double eps) {
    check_dimension(n);
    if (!(r > 0.0) || !(eps > 0.0))
        throw std::invalid_argument("annulus_ratio: r and eps must be positive");
    const double outer = ball_volume(n, r);
    if (eps >= r) return 1.0;
    const double inner = ball_volume(n, r - eps);
    double num = outer - inner;
    if (num > outer) num = outer;
    return num / outer;
}

// First law of cosines: side opposite gamma in a triangle with sides a, b.
// Evaluated as cosh(a-b) + 2 sinh a sinh b sin^2(gamma/2), which is exact in
// the degenerate cases and free of the cosh*cosh cancellation.
inline double triangle_side(double a, double b, double gamma) {
    if (!(a >= 0.0) || !(b >= 0.0)) throw std::invalid_argument("triangle_side: negative side");
    if (!(gamma >= 0.0 && gamma <= std::numbers::pi))
        throw std::invalid_argument("triangle_side: gamma outside [0, pi]");
    const double s = std::sin(0.5 * gamma);
    const double t = (std::cosh(a - b) - 1.0) + 2.0 * std::sinh(a) * std::sinh(b) * s * s;
    return detail::acosh1p(std::max(t, 0.0));
}

// u-quantile of the radial law with density proportional to sinh^{n-1}
// on [0, rho].
inline double radial_quantile(int n, double rho, double u) {
    check_dimension(n);
    if (!(rho > 0.0)) throw std::invalid_argument("radial_quantile: rho must be positive");
    if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("radial_quantile: u outside [0,1]");
    if (u == 0.0) return 0.0;
    if (u == 1.0) return rho;
    if (n == 2) return detail::acosh1p(u * (std::cosh(rho) - 1.0));
    // Monotone bisection on the normalized CDF.
    const auto cdf_num = [n](double r) -> double {
        if (n == 3) return 0.25 * (std::sinh(2.0 * r) - 2.0 * r);
        return detail::integrate([n](double t) { return std::pow(std::sinh(t), n - 1); }, 0.0, r);
    };
    const double target = u * cdf_num(rho);
    double lo = 0.0, hi = rho;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (cdf_num(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Fraction of the unit (n-1)-sphere subtended by a cap of half-angle pi/6.
inline double cap_fraction(int n) {
    check_dimension(n);
    if (n == 2) return 1.0 / 6.0;
    if (n == 3) return 0.5 * (1.0 - std::cos(std::numbers::pi / 6.0));
    const auto f = [n](double th) { return std::pow(std::sin(th), n - 2); };
    return detail::integrate(f, 0.0, std::numbers::pi / 6.0) /
           detail::integrate(f, 0.0, std::numbers::pi);
}

// Volume of the branching cell: the solid-angle pi/6 sector of the annulus
// S(0,2R) \ S(0,2R-1).
inline double cell_volume(int n, double R) {
    check_dimension(n);
    if (!(2.0 * R - 1.0 > 0.0)) throw std::invalid_argument("cell_volume: requires R > 1/2");
    return cap_fraction(n) * (ball_volume(n, 2.0 * R) - ball_volume(n, 2.0 * R - 1.0));
}

// Boundary length of S(0,r) in H^2.
inline double circle_length(double r) {
    if (!(r >= 0.0)) throw std::invalid_argument("circle_length: negative radius");
    return 2.0 * std::numbers::pi * std::sinh(r);
}

}  // namespace hypercol::hypgeo
