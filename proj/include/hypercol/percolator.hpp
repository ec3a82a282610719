#pragma once

// Cluster structure of the covered region and the finite-volume
// percolation proxies: annulus crossings, vacant crossings, two-point
// connectivity and FKG checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hypercol/hypgeo.hpp"
#include "hypercol/rng.hpp"
#include "hypercol/sampler.hpp"

namespace hypercol::percolator {

inline constexpr double kBoundaryTol = 1e-12;  // closed balls, tie-break at d = 2R

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
};

// Union-find partition of a realization's centers into ball-clusters.
struct ClusterLabels {
    std::vector<int> parent;
    std::vector<int> rank;
    int cluster_count = 0;

    explicit ClusterLabels(int size = 0)
        : parent(static_cast<std::size_t>(size)), rank(static_cast<std::size_t>(size), 0),
          cluster_count(size) {
        for (int i = 0; i < size; ++i) parent[static_cast<std::size_t>(i)] = i;
    }

    int find(int i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            parent[static_cast<std::size_t>(i)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
            i = parent[static_cast<std::size_t>(i)];
        }
        return i;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        if (rank[static_cast<std::size_t>(a)] == rank[static_cast<std::size_t>(b)])
            ++rank[static_cast<std::size_t>(a)];
        --cluster_count;
    }

    int label(int i) { return find(i); }
};

struct CrossingStats {
    int trials = 0;
    std::vector<std::uint8_t> crossing_indicator;
    std::vector<int> crossing_cluster_count;
    std::vector<std::uint8_t> vacant_crossing_indicator;  // n = 2 only, optional
};

namespace detail {

// Chord-form adjacency: d(x, y) <= thr + tol, evaluated without acosh.
// chord_cap = cosh(thr + tol) - 1.
inline double chord_value(const hypgeo::Point& x, const hypgeo::Point& y) {
    double diff_sq = 0.0;
    for (std::size_t i = 0; i < x.coords.size(); ++i) {
        const double d = x.coords[i] - y.coords[i];
        diff_sq += d * d;
    }
    return 2.0 * diff_sq / ((1.0 - x.norm_sq()) * (1.0 - y.norm_sq()));
}

inline bool within(const hypgeo::Point& x, const hypgeo::Point& y, double chord_cap) {
    return chord_value(x, y) <= chord_cap;
}

struct PolarPoint {
    double r = 0.0, phi = 0.0;
    double cosh_r = 1.0, sinh_r = 0.0;
};

inline PolarPoint to_polar(const hypgeo::Point& p) {
    PolarPoint out;
    out.phi = std::atan2(p.coords[1], p.coords[0]);
    out.r = hypgeo::radius_from_euclidean(std::sqrt(p.norm_sq()));
    out.cosh_r = std::cosh(out.r);
    out.sinh_r = std::sinh(out.r);
    return out;
}

// Annular-shell + angular-sweep candidate index over H^2 points. Shells
// have hyperbolic width equal to the link threshold, so linked pairs sit
// in the same or adjacent shells; the angular window per shell pair is the
// widest angle two points at the shells' inner radii can subtend.
class AngularIndex {
public:
    AngularIndex(const std::vector<PolarPoint>& pts, double thr) : thr_(thr) {
        int max_shell = 0;
        shell_of_.resize(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const int s = static_cast<int>(pts[i].r / thr);
            shell_of_[i] = s;
            max_shell = std::max(max_shell, s);
        }
        shells_.resize(static_cast<std::size_t>(max_shell) + 1);
        for (std::size_t i = 0; i < pts.size(); ++i)
            shells_[static_cast<std::size_t>(shell_of_[i])].push_back(static_cast<int>(i));
        for (auto& shell : shells_)
            std::sort(shell.begin(), shell.end(),
                      [&pts](int a, int b) { return pts[static_cast<std::size_t>(a)].phi <
                                                    pts[static_cast<std::size_t>(b)].phi; });
        pts_ = &pts;
    }

    int shell_count() const { return static_cast<int>(shells_.size()); }

    // Widest |dphi| two points at radius >= r_lo can have while staying
    // within distance thr of each other; pi means no pruning.
    double window(double r_lo) const {
        const double sh = std::sinh(r_lo);
        if (sh <= 0.0) return std::numbers::pi;
        const double one_minus_cos = (std::cosh(thr_) - 1.0) / (sh * sh);
        if (one_minus_cos >= 2.0) return std::numbers::pi;
        return std::acos(1.0 - one_minus_cos);
    }

    // Calls fn(j) for every j in `shell` whose angle lies within +-w of phi.
    template <typename F>
    void scan_shell(int shell, double phi, double w, F&& fn) const {
        const auto& idx = shells_[static_cast<std::size_t>(shell)];
        if (idx.empty()) return;
        if (w >= std::numbers::pi - 1e-12) {
            for (int j : idx) fn(j);
            return;
        }
        const auto cmp = [this](int a, double v) { return (*pts_)[static_cast<std::size_t>(a)].phi < v; };
        const auto emit_range = [&](double lo, double hi) {
            auto it = std::lower_bound(idx.begin(), idx.end(), lo, cmp);
            for (; it != idx.end() && (*pts_)[static_cast<std::size_t>(*it)].phi <= hi; ++it) fn(*it);
        };
        double lo = phi - w, hi = phi + w;
        const double two_pi = 2.0 * std::numbers::pi;
        // angles live in [-pi, pi]; split wrapped windows
        if (lo < -std::numbers::pi) {
            emit_range(lo + two_pi, std::numbers::pi);
            lo = -std::numbers::pi;
        }
        if (hi > std::numbers::pi) {
            emit_range(-std::numbers::pi, hi - two_pi);
            hi = std::numbers::pi;
        }
        emit_range(lo, hi);
    }

    // Candidate pairs (i, j), i < j, covering all pairs within thr.
    template <typename F>
    void for_candidate_pairs(F&& fn) const {
        const auto& pts = *pts_;
        for (int s = 0; s < shell_count(); ++s) {
            const double w_same = window(static_cast<double>(s) * thr_);
            for (int i : shells_[static_cast<std::size_t>(s)]) {
                const double phi = pts[static_cast<std::size_t>(i)].phi;
                scan_shell(s, phi, w_same, [&](int j) {
                    if (j > i) fn(i, j);
                });
                if (s + 1 < shell_count())
                    scan_shell(s + 1, phi, w_same, [&](int j) { fn(i, j); });
            }
        }
    }

private:
    const std::vector<PolarPoint>* pts_ = nullptr;
    double thr_;
    std::vector<int> shell_of_;
    std::vector<std::vector<int>> shells_;
};

}  // namespace detail

// Union-find over the adjacency graph {d(x_i, x_j) <= 2R}. All-pairs below
// 2,000 centers; annular-shell angular sweep above (n = 2), radius-pruned
// all-pairs otherwise. The final pair predicate is identical on every path.
inline ClusterLabels build_clusters(const sampler::Realization& real) {
    const auto& centers = real.centers;
    const int count = static_cast<int>(centers.size());
    const double thr = 2.0 * real.params.R;
    const double chord_cap = std::cosh(thr + kBoundaryTol) - 1.0;
    ClusterLabels labels(count);
    if (count < 2000 || real.params.n != 2) {
        std::vector<double> radii;
        if (count >= 2000) {
            radii.reserve(centers.size());
            for (const auto& c : centers)
                radii.push_back(hypgeo::radius_from_euclidean(std::sqrt(c.norm_sq())));
        }
        for (int i = 0; i < count; ++i)
            for (int j = i + 1; j < count; ++j) {
                if (!radii.empty() &&
                    std::abs(radii[static_cast<std::size_t>(i)] - radii[static_cast<std::size_t>(j)]) >
                        thr + kBoundaryTol)
                    continue;
                if (detail::within(centers[static_cast<std::size_t>(i)],
                                   centers[static_cast<std::size_t>(j)], chord_cap))
                    labels.unite(i, j);
            }
        return labels;
    }
    std::vector<detail::PolarPoint> polar;
    polar.reserve(centers.size());
    for (const auto& c : centers) polar.push_back(detail::to_polar(c));
    detail::AngularIndex index(polar, thr);
    index.for_candidate_pairs([&](int i, int j) {
        if (detail::within(centers[static_cast<std::size_t>(i)],
                           centers[static_cast<std::size_t>(j)], chord_cap))
            labels.unite(i, j);
    });
    return labels;
}

inline bool is_covered(const hypgeo::Point& p, const sampler::Realization& real) {
    p.validate();
    const double chord_cap = std::cosh(real.params.R + kBoundaryTol) - 1.0;
    for (const auto& c : real.centers)
        if (detail::within(p, c, chord_cap)) return true;
    return false;
}

// Monte Carlo frequency of {some cluster covers both u and v}. The
// windowed estimate is a one-sided lower bound on the infinite-volume
// probability.
inline Estimate connection_prob(const hypgeo::Point& u, const hypgeo::Point& v,
                                const sampler::ModelParams& params, double rho, int trials,
                                std::uint64_t seed) {
    params.validate();
    if (trials <= 0) throw std::invalid_argument("connection_prob: trials must be positive");
    const hypgeo::Point origin = hypgeo::Point::origin(params.n);
    const double margin = rho - 2.0 * params.R;
    if (hypgeo::distance(origin, u) > margin || hypgeo::distance(origin, v) > margin)
        throw std::invalid_argument("connection_prob: points must lie inside S(0, rho - 2R)");
    const double chord_cap = std::cosh(params.R + kBoundaryTol) - 1.0;
    long hits = 0;
    std::vector<int> roots_u;
    for (int t = 0; t < trials; ++t) {
        const auto real = sampler::sample_realization(params, rho, seed, static_cast<std::uint64_t>(t));
        auto labels = build_clusters(real);
        roots_u.clear();
        for (int i = 0; i < static_cast<int>(real.centers.size()); ++i)
            if (detail::within(u, real.centers[static_cast<std::size_t>(i)], chord_cap))
                roots_u.push_back(labels.find(i));
        if (roots_u.empty()) continue;
        std::sort(roots_u.begin(), roots_u.end());
        roots_u.erase(std::unique(roots_u.begin(), roots_u.end()), roots_u.end());
        for (int i = 0; i < static_cast<int>(real.centers.size()); ++i) {
            if (!detail::within(v, real.centers[static_cast<std::size_t>(i)], chord_cap)) continue;
            if (std::binary_search(roots_u.begin(), roots_u.end(), labels.find(i))) {
                ++hits;
                break;
            }
        }
    }
    Estimate est;
    est.mean = static_cast<double>(hits) / trials;
    est.se = std::sqrt(std::max(est.mean * (1.0 - est.mean) / trials, 0.0));
    return est;
}

// Number of distinct clusters linking S(0, rho1) to the outer boundary:
// a cluster crosses if it owns a center with r <= rho1 and one with
// r >= rho2 - 2R.
inline int crossing_cluster_count(const sampler::Realization& real, double rho1, double rho2) {
    auto labels = build_clusters(real);
    const int count = static_cast<int>(real.centers.size());
    std::vector<double> radii(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        radii[static_cast<std::size_t>(i)] = hypgeo::radius_from_euclidean(
            std::sqrt(real.centers[static_cast<std::size_t>(i)].norm_sq()));
    const double outer = rho2 - 2.0 * real.params.R;
    std::vector<int> inner_roots, outer_roots;
    for (int i = 0; i < count; ++i) {
        if (radii[static_cast<std::size_t>(i)] <= rho1) inner_roots.push_back(labels.find(i));
        if (radii[static_cast<std::size_t>(i)] >= outer) outer_roots.push_back(labels.find(i));
    }
    const auto dedupe = [](std::vector<int>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedupe(inner_roots);
    dedupe(outer_roots);
    int crossings = 0;
    for (int r : inner_roots)
        if (std::binary_search(outer_roots.begin(), outer_roots.end(), r)) ++crossings;
    return crossings;
}

// Per-trial crossing statistics over the annulus rho1 -> rho2; the window
// radius rho2 + 2R pads the crossing event against truncation.
inline CrossingStats annulus_crossing(const sampler::ModelParams& params, double rho1, double rho2,
                                      int trials, std::uint64_t seed) {
    params.validate();
    if (!(2.0 * params.R <= rho1 && rho1 < rho2))
        throw std::invalid_argument("annulus_crossing: need 2R <= rho1 < rho2");
    if (trials <= 0) throw std::invalid_argument("annulus_crossing: trials must be positive");
    CrossingStats stats;
    stats.trials = trials;
    stats.crossing_indicator.resize(static_cast<std::size_t>(trials));
    stats.crossing_cluster_count.resize(static_cast<std::size_t>(trials));
    const double window = rho2 + 2.0 * params.R;
    for (int t = 0; t < trials; ++t) {
        const auto real = sampler::sample_realization(params, window, seed, static_cast<std::uint64_t>(t));
        const int crossings = crossing_cluster_count(real, rho1, rho2);
        stats.crossing_cluster_count[static_cast<std::size_t>(t)] = crossings;
        stats.crossing_indicator[static_cast<std::size_t>(t)] = crossings > 0;
    }
    return stats;
}

namespace detail {

// Polar lattice over S(0, rho2) with cell diameter <= grid_step: rings of
// width grid_step / sqrt(2) and matching angular subdivision per ring.
struct VacancyLattice {
    double dr = 0.0;
    int rings = 0;
    std::vector<int> cells_per_ring;
    std::vector<std::int64_t> ring_offset;
    std::int64_t total_cells = 0;

    VacancyLattice(double rho2, double grid_step) {
        dr = grid_step / std::numbers::sqrt2;
        rings = static_cast<int>(std::ceil(rho2 / dr));
        dr = rho2 / rings;  // snap so the last ring ends exactly at rho2
        cells_per_ring.resize(static_cast<std::size_t>(rings));
        ring_offset.resize(static_cast<std::size_t>(rings) + 1, 0);
        for (int i = 0; i < rings; ++i) {
            const double arc = 2.0 * std::numbers::pi * std::sinh((i + 1) * dr);
            cells_per_ring[static_cast<std::size_t>(i)] =
                std::max(4, static_cast<int>(std::ceil(arc / dr)));
            ring_offset[static_cast<std::size_t>(i) + 1] =
                ring_offset[static_cast<std::size_t>(i)] + cells_per_ring[static_cast<std::size_t>(i)];
        }
        total_cells = ring_offset[static_cast<std::size_t>(rings)];
    }

    double ring_mid(int i) const { return (i + 0.5) * dr; }
    std::int64_t cell_id(int ring, int j) const {
        return ring_offset[static_cast<std::size_t>(ring)] + j;
    }
};

}  // namespace detail

// Frequency of a vacant lattice path from S(0, rho1) to the boundary ring
// of S(0, rho2). A cell counts as vacant only if its center is uncovered
// with margin grid_step, so the estimate is conservative and converges as
// grid_step -> 0. n = 2 only.
inline Estimate vacant_crossing(const sampler::ModelParams& params, double rho1, double rho2,
                                double grid_step, int trials, std::uint64_t seed) {
    params.validate();
    if (params.n != 2) throw std::invalid_argument("vacant_crossing: implemented for n = 2 only");
    if (!(grid_step > 0.0) || grid_step > params.R / 4.0 + 1e-12)
        throw std::invalid_argument("vacant_crossing: grid too coarse, need grid_step <= R/4");
    if (!(2.0 * params.R <= rho1 && rho1 < rho2))
        throw std::invalid_argument("vacant_crossing: need 2R <= rho1 < rho2");
    if (trials <= 0) throw std::invalid_argument("vacant_crossing: trials must be positive");

    const detail::VacancyLattice lat(rho2, grid_step);
    const double mark_radius = params.R + grid_step;
    const double cosh_mark = std::cosh(mark_radius);
    const double window = rho2 + 2.0 * params.R;
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<int> covered_stamp(static_cast<std::size_t>(lat.total_cells), -1);
    std::vector<int> visit_stamp(static_cast<std::size_t>(lat.total_cells), -1);
    std::vector<std::int64_t> queue;
    long hits = 0;

    for (int t = 0; t < trials; ++t) {
        const auto real = sampler::sample_realization(params, window, seed, static_cast<std::uint64_t>(t));
        // rasterize coverage: for each center, mark every cell whose center
        // lies within R + grid_step
        for (const auto& c : real.centers) {
            const auto pp = detail::to_polar(c);
            double phi = pp.phi < 0.0 ? pp.phi + two_pi : pp.phi;
            const int lo_ring = std::max(0, static_cast<int>((pp.r - mark_radius) / lat.dr));
            const int hi_ring = std::min(lat.rings - 1,
                                         static_cast<int>((pp.r + mark_radius) / lat.dr));
            for (int ring = lo_ring; ring <= hi_ring; ++ring) {
                const double rm = lat.ring_mid(ring);
                if (std::abs(pp.r - rm) > mark_radius) continue;
                const double sh = pp.sinh_r * std::sinh(rm);
                const int m = lat.cells_per_ring[static_cast<std::size_t>(ring)];
                int j_lo = 0, j_hi = m - 1;
                if (sh > 1e-300) {
                    const double x = (pp.cosh_r * std::cosh(rm) - cosh_mark) / sh;
                    if (x >= 1.0) continue;
                    if (x > -1.0) {
                        const double dphi = std::acos(x);
                        const double cell = two_pi / m;
                        j_lo = static_cast<int>(std::ceil((phi - dphi) / cell - 0.5));
                        j_hi = static_cast<int>(std::floor((phi + dphi) / cell - 0.5));
                        if (j_hi - j_lo + 1 <= 0) continue;
                        if (j_hi - j_lo + 1 >= m) {
                            j_lo = 0;
                            j_hi = m - 1;
                        }
                    }
                }
                for (int j = j_lo; j <= j_hi; ++j) {
                    const int jw = ((j % m) + m) % m;
                    covered_stamp[static_cast<std::size_t>(lat.cell_id(ring, jw))] = t;
                }
            }
        }
        // BFS through vacant cells from the inner disk to the outer ring
        queue.clear();
        const auto vacant = [&](int ring, int j) {
            const std::int64_t id = lat.cell_id(ring, j);
            return covered_stamp[static_cast<std::size_t>(id)] != t;
        };
        const int inner_rings = std::min(lat.rings, static_cast<int>(rho1 / lat.dr));
        for (int ring = 0; ring < inner_rings; ++ring)
            for (int j = 0; j < lat.cells_per_ring[static_cast<std::size_t>(ring)]; ++j)
                if (vacant(ring, j)) {
                    const std::int64_t id = lat.cell_id(ring, j);
                    if (visit_stamp[static_cast<std::size_t>(id)] != t) {
                        visit_stamp[static_cast<std::size_t>(id)] = t;
                        queue.push_back(id);
                    }
                }
        bool crossed = false;
        for (std::size_t head = 0; head < queue.size() && !crossed; ++head) {
            const std::int64_t id = queue[head];
            int ring = 0;
            while (lat.ring_offset[static_cast<std::size_t>(ring) + 1] <= id) ++ring;
            const int j = static_cast<int>(id - lat.ring_offset[static_cast<std::size_t>(ring)]);
            if (ring == lat.rings - 1) {
                crossed = true;
                break;
            }
            const int m = lat.cells_per_ring[static_cast<std::size_t>(ring)];
            const auto push = [&](int rr, int jj) {
                if (rr < 0 || rr >= lat.rings) return;
                const int mm = lat.cells_per_ring[static_cast<std::size_t>(rr)];
                const int jwr = ((jj % mm) + mm) % mm;
                if (!vacant(rr, jwr)) return;
                const std::int64_t nid = lat.cell_id(rr, jwr);
                if (visit_stamp[static_cast<std::size_t>(nid)] == t) return;
                visit_stamp[static_cast<std::size_t>(nid)] = t;
                queue.push_back(nid);
            };
            push(ring, j - 1);
            push(ring, j + 1);
            // radial neighbors: all cells overlapping this cell's angular span
            for (int dr_ring : {-1, 1}) {
                const int rr = ring + dr_ring;
                if (rr < 0 || rr >= lat.rings) continue;
                const int mm = lat.cells_per_ring[static_cast<std::size_t>(rr)];
                const int lo = static_cast<int>(std::floor(static_cast<double>(j) * mm / m));
                const int hi = static_cast<int>(std::floor((j + 1.0) * mm / m - 1e-12));
                for (int jj = lo; jj <= hi; ++jj) push(rr, jj);
            }
        }
        hits += crossed;
    }
    Estimate est;
    est.mean = static_cast<double>(hits) / trials;
    est.se = std::sqrt(std::max(est.mean * (1.0 - est.mean) / trials, 0.0));
    return est;
}

struct BallRegion {
    hypgeo::Point center;
    double radius = 0.0;
};

struct FkgResult {
    double pA = 0.0;
    double pB = 0.0;
    double pAB = 0.0;
    double violation_z = 0.0;  // z-score of pAB - pA*pB
};

// Empirical FKG check for the increasing events {at least k centers in a
// ball region}.
inline FkgResult empirical_fkg(const sampler::ModelParams& params, double rho,
                               const BallRegion& regionA, int kA, const BallRegion& regionB, int kB,
                               int trials, std::uint64_t seed) {
    params.validate();
    if (kA < 1 || kB < 1) throw std::invalid_argument("empirical_fkg: kA, kB must be >= 1");
    if (trials <= 0) throw std::invalid_argument("empirical_fkg: trials must be positive");
    const hypgeo::Point origin = hypgeo::Point::origin(params.n);
    for (const auto* region : {&regionA, &regionB}) {
        if (!(region->radius > 0.0))
            throw std::invalid_argument("empirical_fkg: region radius must be positive");
        if (hypgeo::distance(origin, region->center) + region->radius > rho)
            throw std::invalid_argument("empirical_fkg: region extends outside the window");
    }
    const double capA = std::cosh(regionA.radius + kBoundaryTol) - 1.0;
    const double capB = std::cosh(regionB.radius + kBoundaryTol) - 1.0;
    long nA = 0, nB = 0, nAB = 0;
    std::vector<std::uint8_t> a_ind(static_cast<std::size_t>(trials)),
        b_ind(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        const auto real = sampler::sample_realization(params, rho, seed, static_cast<std::uint64_t>(t));
        int count_a = 0, count_b = 0;
        for (const auto& c : real.centers) {
            count_a += detail::within(c, regionA.center, capA);
            count_b += detail::within(c, regionB.center, capB);
        }
        a_ind[static_cast<std::size_t>(t)] = count_a >= kA;
        b_ind[static_cast<std::size_t>(t)] = count_b >= kB;
        nA += a_ind[static_cast<std::size_t>(t)];
        nB += b_ind[static_cast<std::size_t>(t)];
        nAB += a_ind[static_cast<std::size_t>(t)] && b_ind[static_cast<std::size_t>(t)];
    }
    FkgResult out;
    out.pA = static_cast<double>(nA) / trials;
    out.pB = static_cast<double>(nB) / trials;
    out.pAB = static_cast<double>(nAB) / trials;
    // influence-function variance of D = pAB - pA*pB
    double var = 0.0;
    for (int t = 0; t < trials; ++t) {
        const double a = a_ind[static_cast<std::size_t>(t)], b = b_ind[static_cast<std::size_t>(t)];
        const double inf = a * b - out.pA * b - out.pB * a + out.pA * out.pB;
        const double centered = inf - (out.pAB - 2.0 * out.pA * out.pB);
        var += centered * centered;
    }
    const double se = std::sqrt(std::max(var / trials / trials, 1e-300));
    out.violation_z = (out.pAB - out.pA * out.pB) / se;
    return out;
}

struct PhaseRow {
    double lambda = 0.0;
    double crossing_freq = 0.0;
    double crossing_se = 0.0;
    double mean_crossing_clusters = 0.0;
    double vacant_freq = 0.0;
    double vacant_se = 0.0;
};

// Sweeps lambda over the grid and reports crossing frequency, mean crossing
// multiplicity, and vacant crossing frequency per intensity (n = 2).
inline std::vector<PhaseRow> phase_scan(const sampler::ModelParams& base,
                                        const std::vector<double>& lambda_grid, double rho1,
                                        double rho2, double grid_step, int trials,
                                        std::uint64_t seed) {
    if (base.n != 2) throw std::invalid_argument("phase_scan: n = 2 only");
    std::vector<PhaseRow> rows;
    rows.reserve(lambda_grid.size());
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        sampler::ModelParams params = base;
        params.lambda = lambda_grid[i];
        std::uint64_t job_seed = seed ^ (0x9E3779B97F4A7C15ULL * (i + 1));
        PhaseRow row;
        row.lambda = params.lambda;
        const auto stats = annulus_crossing(params, rho1, rho2, trials, job_seed);
        long crossings = 0;
        double cluster_sum = 0.0;
        for (int t = 0; t < trials; ++t) {
            crossings += stats.crossing_indicator[static_cast<std::size_t>(t)];
            cluster_sum += stats.crossing_cluster_count[static_cast<std::size_t>(t)];
        }
        row.crossing_freq = static_cast<double>(crossings) / trials;
        row.crossing_se =
            std::sqrt(std::max(row.crossing_freq * (1.0 - row.crossing_freq) / trials, 0.0));
        row.mean_crossing_clusters = cluster_sum / trials;
        const auto vac = vacant_crossing(params, rho1, rho2, grid_step, trials, job_seed);
        row.vacant_freq = vac.mean;
        row.vacant_se = vac.se;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace hypercol::percolator
