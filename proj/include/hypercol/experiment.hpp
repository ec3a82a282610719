#pragma once

// Batch experiment runner behind the CLI: config validation, dispatch to
// the sampling/percolation/bounds operations, and CSV/JSON/SVG output.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hypercol/bounds.hpp"
#include "hypercol/hypgeo.hpp"
#include "hypercol/percolator.hpp"
#include "hypercol/sampler.hpp"
#include "hypercol/walk_check.hpp"

namespace hypercol::experiment {

inline constexpr const char* kVersion = "hypercol 0.1.0";

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string kind;
    int n = 2;
    double R = 1.0;
    double lambda = 0.0;
    std::vector<double> lambda_grid;
    double rho = 0.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
    double grid_step = 0.0;  // 0 means default R/4
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<double> eps{0.1};
    double t = 0.0;
    int k_max = 0;
    std::vector<double> distances;
    std::string out_dir = ".";
};

inline ExperimentConfig parse_config(const nlohmann::json& j, std::vector<std::string>* errors) {
    ExperimentConfig cfg;
    static const std::vector<std::string> known = {
        "kind",   "n",    "R",     "lambda",    "lambda_grid", "rho",  "rho1",      "rho2",
        "grid_step", "trials", "seed", "eps", "t", "k_max", "distances", "out_dir"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            errors->push_back("unknown key: " + it.key());
    const auto get = [&](const char* key, auto& target) {
        if (j.contains(key)) {
            try {
                target = j.at(key).get<std::remove_reference_t<decltype(target)>>();
            } catch (const nlohmann::json::exception&) {
                errors->push_back(std::string("malformed value for key: ") + key);
            }
        }
    };
    get("kind", cfg.kind);
    get("n", cfg.n);
    get("R", cfg.R);
    get("lambda", cfg.lambda);
    get("lambda_grid", cfg.lambda_grid);
    get("rho", cfg.rho);
    get("rho1", cfg.rho1);
    get("rho2", cfg.rho2);
    get("grid_step", cfg.grid_step);
    get("trials", cfg.trials);
    get("seed", cfg.seed);
    get("eps", cfg.eps);
    get("t", cfg.t);
    get("k_max", cfg.k_max);
    get("distances", cfg.distances);
    get("out_dir", cfg.out_dir);
    return cfg;
}

inline std::vector<std::string> validate(const nlohmann::json& j) {
    std::vector<std::string> errs;
    const ExperimentConfig cfg = parse_config(j, &errs);
    const auto require = [&](bool ok, const std::string& msg) {
        if (!ok) errs.push_back(msg);
    };
    static const std::vector<std::string> kinds = {"bounds",      "phase-scan", "decay",
                                                   "walk-bound",  "certificate", "render"};
    if (std::find(kinds.begin(), kinds.end(), cfg.kind) == kinds.end()) {
        errs.push_back("kind must be one of bounds|phase-scan|decay|walk-bound|certificate|render");
        return errs;
    }
    require(cfg.n >= 2, "n must be >= 2");
    require(cfg.R > 0.0, "R must be positive");
    if (cfg.kind == "bounds") {
        require(2.0 * cfg.R > 1.0, "R must exceed 1/2 for the cell volume");
        for (double e : cfg.eps) require(e > 0.0 && e < 1.0, "eps values must lie in (0,1)");
    } else if (cfg.kind == "phase-scan") {
        require(cfg.n == 2, "phase-scan requires n = 2");
        require(!cfg.lambda_grid.empty(), "lambda_grid must be nonempty");
        for (double l : cfg.lambda_grid) require(l >= 0.0, "lambda_grid entries must be >= 0");
        require(2.0 * cfg.R <= cfg.rho1 && cfg.rho1 < cfg.rho2, "need 2R <= rho1 < rho2");
        require(cfg.trials > 0, "trials must be positive");
        const double step = cfg.grid_step > 0.0 ? cfg.grid_step : cfg.R / 4.0;
        require(step <= cfg.R / 4.0 + 1e-12, "grid_step must be <= R/4");
    } else if (cfg.kind == "decay") {
        require(cfg.lambda >= 0.0, "lambda must be >= 0");
        require(cfg.rho > 2.0 * cfg.R, "rho must exceed 2R");
        require(!cfg.distances.empty(), "distances must be nonempty");
        for (double d : cfg.distances)
            require(d >= 0.0 && d <= cfg.rho - 2.0 * cfg.R,
                    "distances must lie within [0, rho - 2R]");
        require(cfg.trials > 0, "trials must be positive");
    } else if (cfg.kind == "walk-bound") {
        require(cfg.k_max >= 2, "k_max must be >= 2");
        require(cfg.trials > 0, "trials must be positive");
    } else if (cfg.kind == "certificate") {
        require(cfg.t > 1.0, "t must exceed 1");
    } else if (cfg.kind == "render") {
        require(cfg.n == 2, "render requires n = 2");
        require(cfg.lambda >= 0.0, "lambda must be >= 0");
        require(cfg.rho > 0.0, "rho must be positive");
    }
    return errs;
}

struct RunReport {
    nlohmann::json config;
    nlohmann::json results;
    nlohmann::json timings;
    std::string version = kVersion;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const {
        return nlohmann::json{{"config", config}, {"results", results},
                              {"timings", timings}, {"version", version}, {"seed", seed}};
    }
};

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content,
                         std::vector<std::filesystem::path>* created) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out << content;
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed: " + path.string());
    created->push_back(path);
}

// Run `count` jobs on up to `jobs` threads; each job writes only its own slot.
template <typename F>
void parallel_for(int count, int jobs, F&& body) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

// A hyperbolic circle in the Poincare disk is a Euclidean circle; recover
// its Euclidean center and radius from the polar data of its center.
struct DiskCircle {
    double cx = 0.0, cy = 0.0, radius = 0.0;
};

inline DiskCircle poincare_circle(double r_center, double phi, double R) {
    const double e1 = std::tanh(0.5 * (r_center - R));
    const double e2 = std::tanh(0.5 * (r_center + R));
    DiskCircle c;
    const double mid = 0.5 * (e1 + e2);
    c.radius = 0.5 * (e2 - e1);
    c.cx = mid * std::cos(phi);
    c.cy = mid * std::sin(phi);
    return c;
}

inline std::string render_svg(const sampler::Realization& real) {
    const auto px = [](double v) { return 500.0 + 500.0 * v; };
    const auto py = [](double v) { return 500.0 - 500.0 * v; };
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" "
           "viewBox=\"0 0 1000 1000\">\n";
    svg += "<rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n";
    svg += "<circle cx=\"500\" cy=\"500\" r=\"500\" fill=\"none\" stroke=\"black\" "
           "stroke-width=\"1\"/>\n";
    const double window_e = hypgeo::euclidean_from_radius(real.window_radius);
    svg += "<circle cx=\"500\" cy=\"500\" r=\"" + fmt(500.0 * window_e) +
           "\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
    for (const auto& center : real.centers) {
        const double e = std::sqrt(center.norm_sq());
        const double r = hypgeo::radius_from_euclidean(e);
        const double phi = std::atan2(center.coords[1], center.coords[0]);
        const auto circ = poincare_circle(r, phi, real.params.R);
        svg += "<circle cx=\"" + fmt(px(circ.cx)) + "\" cy=\"" + fmt(py(circ.cy)) + "\" r=\"" +
               fmt(500.0 * circ.radius) +
               "\" fill=\"steelblue\" fill-opacity=\"0.25\" stroke=\"steelblue\" "
               "stroke-width=\"0.5\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace detail

// Executes one experiment config. Throws std::invalid_argument on
// validation failure and IoError on output failure; any partially written
// outputs are removed before rethrowing.
inline RunReport run(const nlohmann::json& config_json, const std::string& out_dir_override = "",
                     int jobs = 1) {
    const auto violations = validate(config_json);
    if (!violations.empty()) {
        std::string msg = "invalid config:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw std::invalid_argument(msg);
    }
    std::vector<std::string> parse_errs;
    ExperimentConfig cfg = parse_config(config_json, &parse_errs);
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;

    RunReport report;
    report.config = config_json;
    report.seed = cfg.seed;

    std::string csv;
    std::string svg;
    nlohmann::json results = nlohmann::json::array();
    const auto started = std::chrono::steady_clock::now();

    const auto kv_row = [&](const std::string& key, double value) {
        csv += key + "," + detail::fmt(value) + "\n";
        results.push_back({{"key", key}, {"value", value}});
    };

    if (cfg.kind == "bounds") {
        csv = "key,value\n";
        const auto rep = bounds::make_bounds_report(cfg.n, cfg.R, cfg.eps);
        kv_row("mu_2R", rep.mu_2R);
        kv_row("mu_cell", rep.mu_cell);
        kv_row("lambda_lower", rep.lambda_lower);
        kv_row("lambda_upper", rep.lambda_upper);
        kv_row("mgf", rep.mgf);
        for (std::size_t i = 0; i < rep.eps.size(); ++i) {
            kv_row("h_eps_" + detail::fmt(rep.eps[i]), rep.h_eps[i]);
            kv_row("a4_" + detail::fmt(rep.eps[i]), rep.a4[i]);
        }
    } else if (cfg.kind == "certificate") {
        csv = "key,value\n";
        const auto cert = bounds::nonuniqueness_certificate(cfg.n, cfg.t);
        kv_row("found", cert.found ? 1.0 : 0.0);
        if (cert.found) {
            kv_row("R", cert.R);
            kv_row("lambda", cert.lambda);
            kv_row("q", cert.q);
            kv_row("margin", cert.margin);
        }
    } else if (cfg.kind == "phase-scan") {
        csv = "lambda,crossing_freq,crossing_se,mean_crossing_clusters,vacant_freq,vacant_se\n";
        const double step = cfg.grid_step > 0.0 ? cfg.grid_step : cfg.R / 4.0;
        sampler::ModelParams base{cfg.n, cfg.R, 0.0};
        std::vector<percolator::PhaseRow> rows(cfg.lambda_grid.size());
        detail::parallel_for(static_cast<int>(cfg.lambda_grid.size()), jobs, [&](int i) {
            const std::vector<double> one{cfg.lambda_grid[static_cast<std::size_t>(i)]};
            // per-lambda seed salt matches the sequential sweep
            std::uint64_t salt = cfg.seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(i) + 1));
            sampler::ModelParams params = base;
            params.lambda = one[0];
            percolator::PhaseRow row;
            row.lambda = params.lambda;
            const auto stats = percolator::annulus_crossing(params, cfg.rho1, cfg.rho2, cfg.trials, salt);
            long crossings = 0;
            double cluster_sum = 0.0;
            for (int t = 0; t < cfg.trials; ++t) {
                crossings += stats.crossing_indicator[static_cast<std::size_t>(t)];
                cluster_sum += stats.crossing_cluster_count[static_cast<std::size_t>(t)];
            }
            row.crossing_freq = static_cast<double>(crossings) / cfg.trials;
            row.crossing_se = std::sqrt(
                std::max(row.crossing_freq * (1.0 - row.crossing_freq) / cfg.trials, 0.0));
            row.mean_crossing_clusters = cluster_sum / cfg.trials;
            const auto vac =
                percolator::vacant_crossing(params, cfg.rho1, cfg.rho2, step, cfg.trials, salt);
            row.vacant_freq = vac.mean;
            row.vacant_se = vac.se;
            rows[static_cast<std::size_t>(i)] = row;
        });
        for (const auto& row : rows) {
            csv += detail::fmt(row.lambda) + "," + detail::fmt(row.crossing_freq) + "," +
                   detail::fmt(row.crossing_se) + "," + detail::fmt(row.mean_crossing_clusters) +
                   "," + detail::fmt(row.vacant_freq) + "," + detail::fmt(row.vacant_se) + "\n";
            results.push_back({{"lambda", row.lambda},
                               {"crossing_freq", row.crossing_freq},
                               {"crossing_se", row.crossing_se},
                               {"mean_crossing_clusters", row.mean_crossing_clusters},
                               {"vacant_freq", row.vacant_freq},
                               {"vacant_se", row.vacant_se}});
        }
    } else if (cfg.kind == "decay") {
        csv = "distance,conn_prob,conn_se\n";
        sampler::ModelParams params{cfg.n, cfg.R, cfg.lambda};
        const hypgeo::Point u = hypgeo::Point::origin(cfg.n);
        std::vector<percolator::Estimate> rows(cfg.distances.size());
        detail::parallel_for(static_cast<int>(cfg.distances.size()), jobs, [&](int i) {
            hypgeo::Point v = hypgeo::Point::origin(cfg.n);
            v.coords[0] = hypgeo::euclidean_from_radius(cfg.distances[static_cast<std::size_t>(i)]);
            std::uint64_t salt = cfg.seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(i) + 1));
            rows[static_cast<std::size_t>(i)] =
                percolator::connection_prob(u, v, params, cfg.rho, cfg.trials, salt);
        });
        for (std::size_t i = 0; i < rows.size(); ++i) {
            csv += detail::fmt(cfg.distances[i]) + "," + detail::fmt(rows[i].mean) + "," +
                   detail::fmt(rows[i].se) + "\n";
            results.push_back({{"distance", cfg.distances[i]},
                               {"conn_prob", rows[i].mean},
                               {"conn_se", rows[i].se}});
        }
    } else if (cfg.kind == "walk-bound") {
        csv = "k,p_walk,p_sum,chernoff_bound\n";
        const int count = cfg.k_max - 1;
        std::vector<bounds::WalkDomination> rows(static_cast<std::size_t>(count));
        std::vector<double> cb(static_cast<std::size_t>(count));
        detail::parallel_for(count, jobs, [&](int i) {
            const int k = i + 2;
            std::uint64_t salt = cfg.seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(i) + 1));
            rows[static_cast<std::size_t>(i)] =
                bounds::walk_domination_check(cfg.n, cfg.R, k, cfg.trials, salt);
            cb[static_cast<std::size_t>(i)] = bounds::chernoff_chain_bound(cfg.n, cfg.R, k);
        });
        for (int i = 0; i < count; ++i) {
            const int k = i + 2;
            csv += std::to_string(k) + "," + detail::fmt(rows[static_cast<std::size_t>(i)].p_walk) +
                   "," + detail::fmt(rows[static_cast<std::size_t>(i)].p_sum) + "," +
                   detail::fmt(cb[static_cast<std::size_t>(i)]) + "\n";
            results.push_back({{"k", k},
                               {"p_walk", rows[static_cast<std::size_t>(i)].p_walk},
                               {"p_sum", rows[static_cast<std::size_t>(i)].p_sum},
                               {"chernoff_bound", cb[static_cast<std::size_t>(i)]}});
        }
    } else if (cfg.kind == "render") {
        csv = "key,value\n";
        sampler::ModelParams params{cfg.n, cfg.R, cfg.lambda};
        const auto real = sampler::sample_realization(params, cfg.rho, cfg.seed, 0);
        kv_row("centers", static_cast<double>(real.centers.size()));
        svg = detail::render_svg(real);
    }

    report.results = results;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    report.timings = nlohmann::json{{cfg.kind, elapsed}};

    std::vector<std::filesystem::path> created;
    const std::filesystem::path dir(cfg.out_dir);
    try {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        detail::atomic_write(dir / "results.csv", csv, &created);
        if (!svg.empty()) detail::atomic_write(dir / "realization.svg", svg, &created);
        detail::atomic_write(dir / "report.json", report.to_json().dump(2) + "\n", &created);
    } catch (...) {
        for (const auto& p : created) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
        throw;
    }
    return report;
}

}  // namespace hypercol::experiment
