#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include <uavpm/altbeam.hpp>
#include <uavpm/coordinator.hpp>
#include <uavpm/io.hpp>
#include <uavpm/model.hpp>
#include <uavpm/util/rng.hpp>

// Benchmark harness: disk-uniform scenario generation, the beamwidth sweep
// with the UAV parked at the center, and the baseline comparison (Proposed /
// FL / FAB / FB / Exhaustive) over a grid of rate demands. All randomness
// flows from one seed; identical invocations emit identical bytes.
namespace uavpm {
namespace bench {

struct ExperimentSpec {
    int k = 20;
    double radius_m = 300.0;
    std::vector<double> rate_grid = {1e6, 2e6, 3e6, 4e6, 5e6}; // bps
    int theta_steps = 100;
    int trials = 20;
    int starts = 50; // Exhaustive restarts
    double alpha = 2.0;
    std::uint64_t seed = 0;
};

/// Scenario constants used by the benchmark protocol: 10 MHz budget,
/// 20 dBm caps, -169 dBm/Hz noise, reference gain 1.42e-4, 50-500 m
/// altitude box, near-quarter-turn beam range.
inline Scenario<double> default_constants() {
    Scenario<double> scn;
    scn.total_bandwidth = 1e7;
    scn.noise_density = dbm_to_watt(-169.0);
    scn.ref_gain = 1.42e-4;
    scn.antenna_const = 2.2846;
    scn.pathloss_exp = 2.0;
    scn.h_min = 50.0;
    scn.h_max = 500.0;
    scn.theta_min = 0.0;
    scn.theta_max = std::numbers::pi / 2 - 1e-3;
    scn.theta_floor = 1e-3;
    return scn;
}

/// K terminals uniform over the disk of the given radius (area-uniform:
/// r = radius * sqrt(U)), equal rate demand, default constants.
inline Scenario<double> gen_scenario(const ExperimentSpec& spec, std::uint64_t seed) {
    Scenario<double> scn = default_constants();
    scn.pathloss_exp = spec.alpha;
    const double rate = spec.rate_grid.empty() ? 1e6 : spec.rate_grid.front();
    util::SplitMix64 rng(seed);
    scn.gts.reserve(static_cast<std::size_t>(spec.k));
    for (int i = 0; i < spec.k; ++i) {
        const double r = spec.radius_m * std::sqrt(rng.uniform());
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        GroundTerminal<double> gt;
        gt.position = {r * std::cos(phi), r * std::sin(phi)};
        gt.min_rate = rate;
        gt.max_power = dbm_to_watt(20.0);
        scn.gts.push_back(gt);
    }
    return scn;
}

struct SweepRow {
    double rate_bps;
    double theta_rad;
    double height_m;
    double sum_power_w;
    bool feasible;
};

/// Beamwidth sweep: UAV at the GT centroid, equal bandwidth split,
/// height on the coverage boundary, sum power evaluated per beamwidth.
/// Rows outside the cap/height limits are kept but flagged.
inline std::vector<SweepRow> sweep_theta(const Scenario<double>& scn,
                                         const std::vector<double>& theta_grid) {
    std::vector<SweepRow> rows;
    rows.reserve(theta_grid.size());
    const Eigen::Index n = scn.size();
    Allocation<double> al{util::vec_type<double>::Constant(n, scn.total_bandwidth /
                                                                  static_cast<double>(n))};
    util::vec2_type<double> center = util::vec2_type<double>::Zero();
    for (const auto& gt : scn.gts) center += gt.position;
    center /= static_cast<double>(n);

    const auto in = altbeam::AltBeamInput<double>::from(scn, center, al);
    for (double theta : theta_grid) {
        const double height = altbeam::optimal_height(in.d_max, theta, scn.h_min);
        Placement<double> pl{center, height, theta};
        const double power = sum_power(scn, pl, al);
        const bool ok = height <= scn.h_max && theta >= in.theta_lo && theta <= in.theta_hi &&
                        altbeam::caps_ok(in, height, theta);
        rows.push_back({scn.gts[0].min_rate, theta, height, power, ok});
    }
    return rows;
}

struct ResultRow {
    std::string experiment;
    std::string baseline;
    double rate_bps;
    double sum_power_w;
    double sum_power_dbm;
    int iters;
    std::string status;
};

inline int iterations_of(const Solution<double>& sol) {
    return sol.trace.empty() ? 0 : sol.trace.back().iter;
}

inline const char* status_tag(SolveStatus s) {
    return s == SolveStatus::converged ? "ok" : to_string(s);
}

inline ResultRow make_row(const std::string& experiment, const std::string& baseline,
                          double rate, const Solution<double>& sol) {
    const double w = sol.sum_power;
    const double dbm = w > 0 ? watt_to_dbm(w) : -std::numeric_limits<double>::infinity();
    return {experiment, baseline, rate, w, dbm, iterations_of(sol), status_tag(sol.status)};
}

/// One scenario through the five methods. FL pins the location, FAB the
/// altitude/beam pair, FB the equal bandwidth split; Exhaustive restarts the
/// full algorithm from `cfg.starts` random initial points.
inline std::vector<ResultRow> run_baselines(const Scenario<double>& scn,
                                            const coordinator::SolverConfig<double>& cfg,
                                            const std::string& experiment = "exp0") {
    using coordinator::BlockSet;
    const double rate = scn.gts[0].min_rate;
    std::vector<ResultRow> rows;
    rows.reserve(5);

    auto run_masked = [&](BlockSet blocks) {
        auto [pl, al] = coordinator::initialize(scn, cfg.seed);
        return coordinator::solve_blocks(scn, cfg, blocks, std::move(pl), std::move(al));
    };

    rows.push_back(make_row(experiment, "Proposed", rate, coordinator::solve(scn, cfg)));
    rows.push_back(make_row(experiment, "FL", rate, run_masked({true, false, true})));
    rows.push_back(make_row(experiment, "FAB", rate, run_masked({false, true, true})));
    rows.push_back(make_row(experiment, "FB", rate, run_masked({true, true, false})));
    rows.push_back(make_row(experiment, "Exhaustive", rate, coordinator::solve_multistart(scn, cfg)));
    return rows;
}

/// Rate-grid benchmark: `trials` GT layouts (shared across the rate grid so the
/// per-rate averages are paired), five methods each.
inline std::vector<ResultRow> run_bench(const ExperimentSpec& spec,
                                        const coordinator::SolverConfig<double>& base_cfg) {
    std::vector<ResultRow> rows;
    for (double rate : spec.rate_grid) {
        ExperimentSpec point = spec;
        point.rate_grid = {rate};
        for (int t = 0; t < spec.trials; ++t) {
            const Scenario<double> scn =
                gen_scenario(point, util::derive_seed(spec.seed, static_cast<std::uint64_t>(t)));
            coordinator::SolverConfig<double> cfg = base_cfg;
            cfg.starts = spec.starts;
            cfg.seed = util::derive_seed(spec.seed, 0x5eedULL + static_cast<std::uint64_t>(t));
            char tag[32];
            std::snprintf(tag, sizeof(tag), "t%03d", t);
            auto trial_rows = run_baselines(scn, cfg, tag);
            rows.insert(rows.end(), trial_rows.begin(), trial_rows.end());
        }
    }
    return rows;
}

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::string out = "experiment,baseline,R_bps,sum_power_W,sum_power_dBm,iters,status\n";
    for (const auto& r : rows) {
        out += r.experiment + ',' + r.baseline + ',' + format_double(r.rate_bps) + ',' +
               format_double(r.sum_power_w) + ',' + format_double(r.sum_power_dbm) + ',' +
               std::to_string(r.iters) + ',' + r.status + '\n';
    }
    return out;
}

inline nlohmann::json rows_to_json(const std::vector<ResultRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"experiment", r.experiment},
                       {"baseline", r.baseline},
                       {"R_bps", r.rate_bps},
                       {"sum_power_W", io::finite_or_string(r.sum_power_w)},
                       {"sum_power_dBm", io::finite_or_string(r.sum_power_dbm)},
                       {"iters", r.iters},
                       {"status", r.status}});
    }
    return arr;
}

inline std::vector<ResultRow> rows_from_json(const nlohmann::json& arr) {
    std::vector<ResultRow> rows;
    for (const auto& j : arr) {
        rows.push_back({j.at("experiment").get<std::string>(), j.at("baseline").get<std::string>(),
                        j.at("R_bps").get<double>(), io::number_or_string(j.at("sum_power_W")),
                        io::number_or_string(j.at("sum_power_dBm")), j.at("iters").get<int>(),
                        j.at("status").get<std::string>()});
    }
    return rows;
}

/// Write rows as CSV (fixed header) or a JSON array; deterministic bytes.
inline void emit(const std::vector<ResultRow>& rows, const std::string& path,
                 const std::string& format) {
    if (format == "csv") {
        io::save_text(path, rows_to_csv(rows));
    } else if (format == "json") {
        io::save_text(path, rows_to_json(rows).dump(2) + "\n");
    } else {
        throw std::invalid_argument("emit: format must be csv or json");
    }
}

inline nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"R_bps", r.rate_bps},
                       {"theta_rad", r.theta_rad},
                       {"height_m", r.height_m},
                       {"sum_power_W", io::finite_or_string(r.sum_power_w)},
                       {"status", r.feasible ? "ok" : "infeasible"}});
    }
    return arr;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "R_bps,theta_rad,height_m,sum_power_W,sum_power_dBm,status\n";
    for (const auto& r : rows) {
        const double dbm = r.sum_power_w > 0 ? watt_to_dbm(r.sum_power_w)
                                             : -std::numeric_limits<double>::infinity();
        out += format_double(r.rate_bps) + ',' + format_double(r.theta_rad) + ',' +
               format_double(r.height_m) + ',' + format_double(r.sum_power_w) + ',' +
               format_double(dbm) + ',' + (r.feasible ? "ok" : "infeasible") + '\n';
    }
    return out;
}

}  // namespace bench
}  // namespace uavpm
