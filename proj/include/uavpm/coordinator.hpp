#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include <uavpm/altbeam.hpp>
#include <uavpm/bandwidth.hpp>
#include <uavpm/location.hpp>
#include <uavpm/model.hpp>
#include <uavpm/util/rng.hpp>

// Three-block coordinate descent: (H, Theta) -> y -> w, each block solved
// to optimality with the others fixed, iterated until the sum power stops
// decreasing. Every block starts from a point that is feasible for it, so
// the objective trace is non-increasing by construction.
namespace uavpm {
namespace coordinator {

template <class ValueType>
struct SolverConfig {
    ValueType rel_tol = ValueType(1e-6); // relative objective decrease per full iteration
    int max_iters = 100;
    ValueType grid_step = ValueType(0);  // general-alpha beam grid; 0 = (hi-lo)/2000
    ValueType bisect_tol = ValueType(1e-9);
    int starts = 1;
    std::uint64_t seed = 0;
};

struct BlockSet {
    bool altbeam = true;
    bool location = true;
    bool bandwidth = true;
};

/// Deterministic starting point: centroid placement, beam sized for a
/// mid-range altitude, height on the coverage boundary, equal bandwidth
/// split. `randomized` perturbs the location and beam (multi-start).
template <class T>
std::pair<Placement<T>, Allocation<T>> initialize(const Scenario<T>& scn, std::uint64_t seed,
                                                  bool randomized = false) {
    const Eigen::Index n = scn.size();
    Placement<T> pl;
    util::SplitMix64 rng(seed);

    util::vec2_type<T> y = util::vec2_type<T>::Zero();
    for (const auto& gt : scn.gts) y += gt.position;
    y /= static_cast<T>(n);
    if (randomized) {
        util::vec2_type<T> lo = scn.gts[0].position, hi = scn.gts[0].position;
        for (const auto& gt : scn.gts) {
            lo = lo.cwiseMin(gt.position);
            hi = hi.cwiseMax(gt.position);
        }
        y.x() = static_cast<T>(rng.uniform(lo.x(), hi.x()));
        y.y() = static_cast<T>(rng.uniform(lo.y(), hi.y()));
    }
    pl.y = y;

    T d_max = T(0);
    for (const auto& gt : scn.gts) d_max = std::max(d_max, (y - gt.position).squaredNorm());

    const T h_mid = (scn.h_min + scn.h_max) / T(2);
    T theta = std::atan(std::sqrt(d_max) / h_mid);
    if (randomized) theta = static_cast<T>(rng.uniform(scn.theta_lo(), scn.theta_max));
    // keep the implied coverage height inside the box; when even theta_max
    // cannot cover d_max within h_max the first altbeam pass reports it
    const T theta_lo = std::max(scn.theta_lo(), std::atan(std::sqrt(d_max) / scn.h_max));
    theta = theta_lo <= scn.theta_max ? std::clamp(theta, theta_lo, scn.theta_max) : scn.theta_max;
    pl.half_beamwidth = theta;
    pl.height = std::max(std::sqrt(d_max) / std::tan(theta), scn.h_min);

    Allocation<T> al{util::vec_type<T>::Constant(n, scn.total_bandwidth / static_cast<T>(n))};
    return {pl, al};
}

/// One descent run over an arbitrary subset of blocks from an explicit
/// starting point. Baselines freeze blocks by masking them out.
template <class T>
Solution<T> solve_blocks(const Scenario<T>& scn, const SolverConfig<T>& cfg, BlockSet blocks,
                         Placement<T> pl, Allocation<T> al) {
    Solution<T> sol;
    sol.trace.reserve(static_cast<std::size_t>(cfg.max_iters) * 3);

    auto snapshot = [&](SolveStatus status) {
        sol.placement = pl;
        sol.allocation = al;
        sol.powers = required_powers(scn, pl, al);
        sol.sum_power = sol.powers.sum();
        sol.status = status;
        return sol;
    };

    T prev = sum_power(scn, pl, al);
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        if (blocks.altbeam) {
            auto in = altbeam::AltBeamInput<T>::from(scn, pl.y, al);
            const auto res = altbeam::solve_altbeam(in, cfg.grid_step, cfg.bisect_tol);
            if (res.status != BlockStatus::ok) return snapshot(SolveStatus::infeasible);
            // the grid path for alpha > 2 is only grid-optimal: keep a
            // feasible incoming point when it happens to be better
            const T reach = pl.height * std::tan(pl.half_beamwidth);
            const bool incoming_ok =
                altbeam::caps_ok(in, pl.height, pl.half_beamwidth) &&
                reach * reach >= in.d_max * (T(1) - T(1e-12)) &&
                pl.height >= scn.h_min && pl.height <= scn.h_max &&
                pl.half_beamwidth >= in.theta_lo && pl.half_beamwidth <= in.theta_hi;
            if (!incoming_ok ||
                res.objective <= altbeam::objective(in, pl.height, pl.half_beamwidth)) {
                pl.height = res.height;
                pl.half_beamwidth = res.half_beamwidth;
            }
            sol.trace.push_back({iter, sum_power(scn, pl, al), Block::altbeam});
        }
        if (blocks.location) {
            auto in = location::LocationInput<T>::from(scn, pl, al);
            const auto res = location::solve_location<T>(in, pl.y);
            if (res.status != BlockStatus::ok) return snapshot(SolveStatus::infeasible);
            pl.y = res.y;
            sol.trace.push_back({iter, sum_power(scn, pl, al), Block::location});
        }
        if (blocks.bandwidth) {
            auto in = bandwidth::BandwidthInput<T>::from(scn, pl);
            const auto res = bandwidth::solve_bandwidth(in);
            if (res.status != BlockStatus::ok) return snapshot(SolveStatus::infeasible);
            if (bandwidth::power_of(in, res.w) <= bandwidth::power_of(in, al.w)) al.w = res.w;
            sol.trace.push_back({iter, sum_power(scn, pl, al), Block::bandwidth});
        }
        const T cur = sol.trace.empty() ? prev : sol.trace.back().objective;
        if (std::abs(prev - cur) < cfg.rel_tol * std::max(prev, std::numeric_limits<T>::min()))
            return snapshot(SolveStatus::converged);
        prev = cur;
    }
    return snapshot(SolveStatus::iteration_limit);
}

template <class T>
Solution<T> solve(const Scenario<T>& scn, const SolverConfig<T>& cfg = {}) {
    scn.validate();
    auto [pl, al] = initialize(scn, cfg.seed);
    return solve_blocks(scn, cfg, BlockSet{}, std::move(pl), std::move(al));
}

/// The full descent restarted from `cfg.starts` initial points (start 0 is the
/// deterministic one); returns the best feasible run. Deterministic for a
/// fixed seed, merged by objective then start index.
template <class T>
Solution<T> solve_multistart(const Scenario<T>& scn, const SolverConfig<T>& cfg = {}) {
    scn.validate();
    Solution<T> best;
    bool have_best = false;
    for (int s = 0; s < std::max(1, cfg.starts); ++s) {
        auto [pl, al] = initialize(scn, util::derive_seed(cfg.seed, static_cast<std::uint64_t>(s)),
                                   s > 0);
        Solution<T> sol = solve_blocks(scn, cfg, BlockSet{}, std::move(pl), std::move(al));
        if (sol.status == SolveStatus::infeasible) continue;
        if (!have_best || sol.sum_power < best.sum_power) {
            best = std::move(sol);
            have_best = true;
        }
    }
    if (!have_best) {
        auto [pl, al] = initialize(scn, cfg.seed);
        best = solve_blocks(scn, cfg, BlockSet{}, std::move(pl), std::move(al));
    }
    return best;
}

}  // namespace coordinator
}  // namespace uavpm
