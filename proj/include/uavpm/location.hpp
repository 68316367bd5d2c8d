#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include <uavpm/model.hpp>
#include <uavpm/util/rng.hpp>
#include <uavpm/util/types.hpp>

// Location subproblem: with (H, Theta, w) fixed, minimize the sum power
// over the UAV's horizontal position. The feasible set is an intersection
// of disks (power caps and coverage), the objective is a convex composition,
// and the whole thing lives in 2-D, so a phase-I subgradient pass plus a
// log-barrier Newton loop is enough.
namespace uavpm {
namespace location {

template <class ValueType>
struct LocationInput {
    using value_t = ValueType;
    using vec_t = util::vec_type<value_t>;
    using vec2_t = util::vec2_type<value_t>;

    vec_t C;                        // a * w_k * (2^(R_k/w_k) - 1) * Theta^2
    util::points_type<value_t> anchors; // GT positions, column k
    vec_t radii;                    // min(sqrt(E_k - H^2), H tan Theta); < 0 marks an
                                    // unreachable power cap (E_k < H^2)
    value_t height;
    value_t alpha;

    static LocationInput from(const Scenario<value_t>& scn, const Placement<value_t>& pl,
                              const Allocation<value_t>& al) {
        LocationInput in;
        const Eigen::Index n = scn.size();
        in.C.resize(n);
        in.anchors.resize(2, n);
        in.radii.resize(n);
        in.height = pl.height;
        in.alpha = scn.pathloss_exp;
        const value_t a = scn.power_coeff();
        const value_t theta2 = pl.half_beamwidth * pl.half_beamwidth;
        const value_t reach = pl.height * std::tan(pl.half_beamwidth);
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& gt = scn.gts[static_cast<std::size_t>(k)];
            in.anchors.col(k) = gt.position;
            value_t c_k = value_t(0);
            if (gt.min_rate > value_t(0)) {
                const value_t w = al.w[k];
                c_k = w > value_t(0) ? a * w * pow2m1(gt.min_rate / w) * theta2
                                     : std::numeric_limits<value_t>::infinity();
            }
            in.C[k] = c_k;
            value_t r = reach;
            if (c_k > value_t(0)) {
                if (!std::isfinite(c_k)) {
                    in.radii[k] = value_t(-1);
                    continue;
                }
                const value_t e_k = std::pow(gt.max_power / c_k, value_t(2) / scn.pathloss_exp);
                const value_t h2 = pl.height * pl.height;
                if (e_k < h2) {
                    in.radii[k] = value_t(-1); // cap unreachable even directly underneath
                    continue;
                }
                r = std::min(r, std::sqrt(e_k - h2));
            }
            in.radii[k] = r;
        }
        return in;
    }
};

template <class ValueType>
struct LocationResult {
    util::vec2_type<ValueType> y;
    ValueType objective;
    BlockStatus status;
};

/// Objective sum_k C_k (||y - x_k||^2 + H^2)^(alpha/2) and its gradient.
template <class T, class Derived>
std::pair<T, util::vec2_type<T>> loc_objective_grad(const LocationInput<T>& in,
                                                    const Eigen::MatrixBase<Derived>& y) {
    const T h2 = in.height * in.height;
    T value = T(0);
    util::vec2_type<T> grad = util::vec2_type<T>::Zero();
    for (Eigen::Index k = 0; k < in.C.size(); ++k) {
        const util::vec2_type<T> diff = y - in.anchors.col(k);
        const T s = diff.squaredNorm() + h2;
        const T pw = std::pow(s, in.alpha / T(2) - T(1));
        value += in.C[k] * pw * s;
        grad += (in.C[k] * in.alpha * pw) * diff;
    }
    return {value, grad};
}

namespace detail {

// worst normalized disk violation: max_k ||y - x_k|| - r_k
template <class T, class Derived>
T max_violation(const LocationInput<T>& in, const Eigen::MatrixBase<Derived>& y) {
    T v = -std::numeric_limits<T>::infinity();
    for (Eigen::Index k = 0; k < in.radii.size(); ++k)
        v = std::max(v, (y - in.anchors.col(k)).norm() - in.radii[k]);
    return v;
}

// minimize max_violation by subgradient descent with diminishing steps
template <class T>
std::pair<util::vec2_type<T>, T> subgradient_phase1(const LocationInput<T>& in,
                                                    util::vec2_type<T> y, int iters) {
    util::vec2_type<T> best_y = y;
    T best_v = max_violation(in, y);
    T scale = std::max(in.radii.maxCoeff(), T(1));
    for (Eigen::Index k = 0; k < in.anchors.cols(); ++k)
        for (Eigen::Index j = 0; j < in.anchors.cols(); ++j)
            scale = std::max(scale, (in.anchors.col(k) - in.anchors.col(j)).norm());
    for (int it = 1; it <= iters && best_v > T(-1e-9) * scale; ++it) {
        Eigen::Index worst = 0;
        T v = -std::numeric_limits<T>::infinity();
        for (Eigen::Index k = 0; k < in.radii.size(); ++k) {
            const T vk = (y - in.anchors.col(k)).norm() - in.radii[k];
            if (vk > v) {
                v = vk;
                worst = k;
            }
        }
        const util::vec2_type<T> diff = y - in.anchors.col(worst);
        const T nrm = diff.norm();
        const util::vec2_type<T> g = nrm > T(0) ? util::vec2_type<T>(diff / nrm)
                                                : util::vec2_type<T>(T(1), T(0));
        y -= (scale / static_cast<T>(it)) * g;
        const T vy = max_violation(in, y);
        if (vy < best_v) {
            best_v = vy;
            best_y = y;
        }
    }
    return {best_y, best_v};
}

}  // namespace detail

/// Phase-I: a point inside every disk, or nullopt when the multi-start
/// subgradient search certifies none was found.
template <class T>
std::optional<util::vec2_type<T>> feasible_point(const LocationInput<T>& in, int starts = 16,
                                                 int iters = 400) {
    if ((in.radii.array() < T(0)).any()) return std::nullopt;
    const util::vec2_type<T> centroid = in.anchors.rowwise().mean();
    auto [best_y, best_v] = detail::subgradient_phase1<T>(in, centroid, iters);
    if (best_v <= T(0)) return best_y;

    util::vec2_type<T> lo = in.anchors.rowwise().minCoeff();
    util::vec2_type<T> hi = in.anchors.rowwise().maxCoeff();
    util::SplitMix64 rng(0x10c5eedULL); // fixed start ordering, reproducible
    for (int s = 1; s < starts; ++s) {
        util::vec2_type<T> y0(static_cast<T>(rng.uniform(lo.x(), hi.x())),
                              static_cast<T>(rng.uniform(lo.y(), hi.y())));
        auto [ys, vs] = detail::subgradient_phase1<T>(in, y0, iters);
        if (vs < best_v) {
            best_v = vs;
            best_y = ys;
        }
        if (best_v <= T(0)) return best_y;
    }
    return std::nullopt;
}

/// Log-barrier interior-point solve of the placement problem. `warm_start`,
/// when feasible, also acts as an incumbent: the result is never worse than
/// it. Stationarity is checked against the active-disk KKT residual.
template <class T>
LocationResult<T> solve_location(const LocationInput<T>& in,
                                 std::optional<util::vec2_type<T>> warm_start = std::nullopt) {
    using vec2 = util::vec2_type<T>;
    if ((in.radii.array() < T(0)).any())
        return {vec2::Zero(), std::numeric_limits<T>::infinity(), BlockStatus::infeasible};

    const T scale = std::max(in.radii.maxCoeff(), T(1));
    // a warm start sitting exactly on a disk boundary (the coverage circle
    // of the farthest GT, typically) still counts as feasible
    const bool warm_ok = warm_start && detail::max_violation(in, *warm_start) <= T(1e-9) * scale;
    std::optional<vec2> start;
    if (warm_ok) start = *warm_start;
    if (!start) start = feasible_point(in);
    if (!start)
        return {vec2::Zero(), std::numeric_limits<T>::infinity(), BlockStatus::infeasible};

    const Eigen::Index n = in.C.size();
    const T h2 = in.height * in.height;

    auto slacks_ok = [&](const vec2& y) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const T g = in.radii[k] * in.radii[k] - (y - in.anchors.col(k)).squaredNorm();
            if (!(g > T(0))) return false;
        }
        return true;
    };
    auto barrier_value = [&](const vec2& y, T mu) -> T {
        T val = loc_objective_grad(in, y).first;
        for (Eigen::Index k = 0; k < n; ++k) {
            const T g = in.radii[k] * in.radii[k] - (y - in.anchors.col(k)).squaredNorm();
            if (!(g > T(0))) return std::numeric_limits<T>::infinity();
            val -= mu * std::log(g);
        }
        return val;
    };

    vec2 y = *start;
    // nudge boundary starts inward so the first barrier evaluation is finite
    if (!slacks_ok(y)) {
        const vec2 centroid = in.anchors.rowwise().mean();
        for (T t = T(1e-9); t <= T(0.25); t *= T(4)) {
            const vec2 cand = y + t * (centroid - y);
            if (slacks_ok(cand)) {
                y = cand;
                break;
            }
        }
    }

    const T f0 = loc_objective_grad(in, y).first;
    if (!slacks_ok(y) || !(f0 > T(0))) {
        // single-point feasible set or an all-zero objective: nothing to polish
        return {y, f0, BlockStatus::ok};
    }

    T mu = std::max(f0 / static_cast<T>(10 * n), std::numeric_limits<T>::min());
    const T mu_floor = T(1e-12) * f0; // boundary optima carry an O(K mu) gap
    for (; mu > mu_floor; mu /= T(10)) {
        for (int newton_it = 0; newton_it < 80; ++newton_it) {
            vec2 grad = vec2::Zero();
            Eigen::Matrix<T, 2, 2> hess = Eigen::Matrix<T, 2, 2>::Zero();
            for (Eigen::Index k = 0; k < n; ++k) {
                const vec2 diff = y - in.anchors.col(k);
                const T s = diff.squaredNorm() + h2;
                const T pw = std::pow(s, in.alpha / T(2) - T(1));
                grad += (in.C[k] * in.alpha * pw) * diff;
                hess += (in.C[k] * in.alpha * pw) * Eigen::Matrix<T, 2, 2>::Identity();
                if (in.alpha != T(2))
                    hess += (in.C[k] * in.alpha * (in.alpha - T(2)) *
                             std::pow(s, in.alpha / T(2) - T(2))) *
                            (diff * diff.transpose());
                const T g = in.radii[k] * in.radii[k] - diff.squaredNorm();
                grad += (T(2) * mu / g) * diff;
                hess += (T(2) * mu / g) * Eigen::Matrix<T, 2, 2>::Identity() +
                        (T(4) * mu / (g * g)) * (diff * diff.transpose());
            }
            const T gnorm = grad.norm();
            if (gnorm <= T(1e-10) * (T(1) + f0) / scale) break;

            vec2 step = -hess.ldlt().solve(grad);
            if (!step.allFinite()) step = -grad * (scale * scale / (T(1) + f0));
            const T fy = barrier_value(y, mu);
            T t = T(1);
            const T slope = grad.dot(step);
            bool moved = false;
            for (int bt = 0; bt < 60; ++bt, t *= T(0.5)) {
                const vec2 cand = y + t * step;
                if (barrier_value(cand, mu) <= fy + T(1e-4) * t * slope) {
                    y = cand;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
    }

    T objective = loc_objective_grad(in, y).first;
    // keep the incumbent if the barrier path ended (numerically) above it
    if (warm_ok) {
        const T f_warm = loc_objective_grad(in, *warm_start).first;
        if (f_warm < objective) {
            y = *warm_start;
            objective = f_warm;
        }
    }
    return {y, objective, BlockStatus::ok};
}

/// KKT residual at y: || grad f + sum_{active k} nu_k grad g_k || with
/// nu >= 0 fit by least squares over the active disks. Zero (to tolerance)
/// certifies first-order optimality of the constrained problem.
template <class T>
T kkt_residual(const LocationInput<T>& in, const util::vec2_type<T>& y, T active_tol = T(1e-5)) {
    using vec2 = util::vec2_type<T>;
    const vec2 grad = loc_objective_grad(in, y).second;
    std::vector<vec2> normals;
    for (Eigen::Index k = 0; k < in.radii.size(); ++k) {
        const vec2 diff = y - in.anchors.col(k);
        if (diff.norm() >= in.radii[k] * (T(1) - active_tol))
            normals.push_back(T(2) * diff); // gradient of ||y-x_k||^2 - r_k^2
    }
    T best = grad.norm();
    // at most two disks are generically active in 2-D; scan the tiny cone
    for (std::size_t i = 0; i < normals.size(); ++i) {
        const T denom = normals[i].squaredNorm();
        if (denom <= T(0)) continue;
        const T nu = std::max(T(0), -grad.dot(normals[i]) / denom);
        best = std::min(best, (grad + nu * normals[i]).norm());
        for (std::size_t j = i + 1; j < normals.size(); ++j) {
            Eigen::Matrix<T, 2, 2> nmat;
            nmat.col(0) = normals[i];
            nmat.col(1) = normals[j];
            const Eigen::Matrix<T, 2, 2> gram = nmat.transpose() * nmat;
            const util::vec2_type<T> rhs = -nmat.transpose() * grad;
            util::vec2_type<T> nu2 = gram.ldlt().solve(rhs);
            nu2 = nu2.cwiseMax(T(0));
            best = std::min(best, (grad + nmat * nu2).norm());
        }
    }
    return best;
}

}  // namespace location
}  // namespace uavpm
