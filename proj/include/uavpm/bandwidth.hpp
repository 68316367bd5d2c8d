#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <uavpm/model.hpp>
#include <uavpm/util/types.hpp>

// Bandwidth subproblem: with the placement fixed, the per-GT power is
// F_k u_k(w_k) with u_k(x) = x 2^(R_k/x) - x convex decreasing, so the
// power caps become per-GT bandwidth floors and the budget-constrained
// optimum comes out of the KKT system in closed form, parameterized by the
// single dual variable lambda tuned by bisection.
namespace uavpm {
namespace bandwidth {

/// u_k(x) = x 2^(R/x) - x: the per-GT power normalized by F_k, strictly
/// decreasing toward R ln 2.
template <class T>
T u_k(T x, T rate) {
    if (!(x > T(0))) throw std::domain_error("u_k: x must be > 0");
    return x * pow2m1(rate / x);
}

/// Inverse of u_k by bisection; t must exceed the horizontal asymptote
/// R ln 2 for a finite bandwidth to exist.
template <class T>
T u_k_inv(T t, T rate, T rel_tol = T(1e-12)) {
    if (!(rate > T(0))) return T(0);
    const T asymptote = rate * std::numbers::ln2_v<T>;
    if (!(t > asymptote)) throw std::domain_error("u_k_inv: target at or below R ln 2");
    T lo = rate, hi = rate;
    for (int g = 0; u_k(lo, rate) < t && g < 2100; ++g) lo /= T(2);
    for (int g = 0; u_k(hi, rate) > t && g < 2100; ++g) hi *= T(2);
    for (int it = 0; it < 200 && hi - lo > rel_tol * hi; ++it) {
        const T mid = T(0.5) * (lo + hi);
        (u_k(mid, rate) > t ? lo : hi) = mid;
    }
    return T(0.5) * (lo + hi);
}

/// u(x) = x e^x - e^x + 1 on x >= 0: strictly increasing from 0; the shape
/// function of the KKT stationarity condition.
template <class T>
T u(T x) {
    if (!(x >= T(0))) throw std::domain_error("u: x must be >= 0");
    const T ex = std::exp(x);
    return x * ex - ex + T(1);
}

template <class T>
T u_inv(T t, T rel_tol = T(1e-15)) {
    if (!(t >= T(0))) throw std::domain_error("u_inv: t must be >= 0");
    if (t == T(0)) return T(0);
    T lo = T(0), hi = T(1);
    while (u(hi) < t) hi *= T(2);
    for (int it = 0; it < 200 && hi - lo > rel_tol * hi; ++it) {
        const T mid = T(0.5) * (lo + hi);
        (u(mid) < t ? lo : hi) = mid;
    }
    return T(0.5) * (lo + hi);
}

template <class ValueType>
struct BandwidthInput {
    using value_t = ValueType;
    using vec_t = util::vec_type<value_t>;

    vec_t F;       // a * Theta^2 (||y - x_k||^2 + H^2)^(alpha/2)
    vec_t rates;   // R_k, bits/s
    vec_t caps;    // P_k, watts
    value_t budget; // B, hertz

    static BandwidthInput from(const Scenario<value_t>& scn, const Placement<value_t>& pl) {
        BandwidthInput in;
        const Eigen::Index n = scn.size();
        in.F.resize(n);
        in.rates.resize(n);
        in.caps.resize(n);
        in.budget = scn.total_bandwidth;
        const value_t a = scn.power_coeff();
        const value_t theta2 = pl.half_beamwidth * pl.half_beamwidth;
        const value_t h2 = pl.height * pl.height;
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& gt = scn.gts[static_cast<std::size_t>(k)];
            const value_t d2 = (pl.y - gt.position).squaredNorm();
            in.F[k] = a * theta2 * std::pow(d2 + h2, scn.pathloss_exp / value_t(2));
            in.rates[k] = gt.min_rate;
            in.caps[k] = gt.max_power;
        }
        return in;
    }
};

template <class ValueType>
struct BandwidthResult {
    util::vec_type<ValueType> w;
    ValueType lambda; // dual of the budget constraint; 0 sentinel for all-zero rates
    BlockStatus status;
};

template <class ValueType>
struct FloorResult {
    util::vec_type<ValueType> W;
    BlockStatus status;
};

/// Per-GT bandwidth floors W_k = u_k^{-1}(P_k / F_k): the least bandwidth
/// at which the power cap can be respected. Infeasible when some cap sits
/// at or below the u_k asymptote, or the floors already exceed the budget.
template <class T>
FloorResult<T> floor_W(const BandwidthInput<T>& in) {
    FloorResult<T> out{util::vec_type<T>::Zero(in.F.size()), BlockStatus::ok};
    for (Eigen::Index k = 0; k < in.F.size(); ++k) {
        if (!(in.rates[k] > T(0))) continue;
        const T target = in.caps[k] / in.F[k];
        if (!(target > in.rates[k] * std::numbers::ln2_v<T>)) {
            out.status = BlockStatus::infeasible;
            return out;
        }
        out.W[k] = u_k_inv(target, in.rates[k]);
    }
    if (out.W.sum() > in.budget * (T(1) + T(1e-12))) out.status = BlockStatus::infeasible;
    return out;
}

/// Total bandwidth claimed at dual value lambda:
/// sum_k max((ln 2) R_k / u^{-1}(lambda / F_k), W_k); strictly decreasing
/// wherever some GT is off its floor.
template <class T>
T hat_u(T lambda, const BandwidthInput<T>& in, const util::vec_type<T>& W) {
    if (!(lambda > T(0))) throw std::domain_error("hat_u: lambda must be > 0");
    T total = T(0);
    for (Eigen::Index k = 0; k < in.F.size(); ++k) {
        if (!(in.rates[k] > T(0))) continue;
        const T z = u_inv(lambda / in.F[k]);
        const T unconstrained = in.rates[k] * std::numbers::ln2_v<T> / z;
        total += std::max(unconstrained, W[k]);
    }
    return total;
}

/// KKT solve of the bandwidth subproblem: bisect lambda until the claimed
/// bandwidth meets the budget, then read w off the stationarity condition.
template <class T>
BandwidthResult<T> solve_bandwidth(const BandwidthInput<T>& in, T budget_rel_tol = T(1e-9)) {
    const Eigen::Index n = in.F.size();
    auto floors = floor_W(in);
    if (floors.status != BlockStatus::ok)
        return {util::vec_type<T>::Zero(n), T(0), BlockStatus::infeasible};

    if (!(in.rates.maxCoeff() > T(0)))
        return {floors.W, T(0), BlockStatus::ok}; // all-zero rates: any split works, spend nothing

    auto w_of = [&](T lambda) {
        util::vec_type<T> w = floors.W;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (!(in.rates[k] > T(0))) continue;
            const T z = u_inv(lambda / in.F[k]);
            w[k] = std::max(in.rates[k] * std::numbers::ln2_v<T> / z, floors.W[k]);
        }
        return w;
    };

    const T floor_sum = floors.W.sum();
    if (in.budget - floor_sum <= T(1e-12) * in.budget) {
        // budget fully consumed by the floors; lambda is pinned by the
        // largest floor stationarity value
        T lambda = T(0);
        for (Eigen::Index k = 0; k < n; ++k)
            if (in.rates[k] > T(0))
                lambda = std::max(lambda, in.F[k] * u(in.rates[k] * std::numbers::ln2_v<T> / floors.W[k]));
        return {floors.W, lambda, BlockStatus::ok};
    }

    T lambda_lo = T(1e-30);
    T lambda_hi = T(1);
    int grow = 0;
    while (hat_u(lambda_hi, in, floors.W) > in.budget && grow++ < 2000) lambda_hi *= T(2);
    while (hat_u(lambda_lo, in, floors.W) < in.budget && lambda_lo > T(1e-300) && grow++ < 2000)
        lambda_lo /= T(2);

    T lambda = lambda_hi;
    for (int it = 0; it < 500; ++it) {
        lambda = std::sqrt(lambda_lo * lambda_hi); // geometric mid: lambda spans decades
        const T claimed = hat_u(lambda, in, floors.W);
        if (std::abs(claimed - in.budget) <= budget_rel_tol * in.budget) break;
        (claimed > in.budget ? lambda_lo : lambda_hi) = lambda;
        if (lambda_hi - lambda_lo <= T(1e-15) * lambda_hi) break;
    }

    return {w_of(lambda), lambda, BlockStatus::ok};
}

/// Subproblem objective sum_k F_k w_k (2^(R_k/w_k) - 1); +inf when some
/// positive demand has zero bandwidth.
template <class T>
T power_of(const BandwidthInput<T>& in, const util::vec_type<T>& w) {
    T total = T(0);
    for (Eigen::Index k = 0; k < in.F.size(); ++k) {
        if (!(in.rates[k] > T(0))) continue;
        if (!(w[k] > T(0))) return std::numeric_limits<T>::infinity();
        total += in.F[k] * u_k(w[k], in.rates[k]);
    }
    return total;
}

}  // namespace bandwidth
}  // namespace uavpm
