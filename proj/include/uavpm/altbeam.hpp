#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <uavpm/model.hpp>
#include <uavpm/util/bisect.hpp>
#include <uavpm/util/types.hpp>

// Altitude/beamwidth subproblem: with the UAV location and the bandwidth
// split fixed, minimize sum power over (H, Theta). The optimal height for a
// given beam is the lowest one that still covers the farthest GT, which
// reduces the search to two one-dimensional cases: H pinned at h_min, and H
// riding the coverage boundary sqrt(D_max)/tan(Theta).
namespace uavpm {
namespace altbeam {

namespace detail {

template <class T>
inline constexpr T domain_lo = T(1e-9);

template <class T>
inline T domain_hi() { return std::numbers::pi_v<T> / T(2) - T(1e-9); }

}  // namespace detail

/// x * cot(x), series-evaluated near zero where cot overflows.
template <class T>
T xcot(T x) {
    if (x < T(1e-6)) return T(1) - x * x / T(3);
    return x / std::tan(x);
}

/// h1(x) = (cot x - x - x cot^2 x) cot x on (0, pi/2): strictly increasing
/// from -2/3 to 0. Its sign drives the monotonicity of the reduced
/// objective along the coverage boundary.
template <class T>
T h1(T x) {
    if (!(x > T(0)) || !(x < std::numbers::pi_v<T> / T(2)))
        throw std::domain_error("h1: x must lie in (0, pi/2)");
    // Direct evaluation loses ~x^-2 digits to cancellation near 0.
    if (x < T(0.02)) {
        const T x2 = x * x;
        return T(-2) / T(3) + T(2) / T(15) * x2 + T(2) / T(63) * x2 * x2;
    }
    const T c = T(1) / std::tan(x);
    return (c - x - x * c * c) * c;
}

/// h2(x) = x + 2x cos^2 x - (3/2) sin 2x, the numerator of h1'; >= 0.
template <class T>
T h2(T x) {
    if (!(x > T(0)) || !(x < std::numbers::pi_v<T> / T(2)))
        throw std::domain_error("h2: x must lie in (0, pi/2)");
    if (x < T(0.05)) {
        const T x2 = x * x;
        return x2 * x2 * x * (T(4) / T(15) - T(16) / T(315) * x2);
    }
    const T c = std::cos(x);
    return x + T(2) * x * c * c - T(1.5) * std::sin(T(2) * x);
}

template <class ValueType>
struct AltBeamInput {
    using value_t = ValueType;
    using vec_t = util::vec_type<value_t>;

    vec_t A;        // a * w_k * (2^(R_k/w_k) - 1), watts per geometry factor
    vec_t D;        // squared horizontal distances to the fixed y, m^2
    value_t d_max;  // max_k D_k
    vec_t caps;     // P_k, watts
    value_t h_min, h_max;
    value_t theta_lo, theta_hi;
    value_t alpha;

    template <class Derived>
    static AltBeamInput from(const Scenario<value_t>& scn, const Eigen::MatrixBase<Derived>& y,
                             const Allocation<value_t>& al) {
        AltBeamInput in;
        const Eigen::Index n = scn.size();
        in.A.resize(n);
        in.D.resize(n);
        in.caps.resize(n);
        const value_t a = scn.power_coeff();
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& gt = scn.gts[static_cast<std::size_t>(k)];
            if (gt.min_rate > value_t(0)) {
                const value_t w = al.w[k];
                in.A[k] = w > value_t(0)
                              ? a * w * pow2m1(gt.min_rate / w)
                              : std::numeric_limits<value_t>::infinity();
            } else {
                in.A[k] = value_t(0);
            }
            in.D[k] = (y - gt.position).squaredNorm();
            in.caps[k] = gt.max_power;
        }
        in.d_max = n > 0 ? in.D.maxCoeff() : value_t(0);
        in.h_min = scn.h_min;
        in.h_max = scn.h_max;
        in.theta_lo = scn.theta_lo();
        in.theta_hi = scn.theta_max;
        in.alpha = scn.pathloss_exp;
        return in;
    }
};

enum class CaseTag { case1, case2 };

template <class ValueType>
struct AltBeamResult {
    ValueType height;
    ValueType half_beamwidth;
    ValueType objective;
    CaseTag case_tag;
    BlockStatus status;

    static AltBeamResult infeasible(CaseTag tag) {
        return {ValueType(0), ValueType(0), std::numeric_limits<ValueType>::infinity(), tag,
                BlockStatus::infeasible};
    }
};

/// Lowest height that keeps every GT inside the beam footprint: the
/// objective grows with H, so this is the optimal height for a given beam.
template <class T>
T optimal_height(T d_max, T theta, T h_min) {
    if (!(theta > T(0)) || !(theta < std::numbers::pi_v<T> / T(2)))
        throw std::domain_error("optimal_height: theta must lie in (0, pi/2)");
    return std::max(std::sqrt(d_max) / std::tan(theta), h_min);
}

/// Subproblem objective sum_k A_k Theta^2 (D_k + H^2)^(alpha/2).
template <class T>
T objective(const AltBeamInput<T>& in, T height, T theta) {
    const T h2_ = height * height;
    T sum = T(0);
    for (Eigen::Index k = 0; k < in.A.size(); ++k)
        sum += in.A[k] * std::pow(in.D[k] + h2_, in.alpha / T(2));
    return sum * theta * theta;
}

template <class T>
bool caps_ok(const AltBeamInput<T>& in, T height, T theta) {
    const T h2_ = height * height;
    const T t2 = theta * theta;
    for (Eigen::Index k = 0; k < in.A.size(); ++k) {
        const T p = in.A[k] * t2 * std::pow(in.D[k] + h2_, in.alpha / T(2));
        if (p > in.caps[k] * (T(1) + T(1e-12))) return false;
    }
    return true;
}

/// Case 1: H = h_min. The objective is increasing in Theta there, so the
/// optimum is the smallest beam that still covers D_max; feasibility then
/// reduces to the power caps and the upper beam bound.
template <class T>
AltBeamResult<T> solve_case1(const AltBeamInput<T>& in) {
    const T theta_cov = std::atan(std::sqrt(in.d_max) / in.h_min);
    const T theta_star = std::max(theta_cov, in.theta_lo);

    T theta_cap = in.theta_hi;
    for (Eigen::Index k = 0; k < in.A.size(); ++k) {
        if (!(in.A[k] > T(0))) continue;
        if (!std::isfinite(in.A[k])) return AltBeamResult<T>::infeasible(CaseTag::case1);
        const T geo = std::pow(in.D[k] + in.h_min * in.h_min, in.alpha / T(2));
        theta_cap = std::min(theta_cap, std::sqrt(in.caps[k] / (in.A[k] * geo)));
    }
    if (theta_star > theta_cap * (T(1) + T(1e-12)))
        return AltBeamResult<T>::infeasible(CaseTag::case1);

    return {in.h_min, theta_star, objective(in, in.h_min, theta_star), CaseTag::case1, BlockStatus::ok};
}

/// f_k(x) = x^2 (D_k + d_max / tan^2 x): the per-GT power geometry along
/// the coverage boundary for alpha = 2.
template <class T>
T f_k(T d_k, T d_max, T x) {
    const T xc = xcot(x);
    return x * x * d_k + d_max * xc * xc;
}

template <class ValueType>
struct ThetaInterval {
    ValueType lo, hi;
    bool empty;
};

/// Interval of beamwidths on which A_k f_k(Theta) <= P_k, exploiting that
/// f_k is either increasing (D_k >= 2/3 d_max) or decreasing-then-increasing
/// with the valley at the root of D_k + d_max h1(x).
template <class T>
ThetaInterval<T> theta_power_interval(T A_k, T D_k, T d_max, T P_k, T eps = T(1e-9)) {
    const T lo = detail::domain_lo<T>;
    const T hi = detail::domain_hi<T>();
    const T half_pi = std::numbers::pi_v<T> / T(2);
    if (!(A_k > T(0))) return {T(0), half_pi, false};

    const T c = P_k / A_k;
    auto f = [&](T x) { return f_k(D_k, d_max, x); };

    // valley of f_k
    T x_min;
    if (d_max <= T(0) || D_k - T(2) / T(3) * d_max >= T(0)) {
        x_min = lo; // monotone increasing
    } else {
        x_min = util::bisect_increasing<T>([&](T x) { return D_k + d_max * h1(x); }, lo, hi, eps);
    }

    const T f_min = f(x_min);
    if (c < f_min && !(std::abs(c - f_min) <= T(1e-12) * std::max(T(1), f_min)))
        return {T(0), T(0), true};

    T theta_lo = T(0);
    if (f(lo) > c) // only possible on the decreasing branch
        theta_lo = util::bisect_increasing<T>([&](T x) { return c - f(x); }, lo, x_min, eps);

    T theta_hi = half_pi;
    if (f(hi) > c)
        theta_hi = util::bisect_increasing<T>([&](T x) { return f(x) - c; }, x_min, hi, eps);

    return {theta_lo, theta_hi, false};
}

/// Case 2 for alpha = 2: H rides the coverage boundary sqrt(d_max)/tan
/// Theta. The caps and bounds collapse to one interval, and the objective's
/// derivative sign is governed by s(Theta) = sum_k A_k D_k +
/// (sum_k A_k) d_max h1(Theta), increasing in Theta, so the optimum is an
/// endpoint or the unique root of s.
template <class T>
AltBeamResult<T> solve_case2_alpha2(const AltBeamInput<T>& in, T eps = T(1e-9)) {
    if (!(in.d_max > T(0))) return AltBeamResult<T>::infeasible(CaseTag::case2);
    if (!in.A.allFinite()) return AltBeamResult<T>::infeasible(CaseTag::case2);

    const T root_d = std::sqrt(in.d_max);
    T lo = std::max(in.theta_lo, std::atan(root_d / in.h_max));
    T hi = std::min(in.theta_hi, std::atan(root_d / in.h_min));
    for (Eigen::Index k = 0; k < in.A.size(); ++k) {
        const auto iv = theta_power_interval(in.A[k], in.D[k], in.d_max, in.caps[k], eps);
        if (iv.empty) return AltBeamResult<T>::infeasible(CaseTag::case2);
        lo = std::max(lo, iv.lo);
        hi = std::min(hi, iv.hi);
    }
    if (lo > hi) return AltBeamResult<T>::infeasible(CaseTag::case2);

    const T weight_sum = in.A.sum();
    T theta_star;
    if (!(weight_sum > T(0))) {
        theta_star = lo; // all-zero rates: objective is identically zero
    } else {
        const T wd = in.A.dot(in.D);
        auto s = [&](T x) { return wd + weight_sum * in.d_max * h1(x); };
        if (s(lo) >= T(0)) theta_star = lo;
        else if (s(hi) < T(0)) theta_star = hi;
        else theta_star = util::bisect_increasing<T>(s, lo, hi, eps);
    }

    const T height = std::min(optimal_height(in.d_max, theta_star, in.h_min), in.h_max);
    return {height, theta_star, objective(in, height, theta_star), CaseTag::case2, BlockStatus::ok};
}

/// Case 2 for general alpha >= 2: grid scan over the feasible beam range
/// with H on the coverage boundary, then a golden-section polish around the
/// best cell.
template <class T>
AltBeamResult<T> solve_case2_general(const AltBeamInput<T>& in, T step) {
    if (!(step > T(0))) throw std::domain_error("solve_case2_general: step must be > 0");
    if (!(in.d_max > T(0))) return AltBeamResult<T>::infeasible(CaseTag::case2);
    if (!in.A.allFinite()) return AltBeamResult<T>::infeasible(CaseTag::case2);

    const T root_d = std::sqrt(in.d_max);
    const T lo = std::max(in.theta_lo, std::atan(root_d / in.h_max));
    const T hi = std::min(in.theta_hi, std::atan(root_d / in.h_min));
    if (lo > hi) return AltBeamResult<T>::infeasible(CaseTag::case2);

    auto height_at = [&](T theta) { return std::max(root_d / std::tan(theta), in.h_min); };
    auto penalized = [&](T theta) {
        const T h = height_at(theta);
        return caps_ok(in, h, theta) ? objective(in, h, theta)
                                     : std::numeric_limits<T>::infinity();
    };

    const int n_cells = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
    T best_theta = std::numeric_limits<T>::quiet_NaN();
    T best_val = std::numeric_limits<T>::infinity();
    for (int i = 0; i <= n_cells; ++i) {
        const T theta = i == n_cells ? hi : lo + step * static_cast<T>(i);
        const T val = penalized(theta);
        if (val < best_val) {
            best_val = val;
            best_theta = theta;
        }
    }
    if (!std::isfinite(best_val)) return AltBeamResult<T>::infeasible(CaseTag::case2);

    const auto polished = util::golden_min<T>(penalized, std::max(lo, best_theta - step),
                                              std::min(hi, best_theta + step), T(1e-10));
    if (polished.value < best_val) {
        best_val = polished.value;
        best_theta = polished.x;
    }
    const T height = std::min(height_at(best_theta), in.h_max);
    return {height, best_theta, best_val, CaseTag::case2, BlockStatus::ok};
}

/// Full subproblem: solve both height cases and keep the better one, with
/// ties broken toward Case 1 (the lower altitude).
template <class T>
AltBeamResult<T> solve_altbeam(const AltBeamInput<T>& in, T step = T(0), T eps = T(1e-9)) {
    if (step <= T(0)) step = (in.theta_hi - in.theta_lo) / T(2000);
    const auto c1 = solve_case1(in);
    const auto c2 = in.alpha == T(2) ? solve_case2_alpha2(in, eps) : solve_case2_general(in, step);
    if (c1.status == BlockStatus::ok && c2.status == BlockStatus::ok)
        return c1.objective <= c2.objective * (T(1) + T(1e-12)) ? c1 : c2; // near-ties go low
    if (c1.status == BlockStatus::ok) return c1;
    if (c2.status == BlockStatus::ok) return c2;
    return AltBeamResult<T>::infeasible(CaseTag::case1);
}

}  // namespace altbeam
}  // namespace uavpm
