#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <uavpm/util/types.hpp>

// Link-budget model for the uplink of a single rotary-wing UAV serving K
// ground terminals through a symmetric directional antenna. Everything is
// kept in linear SI units (watts, hertz, meters, radians); dBm exists only
// at the ingestion/report boundary.
namespace uavpm {

/// 2^z - 1; expm1-based below the cancellation range of exp2(z) - 1.
template <class T>
T pow2m1(T z) {
    if (z < T(0.25)) return std::expm1(std::numbers::ln2_v<T> * z);
    return std::exp2(z) - T(1);
}

template <class T>
T dbm_to_watt(T dbm) {
    return std::pow(T(10), (dbm - T(30)) / T(10));
}

template <class T>
T watt_to_dbm(T watt) {
    return T(10) * std::log10(watt) + T(30);
}

template <class ValueType>
struct GroundTerminal {
    using value_t = ValueType;
    using vec2_t = util::vec2_type<value_t>;

    vec2_t position;   // meters, GT height is zero
    value_t min_rate;  // bits/s
    value_t max_power; // watts
};

template <class ValueType>
struct Scenario {
    using value_t = ValueType;
    using vec_t = util::vec_type<value_t>;

    std::vector<GroundTerminal<value_t>> gts;
    value_t total_bandwidth;            // hertz
    value_t noise_density;              // watts/hertz
    value_t ref_gain;                   // channel gain at 1 m
    value_t antenna_const = value_t(2.2846);
    value_t pathloss_exp = value_t(2);
    value_t h_min;                      // meters
    value_t h_max;                      // meters
    value_t theta_min = value_t(0);     // radians
    value_t theta_max;                  // radians, < pi/2
    value_t theta_floor = value_t(1e-3);// positive clamp on the beam lower bound

    Eigen::Index size() const { return static_cast<Eigen::Index>(gts.size()); }

    // sigma^2 / (g0 * G0): the factor every per-GT power is proportional to.
    value_t power_coeff() const { return noise_density / (ref_gain * antenna_const); }

    // Working lower bound on the half-beamwidth; theta_min = 0 would make
    // the boresight gain singular.
    value_t theta_lo() const { return std::max(theta_min, theta_floor); }

    void validate() const {
        auto fail = [](const std::string& msg) { throw std::invalid_argument("scenario: " + msg); };
        if (gts.empty()) fail("no ground terminals");
        if (!(total_bandwidth > value_t(0))) fail("total_bandwidth must be > 0");
        if (!(noise_density > value_t(0))) fail("noise_density must be > 0");
        if (!(ref_gain > value_t(0))) fail("ref_gain must be > 0");
        if (!(antenna_const > value_t(0))) fail("antenna_const must be > 0");
        if (!(pathloss_exp >= value_t(2))) fail("pathloss_exp must be >= 2");
        if (!(value_t(0) < h_min && h_min <= h_max)) fail("need 0 < h_min <= h_max");
        if (!(theta_min >= value_t(0))) fail("theta_min must be >= 0");
        if (!(theta_min < theta_max)) fail("need theta_min < theta_max");
        if (!(theta_max < std::numbers::pi_v<value_t> / value_t(2))) fail("theta_max must be < pi/2");
        if (!(theta_floor > value_t(0))) fail("theta_floor must be > 0");
        if (!(theta_lo() < theta_max)) fail("theta_floor leaves an empty beamwidth range");
        for (const auto& gt : gts) {
            if (!gt.position.allFinite()) fail("GT position must be finite");
            if (!(gt.min_rate > value_t(0))) fail("GT min_rate must be > 0");
            if (!(gt.max_power > value_t(0))) fail("GT max_power must be > 0");
        }
    }
};

template <class ValueType>
struct Placement {
    using value_t = ValueType;
    using vec2_t = util::vec2_type<value_t>;

    vec2_t y;               // horizontal UAV location, meters
    value_t height;         // meters
    value_t half_beamwidth; // radians
};

template <class ValueType>
struct Allocation {
    using value_t = ValueType;
    using vec_t = util::vec_type<value_t>;

    vec_t w; // hertz, one entry per GT
};

enum class SolveStatus { converged, infeasible, iteration_limit };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::infeasible: return "infeasible";
        default: return "iteration-limit";
    }
}

template <class ValueType>
struct IterationRecord {
    int iter;           // full-iteration counter, 1-based
    ValueType objective; // sum power after the block ran, watts
    Block block;
};

template <class ValueType>
struct Solution {
    using value_t = ValueType;

    Placement<value_t> placement;
    Allocation<value_t> allocation;
    util::vec_type<value_t> powers;  // watts
    value_t sum_power;
    std::vector<IterationRecord<value_t>> trace;
    SolveStatus status;
};

/// Directional antenna gain toward (azimuth, elevation). Inside the
/// theta_hb cone the gain is G0 / theta_hb^2; outside it is exactly zero
/// (the sidelobe level is modeled as zero).
template <class T>
T antenna_gain(T theta_hb, T az, T el, T antenna_const = T(2.2846)) {
    if (!(theta_hb > T(0))) throw std::domain_error("antenna_gain: half-beamwidth must be > 0");
    if (az >= T(0) && az <= theta_hb && el >= T(0) && el <= theta_hb)
        return antenna_const / (theta_hb * theta_hb);
    return T(0);
}

/// LoS channel gain between GT k and a UAV hovering at `y`, `height`.
template <class T, class Derived>
T channel_gain(const Scenario<T>& scn, const Eigen::MatrixBase<Derived>& y, T height, Eigen::Index k) {
    if (!(height > T(0))) throw std::domain_error("channel_gain: height must be > 0");
    const T d2 = (y - scn.gts[static_cast<std::size_t>(k)].position).squaredNorm();
    return scn.ref_gain / std::pow(d2 + height * height, scn.pathloss_exp / T(2));
}

/// Transmit power at which GT k meets its rate demand exactly over
/// bandwidth w_k. Returns +inf when the demand cannot be met with zero
/// bandwidth; optimizers rank such points as worst instead of throwing.
template <class T>
T required_power(const Scenario<T>& scn, const Placement<T>& pl, T w_k, Eigen::Index k) {
    const auto& gt = scn.gts[static_cast<std::size_t>(k)];
    if (!(gt.min_rate > T(0))) return T(0);
    if (!(w_k > T(0))) return std::numeric_limits<T>::infinity();
    const T d2 = (pl.y - gt.position).squaredNorm();
    const T geo = std::pow(d2 + pl.height * pl.height, scn.pathloss_exp / T(2));
    const T theta2 = pl.half_beamwidth * pl.half_beamwidth;
    return scn.power_coeff() * w_k * pow2m1(gt.min_rate / w_k) * theta2 * geo;
}

/// Achievable uplink rate of GT k at transmit power p_k over bandwidth w_k.
template <class T>
T achievable_rate(const Scenario<T>& scn, const Placement<T>& pl, T w_k, T p_k, Eigen::Index k) {
    if (!(w_k > T(0))) return T(0);
    const T g = channel_gain(scn, pl.y, pl.height, k);
    const T theta2 = pl.half_beamwidth * pl.half_beamwidth;
    const T snr = p_k * g * scn.antenna_const / (w_k * scn.noise_density * theta2);
    return w_k * std::log2(T(1) + snr);
}

template <class T>
util::vec_type<T> required_powers(const Scenario<T>& scn, const Placement<T>& pl, const Allocation<T>& al) {
    util::vec_type<T> p(scn.size());
    for (Eigen::Index k = 0; k < scn.size(); ++k) p[k] = required_power(scn, pl, al.w[k], k);
    return p;
}

template <class T>
T sum_power(const Scenario<T>& scn, const Placement<T>& pl, const Allocation<T>& al) {
    return required_powers(scn, pl, al).sum();
}

template <class ValueType>
struct ConstraintCheck {
    bool pass;
    ValueType worst_violation; // <= 0 means slack; units are the family's natural ones
};

/// Per-family feasibility report for the full problem: power caps, coverage,
/// bandwidth budget, (H, Theta) box bounds, nonnegativity of w.
template <class ValueType>
struct FeasibilityReport {
    ConstraintCheck<ValueType> power_caps;   // watts
    ConstraintCheck<ValueType> coverage;     // meters
    ConstraintCheck<ValueType> budget;       // hertz
    ConstraintCheck<ValueType> box_bounds;   // meters or radians, worst of the four
    ConstraintCheck<ValueType> nonnegativity;// hertz

    bool all_pass() const {
        return power_caps.pass && coverage.pass && budget.pass && box_bounds.pass && nonnegativity.pass;
    }
};

template <class T>
FeasibilityReport<T> check_feasible(const Scenario<T>& scn, const Placement<T>& pl,
                                    const Allocation<T>& al, T rel_tol = T(1e-6)) {
    FeasibilityReport<T> rep{};
    const Eigen::Index n = scn.size();

    // each cap judged at its own scale so tiny caps are not masked
    bool caps_pass = true;
    T worst_cap = -std::numeric_limits<T>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
        const T p = required_power(scn, pl, al.w[k], k);
        const T cap = scn.gts[static_cast<std::size_t>(k)].max_power;
        worst_cap = std::max(worst_cap, p - cap);
        if (p - cap > rel_tol * cap) caps_pass = false;
    }
    rep.power_caps = {caps_pass, worst_cap};

    const T reach = pl.height * std::tan(pl.half_beamwidth);
    T worst_cov = -std::numeric_limits<T>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
        const T d = (pl.y - scn.gts[static_cast<std::size_t>(k)].position).norm();
        worst_cov = std::max(worst_cov, d - reach);
    }
    rep.coverage = {worst_cov <= rel_tol * std::max(T(1), reach), worst_cov};

    const T over_budget = al.w.sum() - scn.total_bandwidth;
    rep.budget = {over_budget <= rel_tol * scn.total_bandwidth, over_budget};

    const T theta_lo = scn.theta_lo();
    const T worst_box = std::max({scn.h_min - pl.height, pl.height - scn.h_max,
                                  theta_lo - pl.half_beamwidth, pl.half_beamwidth - scn.theta_max});
    const bool box_ok = scn.h_min - pl.height <= rel_tol * scn.h_max &&
                        pl.height - scn.h_max <= rel_tol * scn.h_max &&
                        theta_lo - pl.half_beamwidth <= rel_tol &&
                        pl.half_beamwidth - scn.theta_max <= rel_tol;
    rep.box_bounds = {box_ok, worst_box};

    const T worst_neg = n > 0 ? -al.w.minCoeff() : T(0);
    rep.nonnegativity = {worst_neg <= rel_tol * scn.total_bandwidth, worst_neg};
    return rep;
}

}  // namespace uavpm
