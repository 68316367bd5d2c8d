#pragma once

#include <cmath>
#include <limits>
#include <utility>

namespace uavpm {
namespace util {

/// Root of a non-decreasing function on [lo, hi].
/// Returns lo if f(lo) >= 0, hi if f(hi) <= 0, otherwise bisects until the
/// bracket width drops below xtol_abs + xtol_rel * |mid|.
template <class T, class F>
T bisect_increasing(F&& f, T lo, T hi, T xtol_abs, T xtol_rel = T(0), int max_iter = 200) {
    if (f(lo) >= T(0)) return lo;
    if (f(hi) <= T(0)) return hi;
    for (int it = 0; it < max_iter; ++it) {
        const T mid = T(0.5) * (lo + hi);
        if (hi - lo <= xtol_abs + xtol_rel * std::abs(mid)) return mid;
        if (f(mid) < T(0)) lo = mid;
        else hi = mid;
    }
    return T(0.5) * (lo + hi);
}

template <class T>
struct MinPoint {
    T x;
    T value;
};

/// Golden-section minimization on [lo, hi]. Tolerates +inf values (used to
/// encode infeasible probes); returns the best point actually evaluated,
/// which includes both endpoints.
template <class T, class F>
MinPoint<T> golden_min(F&& f, T lo, T hi, T xtol, int max_iter = 200) {
    static const T invphi = (std::sqrt(T(5)) - T(1)) / T(2);
    MinPoint<T> best{lo, f(lo)};
    const T fhi = f(hi);
    if (fhi < best.value) best = {hi, fhi};

    T a = lo, b = hi;
    T x1 = b - invphi * (b - a);
    T x2 = a + invphi * (b - a);
    T f1 = f(x1), f2 = f(x2);
    if (f1 < best.value) best = {x1, f1};
    if (f2 < best.value) best = {x2, f2};
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
            if (f1 < best.value) best = {x1, f1};
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
            if (f2 < best.value) best = {x2, f2};
        }
    }
    return best;
}

}  // namespace util
}  // namespace uavpm
