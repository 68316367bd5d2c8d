#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include <uavpm/altbeam.hpp>
#include <uavpm/util/rng.hpp>

#include "oracles.hpp"

using namespace uavpm;
using namespace uavpm::altbeam;
using oracles::SplitMix64;
using vec = util::vec_type<double>;

namespace {
constexpr double kHalfPi = std::numbers::pi / 2;

vec make_vec(std::initializer_list<double> values) {
    vec v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

AltBeamInput<double> make_input(vec A, vec D, vec caps, double h_min = 50.0, double h_max = 500.0,
                                double theta_lo = 1e-3, double theta_hi = kHalfPi - 1e-3,
                                double alpha = 2.0) {
    AltBeamInput<double> in;
    in.A = std::move(A);
    in.D = std::move(D);
    in.caps = std::move(caps);
    in.d_max = in.D.maxCoeff();
    in.h_min = h_min;
    in.h_max = h_max;
    in.theta_lo = theta_lo;
    in.theta_hi = theta_hi;
    in.alpha = alpha;
    return in;
}
}  // namespace

TEST_SUITE_BEGIN("altbeam");

TEST_CASE("h1 and h2 analytic behavior") {
    CHECK(h1(1e-12) == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
    CHECK(std::abs(h1(kHalfPi - 1e-9)) <= 1e-8);
    CHECK(h2(1e-12) >= 0.0);
    CHECK(h2(1e-12) <= 1e-50);
    CHECK_THROWS_AS(h1(0.0), std::domain_error);
    CHECK_THROWS_AS(h1(kHalfPi), std::domain_error);
    CHECK_THROWS_AS(h2(-0.1), std::domain_error);

    // 1e4-point grid: h2 >= 0 and h1 non-decreasing over (0, pi/2)
    const int n = 10000;
    double prev = -2.0 / 3.0;
    for (int i = 1; i < n; ++i) {
        const double x = kHalfPi * i / n;
        CHECK(h2(x) >= 0.0);
        const double v = h1(x);
        CHECK(v >= prev - 1e-9);
        CHECK(v >= -2.0 / 3.0 - 1e-9);
        CHECK(v <= 1e-9);
        prev = v;
    }
}

TEST_CASE("optimal height") {
    CHECK(optimal_height(1e4, std::numbers::pi / 4, 50.0) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(optimal_height(100.0, kHalfPi - 1e-4, 50.0) == 50.0);
    CHECK(optimal_height(0.0, 0.3, 50.0) == 50.0);
    CHECK_THROWS_AS(optimal_height(1.0, 0.0, 50.0), std::domain_error);
}

TEST_CASE("f_k unimodality follows the 2/3 split") {
    const int n = 4000;
    auto pattern_ok = [&](double d_k, double d_max, bool expect_monotone) {
        bool increasing_started = false;
        double prev = f_k(d_k, d_max, 1e-6);
        bool monotone = true;
        for (int i = 1; i <= n; ++i) {
            const double x = 1e-6 + (kHalfPi - 2e-6) * i / n;
            const double v = f_k(d_k, d_max, x);
            if (v > prev * (1 + 1e-14)) increasing_started = true;
            if (increasing_started && v < prev * (1 - 1e-12)) return false; // dipped after rising
            if (v < prev * (1 - 1e-13)) monotone = false;
            prev = v;
        }
        return !expect_monotone || monotone;
    };
    CHECK(pattern_ok(2.0, 1.0, true));          // D_k >= 2/3 d_max: increasing
    CHECK(pattern_ok(2.0 / 3.0, 1.0, true));    // boundary case stays monotone
    CHECK(pattern_ok(0.2, 1.0, false));         // valley then rise
    CHECK(pattern_ok(0.0, 1.0, false));         // pure decrease, never dips after rising
}

TEST_CASE("theta power interval") {
    SUBCASE("inactive cap covers the whole domain") {
        const auto iv = theta_power_interval(1.0, 0.5, 1.0, 1e12);
        CHECK_FALSE(iv.empty);
        CHECK(iv.lo == 0.0);
        CHECK(iv.hi == kHalfPi);
    }
    SUBCASE("zero-rate GT is unconstrained") {
        const auto iv = theta_power_interval(0.0, 0.5, 1.0, 1e-30);
        CHECK_FALSE(iv.empty);
        CHECK(iv.lo == 0.0);
        CHECK(iv.hi == kHalfPi);
    }
    SUBCASE("cap below the minimum value is empty") {
        // D_k = 0.2, d_max = 1: valley at the root of 0.2 + h1
        const double x_star = util::bisect_increasing<double>(
            [](double x) { return 0.2 + h1(x); }, 1e-9, kHalfPi - 1e-9, 1e-12);
        const double f_min = f_k(0.2, 1.0, x_star);
        CHECK(theta_power_interval(1.0, 0.2, 1.0, f_min * 0.99).empty);
        const auto iv = theta_power_interval(1.0, 0.2, 1.0, f_min * 1.01);
        CHECK_FALSE(iv.empty);
        CHECK(iv.lo < x_star);
        CHECK(iv.hi > x_star);
        CHECK(f_k(0.2, 1.0, iv.lo) == doctest::Approx(f_min * 1.01).epsilon(1e-6));
        CHECK(f_k(0.2, 1.0, iv.hi) == doctest::Approx(f_min * 1.01).epsilon(1e-6));
    }
    SUBCASE("boundary split D_k = 2/3 d_max is monotone") {
        // the valley collapses to the left end, so only an upper boundary
        const double c = f_k(2.0 / 3.0, 1.0, 0.9);
        const auto iv = theta_power_interval(1.0, 2.0 / 3.0, 1.0, c);
        CHECK_FALSE(iv.empty);
        CHECK(iv.lo == 0.0);
        CHECK(iv.hi == doctest::Approx(0.9).epsilon(1e-7));
    }
    SUBCASE("degenerate near-single-point interval at the grid minimum") {
        // D_k = 0: f = (x cot x)^2 decreases toward 0, minimizer at the
        // right edge of any finite grid
        const int n = 200000; // ~1e-5 step over (0, pi/2)
        double best_x = 0.0, best_f = std::numeric_limits<double>::infinity();
        for (int i = 1; i < n; ++i) {
            const double x = kHalfPi * i / n;
            const double v = f_k(0.0, 1.0, x);
            if (v < best_f) {
                best_f = v;
                best_x = x;
            }
        }
        const auto iv = theta_power_interval(1.0, 0.0, 1.0, best_f);
        CHECK_FALSE(iv.empty);
        CHECK(iv.hi == kHalfPi);
        CHECK(iv.lo == doctest::Approx(best_x).epsilon(1e-4));
        CHECK(iv.hi - iv.lo < 1e-3); // effectively a point at the domain edge
    }
}

TEST_CASE("case 1 closed form") {
    SUBCASE("all GTs under the UAV") {
        auto in = make_input(vec::Constant(3, 1e-12), vec::Zero(3), vec::Constant(3, 0.1));
        const auto r = solve_case1(in);
        CHECK(r.status == BlockStatus::ok);
        CHECK(r.half_beamwidth == in.theta_lo);
        CHECK(r.height == in.h_min);
    }
    SUBCASE("coverage radius equal to h_min") {
        auto in = make_input(vec::Constant(2, 1e-12), vec::Constant(2, 2500.0),
                             vec::Constant(2, 0.1));
        const auto r = solve_case1(in);
        CHECK(r.status == BlockStatus::ok);
        CHECK(r.half_beamwidth == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
    }
    SUBCASE("tiny caps are infeasible") {
        auto in = make_input(vec::Constant(2, 1e-12), vec::Constant(2, 2500.0),
                             vec::Constant(2, 1e-18));
        CHECK(solve_case1(in).status == BlockStatus::infeasible);
    }
}

TEST_CASE("case 2 (alpha = 2) endpoint and root situations") {
    SUBCASE("co-located GTs pin the lower endpoint") {
        // D_k = d_max for all k: s > 0 everywhere
        auto in = make_input(vec::Constant(4, 1e-12), vec::Constant(4, 1e4),
                             vec::Constant(4, 0.1));
        const auto r = solve_case2_alpha2(in);
        CHECK(r.status == BlockStatus::ok);
        const double expected_lo = std::max(in.theta_lo, std::atan(100.0 / in.h_max));
        CHECK(r.half_beamwidth == doctest::Approx(expected_lo).epsilon(1e-9));
    }
    SUBCASE("interior root of the weighted slope") {
        // D = (0, 0, 1), equal weights: root of 1 + 3 h1(theta)
        auto in = make_input(vec::Constant(3, 1.0), make_vec({0.0, 0.0, 1.0}),
                             vec::Constant(3, 1e12), 1e-6, 1e9, 1e-3, kHalfPi - 1e-3);
        const auto r = solve_case2_alpha2(in);
        CHECK(r.status == BlockStatus::ok);
        CHECK(r.half_beamwidth == doctest::Approx(1.2729796060899279).epsilon(1e-6));

        // grid oracle on the reduced objective
        double best_x = 0, best_f = std::numeric_limits<double>::infinity();
        const int n = 200000;
        for (int i = 1; i < n; ++i) {
            const double x = in.theta_lo + (in.theta_hi - in.theta_lo) * i / n;
            const double v = f_k(0.0, 1.0, x) * 2.0 + f_k(1.0, 1.0, x);
            if (v < best_f) {
                best_f = v;
                best_x = x;
            }
        }
        CHECK(r.half_beamwidth == doctest::Approx(best_x).epsilon(1e-4));
        CHECK(r.objective == doctest::Approx(best_f).epsilon(1e-8));
    }
    SUBCASE("weighted slope differs from the unweighted one") {
        // one heavy terminal under the UAV drags the optimum to a wider
        // beam than equal weights would
        auto in = make_input(make_vec({100.0, 1.0}), make_vec({0.0, 1.0}),
                             vec::Constant(2, 1e12), 1e-6, 1e9, 1e-3, kHalfPi - 1e-3);
        const auto r = solve_case2_alpha2(in);
        CHECK(r.status == BlockStatus::ok);
        double best_x = 0, best_f = std::numeric_limits<double>::infinity();
        const int n = 400000;
        for (int i = 1; i < n; ++i) {
            const double x = in.theta_lo + (in.theta_hi - in.theta_lo) * i / n;
            const double v = 100.0 * f_k(0.0, 1.0, x) + f_k(1.0, 1.0, x);
            if (v < best_f) {
                best_f = v;
                best_x = x;
            }
        }
        CHECK(r.half_beamwidth == doctest::Approx(best_x).epsilon(1e-4));
        CHECK(r.objective == doctest::Approx(best_f).epsilon(1e-8));
    }
    SUBCASE("single GT under the UAV leaves no case-2 region") {
        auto in = make_input(vec::Constant(1, 1e-12), vec::Zero(1), vec::Constant(1, 0.1));
        CHECK(solve_case2_alpha2(in).status == BlockStatus::infeasible);
        CHECK(solve_altbeam(in).case_tag == CaseTag::case1);
    }
}

TEST_CASE("general-alpha grid agrees with the alpha=2 path") {
    SplitMix64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        auto in = oracles::random_ab_instance(rng, 5);
        const auto exact = solve_case2_alpha2(in);
        const auto grid = solve_case2_general(in, (in.theta_hi - in.theta_lo) / 2000.0);
        REQUIRE(exact.status == grid.status);
        if (exact.status == BlockStatus::ok)
            CHECK(grid.objective == doctest::Approx(exact.objective).epsilon(1e-6));
    }
}

TEST_CASE("general-alpha grid handles infeasible caps") {
    auto in = make_input(vec::Constant(2, 1.0), vec::Constant(2, 1e4), vec::Constant(2, 1e-30));
    CHECK(solve_case2_general(in, 1e-3).status == BlockStatus::infeasible);
    CHECK(solve_altbeam(in).status == BlockStatus::infeasible);
}

TEST_CASE("joint solve: oracle agreement, descent, and the height rule") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        auto in = oracles::random_ab_instance(rng, 5);
        const auto r = solve_altbeam(in);
        REQUIRE(r.status == BlockStatus::ok);

        // height rule
        const double h_rule = std::max(std::sqrt(in.d_max) / std::tan(r.half_beamwidth), in.h_min);
        CHECK(std::abs(r.height - h_rule) <= 1e-9 * std::max(1.0, h_rule));

        // every constraint with scaled slack >= -1e-9
        CHECK(oracles::ab_feasible(in, r.height, r.half_beamwidth * (1 + 1e-12)));

        // never above the plain 2-D grid minimum
        const auto grid = oracles::ab_grid2d(in, 200, 200);
        REQUIRE(grid.feasible);
        CHECK(r.objective <= grid.objective * (1 + 1e-9));

        // within 1e-3 of the polished column oracle
        const auto ref = oracles::ab_column_scan(in, 200);
        REQUIRE(ref.feasible);
        CHECK(r.objective == doctest::Approx(ref.objective).epsilon(1e-3));

        // descent against random feasible points
        for (int s = 0; s < 20; ++s) {
            const double th = rng.uniform(in.theta_lo, in.theta_hi);
            const double h = rng.uniform(in.h_min, in.h_max);
            if (oracles::ab_feasible(in, h, th))
                CHECK(r.objective <= oracles::ab_objective(in, h, th) * (1 + 1e-9));
        }
    }
}

TEST_CASE("alpha > 2 joint solve stays near the column oracle") {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        auto in = oracles::random_ab_instance(rng, 5, 3.0);
        const auto r = solve_altbeam(in);
        REQUIRE(r.status == BlockStatus::ok);
        const auto ref = oracles::ab_column_scan(in, 2000);
        REQUIRE(ref.feasible);
        CHECK(r.objective == doctest::Approx(ref.objective).epsilon(1e-4));
        CHECK(oracles::ab_feasible(in, r.height, r.half_beamwidth * (1 + 1e-12)));
    }
}

TEST_CASE("ties break toward case 1") {
    // spread GTs with the case-2 slope still negative at the coverage
    // corner: both cases meet at theta = arctan(sqrt(d_max)/h_min), and the
    // tie goes to the lower-altitude label
    const double corner = 0.5;
    const double d = std::pow(50.0 * std::tan(corner), 2);
    auto in = make_input(vec::Constant(2, 1e-12), make_vec({0.0, d}), vec::Constant(2, 0.1));
    const auto r = solve_altbeam(in);
    CHECK(r.status == BlockStatus::ok);
    CHECK(r.case_tag == CaseTag::case1);
    CHECK(r.half_beamwidth == doctest::Approx(corner).epsilon(1e-12));
    CHECK(r.height == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_SUITE_END();
