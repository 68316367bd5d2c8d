#include <doctest.h>

#include <cmath>
#include <numbers>

#include <uavpm/location.hpp>
#include <uavpm/util/rng.hpp>

#include "oracles.hpp"

using namespace uavpm;
using namespace uavpm::location;
using oracles::SplitMix64;
using vec = util::vec_type<double>;
using vec2 = util::vec2_type<double>;

namespace {

LocationInput<double> two_disk_input(double r0, double r1, double gap) {
    LocationInput<double> in;
    in.C = vec::Constant(2, 1.0);
    in.anchors.resize(2, 2);
    in.anchors.col(0) = vec2(-gap / 2, 0.0);
    in.anchors.col(1) = vec2(gap / 2, 0.0);
    in.radii = vec(2);
    in.radii << r0, r1;
    in.height = 100.0;
    in.alpha = 2.0;
    return in;
}

}  // namespace

TEST_SUITE_BEGIN("location");

TEST_CASE("objective and gradient") {
    SUBCASE("stationary at the single anchor") {
        LocationInput<double> in;
        in.C = vec::Constant(1, 2.5);
        in.anchors.resize(2, 1);
        in.anchors.col(0) = vec2(3.0, -4.0);
        in.radii = vec::Constant(1, 100.0);
        in.height = 10.0;
        in.alpha = 2.0;
        const auto [val, grad] = loc_objective_grad(in, vec2(3.0, -4.0));
        CHECK(val == doctest::Approx(2.5 * 100.0));
        CHECK(grad.norm() == 0.0);
    }
    SUBCASE("alpha = 2 collapses to a quadratic") {
        SplitMix64 rng(3);
        auto in = oracles::random_loc_instance(rng, 4, 2.0);
        const vec2 y(25.0, -60.0);
        const auto [val, grad] = loc_objective_grad(in, y);
        double expect = 0.0;
        vec2 expect_grad = vec2::Zero();
        for (int k = 0; k < 4; ++k) {
            expect += in.C[k] * ((y - in.anchors.col(k)).squaredNorm() + in.height * in.height);
            expect_grad += 2.0 * in.C[k] * (y - in.anchors.col(k));
        }
        CHECK(val == doctest::Approx(expect).epsilon(1e-14));
        CHECK((grad - expect_grad).norm() <= 1e-14 * expect_grad.norm());
    }
    SUBCASE("central finite differences across pathloss exponents") {
        SplitMix64 rng(5);
        for (double alpha : {2.0, 2.5, 3.0, 4.0}) {
            auto in = oracles::random_loc_instance(rng, 5, alpha);
            for (int s = 0; s < 10; ++s) {
                const vec2 y(rng.uniform(-200, 200), rng.uniform(-200, 200));
                const auto grad = loc_objective_grad(in, y).second;
                const double h = 1e-4;
                for (int axis = 0; axis < 2; ++axis) {
                    vec2 e = vec2::Zero();
                    e[axis] = h;
                    const double fd = (loc_objective_grad(in, y + e).first -
                                       loc_objective_grad(in, y - e).first) /
                                      (2 * h);
                    CHECK(grad[axis] == doctest::Approx(fd).epsilon(1e-5));
                }
            }
        }
    }
}

TEST_CASE("phase-I feasibility search") {
    SUBCASE("common centroid") {
        auto in = two_disk_input(10.0, 10.0, 10.0);
        const auto y = feasible_point(in);
        REQUIRE(y.has_value());
        CHECK(oracles::loc_feasible(in, *y));
    }
    SUBCASE("disjoint disks") {
        auto in = two_disk_input(4.0, 4.0, 10.0);
        CHECK_FALSE(feasible_point(in).has_value());
    }
    SUBCASE("constructed nonempty intersections") {
        SplitMix64 rng(9);
        for (int trial = 0; trial < 20; ++trial) {
            LocationInput<double> in;
            const int k = 3;
            in.C = vec::Constant(k, 1.0);
            in.anchors.resize(2, k);
            in.radii = vec(k);
            const vec2 seed_pt(rng.uniform(-100, 100), rng.uniform(-100, 100));
            for (int i = 0; i < k; ++i) {
                in.anchors.col(i) = vec2(rng.uniform(-300, 300), rng.uniform(-300, 300));
                const double need = (seed_pt - in.anchors.col(i)).norm();
                in.radii[i] = need + rng.uniform(0.5, 50.0);
            }
            in.height = 100.0;
            in.alpha = 2.0;
            const auto y = feasible_point(in);
            REQUIRE(y.has_value());
            CHECK(oracles::loc_feasible(in, *y));
        }
    }
}

TEST_CASE("solve_location") {
    SUBCASE("single anchor with a generous radius") {
        LocationInput<double> in;
        in.C = vec::Constant(1, 3.0);
        in.anchors.resize(2, 1);
        in.anchors.col(0) = vec2(7.0, 9.0);
        in.radii = vec::Constant(1, 500.0);
        in.height = 120.0;
        in.alpha = 2.0;
        const auto r = solve_location(in);
        REQUIRE(r.status == BlockStatus::ok);
        CHECK((r.y - vec2(7.0, 9.0)).norm() < 1e-3);
        CHECK(r.objective == doctest::Approx(3.0 * 120.0 * 120.0).epsilon(1e-9));
    }
    SUBCASE("two equal anchors meet at the midpoint") {
        auto in = two_disk_input(500.0, 500.0, 80.0);
        const auto r = solve_location(in);
        REQUIRE(r.status == BlockStatus::ok);
        CHECK(std::abs(r.y.x()) < 1e-3);
        CHECK(std::abs(r.y.y()) < 1e-3);
    }
    SUBCASE("unreachable power cap reports infeasible immediately") {
        auto in = two_disk_input(500.0, 500.0, 80.0);
        in.radii[1] = -1.0; // marked by the builder when E_k < H^2
        CHECK(solve_location(in).status == BlockStatus::infeasible);
    }
    SUBCASE("grid oracle on random instances") {
        SplitMix64 rng(13);
        for (int trial = 0; trial < 10; ++trial) {
            auto in = oracles::random_loc_instance(rng, 5);
            const auto r = solve_location(in);
            REQUIRE(r.status == BlockStatus::ok);
            const auto grid = oracles::loc_grid(in, 400);
            REQUIRE(grid.found);
            CHECK(r.objective <= grid.objective * (1 + 1e-9));
            CHECK(r.objective == doctest::Approx(grid.objective).epsilon(1e-3));
            CHECK(oracles::loc_feasible(in, r.y, 1e-6));
            CHECK(kkt_residual(in, r.y) <= 1e-6 * (1.0 + std::abs(r.objective)));
        }
    }
    SUBCASE("warm start is an incumbent: never worse than a feasible input") {
        SplitMix64 rng(17);
        for (int trial = 0; trial < 10; ++trial) {
            auto in = oracles::random_loc_instance(rng, 4);
            // shrink radii so the constraints actually bite
            in.radii.setConstant(in.radii[0] * rng.uniform(0.35, 0.6));
            const auto start = feasible_point(in);
            if (!start) continue;
            const auto r = solve_location<double>(in, *start);
            REQUIRE(r.status == BlockStatus::ok);
            CHECK(r.objective <= oracles::loc_objective(in, *start) * (1 + 1e-12));
            CHECK(oracles::loc_feasible(in, r.y, 1e-6));
        }
    }
}

TEST_CASE("objective is convex along random segments") {
    SplitMix64 rng(19);
    auto in = oracles::random_loc_instance(rng, 5, 3.0);
    for (int s = 0; s < 50; ++s) {
        const vec2 y1(rng.uniform(-300, 300), rng.uniform(-300, 300));
        const vec2 y2(rng.uniform(-300, 300), rng.uniform(-300, 300));
        const double t = rng.uniform();
        const double lhs = oracles::loc_objective(in, t * y1 + (1 - t) * y2);
        const double rhs = t * oracles::loc_objective(in, y1) +
                           (1 - t) * oracles::loc_objective(in, y2);
        CHECK(lhs <= rhs + 1e-9);
    }
}

TEST_SUITE_END();
