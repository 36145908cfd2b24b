#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pmrhc/rfop.hpp"

using namespace pmrhc;

TEST_CASE("delta_h examples") {
    const double f1[] = {1, 0, 1}, g1[] = {1, 1};
    CHECK(delta_h(f1, g1) == doctest::Approx(4.0));
    const double f2[] = {1, 1}, g2[] = {1, 1};
    CHECK(delta_h(f2, g2) == 0.0);
    const double f3[] = {0, 0, -1}, g3[] = {1};
    CHECK(delta_h(f3, g3) == doctest::Approx(-2.0));
    const double f4[] = {0, 0, 0, 1};
    CHECK_THROWS(delta_h(f4, g1));
}

TEST_CASE("minimize_segment examples") {
    SegmentRestriction h{{1, 0, 1}, {1, 1}, 0.0, 2.0};
    auto m = minimize_segment(h);
    CHECK(m.r == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
    CHECK(m.value == doctest::Approx(2.0 * std::sqrt(2.0) - 2.0).epsilon(1e-12));

    SegmentRestriction flat{{3, 3, 0}, {1, 1}, 0.0, 5.0};
    m = minimize_segment(flat);
    CHECK(m.r == 0.0);
    CHECK(m.value == doctest::Approx(3.0));

    h.r1 = 0.2;
    m = minimize_segment(h);
    CHECK(m.r == doctest::Approx(0.2));

    SegmentRestriction empty{{1, 0, 0}, {1, 0}, 1.0, 0.0};
    CHECK_THROWS(minimize_segment(empty));
}

TEST_CASE("restrict_to_line") {
    RationalObjective H{{1, 1, 0, 0, 0, 1, 1, 1, 1}};
    auto h = restrict_to_line(H, 0, 0, 1, 1, 0, 1);
    CHECK(h(0.0) == doctest::Approx(H(0, 0)));
    CHECK(h(0.7) == doctest::Approx((2 * 0.49 + 1) / (2 * 0.7 + 1)));
    RationalObjective K{{1, 0, 0, 2, 0, 1, 3, 0, 2}};
    h = restrict_to_line(K, 0.5, 0, 1, 0, 0, 1);
    CHECK(h.g[0] == doctest::Approx(3 * 0.5 + 2));
    CHECK(h.g[1] == doctest::Approx(3.0));
}

TEST_CASE("stationary point examples") {
    RationalObjective sep{{1, 1, 0, 0, 0, 1, 0, 0, 1}};
    auto s = stationary_points(sep);
    REQUIRE(s.points.size() == 1);
    CHECK(s.points[0][0] == doctest::Approx(0.0));
    CHECK(s.points[0][1] == doctest::Approx(0.0));

    // (x-1)^2 + (y-2)^2 + 5
    RationalObjective shifted{{1, 1, 0, -2, -4, 10, 0, 0, 1}};
    s = stationary_points(shifted);
    REQUIRE(s.points.size() == 1);
    CHECK(s.points[0][0] == doctest::Approx(1.0));
    CHECK(s.points[0][1] == doctest::Approx(2.0));
}

TEST_CASE("property: stationary points have vanishing gradient") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const auto inst = oracle::random_rfop(rng);
        const auto s = stationary_points(inst.H);
        for (const auto& p : s.points) {
            if (inst.H.denominator(p[0], p[1]) <= 0.1) continue;
            const double h = 1e-6;
            const double gx = (inst.H(p[0] + h, p[1]) - inst.H(p[0] - h, p[1])) / (2 * h);
            const double gy = (inst.H(p[0], p[1] + h) - inst.H(p[0], p[1] - h)) / (2 * h);
            const double scale = std::max(1.0, std::hypot(p[0], p[1]));
            CHECK(std::abs(gx) <= 1e-5 * scale * scale);
            CHECK(std::abs(gy) <= 1e-5 * scale * scale);
        }
    }
}

TEST_CASE("solve_rfop examples") {
    RationalObjective c{{0, 0, 0, 0, 0, 6, 0, 0, 3}};
    auto r = solve_rfop(c, PolytopeBounds{1, 1, 1, 2, 2});
    CHECK(r.value == doctest::Approx(2.0));
    CHECK(r.x == 0.0);
    CHECK(r.y == 0.0);

    RationalObjective bowl{{1, 1, 0, 0, 0, 1, 0, 0, 1}};
    r = solve_rfop(bowl, PolytopeBounds{1, 1, 1, 2, 2});
    CHECK(r.value == doctest::Approx(1.0));
    CHECK(r.x == doctest::Approx(0.0));
    CHECK(r.y == doctest::Approx(0.0));

    CHECK_THROWS_AS(solve_rfop(bowl, PolytopeBounds{0, 1, 1, -1, 1}), RfopError);
    RationalObjective bad{{1, 1, 0, 0, 0, 1, -1, 0, 1}};
    CHECK_THROWS_AS(solve_rfop(bad, PolytopeBounds{}), RfopError);
}

TEST_CASE("property: segment minimum beats endpoints and probes") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(-3.0, 3.0), P(0.1, 2.0);
    for (int trial = 0; trial < 2000; ++trial) {
        SegmentRestriction h{{U(rng), U(rng), U(rng)}, {P(rng), std::abs(U(rng))}, 0.0, P(rng) * 2};
        const auto m = minimize_segment(h);
        const double tol = 1e-10 * std::max(1.0, std::abs(m.value));
        CHECK(m.value <= h(h.r0) + tol);
        CHECK(m.value <= h(h.r1) + tol);
        for (int k = 1; k <= 10; ++k) CHECK(m.value <= h(h.r0 + (h.r1 - h.r0) * k / 11.0) + tol);
    }
}

TEST_CASE("property: convexity sign matches a finite difference") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> U(-3.0, 3.0), P(0.5, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        SegmentRestriction h{{U(rng), U(rng), U(rng)}, {P(rng), std::abs(U(rng))}, 0.0, 1.0};
        const double d = delta_h(h.f, h.g);
        if (std::abs(d) <= 1e-3) continue;
        const double e = 1e-3, mid = 0.5;
        const double second = (h(mid + e) - 2 * h(mid) + h(mid - e)) / (e * e);
        CHECK((second > 0) == (d > 0));
    }
}

TEST_CASE("property: solver dominates random feasible points") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = oracle::random_rfop(rng);
        const auto r = solve_rfop(inst.H, inst.bounds);
        const double X = oracle::x_cap(inst.bounds);
        for (int k = 0; k < 10000; ++k) {
            const double x = U(rng) * X;
            const double y = U(rng) * std::max(0.0, oracle::y_cap(inst.bounds, x));
            CHECK(inst.H.denominator(x, y) > 0.0);
            if (r.value > inst.H(x, y) + 1e-9 * std::max(1.0, std::abs(r.value))) {
                FAIL_CHECK("dominated at trial " << trial);
                break;
            }
        }
    }
}

TEST_CASE("solve_rfop matches the grid oracle") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = oracle::random_rfop(rng);
        const auto r = solve_rfop(inst.H, inst.bounds);
        const auto o = oracle::rfop(inst.H, inst.bounds, 101);
        CHECK(r.value == doctest::Approx(o.value).epsilon(0).scale(1).epsilon(1e-6));
    }
}
