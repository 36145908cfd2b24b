#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "pmrhc/model.hpp"

using namespace pmrhc;

namespace {

TargetGraph path_graph(int n, double rho = 2.0) {
    std::vector<Target> ts(n);
    std::vector<Edge> es;
    for (int i = 0; i + 1 < n; ++i) {
        es.push_back({i, i + 1, rho});
        es.push_back({i + 1, i, rho});
    }
    return TargetGraph(ts, es);
}

// Fine-step trapezoid integration, with steps aligned to the visit boundaries.
double dense_integral(const ProjectedTarget& p, double w, double dt) {
    std::vector<double> marks{0.0, w};
    for (const PlannedVisit& v : p.visits) {
        marks.push_back(std::min(w, v.arrival));
        marks.push_back(std::min(w, v.arrival + v.active + v.idle));
    }
    std::sort(marks.begin(), marks.end());
    double R = p.R;
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < marks.size(); ++k) {
        const double a = marks[k], b = marks[k + 1];
        if (b <= a) continue;
        int n = 0;
        for (const PlannedVisit& v : p.visits)
            if (0.5 * (a + b) >= v.arrival && 0.5 * (a + b) < v.arrival + v.active + v.idle) ++n;
        const int steps = static_cast<int>(std::ceil((b - a) / dt));
        const double h = (b - a) / steps;
        for (int s = 0; s < steps; ++s) {
            const double rate = (R > 0.0 || p.A - p.B * n > 0.0) ? p.A - p.B * n : 0.0;
            const double next = R + rate * h;
            if (next < 0.0) {
                // Partial step down to zero, then flat.
                const double tz = R / -rate;
                total += 0.5 * R * tz;
                R = 0.0;
                continue;
            }
            total += 0.5 * (R + next) * h;
            R = next;
        }
    }
    return total;
}

}  // namespace

TEST_CASE("evolve_target follows the linear law") {
    auto e = evolve_target({0.5, 0.0, 0.0}, 1.0, 10.0, 1, 0.02);
    CHECK(e.state.R == doctest::Approx(0.32).epsilon(1e-14));
    CHECK_FALSE(e.zero_crossing.has_value());

    e = evolve_target({0.0, 0.0, 0.0}, 1.0, 10.0, 0, 3.0);
    CHECK(e.state.R == doctest::Approx(3.0));
    CHECK(e.state.rate == 1.0);

    e = evolve_target({0.5, 0.0, 0.0}, 1.0, 10.0, 1, 1.0);
    CHECK(e.state.R == 0.0);
    REQUIRE(e.zero_crossing.has_value());
    CHECK(*e.zero_crossing == doctest::Approx(0.5 / 9.0).epsilon(1e-14));
    CHECK(e.state.rate == 0.0);

    CHECK_THROWS_AS(evolve_target({0.5, 0.0, 0.0}, 1.0, 10.0, 1, -1.0), std::invalid_argument);
}

TEST_CASE("segment and visit costs") {
    CHECK(segment_cost(2.0, 1.0, 3.0) == doctest::Approx(10.5));
    CHECK(segment_cost(0.0, 0.0, 7.0) == 0.0);
    CHECK(segment_cost(5.0, -1.0, 2.0) == doctest::Approx(8.0));

    CHECK(visit_cost(0.9, 0.1, 2.0, 1.0, 10.0) == doctest::Approx(2.045));
    CHECK(visit_cost(0.0, 0.0, 0.0, 1.0, 10.0) == 0.0);
    CHECK(visit_cost(0.9, 0.1, 0.0, 1.0, 10.0) == doctest::Approx(0.045));
}

TEST_CASE("local_objective against dense integration") {
    const ProjectedTarget single{1.0, 1.0, 10.0, {}};
    const ProjectedTarget one[] = {single};
    CHECK(local_objective(one, 2.0) == doctest::Approx(4.0));
    CHECK(local_objective(one, 0.0) == 0.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        ProjectedTarget a{2.0 * U(rng), 0.5 + U(rng), 8.0 + 4.0 * U(rng), {}};
        ProjectedTarget b{2.0 * U(rng), 0.5 + U(rng), 8.0 + 4.0 * U(rng), {}};
        const double w = 1.0 + 2.0 * U(rng);
        b.visits.push_back({0.3 * w * U(rng), 0.3 * w * U(rng), 0.2 * w * U(rng)});
        const ProjectedTarget both[] = {a, b};
        const double oracle = dense_integral(a, w, 1e-5) + dense_integral(b, w, 1e-5);
        CHECK(local_objective(both, w) == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("neighbourhood sums") {
    // Star: centre 0 with leaves 1, 2.
    std::vector<Target> ts(3);
    TargetGraph star(ts, {{0, 1, 1.0}, {1, 0, 1.0}, {0, 2, 1.0}, {2, 0, 1.0}});
    const std::vector<double> R{0.1, 0.2, 0.3};
    const auto s = neighborhood_params(star, R, 0, 1);
    CHECK(s.A_rest == 1.0);
    CHECK(s.A_all == 3.0);
    CHECK(s.R_all == doctest::Approx(s.R_rest + R[0] + R[1]).epsilon(1e-12));

    const TargetGraph pair = path_graph(2);
    const std::vector<double> R2{0.4, 0.7};
    const auto p = neighborhood_params(pair, R2, 0, 1);
    CHECK(p.A_rest == 0.0);
    CHECK(p.R_rest == 0.0);

    const TargetGraph path = path_graph(4);
    const std::vector<double> R4{1, 2, 3, 4};
    // Two-hop set of 0 on 0-1-2-3 is {0, 1, 2}.
    CHECK(two_hop_set(path, 0) == std::vector<int>{0, 1, 2});
    const auto e = extended_neighborhood_params(path, R4, 0, 1, 2);
    CHECK(e.A_all == 3.0);
    CHECK(e.A_rest == 1.0);
    CHECK(e.R_rest == 1.0);
    CHECK_THROWS_AS(neighborhood_params(path, R4, 0, 2), ModelError);
}

TEST_CASE("graph validation") {
    std::vector<Target> bad(1);
    bad[0].growth = 12.0;
    bad[0].removal = 10.0;
    CHECK_THROWS_AS(TargetGraph(bad, {}), ModelError);
    std::vector<Target> ts(2);
    CHECK_THROWS_AS(TargetGraph(ts, {{0, 1, 0.0}}), ModelError);
    const TargetGraph g(ts, {{0, 1, 2.0}});
    CHECK(g.has_edge(0, 1));
    CHECK_FALSE(g.has_edge(1, 0));
    CHECK(g.transit(0, 1) == 2.0);
}

TEST_CASE("property: rate stays in the cyclic set and R stays nonnegative") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double A = U(rng), B = A + 1.0 + 5.0 * U(rng);
        TargetState s{2.0 * U(rng), 0.0, 0.0};
        for (int step = 0; step < 10; ++step) {
            const int n = static_cast<int>(rng() % 2);
            const auto e = evolve_target(s, A, B, n, U(rng));
            CHECK(e.state.R >= 0.0);
            const double r = e.state.rate;
            CHECK((r == A || r == A - B || r == 0.0));
            s = e.state;
        }
    }
}
