#include <cmath>
#include <random>

#include "droneplan/errors.hpp"
#include "droneplan/geometry.hpp"
#include "droneplan/homotopy.hpp"
#include "droneplan/oracle.hpp"
#include "droneplan/ordering.hpp"
#include "droneplan/scenario.hpp"
#include "vendor/doctest.h"

using namespace droneplan;

TEST_CASE("single_head_closed_form: textbook instances") {
    {
        const auto [path, lambda] =
            single_head_closed_form({2, 0}, {0, 0}, 2.0, PowerModel{2.0});
        CHECK(path.vertices[0].x == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(path.vertices[0].y == doctest::Approx(0.0));
        CHECK(energy(path, ClusterLayout{{{2, 0}}}, PowerModel{2.0}) ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(lambda == doctest::Approx(-1.0).epsilon(1e-12));
    }
    {
        const auto [path, lambda] =
            single_head_closed_form({3, 4}, {0, 0}, 5.0, PowerModel{2.0});
        CHECK(path.vertices[0].x == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(path.vertices[0].y == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(energy(path, ClusterLayout{{{3, 4}}}, PowerModel{2.0}) ==
              doctest::Approx(6.25).epsilon(1e-12));
        CHECK(lambda == doctest::Approx(-2.5).epsilon(1e-12));
    }
    {
        // L = 2d: the vertex reaches the head, zero energy, slack multiplier.
        const auto [path, lambda] =
            single_head_closed_form({2, 0}, {0, 0}, 4.0, PowerModel{2.0});
        CHECK(path.vertices[0].x == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(energy(path, ClusterLayout{{{2, 0}}}, PowerModel{2.0}) ==
              doctest::Approx(0.0));
        CHECK(lambda == doctest::Approx(0.0));
    }
    CHECK_THROWS_AS(single_head_closed_form({2, 0}, {0, 0}, 4.1, PowerModel{2.0}),
                    InfeasibleTargetError);
    CHECK_THROWS_AS(single_head_closed_form({0, 0}, {0, 0}, 1.0, PowerModel{2.0}),
                    ValidationError);
}

TEST_CASE("single_head_closed_form agrees with its own stationarity condition") {
    std::mt19937_64 rng(5150u);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    const double p_values[] = {2.0, 4.0, 8.0};
    for (int rep = 0; rep < 30; ++rep) {
        const Point2 head{coord(rng), coord(rng)};
        const Point2 start{coord(rng), coord(rng)};
        const double d = dist(head, start);
        if (d < 0.5) continue;
        const PowerModel model{p_values[rep % 3]};
        const double L = frac(rng) * 2.0 * d;
        const auto [path, lambda] = single_head_closed_form(head, start, L, model);
        CHECK(path_length(path) == doctest::Approx(L).epsilon(1e-10));
        const double res = lagrange_residual(path, lambda, ClusterLayout{{head}}, model);
        const std::vector<double> gf = grad_energy(path, ClusterLayout{{head}}, model);
        double scale = 1.0;
        for (double g : gf) scale = std::max(scale, std::fabs(g));
        CHECK(res <= 1e-9 * scale);
    }
}

TEST_CASE("fd_gradient matches the analytic energy gradient") {
    ClusterLayout layout{{{2, 1}, {2, 4}, {6, 4}, {6, 1}}};
    DronePath path{{0, 0}, {0, 0}, {{1.7, 1.2}, {2.2, 3.5}, {5.5, 3.6}, {5.9, 1.4}}};
    const PowerModel model{2.0};
    auto f = [&](const std::vector<double>& x) {
        DronePath probe = path;
        for (std::size_t j = 0; j < probe.vertices.size(); ++j) {
            probe.vertices[j].x = x[2 * j];
            probe.vertices[j].y = x[2 * j + 1];
        }
        return energy(probe, layout, model);
    };
    std::vector<double> x0;
    for (const Point2& v : path.vertices) {
        x0.push_back(v.x);
        x0.push_back(v.y);
    }
    const std::vector<double> fd = fd_gradient(f, x0, 1e-7);
    const std::vector<double> an = grad_energy(path, layout, model);
    for (std::size_t i = 0; i < an.size(); ++i)
        CHECK(fd[i] == doctest::Approx(an[i]).epsilon(1e-6));
}

TEST_CASE("constrained_minimize: feasible, deterministic, and credible") {
    ClusterLayout heads{{{2, 1}, {2, 4}, {6, 4}, {6, 1}}};
    const TourOrder order = exact_order(heads, {0, 0}, {0, 0});
    const ClusterLayout ordered = apply_order(heads, order.perm);
    const double L = order.tour_length - 2.0;

    const OracleResult a = constrained_minimize(ordered, {0, 0}, {0, 0}, L, PowerModel{2.0},
                                                8, 1234u);
    CHECK(a.constraint_violation <= 1e-6 * std::max(1.0, L));
    CHECK(a.energy >= 0.0);
    CHECK(a.restarts_agreeing >= 1);
    CHECK(path_length(a.path) == doctest::Approx(L).epsilon(1e-5));

    const OracleResult b = constrained_minimize(ordered, {0, 0}, {0, 0}, L, PowerModel{2.0},
                                                8, 1234u);
    CHECK(a.energy == b.energy);
    CHECK(a.constraint_violation == b.constraint_violation);

    // Cross-check against the continuation engine at the same length.
    Scenario sc;
    sc.layout = heads;
    sc.start = {0, 0};
    sc.end = {0, 0};
    RunOptions opt;
    opt.target = L;
    const Trace trace = run_homotopy(sc, opt);
    const double homotopy_energy = trace.samples.back().energy;
    CHECK(homotopy_energy <= a.energy * 1.01 + 1e-12);
}

TEST_CASE("constrained_minimize: single head approaches the closed form") {
    ClusterLayout one{{{2, 0}}};
    const double L = 2.0;
    const OracleResult got =
        constrained_minimize(one, {0, 0}, {0, 0}, L, PowerModel{2.0}, 8, 7u);
    CHECK(got.constraint_violation <= 1e-6);
    CHECK(got.energy == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(got.path.vertices[0].x == doctest::Approx(1.0).epsilon(1e-2));
}
