#include <cmath>
#include <vector>

#include "droneplan/errors.hpp"
#include "droneplan/geometry.hpp"
#include "droneplan/homotopy.hpp"
#include "droneplan/ordering.hpp"
#include "droneplan/scenario.hpp"
#include "vendor/doctest.h"

using namespace droneplan;

namespace {

Scenario make_scenario(std::vector<Point2> heads, Point2 start, double p = 2.0) {
    Scenario sc;
    sc.layout.heads = std::move(heads);
    sc.start = start;
    sc.end = start;
    sc.model.p = p;
    return sc;
}

Scenario case1() { return make_scenario({{2, 1}, {2, 4}, {6, 4}, {6, 1}}, {0, 0}); }
Scenario case2() { return make_scenario({{2, 1}, {2, 4}, {8, 2}, {6, 4}, {6, 1}}, {0, 0}); }

}  // namespace

TEST_CASE("initial_state: single head closed-form seed") {
    ClusterLayout one{{{2, 0}}};
    const HomotopyState st = initial_state(one, {0, 0}, {0, 0}, PowerModel{2.0}, 0.1);
    CHECK(st.u[0] == doctest::Approx(1.9).epsilon(1e-12));
    CHECK(st.v[0] == doctest::Approx(0.0));
    CHECK(st.lambda == doctest::Approx(-0.1));
    CHECK(st.s == doctest::Approx(0.0));
}

TEST_CASE("initial_state: near-zero residual on a four-head tour") {
    Scenario sc = case1();
    const TourOrder order = exact_order(sc.layout, sc.start, sc.end);
    const ClusterLayout ordered = apply_order(sc.layout, order.perm);
    const HomotopyState st = initial_state(ordered, sc.start, sc.end, sc.model, 0.05);
    const DronePath path = state_to_path(st, sc.start, sc.end);
    const std::vector<double> gf = grad_energy(path, ordered, sc.model);
    double scale = 0.0;
    for (double g : gf) scale = std::max(scale, std::fabs(g));
    CHECK(lagrange_residual(path, st.lambda, ordered, sc.model) <= 1e-3 * scale);
}

TEST_CASE("initial_state: straight-through head has no inward bisector") {
    ClusterLayout line{{{1, 0}, {2, 0}, {3, 0}}};
    const TourOrder order = as_given_order(line, {0, 0}, {4, 0});
    CHECK_THROWS_AS(
        initial_state(apply_order(line, order.perm), {0, 0}, {4, 0}, PowerModel{2.0}, 0.05),
        DegenerateBisectorError);
}

TEST_CASE("coefficients: symmetric single head on the x-axis") {
    ClusterLayout one{{{2, 0}}};
    HomotopyState st;
    st.u = {1.9};
    st.v = {0.0};
    st.lambda = -0.1;
    const CoefficientSet c =
        assemble_coefficients(st, one, {0, 0}, {0, 0}, PowerModel{2.0}, 1e-3);
    CHECK(c.s[0][2] == doctest::Approx(2.0 * std::pow(c.A[0], c.q)).epsilon(1e-12));
    CHECK(c.w[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(c.z[0] == doctest::Approx(0.0));
    CHECK(c.s[0][0] == doctest::Approx(0.0));
    CHECK(c.s[0][1] == doctest::Approx(0.0));
    CHECK(c.s[0][4] == doctest::Approx(0.0));
    CHECK(c.s[0][5] == doctest::Approx(0.0));
    CHECK(c.M[0] == doctest::Approx(1.9 * 1.9).epsilon(1e-12));
    CHECK(c.H[0] == doctest::Approx(std::pow(1.9 * 1.9, 1.5)).epsilon(1e-12));
}

TEST_CASE("coefficients: merge-threshold floor behaviour") {
    ClusterLayout one{{{2, 0}}};
    HomotopyState st;
    st.u = {1e-6};
    st.v = {0.0};
    st.lambda = -0.1;
    CHECK_THROWS_AS(assemble_coefficients(st, one, {0, 0}, {0, 0}, PowerModel{2.0}, 1e-3),
                    MergePendingError);
    const CoefficientSet floored =
        assemble_coefficients(st, one, {0, 0}, {0, 0}, PowerModel{2.0}, 1e-3, true);
    CHECK(floored.M[0] == doctest::Approx(1e-6).epsilon(1e-12));
}

TEST_CASE("bordered system: structure and the symmetric single-head solve") {
    ClusterLayout one{{{2, 0}}};
    HomotopyState st;
    st.u = {1.9};
    st.v = {0.0};
    st.lambda = -0.1;
    const SystemMatrix sys = assemble_matrix(
        assemble_coefficients(st, one, {0, 0}, {0, 0}, PowerModel{2.0}, 1e-3));
    CHECK(sys.K.rows() == 3);
    CHECK(sys.C[2] == doctest::Approx(-1.0));
    CHECK(sys.K(0, 2) == doctest::Approx(-sys.K(2, 0)).epsilon(1e-12));
    CHECK(sys.K(2, 2) == doctest::Approx(0.0));

    const Eigen::VectorXd d = homotopy_rhs(st, one, {0, 0}, {0, 0}, PowerModel{2.0}, 1e-3);
    CHECK(d[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(0.0));
    CHECK(d[2] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("bordered system: upper block is symmetric on a random-ish state") {
    Scenario sc = case2();
    const TourOrder order = exact_order(sc.layout, sc.start, sc.end);
    const ClusterLayout ordered = apply_order(sc.layout, order.perm);
    const HomotopyState st = initial_state(ordered, sc.start, sc.end, sc.model, 0.3);
    const SystemMatrix sys = assemble_matrix(
        assemble_coefficients(st, ordered, sc.start, sc.end, sc.model, 1e-3));
    const Eigen::Index n = sys.K.rows() - 1;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            CHECK(sys.K(i, j) == doctest::Approx(sys.K(j, i)).epsilon(1e-10));
}

TEST_CASE("one integration step consumes one step of length") {
    Scenario sc = case1();
    const TourOrder order = exact_order(sc.layout, sc.start, sc.end);
    const ClusterLayout ordered = apply_order(sc.layout, order.perm);
    const HomotopyState st = initial_state(ordered, sc.start, sc.end, sc.model, 0.05);
    const double len0 = path_length(state_to_path(st, sc.start, sc.end));
    const HomotopyState next =
        rk4_step(st, 0.1, ordered, sc.start, sc.end, sc.model, 1e-3);
    const double len1 = path_length(state_to_path(next, sc.start, sc.end));
    CHECK(std::fabs((len0 - len1) - 0.1) <= 1e-4);
}

TEST_CASE("run_homotopy: single head reaches the half-range optimum") {
    Scenario sc = make_scenario({{2, 0}}, {0, 0});
    RunOptions opt;
    opt.target = 2.0;
    const Trace trace = run_homotopy(sc, opt);
    CHECK(trace.terminated_reason == TerminatedReason::target_length_reached);
    const TraceSample& fin = trace.samples.back();
    CHECK(std::fabs(fin.length - 2.0) <= 1e-9);
    CHECK(std::fabs(fin.state.u[0] - 1.0) <= 1e-3);
    CHECK(std::fabs(fin.state.v[0]) <= 1e-3);
    CHECK(std::fabs(fin.energy - 1.0) <= 1e-3);
    CHECK(std::fabs(fin.state.lambda - (-1.0)) <= 1e-2);
}

TEST_CASE("run_homotopy: four-head tour down to length 16") {
    Scenario sc = case1();
    RunOptions opt;
    opt.target = 16.0;
    const Trace trace = run_homotopy(sc, opt);
    CHECK(trace.terminated_reason == TerminatedReason::target_length_reached);
    CHECK(std::fabs(trace.samples.back().length - 16.0) <= 1e-3);
    CHECK(relative_residual(trace.samples.back(), trace) <= 1e-3);
    // s tracks consumed length from the first sample.
    CHECK(std::fabs((trace.initial_length - trace.samples.back().state.s) - 16.0) <= 0.01);
}

TEST_CASE("run_homotopy: trace invariants on a full sweep") {
    Scenario sc = case2();
    const Trace trace = run_homotopy(sc);
    REQUIRE(trace.samples.size() > 2);
    CHECK((trace.terminated_reason == TerminatedReason::merge_detected ||
           trace.terminated_reason == TerminatedReason::straight_line_floor));
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        CHECK(trace.samples[i].length < trace.samples[i - 1].length);
        CHECK(trace.samples[i].energy >= trace.samples[i - 1].energy - 1e-9);
        CHECK(trace.samples[i].state.s > trace.samples[i - 1].state.s);
        CHECK(relative_residual(trace.samples[i], trace) <= 1e-3);
    }
    for (const MergeEvent& ev : trace.merge_events) {
        CHECK(ev.sample < trace.samples.size());
        CHECK(ev.segment <= trace.ordered.size());
    }
    if (trace.terminated_reason == TerminatedReason::merge_detected)
        CHECK(!trace.merge_events.empty());
}

TEST_CASE("run_homotopy: infeasible targets and the tour endpoint") {
    Scenario sc = case1();
    RunOptions below;
    below.target = 0.005;  // under the straight-line floor for start = end
    CHECK_THROWS_AS(run_homotopy(sc, below), InfeasibleTargetError);

    RunOptions beyond;
    beyond.target = 100.0;
    CHECK_THROWS_AS(run_homotopy(sc, beyond), InfeasibleTargetError);

    const TourOrder order = exact_order(sc.layout, sc.start, sc.end);
    RunOptions at_tour;
    at_tour.target = order.tour_length;
    const Trace trace = run_homotopy(sc, at_tour);
    CHECK(trace.terminated_reason == TerminatedReason::target_length_reached);
    CHECK(trace.samples.size() == 1);
    CHECK(std::fabs(trace.samples.front().length - order.tour_length) <= 1e-6);
    CHECK(trace.samples.front().energy <= 1e-6);
}

TEST_CASE("run_homotopy: seed rebuild for a target close to the tour") {
    Scenario sc = case1();
    const TourOrder order = exact_order(sc.layout, sc.start, sc.end);
    RunOptions opt;
    opt.target = order.tour_length - 0.05;
    const Trace trace = run_homotopy(sc, opt);
    CHECK(trace.terminated_reason == TerminatedReason::target_length_reached);
    CHECK(trace.initial_length > *opt.target);
    CHECK(std::fabs(trace.samples.back().length - *opt.target) <= 1e-6);
    CHECK(trace.lambda0 <= sc.lambda0 + 1e-15);
}

TEST_CASE("run_homotopy: max-steps budget is honoured") {
    Scenario sc = case2();
    RunOptions opt;
    opt.max_steps = 3;
    const Trace trace = run_homotopy(sc, opt);
    CHECK(trace.terminated_reason == TerminatedReason::max_steps);
    CHECK(trace.samples.size() == 4);
}

TEST_CASE("run_homotopy: continuation past the first merge stays finite") {
    Scenario sc = case2();
    const Trace stopped = run_homotopy(sc);
    RunOptions opt;
    opt.continue_after_merge = true;
    const Trace cont = run_homotopy(sc, opt);
    CHECK(cont.samples.size() >= stopped.samples.size());
    for (const TraceSample& smp : cont.samples) {
        CHECK(std::isfinite(smp.length));
        CHECK(std::isfinite(smp.energy));
    }
}

TEST_CASE("solution_at_length: exact hits, interpolation, range errors") {
    Scenario sc = case1();
    const Trace trace = run_homotopy(sc);
    REQUIRE(trace.samples.size() > 5);

    const TraceSample& mid = trace.samples[trace.samples.size() / 2];
    const DronePath exact_hit = solution_at_length(trace, mid.length);
    for (std::size_t j = 0; j < exact_hit.vertices.size(); ++j) {
        CHECK(exact_hit.vertices[j].x == doctest::Approx(mid.state.u[j]).epsilon(1e-15));
        CHECK(exact_hit.vertices[j].y == doctest::Approx(mid.state.v[j]).epsilon(1e-15));
    }

    const double want = 0.5 * (trace.samples[2].length + trace.samples[3].length);
    const DronePath between = solution_at_length(trace, want);
    CHECK(std::fabs(path_length(between) - want) <= 1e-6);
    const HomotopyState st = state_at_length(trace, want);
    CHECK(st.s > trace.samples[2].state.s);
    CHECK(st.s < trace.samples[3].state.s);

    CHECK_THROWS_AS(solution_at_length(trace, trace.samples.front().length + 1.0), RangeError);
    CHECK_THROWS_AS(solution_at_length(trace, trace.samples.back().length - 1.0), RangeError);
}

TEST_CASE("run_homotopy: ordering mode changes the tour") {
    Scenario sc = case1();
    sc.ordering = OrderingMode::as_given;
    RunOptions opt;
    opt.target = 16.0;
    const Trace as_given = run_homotopy(sc, opt);
    CHECK(std::fabs(as_given.tour_length - 18.3188) <= 1e-3);

    sc.ordering = OrderingMode::exact;
    const Trace exact = run_homotopy(sc, opt);
    CHECK(exact.tour_length < as_given.tour_length);
    CHECK(std::fabs(exact.samples.back().length - 16.0) <= 1e-3);
}
