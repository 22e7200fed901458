// Acceptance gate: ten checks, one PASS/FAIL line each, exit code equals the
// number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "droneplan/geometry.hpp"
#include "droneplan/homotopy.hpp"
#include "droneplan/oracle.hpp"
#include "droneplan/ordering.hpp"
#include "droneplan/scenario.hpp"
#include "droneplan/validate.hpp"

using namespace droneplan;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool passed, const std::string& detail) {
    std::printf("criterion %2d [%s]: %s — %s\n", id, name.c_str(),
                passed ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!passed) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

Scenario load_case(int number) {
    const std::string path =
        std::string(DRONEPLAN_SCENARIO_DIR) + "/case" + std::to_string(number) + ".json";
    return load_scenario(path);
}

TourOrder brute_force_order(const ClusterLayout& layout, Point2 start, Point2 end) {
    std::vector<std::size_t> perm(layout.size());
    std::iota(perm.begin(), perm.end(), 0u);
    std::vector<std::size_t> best = perm;
    double best_len = path_length(tour_path(apply_order(layout, perm), start, end));
    while (std::next_permutation(perm.begin(), perm.end())) {
        const double len = path_length(tour_path(apply_order(layout, perm), start, end));
        if (len < best_len - 1e-9 * (1.0 + std::fabs(best_len))) {
            best_len = len;
            best = perm;
        }
    }
    return TourOrder{best, best_len};
}

// 1. Analytic gradients vs central finite differences.
void criterion_gradients() {
    const auto t0 = Clock::now();
    const SuiteResult suite = suite_gradient_random(20260814u, 100);
    const double dt = seconds_since(t0);
    report(1, "gradient-fd", suite.passed && dt < 5.0,
           suite.detail + " (" + fmt(dt) + " s)");
}

// 2. Continuation reproduces the single-head closed form.
void criterion_single_head() {
    Scenario sc;
    sc.layout.heads = {{2, 0}};
    sc.start = {0, 0};
    sc.end = {0, 0};
    RunOptions opt;
    opt.target = 2.0;
    const Trace trace = run_homotopy(sc, opt);
    const TraceSample& fin = trace.samples.back();
    const bool ok = trace.terminated_reason == TerminatedReason::target_length_reached &&
                    std::fabs(fin.state.u[0] - 1.0) <= 1e-3 &&
                    std::fabs(fin.state.v[0] - 0.0) <= 1e-3 &&
                    std::fabs(fin.energy - 1.0) <= 1e-3 &&
                    std::fabs(fin.state.lambda - (-1.0)) <= 1e-2;
    report(2, "single-head-closed-form", ok,
           "vertex (" + fmt(fin.state.u[0]) + ", " + fmt(fin.state.v[0]) + "), energy " +
               fmt(fin.energy) + ", lambda " + fmt(fin.state.lambda));
}

// 3. Bundled scenarios sweep to termination fast enough.
std::vector<Trace> criterion_sweeps() {
    std::vector<Trace> traces;
    bool ok = true;
    std::string detail;
    for (int c = 1; c <= 4; ++c) {
        const Scenario sc = load_case(c);
        const auto t0 = Clock::now();
        Trace trace = run_homotopy(sc);
        const double dt = seconds_since(t0);
        const bool done = trace.terminated_reason == TerminatedReason::merge_detected ||
                          trace.terminated_reason == TerminatedReason::straight_line_floor;
        ok = ok && done && dt < 5.0 && sc.step_size == 0.1;
        if (!detail.empty()) detail += "; ";
        detail += "case " + std::to_string(c) + ": " + std::to_string(trace.samples.size()) +
                  " samples, " + to_string(trace.terminated_reason) + ", " + fmt(dt) + " s";
        traces.push_back(std::move(trace));
    }
    report(3, "bundled-sweeps", ok, detail);
    return traces;
}

// 4. Relative Lagrange residual at every recorded (pre-merge) sample.
void criterion_residual(const std::vector<Trace>& traces) {
    bool ok = true;
    double worst = 0.0;
    for (const Trace& trace : traces) {
        for (const TraceSample& smp : trace.samples) {
            const double rel = relative_residual(smp, trace);
            worst = std::max(worst, rel);
            ok = ok && rel <= 1e-3;
        }
    }
    report(4, "residual-trace", ok, "worst relative residual " + fmt(worst));
}

// 5. Consumed length tracks geometric length.
void criterion_linearity(const std::vector<Trace>& traces) {
    bool ok = true;
    double worst = 0.0;
    for (const Trace& trace : traces) {
        const double L0 = trace.initial_length;
        for (const TraceSample& smp : trace.samples) {
            const double dev = std::fabs(smp.length - (L0 - smp.state.s)) / L0;
            worst = std::max(worst, dev);
            ok = ok && dev <= 0.01;
        }
    }
    report(5, "length-linearity", ok, "worst |length-(L0-s)|/L0 = " + fmt(worst));
}

// 6. Energy is monotone, as is transformed energy vs defect.
void criterion_monotonicity(const std::vector<Trace>& traces) {
    bool ok = true;
    for (const Trace& trace : traces) {
        const double inv_p = 1.0 / trace.model.p;
        for (std::size_t i = 1; i < trace.samples.size(); ++i) {
            ok = ok && trace.samples[i].energy >= trace.samples[i - 1].energy - 1e-9;
            const double r0 = std::pow(std::max(trace.samples[i - 1].energy, 0.0), inv_p);
            const double r1 = std::pow(std::max(trace.samples[i].energy, 0.0), inv_p);
            const double d0 = trace.tour_length - trace.samples[i - 1].length;
            const double d1 = trace.tour_length - trace.samples[i].length;
            ok = ok && d1 > d0 && r1 >= r0 - 1e-9;
        }
    }
    report(6, "energy-monotonicity", ok,
           ok ? "energy and energy^{1/p} nondecreasing on all four traces"
              : "monotonicity violated");
}

// 7. Interleaved bordered matrix equals the independent block assembly.
void criterion_matrix() {
    const SuiteResult suite = suite_matrix_equivalence(777213u, 50, 8);
    report(7, "matrix-equivalence", suite.passed, suite.detail);
}

// 8. Exact ordering equals brute force; frozen optimal-tour spot value.
void criterion_ordering() {
    std::mt19937_64 rng(40412u);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    std::uniform_int_distribution<std::size_t> jdist(1, 8);
    bool ok = true;
    for (int rep = 0; rep < 20; ++rep) {
        ClusterLayout layout;
        const std::size_t J = jdist(rng);
        for (std::size_t j = 0; j < J; ++j) layout.heads.push_back({coord(rng), coord(rng)});
        bool distinct = true;
        for (std::size_t i = 0; i < J && distinct; ++i)
            for (std::size_t k = i + 1; k < J && distinct; ++k)
                if (dist(layout.heads[i], layout.heads[k]) < 1e-6) distinct = false;
        if (!distinct) {
            --rep;
            continue;
        }
        const Point2 start{coord(rng), coord(rng)};
        const Point2 end = (rep % 2 == 0) ? start : Point2{coord(rng), coord(rng)};
        const TourOrder got = exact_order(layout, start, end);
        const TourOrder want = brute_force_order(layout, start, end);
        ok = ok && got.perm == want.perm &&
             std::fabs(got.tour_length - want.tour_length) <= 1e-9;
    }

    const Scenario c1 = load_case(1);
    const TourOrder dp = exact_order(c1.layout, c1.start, c1.end);
    const TourOrder brute = brute_force_order(c1.layout, c1.start, c1.end);
    const double listing = path_length(tour_path(c1.layout, c1.start, c1.end));
    ok = ok && dp.perm == brute.perm &&
         std::fabs(dp.tour_length - brute.tour_length) <= 1e-9 &&
         std::fabs(brute.tour_length - 17.7082039325) <= 1e-3 &&
         std::fabs(listing - 18.3188) <= 1e-3;
    report(8, "ordering-exactness", ok,
           "optimal tour " + fmt(dp.tour_length) + " (brute force " + fmt(brute.tour_length) +
               "; listing-order tour " + fmt(listing) + ")");
}

// 9. Homotopy result never loses to the independent minimizer by > 1%.
void criterion_oracle() {
    bool ok = true;
    std::string detail;
    double worst_ratio = 0.0;
    for (int c = 1; c <= 4; ++c) {
        const Scenario sc = load_case(c);
        const TourOrder order = exact_order(sc.layout, sc.start, sc.end);
        for (double gap : {1.0, 2.0, 3.0}) {
            RunOptions opt;
            const double target = order.tour_length - gap;
            opt.target = target;
            const Trace trace = run_homotopy(sc, opt);
            if (trace.terminated_reason != TerminatedReason::target_length_reached) {
                ok = false;
                detail += "case " + std::to_string(c) + " target " + fmt(target) +
                          " unreachable; ";
                continue;
            }
            const OracleResult oracle =
                constrained_minimize(trace.ordered, trace.start, trace.end, target,
                                     trace.model, 16, sc.seed + 1000 * c);
            const double eh = trace.samples.back().energy;
            const bool viol_ok = oracle.constraint_violation <= 1e-6 * target;
            const bool energy_ok = eh <= oracle.energy * 1.01 + 1e-12;
            worst_ratio = std::max(worst_ratio, eh / std::max(oracle.energy, 1e-300));
            ok = ok && viol_ok && energy_ok;
            if (!viol_ok || !energy_ok)
                detail += "case " + std::to_string(c) + " gap " + fmt(gap) + ": homotopy " +
                          fmt(eh) + " vs oracle " + fmt(oracle.energy) + " (viol " +
                          fmt(oracle.constraint_violation) + "); ";
        }
    }
    if (detail.empty()) detail = "worst homotopy/oracle energy ratio " + fmt(worst_ratio);
    report(9, "oracle-agreement", ok, detail);
}

// 10. Halving the step shrinks the landing error like a 4th-order method.
void criterion_convergence() {
    Scenario sc = load_case(1);
    const TourOrder order = exact_order(sc.layout, sc.start, sc.end);
    const double target = order.tour_length - 2.0;

    auto final_state = [&](double h) {
        Scenario run = sc;
        run.step_size = h;
        RunOptions opt;
        opt.target = target;
        const Trace trace = run_homotopy(run, opt);
        return trace.samples.back().state;
    };
    const HomotopyState ref = final_state(0.025);
    auto err_vs_ref = [&](const HomotopyState& st) {
        double err = 0.0;
        for (std::size_t j = 0; j < st.u.size(); ++j) {
            err = std::max(err, std::fabs(st.u[j] - ref.u[j]));
            err = std::max(err, std::fabs(st.v[j] - ref.v[j]));
        }
        return err;
    };
    const double e1 = err_vs_ref(final_state(0.1));
    const double e2 = err_vs_ref(final_state(0.05));
    const double ratio = e1 / std::max(e2, 1e-300);
    report(10, "convergence-order", ratio >= 8.0,
           "err(h)=" + fmt(e1) + ", err(h/2)=" + fmt(e2) + ", ratio " + fmt(ratio));
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    criterion_gradients();
    criterion_single_head();
    const std::vector<Trace> traces = criterion_sweeps();
    criterion_residual(traces);
    criterion_linearity(traces);
    criterion_monotonicity(traces);
    criterion_matrix();
    criterion_ordering();
    criterion_oracle();
    criterion_convergence();
    std::printf("%d/10 criteria passed (total %s s)\n", 10 - g_failures,
                fmt(seconds_since(t0)).c_str());
    return g_failures;
}
