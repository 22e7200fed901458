#include "droneplan/validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "droneplan/errors.hpp"
#include "droneplan/oracle.hpp"
#include "droneplan/ordering.hpp"

namespace droneplan {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

}  // namespace

Eigen::MatrixXd block_form_matrix(const HomotopyState& state, const ClusterLayout& ordered,
                                  Point2 start, Point2 end, const PowerModel& model) {
    const std::size_t J = ordered.size();
    const Eigen::Index Ji = static_cast<Eigen::Index>(J);
    const double p = model.p;
    const double q = model.q();
    const double lam = state.lambda;

    const std::vector<Point2> pts = path_points(state_to_path(state, start, end));

    // Segment drops and true lengths (segment j joins path point j to j+1).
    Eigen::VectorXd m(Ji + 1), n(Ji + 1), len3(Ji + 1), len(Ji + 1);
    for (Eigen::Index j = 0; j <= Ji; ++j) {
        const std::size_t js = static_cast<std::size_t>(j);
        m[j] = pts[js].x - pts[js + 1].x;
        n[j] = pts[js].y - pts[js + 1].y;
        len[j] = std::hypot(m[j], n[j]);
        len3[j] = len[j] * len[j] * len[j];
    }

    // Bidiagonal difference matrix: -1 on the diagonal, +1 above it.
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(Ji, Ji);
    for (Eigen::Index j = 0; j < Ji; ++j) {
        D(j, j) = -1.0;
        if (j + 1 < Ji) D(j, j + 1) = 1.0;
    }

    Eigen::MatrixXd Huu = Eigen::MatrixXd::Zero(Ji, Ji);
    Eigen::MatrixXd Huv = Eigen::MatrixXd::Zero(Ji, Ji);
    Eigen::MatrixXd Hvv = Eigen::MatrixXd::Zero(Ji, Ji);
    Eigen::VectorXd dn2(Ji), dn2m(Ji), dm2(Ji), dm2m(Ji), dmn(Ji), dmnm(Ji);
    for (Eigen::Index j = 0; j < Ji; ++j) {
        // out = outgoing segment j+1, in = incoming segment j of head j+1
        dn2[j] = n[j + 1] * n[j + 1] / len3[j + 1];
        dn2m[j] = n[j] * n[j] / len3[j];
        dm2[j] = m[j + 1] * m[j + 1] / len3[j + 1];
        dm2m[j] = m[j] * m[j] / len3[j];
        dmn[j] = m[j + 1] * n[j + 1] / len3[j + 1];
        dmnm[j] = m[j] * n[j] / len3[j];
    }
    Huu = lam * (dn2.asDiagonal() * D + dn2m.asDiagonal() * D.transpose());
    Huv = -lam * (dmn.asDiagonal() * D + dmnm.asDiagonal() * D.transpose());
    Hvv = lam * (dm2.asDiagonal() * D + dm2m.asDiagonal() * D.transpose());

    // f-Hessian contributions on the diagonals.
    for (Eigen::Index j = 0; j < Ji; ++j) {
        const std::size_t js = static_cast<std::size_t>(j);
        const double a = state.u[js] - ordered.heads[js].x;
        const double b = state.v[js] - ordered.heads[js].y;
        const double A = a * a + b * b;
        const double Aq = std::pow(A, q);
        const double Aq1 = (A == 0.0) ? 0.0 : std::pow(A, q - 1.0);
        Huu(j, j) += p * Aq + 2.0 * p * q * a * a * Aq1;
        Huv(j, j) += 2.0 * p * q * a * b * Aq1;
        Hvv(j, j) += p * Aq + 2.0 * p * q * b * b * Aq1;
    }

    // Length gradient (differences of unit tangents) for the border.
    Eigen::VectorXd w(Ji), z(Ji);
    for (Eigen::Index j = 0; j < Ji; ++j) {
        w[j] = m[j + 1] / len[j + 1] - m[j] / len[j];
        z[j] = n[j + 1] / len[j + 1] - n[j] / len[j];
    }

    const Eigen::Index N = 2 * Ji + 1;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
    H.topLeftCorner(Ji, Ji) = Huu;
    H.block(0, Ji, Ji, Ji) = Huv;
    H.block(Ji, 0, Ji, Ji) = Huv.transpose();
    H.block(Ji, Ji, Ji, Ji) = Hvv;
    H.block(0, N - 1, Ji, 1) = -w;
    H.block(Ji, N - 1, Ji, 1) = -z;
    H.block(N - 1, 0, 1, Ji) = w.transpose();
    H.block(N - 1, Ji, 1, Ji) = z.transpose();
    return H;
}

Eigen::MatrixXd to_block_ordering(const Eigen::MatrixXd& K) {
    const Eigen::Index N = K.rows();
    const Eigen::Index J = (N - 1) / 2;
    std::vector<Eigen::Index> map(static_cast<std::size_t>(N));
    for (Eigen::Index j = 0; j < J; ++j) {
        map[static_cast<std::size_t>(j)] = 2 * j;          // u_j
        map[static_cast<std::size_t>(J + j)] = 2 * j + 1;  // v_j
    }
    map[static_cast<std::size_t>(2 * J)] = 2 * J;  // lambda
    Eigen::MatrixXd out(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j)
            out(i, j) = K(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]);
    return out;
}

namespace {

// Random valid geometry for property suites: distinct heads, non-degenerate
// path, negative multiplier.
struct RandomInstance {
    ClusterLayout layout;
    Point2 start, end;
    HomotopyState state;
    PowerModel model;
};

RandomInstance random_instance(std::mt19937_64& rng, std::size_t max_heads) {
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    std::uniform_int_distribution<std::size_t> jdist(1, max_heads);
    std::uniform_int_distribution<int> pdist(0, 2);
    std::uniform_real_distribution<double> lamdist(-3.0, -0.01);
    const double kPs[3] = {2.0, 4.0, 8.0};
    for (;;) {
        RandomInstance inst;
        const std::size_t J = jdist(rng);
        for (std::size_t j = 0; j < J; ++j)
            inst.layout.heads.push_back(Point2{coord(rng), coord(rng)});
        inst.start = Point2{coord(rng), coord(rng)};
        inst.end = Point2{coord(rng), coord(rng)};
        inst.model.p = kPs[pdist(rng)];
        inst.state.u.resize(J);
        inst.state.v.resize(J);
        for (std::size_t j = 0; j < J; ++j) {
            inst.state.u[j] = coord(rng);
            inst.state.v[j] = coord(rng);
        }
        inst.state.lambda = lamdist(rng);

        // Reject nearly-coincident heads or nearly-degenerate segments.
        bool ok = true;
        for (std::size_t i = 0; i < J && ok; ++i)
            for (std::size_t k = i + 1; k < J && ok; ++k)
                if (dist(inst.layout.heads[i], inst.layout.heads[k]) < 1e-3) ok = false;
        const std::vector<Point2> pts =
            path_points(state_to_path(inst.state, inst.start, inst.end));
        for (std::size_t j = 0; j + 1 < pts.size() && ok; ++j)
            if (dist(pts[j], pts[j + 1]) < 1e-3) ok = false;
        if (ok) return inst;
    }
}

// Vector-relative agreement: max-norm of the difference against the
// max-norm of the analytic gradient (floored at 1 so a zero gradient is
// compared absolutely).  A per-component ratio would be dominated by
// finite-difference cancellation noise, which scales with the function
// value rather than with the individual component.
bool fd_matches(const std::vector<double>& analytic, const std::vector<double>& fd, double tol,
                double* worst) {
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        diff = std::max(diff, std::fabs(analytic[i] - fd[i]));
        norm = std::max(norm, std::fabs(analytic[i]));
    }
    const double err = diff / std::max(1.0, norm);
    if (worst) *worst = std::max(*worst, err);
    return err <= tol;
}

bool gradient_check(const DronePath& path, const ClusterLayout& layout, const PowerModel& model,
                    double* worst) {
    const std::size_t J = layout.size();
    std::vector<double> x(2 * J);
    for (std::size_t j = 0; j < J; ++j) {
        x[2 * j] = path.vertices[j].x;
        x[2 * j + 1] = path.vertices[j].y;
    }
    auto with_x = [&](const std::vector<double>& xx) {
        DronePath p2 = path;
        for (std::size_t j = 0; j < J; ++j) p2.vertices[j] = Point2{xx[2 * j], xx[2 * j + 1]};
        return p2;
    };
    const std::vector<double> fd_f =
        fd_gradient([&](const std::vector<double>& xx) { return energy(with_x(xx), layout, model); },
                    x, 1e-6);
    const std::vector<double> fd_g =
        fd_gradient([&](const std::vector<double>& xx) { return path_length(with_x(xx)); }, x,
                    1e-6);
    return fd_matches(grad_energy(path, layout, model), fd_f, 1e-6, worst) &&
           fd_matches(grad_length(path), fd_g, 1e-6, worst);
}

}  // namespace

SuiteResult suite_gradient_random(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    int bad = 0;
    for (int i = 0; i < count; ++i) {
        const RandomInstance inst = random_instance(rng, 8);
        const DronePath path = state_to_path(inst.state, inst.start, inst.end);
        if (!gradient_check(path, inst.layout, inst.model, &worst)) ++bad;
    }
    return {"gradient", bad == 0,
            std::to_string(count) + " random states, worst relative error " + fmt(worst)};
}

SuiteResult suite_gradient(const Scenario& scenario, int count) {
    std::mt19937_64 rng(scenario.seed + 17);
    const std::size_t J = scenario.layout.size();
    double span = 1.0;
    for (const Point2& h : scenario.layout.heads)
        span = std::max({span, std::fabs(h.x - scenario.start.x), std::fabs(h.y - scenario.start.y)});
    std::uniform_real_distribution<double> off(-0.3 * span, 0.3 * span);
    double worst = 0.0;
    int bad = 0;
    for (int i = 0; i < count; ++i) {
        DronePath path{scenario.start, scenario.end, {}};
        for (std::size_t j = 0; j < J; ++j)
            path.vertices.push_back(scenario.layout.heads[j] + Point2{off(rng), off(rng)});
        bool degenerate = false;
        const std::vector<Point2> pts = path_points(path);
        for (std::size_t j = 0; j + 1 < pts.size(); ++j)
            if (dist(pts[j], pts[j + 1]) < 1e-6) degenerate = true;
        if (degenerate) {
            --i;
            continue;
        }
        if (!gradient_check(path, scenario.layout, scenario.model, &worst)) ++bad;
    }
    return {"gradient", bad == 0,
            std::to_string(count) + " perturbed states, worst relative error " + fmt(worst)};
}

SuiteResult suite_residual(const Trace& trace) {
    // All samples up to (and including) a merge-event sample must stay
    // stationary to 1e-3 relative.
    std::size_t limit = trace.samples.size();
    if (!trace.merge_events.empty()) limit = trace.merge_events.front().sample + 1;
    double worst = 0.0;
    for (std::size_t i = 0; i < limit; ++i)
        worst = std::max(worst, relative_residual(trace.samples[i], trace));
    return {"residual", worst <= 1e-3,
            std::to_string(limit) + " samples, worst relative residual " + fmt(worst)};
}

SuiteResult suite_linearity(const Trace& trace) {
    const double L0 = trace.initial_length;
    std::size_t limit = trace.samples.size();
    if (!trace.merge_events.empty()) limit = trace.merge_events.front().sample + 1;
    double worst = 0.0;
    for (std::size_t i = 0; i < limit; ++i) {
        const TraceSample& smp = trace.samples[i];
        worst = std::max(worst, std::fabs(smp.length - (L0 - smp.state.s)));
    }
    return {"linearity", worst <= 0.01 * L0,
            "max |length(s) - (L0 - s)| = " + fmt(worst) + " (bound " + fmt(0.01 * L0) + ")"};
}

SuiteResult suite_monotonicity(const Trace& trace) {
    bool ok = true;
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        if (trace.samples[i].length >= trace.samples[i - 1].length) ok = false;
        if (trace.samples[i].energy < trace.samples[i - 1].energy - 1e-9) ok = false;
    }
    return {"monotonicity", ok,
            "lengths strictly decreasing, energy nondecreasing over " +
                std::to_string(trace.samples.size()) + " samples"};
}

SuiteResult suite_matrix_equivalence(std::uint64_t seed, int count, std::size_t max_heads) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const RandomInstance inst = random_instance(rng, max_heads);
        const SystemMatrix sys = assemble_matrix(assemble_coefficients(
            inst.state, inst.layout, inst.start, inst.end, inst.model, 0.0));
        const Eigen::MatrixXd H =
            block_form_matrix(inst.state, inst.layout, inst.start, inst.end, inst.model);
        worst = std::max(worst, (to_block_ordering(sys.K) - H).cwiseAbs().maxCoeff());
    }
    return {"matrix-equivalence", worst <= 1e-10,
            std::to_string(count) + " random states, max |K - H| = " + fmt(worst)};
}

SuiteResult suite_oracle_agreement(const Scenario& scenario, int restarts) {
    Scenario sc = scenario;
    TourOrder order;
    switch (sc.ordering) {
        case OrderingMode::exact: order = exact_order(sc.layout, sc.start, sc.end); break;
        case OrderingMode::heuristic: order = heuristic_order(sc.layout, sc.start, sc.end); break;
        case OrderingMode::as_given: order = as_given_order(sc.layout, sc.start, sc.end); break;
    }
    const ClusterLayout ordered = apply_order(sc.layout, order.perm);
    const double floor_len = dist(sc.start, sc.end) + 10.0 * sc.merge_threshold;

    bool ok = true;
    std::ostringstream detail;
    int tested = 0;
    for (double dL : {1.0, 2.0, 3.0}) {
        const double L = order.tour_length - dL;
        if (L <= floor_len + sc.step_size) {
            detail << "tour-" << dL << " skipped (below floor); ";
            continue;
        }
        Trace trace;
        try {
            trace = run_homotopy(sc, RunOptions{L, false, 0});
        } catch (const Error& e) {
            ok = false;
            detail << "tour-" << dL << " homotopy failed: " << e.what() << "; ";
            continue;
        }
        if (trace.terminated_reason != TerminatedReason::target_length_reached) {
            detail << "tour-" << dL << " skipped (" << to_string(trace.terminated_reason) << "); ";
            continue;
        }
        const double eh = trace.samples.back().energy;
        try {
            const OracleResult res =
                constrained_minimize(ordered, sc.start, sc.end, L, sc.model, restarts, sc.seed);
            ++tested;
            const bool pass =
                eh <= res.energy * 1.01 + 1e-12 && res.constraint_violation <= 1e-6 * L;
            if (!pass) ok = false;
            detail << "tour-" << dL << ": homotopy " << fmt(eh) << " vs oracle " << fmt(res.energy)
                   << (pass ? "" : " MISMATCH") << "; ";
        } catch (const Error& e) {
            ok = false;
            detail << "tour-" << dL << " oracle failed: " << e.what() << "; ";
        }
    }
    if (tested == 0) ok = false;
    return {"oracle-agreement", ok, detail.str()};
}

SuiteResult suite_closed_form(const Scenario& scenario) {
    if (scenario.layout.size() != 1)
        return {"closed-form", true, "skipped (more than one head)"};
    if (dist(scenario.start, scenario.end) != 0.0)
        return {"closed-form", true, "skipped (start != end)"};
    const Point2 head = scenario.layout.heads[0];
    const double tour = 2.0 * dist(head, scenario.start);
    const double floor_len = dist(scenario.start, scenario.end) + 10.0 * scenario.merge_threshold;
    const double L = floor_len + 0.6 * (tour - floor_len);

    const auto [cf_path, cf_lambda] = single_head_closed_form(head, scenario.start, L, scenario.model);
    const double cf_resid =
        lagrange_residual(cf_path, cf_lambda, scenario.layout, scenario.model);
    const double cf_energy = energy(cf_path, scenario.layout, scenario.model);

    const Trace trace = run_homotopy(scenario, RunOptions{L, false, 0});
    const TraceSample& last = trace.samples.back();
    const double dx = std::fabs(last.state.u[0] - cf_path.vertices[0].x);
    const double dy = std::fabs(last.state.v[0] - cf_path.vertices[0].y);
    const double de = std::fabs(last.energy - cf_energy);
    const double dl = std::fabs(last.state.lambda - cf_lambda);

    const bool ok = cf_resid <= 1e-10 && dx <= 1e-3 && dy <= 1e-3 &&
                    de <= 1e-3 * std::max(1.0, cf_energy) &&
                    dl <= 1e-2 * std::max(1.0, std::fabs(cf_lambda)) &&
                    trace.terminated_reason == TerminatedReason::target_length_reached;
    return {"closed-form", ok,
            "closed-form residual " + fmt(cf_resid) + ", vertex gap (" + fmt(dx) + ", " + fmt(dy) +
                "), energy gap " + fmt(de)};
}

std::vector<SuiteResult> run_validation_suites(const Scenario& scenario) {
    std::vector<SuiteResult> out;
    out.push_back(suite_gradient(scenario, 100));
    const Trace trace = run_homotopy(scenario);
    out.push_back(suite_residual(trace));
    out.push_back(suite_linearity(trace));
    out.push_back(suite_monotonicity(trace));
    out.push_back(suite_matrix_equivalence(scenario.seed + 29, 50, 8));
    out.push_back(suite_oracle_agreement(scenario, 8));
    if (scenario.layout.size() == 1) out.push_back(suite_closed_form(scenario));
    return out;
}

}  // namespace droneplan
