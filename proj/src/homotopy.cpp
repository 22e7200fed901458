#include "droneplan/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "droneplan/errors.hpp"
#include "droneplan/ordering.hpp"

namespace droneplan {

namespace {

// Guard bound on residual / max|grad f| for recorded samples: once the
// integrator can no longer hold the state this close to stationarity the
// continuation has stopped tracking (vertices are merging) and the sweep
// ends.
constexpr double kResidualGuard = 1e-3;

// Per-step tolerance for the energy-monotonicity guard.
constexpr double kEnergySlack = 1e-9;

}  // namespace

std::string to_string(TerminatedReason reason) {
    switch (reason) {
        case TerminatedReason::target_length_reached: return "target-length-reached";
        case TerminatedReason::merge_detected: return "merge-detected";
        case TerminatedReason::max_steps: return "max-steps";
        case TerminatedReason::straight_line_floor: return "straight-line-floor";
    }
    return "max-steps";
}

DronePath state_to_path(const HomotopyState& state, Point2 start, Point2 end) {
    DronePath path{start, end, {}};
    path.vertices.reserve(state.u.size());
    for (std::size_t j = 0; j < state.u.size(); ++j)
        path.vertices.push_back(Point2{state.u[j], state.v[j]});
    return path;
}

CoefficientSet assemble_coefficients(const HomotopyState& state, const ClusterLayout& ordered,
                                     Point2 start, Point2 end, const PowerModel& model,
                                     double merge_threshold, bool floor_segments) {
    const std::size_t J = ordered.size();
    if (state.u.size() != J || state.v.size() != J)
        throw ValidationError("state dimension does not match layout");
    validate_model(model);

    CoefficientSet c;
    c.J = J;
    c.q = model.q();
    const double p = model.p;
    const double q = c.q;

    c.a.resize(J);
    c.b.resize(J);
    c.A.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
        c.a[j] = state.u[j] - ordered.heads[j].x;
        c.b[j] = state.v[j] - ordered.heads[j].y;
        c.A[j] = c.a[j] * c.a[j] + c.b[j] * c.b[j];
    }

    // Segment drops m_j = P_j - P_{j+1}; M is the squared length.
    const std::vector<Point2> pts = path_points(state_to_path(state, start, end));
    const double floorM = merge_threshold * merge_threshold;
    c.m.resize(J + 1);
    c.n.resize(J + 1);
    c.M.resize(J + 1);
    c.H.resize(J + 1);
    for (std::size_t j = 0; j <= J; ++j) {
        c.m[j] = pts[j].x - pts[j + 1].x;
        c.n[j] = pts[j].y - pts[j + 1].y;
        double M = c.m[j] * c.m[j] + c.n[j] * c.n[j];
        if (M <= floorM) {
            if (!floor_segments)
                throw MergePendingError("segment " + std::to_string(j) +
                                            " is at or below the merge threshold",
                                        j);
            M = floorM;
        }
        c.M[j] = M;
        c.H[j] = M * std::sqrt(M);
    }

    c.s.resize(J);
    c.t.resize(J);
    c.w.resize(J);
    c.z.resize(J);
    const double lam = state.lambda;
    for (std::size_t j = 0; j < J; ++j) {
        const std::size_t im = j;      // incoming segment of head j+1
        const std::size_t ip = j + 1;  // outgoing segment
        const double A = c.A[j], a = c.a[j], b = c.b[j];
        const double Aq = std::pow(A, q);
        const double Aq1 = (A == 0.0) ? 0.0 : std::pow(A, q - 1.0);
        const double fuu = p * Aq + 2.0 * p * q * a * a * Aq1;
        const double fuv = 2.0 * p * q * a * b * Aq1;
        const double fvv = p * Aq + 2.0 * p * q * b * b * Aq1;

        const double Hm = c.H[im], Hp = c.H[ip];
        const double nm2 = c.M[im] - c.m[im] * c.m[im];  // = n_{j-1}^2
        const double np2 = c.M[ip] - c.m[ip] * c.m[ip];
        const double mm2 = c.M[im] - c.n[im] * c.n[im];  // = m_{j-1}^2
        const double mp2 = c.M[ip] - c.n[ip] * c.n[ip];
        const double xm = c.m[im] * c.n[im], xp = c.m[ip] * c.n[ip];

        c.s[j] = {lam * nm2 / Hm,
                  -lam * xm / Hm,
                  fuu - lam * (nm2 / Hm + np2 / Hp),
                  fuv + lam * (xm / Hm + xp / Hp),
                  lam * np2 / Hp,
                  -lam * xp / Hp};
        c.t[j] = {-lam * xm / Hm,
                  lam * mm2 / Hm,
                  fuv + lam * (xm / Hm + xp / Hp),
                  fvv - lam * (mm2 / Hm + mp2 / Hp),
                  -lam * xp / Hp,
                  lam * mp2 / Hp};
        c.w[j] = c.m[ip] / std::sqrt(c.M[ip]) - c.m[im] / std::sqrt(c.M[im]);
        c.z[j] = c.n[ip] / std::sqrt(c.M[ip]) - c.n[im] / std::sqrt(c.M[im]);
    }
    return c;
}

SystemMatrix assemble_matrix(const CoefficientSet& c) {
    const std::size_t J = c.J;
    const Eigen::Index N = static_cast<Eigen::Index>(2 * J + 1);
    SystemMatrix sys;
    sys.K = Eigen::MatrixXd::Zero(N, N);
    sys.C = Eigen::VectorXd::Zero(N);
    sys.C[N - 1] = -1.0;

    for (std::size_t j = 0; j < J; ++j) {
        const Eigen::Index ru = static_cast<Eigen::Index>(2 * j);
        const Eigen::Index rv = ru + 1;
        if (j > 0) {
            sys.K(ru, ru - 2) = c.s[j][0];
            sys.K(ru, ru - 1) = c.s[j][1];
            sys.K(rv, ru - 2) = c.t[j][0];
            sys.K(rv, ru - 1) = c.t[j][1];
        }
        sys.K(ru, ru) = c.s[j][2];
        sys.K(ru, rv) = c.s[j][3];
        sys.K(rv, ru) = c.t[j][2];
        sys.K(rv, rv) = c.t[j][3];
        if (j + 1 < J) {
            sys.K(ru, ru + 2) = c.s[j][4];
            sys.K(ru, ru + 3) = c.s[j][5];
            sys.K(rv, ru + 2) = c.t[j][4];
            sys.K(rv, ru + 3) = c.t[j][5];
        }
        sys.K(ru, N - 1) = -c.w[j];
        sys.K(rv, N - 1) = -c.z[j];
        sys.K(N - 1, ru) = c.w[j];
        sys.K(N - 1, rv) = c.z[j];
    }
    return sys;
}

Eigen::VectorXd homotopy_rhs(const HomotopyState& state, const ClusterLayout& ordered,
                             Point2 start, Point2 end, const PowerModel& model,
                             double merge_threshold, bool floor_segments) {
    const SystemMatrix sys = assemble_matrix(
        assemble_coefficients(state, ordered, start, end, model, merge_threshold, floor_segments));
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.K);
    const double rc = lu.rcond();
    if (!std::isfinite(rc) || rc < kRcondFloor)
        throw SingularSystemError(
            "bordered system is singular or ill-conditioned (rcond estimate " +
                std::to_string(rc) + ")",
            rc);
    return lu.solve(sys.C);
}

namespace {

HomotopyState advance(const HomotopyState& base, const Eigen::VectorXd& d, double c) {
    HomotopyState out = base;
    const std::size_t J = base.u.size();
    for (std::size_t j = 0; j < J; ++j) {
        out.u[j] += c * d[static_cast<Eigen::Index>(2 * j)];
        out.v[j] += c * d[static_cast<Eigen::Index>(2 * j + 1)];
    }
    out.lambda += c * d[static_cast<Eigen::Index>(2 * J)];
    out.s += c;
    return out;
}

}  // namespace

HomotopyState rk4_step(const HomotopyState& state, double h, const ClusterLayout& ordered,
                       Point2 start, Point2 end, const PowerModel& model, double merge_threshold,
                       bool floor_segments) {
    auto eval = [&](const HomotopyState& st, const char* stage) {
        try {
            return homotopy_rhs(st, ordered, start, end, model, merge_threshold, floor_segments);
        } catch (const MergePendingError& e) {
            throw MergePendingError(std::string(e.what()) + " at RK4 stage " + stage, e.segment);
        } catch (const SingularSystemError& e) {
            throw SingularSystemError(std::string(e.what()) + " at RK4 stage " + stage, e.rcond);
        }
    };
    const Eigen::VectorXd k1 = eval(state, "k1");
    const Eigen::VectorXd k2 = eval(advance(state, k1, 0.5 * h), "k2");
    const Eigen::VectorXd k3 = eval(advance(state, k2, 0.5 * h), "k3");
    const Eigen::VectorXd k4 = eval(advance(state, k3, h), "k4");
    return advance(state, (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0, h);
}

HomotopyState initial_state(const ClusterLayout& ordered, Point2 start, Point2 end,
                            const PowerModel& model, double lambda0) {
    validate_layout(ordered);
    validate_model(model);
    if (!(lambda0 > 0.0) || !std::isfinite(lambda0))
        throw ValidationError("lambda0 must be positive and finite");
    const std::size_t J = ordered.size();
    const double p = model.p;

    // Closed-form seed: offset each head along the inward bisector by the
    // magnitude that balances grad f against lambda0 * grad g.
    const std::vector<double> gg = grad_length(tour_path(ordered, start, end));
    HomotopyState state;
    state.u.resize(J);
    state.v.resize(J);
    state.lambda = -lambda0;
    state.s = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
        const double gx = gg[2 * j], gy = gg[2 * j + 1];
        const double norm = std::hypot(gx, gy);
        if (norm == 0.0)
            throw DegenerateBisectorError(
                "head " + std::to_string(j + 1) +
                    " lies straight between its tour neighbours; inward direction undefined",
                j + 1);
        const double eps = std::pow(lambda0 / p, 1.0 / (p - 1.0)) * std::pow(norm, 1.0 / (p - 1.0));
        state.u[j] = ordered.heads[j].x - eps * gx / norm;
        state.v[j] = ordered.heads[j].y - eps * gy / norm;
    }

    // The seed balances each head in isolation; neighbouring offsets shift
    // grad g slightly, so refine (u, v) at fixed lambda with Newton on
    // grad f - lambda * grad g = 0 to land exactly on the solution branch.
    const Eigen::Index n2 = static_cast<Eigen::Index>(2 * J);
    HomotopyState best = state;
    double best_res = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 20; ++iter) {
        const DronePath path = state_to_path(state, start, end);
        const std::vector<double> gf = grad_energy(path, ordered, model);
        const std::vector<double> gl = grad_length(path);
        Eigen::VectorXd R(n2);
        double scale = 1.0;
        for (std::size_t i = 0; i < 2 * J; ++i) {
            R[static_cast<Eigen::Index>(i)] = gf[i] - state.lambda * gl[i];
            scale = std::max(scale, std::fabs(gf[i]));
        }
        const double res = R.cwiseAbs().maxCoeff();
        if (res < best_res) {
            best_res = res;
            best = state;
        }
        if (res <= 1e-12 * scale) break;

        // The Jacobian of the stationarity residual is exactly the upper
        // 2J x 2J block of the bordered system.
        const SystemMatrix sys =
            assemble_matrix(assemble_coefficients(state, ordered, start, end, model, 0.0));
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.K.topLeftCorner(n2, n2));
        const Eigen::VectorXd delta = lu.solve(-R);
        if (!delta.allFinite()) break;
        for (std::size_t j = 0; j < J; ++j) {
            state.u[j] += delta[static_cast<Eigen::Index>(2 * j)];
            state.v[j] += delta[static_cast<Eigen::Index>(2 * j + 1)];
        }
    }
    {
        const DronePath path = state_to_path(best, start, end);
        const std::vector<double> gf = grad_energy(path, ordered, model);
        double scale = 1.0;
        for (double g : gf) scale = std::max(scale, std::fabs(g));
        if (!(best_res <= 1e-6 * scale))
            throw Error("initial state refinement did not converge (residual " +
                        std::to_string(best_res) + ")");
    }
    return best;
}

std::optional<std::size_t> detect_merge(const HomotopyState& state, Point2 start, Point2 end,
                                        double threshold) {
    const std::vector<Point2> pts = path_points(state_to_path(state, start, end));
    const double thr2 = threshold * threshold;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        const Point2 d = pts[j + 1] - pts[j];
        if (d.x * d.x + d.y * d.y <= thr2) return j;
    }
    return std::nullopt;
}

double relative_residual(const TraceSample& sample, const Trace& trace) {
    const DronePath path = state_to_path(sample.state, trace.start, trace.end);
    const std::vector<double> gf = grad_energy(path, trace.ordered, trace.model);
    double scale = 0.0;
    for (double g : gf) scale = std::max(scale, std::fabs(g));
    return sample.residual / std::max(scale, 1e-300);
}

namespace {

TraceSample make_sample(const HomotopyState& state, const ClusterLayout& ordered, Point2 start,
                        Point2 end, const PowerModel& model) {
    const DronePath path = state_to_path(state, start, end);
    TraceSample smp;
    smp.state = state;
    smp.length = path_length(path);
    smp.energy = energy(path, ordered, model);
    smp.residual = lagrange_residual(path, state.lambda, ordered, model);
    return smp;
}

struct GuardResult {
    bool ok = true;
    std::size_t segment = 0;  // offending / closest-to-merge segment
};

std::size_t shortest_segment(const HomotopyState& state, Point2 start, Point2 end) {
    const std::vector<Point2> pts = path_points(state_to_path(state, start, end));
    std::size_t seg = 0;
    double min_len = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        const double len = dist(pts[j], pts[j + 1]);
        if (len < min_len) {
            min_len = len;
            seg = j;
        }
    }
    return seg;
}

// Check a candidate sample against the trace invariants.  A violation means
// the fixed-step integrator has stopped tracking the stationary branch,
// which at desk scales only happens when vertices merge.
GuardResult check_candidate(const TraceSample& prev, const TraceSample& cand,
                            const ClusterLayout& ordered, Point2 start, Point2 end,
                            const PowerModel& model) {
    GuardResult r;
    const std::vector<Point2> cur = path_points(state_to_path(prev.state, start, end));
    const std::vector<Point2> nxt = path_points(state_to_path(cand.state, start, end));

    // Closest-to-merge segment of the candidate, for event attribution.
    double min_len = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < nxt.size(); ++j) {
        const double len = dist(nxt[j], nxt[j + 1]);
        if (len < min_len) {
            min_len = len;
            r.segment = j;
        }
    }

    for (std::size_t j = 0; j < cand.state.u.size(); ++j)
        if (!std::isfinite(cand.state.u[j]) || !std::isfinite(cand.state.v[j])) r.ok = false;
    if (!std::isfinite(cand.state.lambda) || !std::isfinite(cand.length) ||
        !std::isfinite(cand.energy))
        r.ok = false;
    if (!r.ok) return r;

    if (cand.length >= prev.length) r.ok = false;
    if (cand.energy < prev.energy - kEnergySlack) r.ok = false;

    // A segment whose direction flips between consecutive samples has
    // collapsed and re-expanded: a merge crossed between samples.
    for (std::size_t j = 0; j + 1 < nxt.size(); ++j) {
        const Point2 d0 = cur[j + 1] - cur[j];
        const Point2 d1 = nxt[j + 1] - nxt[j];
        if (d0.x * d1.x + d0.y * d1.y < 0.0) {
            r.ok = false;
            r.segment = j;
            return r;
        }
    }

    const DronePath path = state_to_path(cand.state, start, end);
    const std::vector<double> gf = grad_energy(path, ordered, model);
    double scale = 0.0;
    for (double g : gf) scale = std::max(scale, std::fabs(g));
    if (cand.residual > kResidualGuard * std::max(scale, 1e-300)) r.ok = false;
    return r;
}

}  // namespace

Trace run_homotopy(const Scenario& scenario, const RunOptions& options) {
    validate_scenario(scenario);

    TourOrder order;
    switch (scenario.ordering) {
        case OrderingMode::exact:
            order = exact_order(scenario.layout, scenario.start, scenario.end);
            break;
        case OrderingMode::heuristic:
            order = heuristic_order(scenario.layout, scenario.start, scenario.end);
            break;
        case OrderingMode::as_given:
            order = as_given_order(scenario.layout, scenario.start, scenario.end);
            break;
    }

    Trace trace;
    trace.ordered = apply_order(scenario.layout, order.perm);
    trace.start = scenario.start;
    trace.end = scenario.end;
    trace.model = scenario.model;
    trace.order = order.perm;
    trace.tour_length = order.tour_length;
    trace.lambda0 = scenario.lambda0;
    trace.step = scenario.step_size;
    trace.merge_threshold = scenario.merge_threshold;

    const double h = scenario.step_size;
    const double thr = scenario.merge_threshold;
    const double floor_len = dist(scenario.start, scenario.end) + 10.0 * thr;
    const double tour = order.tour_length;

    std::optional<double> target = options.target;
    if (target) {
        if (!std::isfinite(*target)) throw ValidationError("target length must be finite");
        if (*target <= floor_len)
            throw InfeasibleTargetError(
                "target length " + std::to_string(*target) +
                " is at or below the straight-line floor " + std::to_string(floor_len));
        if (*target > tour + 1e-12 * std::max(1.0, tour))
            throw InfeasibleTargetError("target length " + std::to_string(*target) +
                                        " exceeds the full tour length " + std::to_string(tour));
    }

    // Nothing to shrink when the target is the tour itself: report the exact
    // tour (vertices at the heads, zero energy, inactive multiplier).
    const bool at_tour =
        target && *target >= tour - 1e-12 * std::max(1.0, tour);
    if (at_tour) {
        HomotopyState tour_state;
        tour_state.u.reserve(trace.ordered.heads.size());
        tour_state.v.reserve(trace.ordered.heads.size());
        for (const Point2& head : trace.ordered.heads) {
            tour_state.u.push_back(head.x);
            tour_state.v.push_back(head.y);
        }
        tour_state.lambda = 0.0;
        tour_state.s = 0.0;
        trace.samples.push_back(
            make_sample(tour_state, trace.ordered, trace.start, trace.end, trace.model));
        trace.initial_length = trace.samples.front().length;
        trace.terminated_reason = TerminatedReason::target_length_reached;
        return trace;
    }

    HomotopyState state =
        initial_state(trace.ordered, trace.start, trace.end, trace.model, trace.lambda0);
    TraceSample first = make_sample(state, trace.ordered, trace.start, trace.end, trace.model);

    if (target && first.length <= *target) {
        // The default seed already sits below the target; rebuild it with a
        // smaller lambda0 so the sweep starts above the requested length.
        const double deficit = tour - first.length;
        const double needed = tour - *target;
        double lam0 =
            trace.lambda0 * std::pow(0.9 * needed / std::max(deficit, 1e-300), trace.model.p - 1.0);
        lam0 = std::min(lam0, trace.lambda0);
        bool ok = false;
        for (int tries = 0; tries < 80 && lam0 > 0.0; ++tries) {
            state = initial_state(trace.ordered, trace.start, trace.end, trace.model, lam0);
            first = make_sample(state, trace.ordered, trace.start, trace.end, trace.model);
            if (first.length > *target) {
                ok = true;
                break;
            }
            lam0 *= 0.5;
        }
        if (!ok)
            throw InfeasibleTargetError("target length " + std::to_string(*target) +
                                        " is too close to the full tour length " +
                                        std::to_string(tour));
        trace.lambda0 = lam0;
    }

    trace.samples.push_back(first);
    trace.initial_length = first.length;
    trace.terminated_reason = TerminatedReason::max_steps;

    const std::size_t max_steps =
        options.max_steps > 0
            ? options.max_steps
            : static_cast<std::size_t>(std::ceil(10.0 * trace.initial_length / h));
    const bool cont = options.continue_after_merge;
    std::set<std::size_t> merged_segments;
    bool any_merge = false;

    for (std::size_t k = 0; k < max_steps; ++k) {
        const TraceSample& prev = trace.samples.back();

        if (target && prev.length - *target < h) {
            // Landing step: shoot the remaining length in one truncated step
            // and correct it against the measured length, so the final
            // sample keeps the integrator's full  order of accuracy.
            if (prev.length - *target <= 1e-12 * std::max(1.0, *target)) {
                trace.terminated_reason = TerminatedReason::target_length_reached;
                break;
            }
            double hl = prev.length - *target;
            TraceSample cand;
            bool ok = true;
            try {
                for (int it = 0; it < 3; ++it) {
                    const HomotopyState probe = rk4_step(state, hl, trace.ordered, trace.start,
                                                         trace.end, trace.model, thr, cont);
                    hl += path_length(state_to_path(probe, trace.start, trace.end)) - *target;
                }
                const HomotopyState landed = rk4_step(state, hl, trace.ordered, trace.start,
                                                      trace.end, trace.model, thr, cont);
                cand = make_sample(landed, trace.ordered, trace.start, trace.end, trace.model);
            } catch (const MergePendingError&) {
                ok = false;
            } catch (const SingularSystemError&) {
                ok = false;
            }
            GuardResult guard;
            if (ok && !(cont && any_merge))
                guard = check_candidate(prev, cand, trace.ordered, trace.start, trace.end,
                                        trace.model);
            else if (!ok)
                guard.segment = shortest_segment(prev.state, trace.start, trace.end);
            if (!ok || !guard.ok) {
                trace.merge_events.push_back({trace.samples.size() - 1, guard.segment});
                // In continuation mode a finite landing sample is still
                // recorded (non-validated); otherwise the sweep ends here.
                if (!cont || !ok || !std::isfinite(cand.length) ||
                    !std::isfinite(cand.energy)) {
                    trace.terminated_reason = TerminatedReason::merge_detected;
                    break;
                }
                merged_segments.insert(guard.segment);
                any_merge = true;
            }
            state = cand.state;
            trace.samples.push_back(cand);
            trace.terminated_reason = TerminatedReason::target_length_reached;
            break;
        }

        TraceSample cand;
        bool stage_ok = true;
        std::size_t stage_segment = 0;
        try {
            const HomotopyState next =
                rk4_step(state, h, trace.ordered, trace.start, trace.end, trace.model, thr, cont);
            cand = make_sample(next, trace.ordered, trace.start, trace.end, trace.model);
        } catch (const MergePendingError& e) {
            if (k == 0) throw;
            stage_ok = false;
            stage_segment = e.segment;
        } catch (const SingularSystemError&) {
            if (k == 0) throw;
            stage_ok = false;
            stage_segment = shortest_segment(state, trace.start, trace.end);
        }
        if (!stage_ok) {
            trace.merge_events.push_back({trace.samples.size() - 1, stage_segment});
            trace.terminated_reason = TerminatedReason::merge_detected;
            break;
        }

        if (!(cont && any_merge)) {
            const GuardResult guard =
                check_candidate(prev, cand, trace.ordered, trace.start, trace.end, trace.model);
            if (!guard.ok) {
                trace.merge_events.push_back({trace.samples.size() - 1, guard.segment});
                if (!cont || !std::isfinite(cand.length) || !std::isfinite(cand.energy)) {
                    trace.terminated_reason = TerminatedReason::merge_detected;
                    break;
                }
                // Opt-in continuation: keep integrating with floored segments;
                // samples from here on are diagnostic, not validated.
                merged_segments.insert(guard.segment);
                any_merge = true;
            }
        } else if (!std::isfinite(cand.length) || !std::isfinite(cand.energy)) {
            trace.terminated_reason = TerminatedReason::merge_detected;
            break;
        }

        if (cand.length <= floor_len) {
            trace.terminated_reason = TerminatedReason::straight_line_floor;
            break;
        }

        state = cand.state;
        trace.samples.push_back(cand);

        const std::optional<std::size_t> merged =
            detect_merge(state, trace.start, trace.end, thr);
        if (merged && !merged_segments.count(*merged)) {
            merged_segments.insert(*merged);
            trace.merge_events.push_back({trace.samples.size() - 1, *merged});
            any_merge = true;
            if (!cont) {
                trace.terminated_reason = TerminatedReason::merge_detected;
                break;
            }
        }
    }
    return trace;
}

HomotopyState state_at_length(const Trace& trace, double L) {
    if (trace.samples.empty()) throw RangeError("trace has no samples");
    const double max_len = trace.samples.front().length;
    const double min_len = trace.samples.back().length;
    const double tol = 1e-12 * std::max(1.0, std::fabs(L));
    if (L > max_len + tol || L < min_len - tol)
        throw RangeError("length " + std::to_string(L) + " outside sampled range [" +
                         std::to_string(min_len) + ", " + std::to_string(max_len) + "]");
    const double Lc = std::clamp(L, min_len, max_len);

    for (const TraceSample& smp : trace.samples)
        if (std::fabs(smp.length - Lc) <= tol) return smp.state;

    // Bracketing pair (lengths are strictly decreasing).
    std::size_t lo = 0, hi = trace.samples.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (trace.samples[mid].length >= Lc)
            lo = mid;
        else
            hi = mid;
    }
    const TraceSample& s0 = trace.samples[lo];
    const TraceSample& s1 = trace.samples[hi];
    const std::size_t J = s0.state.u.size();

    auto interp = [&](double t) {
        HomotopyState st = s0.state;
        for (std::size_t j = 0; j < J; ++j) {
            st.u[j] = (1.0 - t) * s0.state.u[j] + t * s1.state.u[j];
            st.v[j] = (1.0 - t) * s0.state.v[j] + t * s1.state.v[j];
        }
        st.lambda = (1.0 - t) * s0.state.lambda + t * s1.state.lambda;
        st.s = (1.0 - t) * s0.state.s + t * s1.state.s;
        return st;
    };

    // First guess linear in sampled lengths, then a couple of corrections
    // against the measured length of the interpolated state.
    double t = (s0.length - Lc) / (s0.length - s1.length);
    for (int it = 0; it < 3; ++it) {
        const double got = path_length(state_to_path(interp(t), trace.start, trace.end));
        t += (got - Lc) / (s0.length - s1.length);
        t = std::clamp(t, 0.0, 1.0);
    }
    return interp(t);
}

DronePath solution_at_length(const Trace& trace, double L) {
    return state_to_path(state_at_length(trace, L), trace.start, trace.end);
}

}  // namespace droneplan
