#include "droneplan/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "droneplan/errors.hpp"

namespace droneplan {

std::pair<DronePath, double> single_head_closed_form(Point2 head, Point2 start, double L,
                                                     const PowerModel& model) {
    validate_model(model);
    if (!(L >= 0.0) || !std::isfinite(L)) throw ValidationError("L must be non-negative");
    const double d = dist(head, start);
    if (d == 0.0) throw ValidationError("head coincides with the start point");
    if (L > 2.0 * d)
        throw InfeasibleTargetError("constraint is slack: length " + std::to_string(L) +
                                    " exceeds the out-and-back tour " + std::to_string(2.0 * d));
    const double t = 0.5 * L / d;
    DronePath path{start, start, {start + t * (head - start)}};
    const double gap = d - 0.5 * L;
    const double lambda = -(0.5 * model.p) * std::pow(gap, model.p - 1.0);
    return {path, lambda};
}

std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& field,
                                const std::vector<double>& point, double h) {
    if (!(h > 0.0)) throw ValidationError("finite-difference step must be positive");
    std::vector<double> grad(point.size());
    std::vector<double> x = point;
    for (std::size_t i = 0; i < point.size(); ++i) {
        x[i] = point[i] + h;
        const double fp = field(x);
        x[i] = point[i] - h;
        const double fm = field(x);
        x[i] = point[i];
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

namespace {

// Flat (u_1, v_1, ..., u_J, v_J) coordinates for the minimizer.
DronePath unflatten(const std::vector<double>& x, Point2 start, Point2 end) {
    DronePath path{start, end, {}};
    path.vertices.reserve(x.size() / 2);
    for (std::size_t j = 0; j + 1 < x.size(); j += 2)
        path.vertices.push_back(Point2{x[j], x[j + 1]});
    return path;
}

}  // namespace

OracleResult constrained_minimize(const ClusterLayout& ordered, Point2 start, Point2 end,
                                  double L, const PowerModel& model, int restarts,
                                  std::uint64_t seed) {
    validate_layout(ordered);
    validate_model(model);
    if (restarts < 1) throw ValidationError("restarts must be >= 1");
    const std::size_t J = ordered.size();
    const std::size_t n = 2 * J;

    auto f_of = [&](const std::vector<double>& x) {
        return energy(unflatten(x, start, end), ordered, model);
    };
    auto c_of = [&](const std::vector<double>& x) {
        return path_length(unflatten(x, start, end)) - L;
    };

    std::vector<double> base(n);
    for (std::size_t j = 0; j < J; ++j) {
        base[2 * j] = ordered.heads[j].x;
        base[2 * j + 1] = ordered.heads[j].y;
    }

    const double fd_h = 1e-7;
    const double scale = std::max(1.0, 0.1 * L);

    struct Attempt {
        double f = std::numeric_limits<double>::infinity();
        double viol = std::numeric_limits<double>::infinity();
        std::vector<double> x;
        bool feasible = false;
    };
    std::vector<Attempt> attempts;

    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(r) * 0x9e3779b97f4a7c15ULL);
        std::normal_distribution<double> noise(0.0, 0.3 * scale);
        std::vector<double> x = base;
        if (r > 0)
            for (double& xi : x) xi += noise(rng);

        double lam_est = 0.0;
        double mu = 10.0;
        double prev_c = std::numeric_limits<double>::infinity();
        for (int outer = 0; outer < 40; ++outer) {
            auto AL = [&](const std::vector<double>& xx) {
                const double c = c_of(xx);
                return f_of(xx) + lam_est * c + 0.5 * mu * c * c;
            };
            // Gradient descent with Armijo backtracking.
            double step = 1.0 / mu;
            for (int it = 0; it < 250; ++it) {
                const std::vector<double> g = fd_gradient(AL, x, fd_h);
                double gnorm2 = 0.0;
                for (double gi : g) gnorm2 += gi * gi;
                if (gnorm2 < 1e-18) break;
                const double fx = AL(x);
                double t = std::min(step * 4.0, 1e3);
                bool moved = false;
                while (t > 1e-14) {
                    std::vector<double> xn = x;
                    for (std::size_t i = 0; i < n; ++i) xn[i] -= t * g[i];
                    if (AL(xn) <= fx - 1e-4 * t * gnorm2) {
                        x = std::move(xn);
                        step = t;
                        moved = true;
                        break;
                    }
                    t *= 0.5;
                }
                if (!moved) break;
            }
            const double c = c_of(x);
            if (std::fabs(c) <= 1e-8 * std::max(1.0, L)) break;
            lam_est += mu * c;
            mu = std::min(mu * (std::fabs(c) > 0.25 * std::fabs(prev_c) ? 4.0 : 2.0), 1e10);
            prev_c = c;
        }

        // Feasibility repair: Newton along the constraint normal pushes the
        // violation to rounding level without moving off the local optimum.
        for (int it = 0; it < 4; ++it) {
            const double c = c_of(x);
            if (std::fabs(c) <= 1e-12 * std::max(1.0, L)) break;
            const std::vector<double> gc = fd_gradient(c_of, x, fd_h);
            double gn2 = 0.0;
            for (double gi : gc) gn2 += gi * gi;
            if (gn2 < 1e-18) break;
            for (std::size_t i = 0; i < n; ++i) x[i] -= c * gc[i] / gn2;
        }

        Attempt att;
        att.x = x;
        att.f = f_of(x);
        att.viol = std::fabs(c_of(x));
        att.feasible = att.viol <= 1e-6 * std::max(1.0, L) &&
                       std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
        attempts.push_back(std::move(att));
    }

    // Reduce: minimum energy among feasible attempts, ties toward the lower
    // constraint violation.
    const Attempt* best = nullptr;
    for (const Attempt& att : attempts) {
        if (!att.feasible) continue;
        if (!best || att.f < best->f - 1e-12 ||
            (std::fabs(att.f - best->f) <= 1e-12 && att.viol < best->viol))
            best = &att;
    }
    if (!best)
        throw Error("constrained minimizer found no feasible result in " +
                    std::to_string(restarts) + " restarts");

    OracleResult out;
    out.path = unflatten(best->x, start, end);
    out.energy = best->f;
    out.constraint_violation = best->viol;
    for (const Attempt& att : attempts)
        if (att.feasible && att.f <= best->f * 1.001 + 1e-15) ++out.restarts_agreeing;
    return out;
}

}  // namespace droneplan
