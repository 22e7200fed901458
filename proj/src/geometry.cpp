#include "droneplan/geometry.hpp"

#include <cmath>
#include <string>

#include "droneplan/errors.hpp"

namespace droneplan {

double dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool is_finite(Point2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

void validate_layout(const ClusterLayout& layout) {
    const std::size_t J = layout.size();
    if (J == 0) throw ValidationError("layout must contain at least one head");
    for (std::size_t i = 0; i < J; ++i) {
        if (!is_finite(layout.heads[i]))
            throw ValidationError("head " + std::to_string(i + 1) + " has non-finite coordinates");
        for (std::size_t k = i + 1; k < J; ++k) {
            if (layout.heads[i].x == layout.heads[k].x && layout.heads[i].y == layout.heads[k].y)
                throw ValidationError("heads " + std::to_string(i + 1) + " and " +
                                      std::to_string(k + 1) + " coincide");
        }
    }
}

void validate_model(const PowerModel& model) {
    if (!std::isfinite(model.p) || model.p < 2.0)
        throw ValidationError("power loss exponent must be finite and >= 2");
}

std::vector<Point2> path_points(const DronePath& path) {
    std::vector<Point2> pts;
    pts.reserve(path.vertices.size() + 2);
    pts.push_back(path.start);
    pts.insert(pts.end(), path.vertices.begin(), path.vertices.end());
    pts.push_back(path.end);
    return pts;
}

static void check_dims(const DronePath& path, const ClusterLayout& layout) {
    if (path.vertices.size() != layout.size())
        throw ValidationError("path has " + std::to_string(path.vertices.size()) +
                              " vertices but layout has " + std::to_string(layout.size()) +
                              " heads");
}

double energy(const DronePath& path, const ClusterLayout& layout, const PowerModel& model) {
    check_dims(path, layout);
    validate_model(model);
    double f = 0.0;
    for (std::size_t j = 0; j < layout.size(); ++j) {
        const double a = path.vertices[j].x - layout.heads[j].x;
        const double b = path.vertices[j].y - layout.heads[j].y;
        f += std::pow(a * a + b * b, 0.5 * model.p);
    }
    return f;
}

double path_length(const DronePath& path) {
    const std::vector<Point2> pts = path_points(path);
    double g = 0.0;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) g += dist(pts[j], pts[j + 1]);
    return g;
}

std::vector<double> grad_energy(const DronePath& path, const ClusterLayout& layout,
                                const PowerModel& model) {
    check_dims(path, layout);
    validate_model(model);
    const double q = model.q();
    std::vector<double> grad(2 * layout.size(), 0.0);
    for (std::size_t j = 0; j < layout.size(); ++j) {
        const double a = path.vertices[j].x - layout.heads[j].x;
        const double b = path.vertices[j].y - layout.heads[j].y;
        const double A = a * a + b * b;
        if (A == 0.0 && q < 0.0)
            throw ValidationError("energy gradient undefined at a head for p < 2");
        // p*a*A^q evaluated directly: finite for all p >= 2, including the
        // vertex-on-head case where A^(q-1) alone would blow up.
        const double Aq = std::pow(A, q);
        grad[2 * j] = model.p * a * Aq;
        grad[2 * j + 1] = model.p * b * Aq;
    }
    return grad;
}

std::vector<double> grad_length(const DronePath& path) {
    const std::vector<Point2> pts = path_points(path);
    const std::size_t J = path.vertices.size();
    // Unit tangent of each segment; segment j runs pts[j] -> pts[j+1].
    std::vector<Point2> tang(J + 1);
    for (std::size_t j = 0; j <= J; ++j) {
        const double len = dist(pts[j], pts[j + 1]);
        if (len == 0.0)
            throw DegenerateSegmentError("segment " + std::to_string(j) + " has zero length",
                                         j);
        tang[j] = (1.0 / len) * (pts[j + 1] - pts[j]);
    }
    std::vector<double> grad(2 * J, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
        // d g / d vertex_j = (incoming unit tangent) - (outgoing unit tangent)
        grad[2 * j] = tang[j].x - tang[j + 1].x;
        grad[2 * j + 1] = tang[j].y - tang[j + 1].y;
    }
    return grad;
}

double lagrange_residual(const DronePath& path, double lambda, const ClusterLayout& layout,
                         const PowerModel& model) {
    const std::vector<double> gf = grad_energy(path, layout, model);
    const std::vector<double> gg = grad_length(path);
    double r = 0.0;
    for (std::size_t i = 0; i < gf.size(); ++i) r = std::max(r, std::fabs(gf[i] - lambda * gg[i]));
    return r;
}

std::pair<DronePath, bool> shrink_toward(const DronePath& path, const ClusterLayout& layout,
                                         std::size_t j, double delta) {
    check_dims(path, layout);
    if (j >= layout.size()) throw ValidationError("vertex index out of range");
    if (!(delta > 0.0) || delta > 1.0) throw ValidationError("delta must lie in (0, 1]");
    DronePath out = path;
    const Point2 w = path.vertices[j];
    const Point2 z = layout.heads[j];
    if (w.x == z.x && w.y == z.y) return {out, false};
    out.vertices[j] = w + delta * (z - w);
    return {out, true};
}

}  // namespace droneplan
