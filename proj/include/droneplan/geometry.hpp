#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace droneplan {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double c, Point2 a) { return {c * a.x, c * a.y}; }

double dist(Point2 a, Point2 b);
bool is_finite(Point2 a);

// Transmission energy grows as distance^p; q = p/2 - 1 shows up throughout
// the derivative formulas.
struct PowerModel {
    double p = 2.0;
    double q() const { return 0.5 * p - 1.0; }
};

// Fixed cluster-head positions, in visit order once an ordering has been
// applied.
struct ClusterLayout {
    std::vector<Point2> heads;
    std::size_t size() const { return heads.size(); }
};

// Drone path: start, one harvesting vertex per head, end.
struct DronePath {
    Point2 start;
    Point2 end;
    std::vector<Point2> vertices;
};

// Throw ValidationError if an invariant is broken (J >= 1, distinct heads,
// finite coordinates; p >= 2 and finite).
void validate_layout(const ClusterLayout& layout);
void validate_model(const PowerModel& model);

// start, vertices..., end as one flat sequence of J + 2 points.
std::vector<Point2> path_points(const DronePath& path);

// Total energy  f = sum_j |vertex_j - head_j|^p.
double energy(const DronePath& path, const ClusterLayout& layout, const PowerModel& model);

// Total travel distance  g = sum of the J + 1 segment lengths.
double path_length(const DronePath& path);

// Gradients as 2J vectors with interleaved component pairs
// (d/du_1, d/dv_1, d/du_2, d/dv_2, ...).
std::vector<double> grad_energy(const DronePath& path, const ClusterLayout& layout,
                                const PowerModel& model);
std::vector<double> grad_length(const DronePath& path);

// max-norm of  grad f - lambda * grad g : zero exactly at a constrained
// stationary point.
double lagrange_residual(const DronePath& path, double lambda, const ClusterLayout& layout,
                         const PowerModel& model);

// Move vertex j a fraction delta of the way to its head.  Returns the new
// path and whether anything moved (false when the vertex already sits on
// the head).
std::pair<DronePath, bool> shrink_toward(const DronePath& path, const ClusterLayout& layout,
                                         std::size_t j, double delta);

}  // namespace droneplan
