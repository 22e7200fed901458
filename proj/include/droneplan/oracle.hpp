#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "droneplan/geometry.hpp"

namespace droneplan {

// Best result of the multistart constrained minimizer.
struct OracleResult {
    DronePath path;
    double energy = 0.0;
    double constraint_violation = 0.0;  // |path_length - L|
    int restarts_agreeing = 0;          // restarts within 0.1% of the best energy
};

// Exact optimum for a single head with start = end: the vertex sits L/2
// along the ray from start to the head.  Returns the path and the
// multiplier.  Throws InfeasibleTargetError when L > 2*|head - start|
// (constraint slack: the full tour is reachable).
std::pair<DronePath, double> single_head_closed_form(Point2 head, Point2 start, double L,
                                                     const PowerModel& model);

// Componentwise central finite differences of an arbitrary scalar field.
std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& field,
                                const std::vector<double>& point, double h);

// General-purpose multistart augmented-Lagrangian minimizer for
//   minimize energy  subject to  path_length = L,
// sharing no derivative code with the continuation engine (all gradients
// are finite differences).  Heads must already be in visit order.
OracleResult constrained_minimize(const ClusterLayout& ordered, Point2 start, Point2 end,
                                  double L, const PowerModel& model, int restarts = 16,
                                  std::uint64_t seed = 0);

}  // namespace droneplan
