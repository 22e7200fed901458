#pragma once

#include <cstddef>
#include <vector>

#include "droneplan/geometry.hpp"

namespace droneplan {

// Visit order for the heads (0-based indices into the layout) plus the
// resulting start -> heads -> end tour length.
struct TourOrder {
    std::vector<std::size_t> perm;
    double tour_length = 0.0;
};

// Largest J accepted by the exact dynamic program (2^J * J^2 work).
inline constexpr std::size_t kExactOrderLimit = 14;

// Optimal visit order by Held-Karp dynamic programming.  Ties are broken
// toward the lexicographically smallest permutation.  Throws CapacityError
// for J > kExactOrderLimit (use heuristic_order instead).
TourOrder exact_order(const ClusterLayout& layout, Point2 start, Point2 end);

// Nearest-neighbour construction followed by 2-opt descent to a local
// optimum; never worse than plain nearest-neighbour.
TourOrder heuristic_order(const ClusterLayout& layout, Point2 start, Point2 end);

// Identity order (heads visited as listed).
TourOrder as_given_order(const ClusterLayout& layout, Point2 start, Point2 end);

// Layout with heads rearranged into the given visit order.
ClusterLayout apply_order(const ClusterLayout& layout, const std::vector<std::size_t>& perm);

// Path that visits every head exactly (vertices on the heads).
DronePath tour_path(const ClusterLayout& layout, Point2 start, Point2 end);

}  // namespace droneplan
