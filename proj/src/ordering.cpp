#include "droneplan/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "droneplan/errors.hpp"

namespace droneplan {

DronePath tour_path(const ClusterLayout& layout, Point2 start, Point2 end) {
    return DronePath{start, end, layout.heads};
}

ClusterLayout apply_order(const ClusterLayout& layout, const std::vector<std::size_t>& perm) {
    if (perm.size() != layout.size()) throw ValidationError("order has wrong length");
    ClusterLayout out;
    out.heads.reserve(perm.size());
    std::vector<bool> seen(layout.size(), false);
    for (std::size_t idx : perm) {
        if (idx >= layout.size() || seen[idx]) throw ValidationError("order is not a permutation");
        seen[idx] = true;
        out.heads.push_back(layout.heads[idx]);
    }
    return out;
}

static double order_length(const ClusterLayout& layout, Point2 start, Point2 end,
                           const std::vector<std::size_t>& perm) {
    return path_length(tour_path(apply_order(layout, perm), start, end));
}

TourOrder as_given_order(const ClusterLayout& layout, Point2 start, Point2 end) {
    validate_layout(layout);
    TourOrder t;
    t.perm.resize(layout.size());
    std::iota(t.perm.begin(), t.perm.end(), std::size_t{0});
    t.tour_length = order_length(layout, start, end, t.perm);
    return t;
}

TourOrder exact_order(const ClusterLayout& layout, Point2 start, Point2 end) {
    validate_layout(layout);
    const std::size_t J = layout.size();
    if (J > kExactOrderLimit)
        throw CapacityError("exact ordering supports at most " +
                            std::to_string(kExactOrderLimit) +
                            " heads; use heuristic_order for larger instances");

    std::vector<double> dh(J * J), ds(J), de(J);
    for (std::size_t i = 0; i < J; ++i) {
        ds[i] = dist(start, layout.heads[i]);
        de[i] = dist(layout.heads[i], end);
        for (std::size_t k = 0; k < J; ++k) dh[i * J + k] = dist(layout.heads[i], layout.heads[k]);
    }

    // cost[mask][c] = shortest continuation that starts at head c (not in
    // mask), visits every head in mask, then flies to the end point.
    const std::size_t full = (std::size_t{1} << J) - 1;
    std::vector<double> cost((full + 1) * J);
    for (std::size_t c = 0; c < J; ++c) cost[c] = de[c];
    for (std::size_t mask = 1; mask <= full; ++mask) {
        for (std::size_t c = 0; c < J; ++c) {
            if (mask & (std::size_t{1} << c)) continue;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t nxt = 0; nxt < J; ++nxt) {
                const std::size_t bit = std::size_t{1} << nxt;
                if (!(mask & bit)) continue;
                best = std::min(best, dh[c * J + nxt] + cost[(mask ^ bit) * J + nxt]);
            }
            cost[mask * J + c] = best;
        }
    }

    double total = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < J; ++f)
        total = std::min(total, ds[f] + cost[(full ^ (std::size_t{1} << f)) * J + f]);

    // Greedy front-to-back reconstruction picks the smallest head index at
    // every stage whose continuation still achieves the optimum, yielding
    // the lexicographically smallest optimal permutation.
    const double eps = 1e-9 * (1.0 + std::fabs(total));
    TourOrder t;
    t.perm.reserve(J);
    std::size_t mask = full;
    double remaining = total;
    bool at_start = true;
    std::size_t cur = 0;
    while (mask) {
        bool found = false;
        for (std::size_t nxt = 0; nxt < J && !found; ++nxt) {
            const std::size_t bit = std::size_t{1} << nxt;
            if (!(mask & bit)) continue;
            const double leg = at_start ? ds[nxt] : dh[cur * J + nxt];
            if (leg + cost[(mask ^ bit) * J + nxt] <= remaining + eps) {
                t.perm.push_back(nxt);
                remaining -= leg;
                mask ^= bit;
                cur = nxt;
                at_start = false;
                found = true;
            }
        }
        if (!found) throw Error("exact ordering reconstruction failed");  // unreachable
    }
    t.tour_length = order_length(layout, start, end, t.perm);
    return t;
}

TourOrder heuristic_order(const ClusterLayout& layout, Point2 start, Point2 end) {
    validate_layout(layout);
    const std::size_t J = layout.size();

    // Nearest-neighbour construction (ties toward the lower index).
    std::vector<std::size_t> perm;
    perm.reserve(J);
    std::vector<bool> used(J, false);
    Point2 cur = start;
    for (std::size_t step = 0; step < J; ++step) {
        std::size_t pick = J;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < J; ++k) {
            if (used[k]) continue;
            const double d = dist(cur, layout.heads[k]);
            if (d < best) {
                best = d;
                pick = k;
            }
        }
        used[pick] = true;
        perm.push_back(pick);
        cur = layout.heads[pick];
    }

    // 2-opt descent: reverse perm[i..k] while that shortens the path.  Only
    // the two boundary edges change, so the move is scored in O(1).
    auto point_at = [&](std::size_t pos) -> Point2 {
        // Position in the full start/heads/end sequence, 0 = start.
        if (pos == 0) return start;
        if (pos == J + 1) return end;
        return layout.heads[perm[pos - 1]];
    };
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t i = 1; i <= J - 1 && J >= 2; ++i) {
            for (std::size_t k = i + 1; k <= J; ++k) {
                const double removed = dist(point_at(i - 1), point_at(i)) +
                                       dist(point_at(k), point_at(k + 1));
                const double added = dist(point_at(i - 1), point_at(k)) +
                                     dist(point_at(i), point_at(k + 1));
                if (added < removed - 1e-12) {
                    std::reverse(perm.begin() + static_cast<std::ptrdiff_t>(i - 1),
                                 perm.begin() + static_cast<std::ptrdiff_t>(k));
                    improved = true;
                }
            }
        }
    }

    TourOrder t;
    t.perm = std::move(perm);
    t.tour_length = order_length(layout, start, end, t.perm);
    return t;
}

}  // namespace droneplan
