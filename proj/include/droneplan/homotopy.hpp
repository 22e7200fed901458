#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "droneplan/geometry.hpp"
#include "droneplan/scenario.hpp"

namespace droneplan {

// One point on the continuation curve: harvesting vertices, multiplier, and
// the consumed-length parameter s.
struct HomotopyState {
    std::vector<double> u;
    std::vector<double> v;
    double lambda = 0.0;
    double s = 0.0;
};

DronePath state_to_path(const HomotopyState& state, Point2 start, Point2 end);

// Per-head derivative coefficients plus the intermediates they are built
// from.  Index convention: entry j-1 holds the values for head j (1..J);
// the segment arrays m, n, M, H have J+1 entries for segments 0..J, where
// segment j connects path point j to j+1 and M is the SQUARED segment
// length with H = M^(3/2).
struct CoefficientSet {
    std::size_t J = 0;
    double q = 0.0;
    static constexpr double r = 0.5;
    std::vector<double> a, b, A;
    std::vector<double> m, n, M, H;
    std::vector<std::array<double, 6>> s;  // s_j1..s_j6
    std::vector<std::array<double, 6>> t;  // t_j1..t_j6
    std::vector<double> w, z;
};

// Bordered linear system K * d(u,v,lambda)/ds = C with C = (0,...,0,-1).
// Unknowns are interleaved (u_1, v_1, ..., u_J, v_J, lambda).
struct SystemMatrix {
    Eigen::MatrixXd K;
    Eigen::VectorXd C;
};

// Reciprocal-condition floor below which the bordered solve is rejected.
inline constexpr double kRcondFloor = 1e-12;

CoefficientSet assemble_coefficients(const HomotopyState& state, const ClusterLayout& ordered,
                                     Point2 start, Point2 end, const PowerModel& model,
                                     double merge_threshold, bool floor_segments = false);

SystemMatrix assemble_matrix(const CoefficientSet& coeffs);

// Solve for the derivatives d(u_1, v_1, ..., u_J, v_J, lambda)/ds.
Eigen::VectorXd homotopy_rhs(const HomotopyState& state, const ClusterLayout& ordered,
                             Point2 start, Point2 end, const PowerModel& model,
                             double merge_threshold, bool floor_segments = false);

// One classical Runge-Kutta-4 update over a step h of consumed length.
HomotopyState rk4_step(const HomotopyState& state, double h, const ClusterLayout& ordered,
                       Point2 start, Point2 end, const PowerModel& model, double merge_threshold,
                       bool floor_segments = false);

// Near-tour seed: each vertex sits |eps_j| inside its head along the tour
// bisector, with lambda = -lambda0; the seed is then refined to a true
// constrained stationary point at that multiplier.
HomotopyState initial_state(const ClusterLayout& ordered, Point2 start, Point2 end,
                            const PowerModel& model, double lambda0);

// Smallest segment index whose (true) length is at or below the threshold.
std::optional<std::size_t> detect_merge(const HomotopyState& state, Point2 start, Point2 end,
                                        double threshold);

enum class TerminatedReason { target_length_reached, merge_detected, max_steps, straight_line_floor };
std::string to_string(TerminatedReason reason);

struct TraceSample {
    HomotopyState state;
    double length = 0.0;
    double energy = 0.0;
    double residual = 0.0;  // max-norm of grad f - lambda * grad g
};

struct MergeEvent {
    std::size_t sample = 0;   // index into Trace::samples
    std::size_t segment = 0;  // 0..J, segment j connects path point j to j+1
};

struct Trace {
    ClusterLayout ordered;           // heads in visit order
    Point2 start, end;
    PowerModel model;
    std::vector<std::size_t> order;  // applied permutation (0-based)
    double tour_length = 0.0;
    double initial_length = 0.0;     // L0 = length of the first sample
    double lambda0 = 0.0;            // effective seed magnitude actually used
    double step = 0.0;
    double merge_threshold = 0.0;
    std::vector<TraceSample> samples;
    std::vector<MergeEvent> merge_events;
    TerminatedReason terminated_reason = TerminatedReason::max_steps;
};

struct RunOptions {
    std::optional<double> target;        // stop at this path length
    bool continue_after_merge = false;   // keep integrating with floored
                                         // segments; post-merge samples are
                                         // not validated
    std::size_t max_steps = 0;           // 0 = 10 * L0 / h
};

// Phase-1 ordering followed by the guarded continuation sweep.
Trace run_homotopy(const Scenario& scenario, const RunOptions& options = {});

// Continuation state of requested path length L from a sampled trace (exact
// sample if one matches, otherwise interpolation between the bracketing
// samples, corrected against the measured length).
HomotopyState state_at_length(const Trace& trace, double L);

// Path of requested length L from a sampled trace.
DronePath solution_at_length(const Trace& trace, double L);

// Relative residual used by the trace guards: residual / max|grad f|.
double relative_residual(const TraceSample& sample, const Trace& trace);

}  // namespace droneplan
