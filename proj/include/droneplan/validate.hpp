#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "droneplan/homotopy.hpp"
#include "droneplan/scenario.hpp"

namespace droneplan {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Independent assembly of the continuation matrix from its block form
// (f-Hessian blocks plus bidiagonal length-curvature terms), in block
// ordering (u_1..u_J, v_1..v_J, lambda).  Shares no code with
// assemble_matrix; used to cross-check it.
Eigen::MatrixXd block_form_matrix(const HomotopyState& state, const ClusterLayout& ordered,
                                  Point2 start, Point2 end, const PowerModel& model);

// Permute the interleaved bordered matrix into block ordering.
Eigen::MatrixXd to_block_ordering(const Eigen::MatrixXd& K);

// Individual validation suites.  `count`-style parameters match the
// default acceptance settings.
SuiteResult suite_gradient_random(std::uint64_t seed, int count);
SuiteResult suite_gradient(const Scenario& scenario, int count);
SuiteResult suite_residual(const Trace& trace);
SuiteResult suite_linearity(const Trace& trace);
SuiteResult suite_monotonicity(const Trace& trace);
SuiteResult suite_matrix_equivalence(std::uint64_t seed, int count, std::size_t max_heads);
SuiteResult suite_oracle_agreement(const Scenario& scenario, int restarts);
SuiteResult suite_closed_form(const Scenario& scenario);

// Everything cmd_validate runs for one scenario.
std::vector<SuiteResult> run_validation_suites(const Scenario& scenario);

}  // namespace droneplan
