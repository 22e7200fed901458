#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "droneplan/geometry.hpp"

namespace droneplan {

enum class OrderingMode { exact, heuristic, as_given };

std::string to_string(OrderingMode mode);
OrderingMode ordering_mode_from_string(const std::string& name);

// One planning problem: the head layout as listed in the input file plus
// the continuation controls.
struct Scenario {
    ClusterLayout layout;
    Point2 start;
    Point2 end;
    PowerModel model;
    double lambda0 = 0.05;
    double step_size = 0.1;
    double merge_threshold = 1e-3;
    std::vector<double> target_lengths;
    OrderingMode ordering = OrderingMode::exact;
    std::uint64_t seed = 0;
};

// Exponents above this overflow/underflow A^q in double precision at
// desk-scale coordinates, so scenario validation rejects them.
inline constexpr double kMaxExponent = 16.0;

// Throw ValidationError if any field is out of range or an invariant is
// broken (coincident heads, non-positive step, p outside [2, 16], ...).
void validate_scenario(const Scenario& scenario);

// Parse and validate a scenario from JSON text / from a file.  Unknown keys
// are rejected; messages carry the offending line or field.
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

// Serialize back to JSON (round-trip of every field).
std::string scenario_to_json(const Scenario& scenario);

}  // namespace droneplan
