#pragma once

#include <string>
#include <vector>

#include "droneplan/homotopy.hpp"

namespace droneplan {

// Shortest round-trip decimal form of a double (deterministic across runs).
std::string format_double(double x);

// Write content to path via a temp file + rename so readers never observe a
// partial file.  Throws IoError on failure.
void atomic_write(const std::string& path, const std::string& content);

// step,s,length,energy,lambda,residual,merge_flag,u_1,v_1,...,u_J,v_J
std::string trace_csv(const Trace& trace);

// s,length,path_defect,energy,energy^{1/p},lambda,merged — one row per
// sample, or per requested target length when targets is non-empty.
std::string sweep_csv(const Trace& trace, const std::vector<double>& targets);

// Ordered heads, applied order, final vertices, length, energy, lambda.
std::string plan_json(const Trace& trace, double target_length);

// Diagnostic plots.
std::string path_svg(const Trace& trace);
std::string defect_vs_energy_svg(const Trace& trace);
std::string length_vs_step_svg(const Trace& trace);

// Minimal CSV reader for round-trip checks: returns the header cells and
// numeric rows.  Throws IoError / ValidationError on malformed input.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);

}  // namespace droneplan
