#include "droneplan/cli_cmds.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "droneplan/errors.hpp"
#include "droneplan/homotopy.hpp"
#include "droneplan/ordering.hpp"
#include "droneplan/scenario.hpp"
#include "droneplan/trace_io.hpp"
#include "droneplan/validate.hpp"

namespace droneplan {

namespace {

Scenario load_with_overrides(const std::string& path, const CliOverrides& overrides) {
    Scenario sc = load_scenario(path);
    if (overrides.step_size) sc.step_size = *overrides.step_size;
    if (overrides.lambda0) sc.lambda0 = *overrides.lambda0;
    if (overrides.merge_threshold) sc.merge_threshold = *overrides.merge_threshold;
    if (overrides.ordering) sc.ordering = ordering_mode_from_string(*overrides.ordering);
    if (overrides.seed) sc.seed = *overrides.seed;
    validate_scenario(sc);
    return sc;
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

// Uniform mapping from thrown failure classes onto the exit-code contract.
template <typename Fn>
int guard_exit(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const InfeasibleTargetError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace

int cmd_plan(const std::string& scenario_path, double target_length, const std::string& out_dir,
             const CliOverrides& overrides, std::ostream& out, std::ostream& err) {
    return guard_exit(err, [&]() -> int {
        Scenario sc = load_with_overrides(scenario_path, overrides);
        if (!std::isfinite(target_length) || target_length <= 0.0)
            throw ValidationError("target length must be positive and finite");

        TourOrder order;
        switch (sc.ordering) {
            case OrderingMode::exact: order = exact_order(sc.layout, sc.start, sc.end); break;
            case OrderingMode::heuristic:
                order = heuristic_order(sc.layout, sc.start, sc.end);
                break;
            case OrderingMode::as_given:
                order = as_given_order(sc.layout, sc.start, sc.end);
                break;
        }
        // At or beyond the full tour the constraint is slack: the tour itself
        // is the plan and no shrinking is needed.
        const double effective_target = std::min(target_length, order.tour_length);

        RunOptions options;
        options.target = effective_target;
        Trace trace = run_homotopy(sc, options);

        ensure_directory(out_dir);
        atomic_write(join(out_dir, "trace.csv"), trace_csv(trace));
        if (trace.terminated_reason != TerminatedReason::target_length_reached) {
            err << "error: continuation terminated (" << to_string(trace.terminated_reason)
                << ") at length " << format_double(trace.samples.back().length)
                << " before reaching target " << format_double(effective_target)
                << "; partial trace written to " << join(out_dir, "trace.csv") << '\n';
            return kExitNumerical;
        }
        atomic_write(join(out_dir, "plan.json"), plan_json(trace, target_length));
        atomic_write(join(out_dir, "path.svg"), path_svg(trace));

        const TraceSample& fin = trace.samples.back();
        out << "plan: tour " << format_double(trace.tour_length) << ", target "
            << format_double(target_length) << ", length " << format_double(fin.length)
            << ", energy " << format_double(fin.energy) << ", lambda "
            << format_double(fin.state.lambda) << ", steps " << (trace.samples.size() - 1)
            << '\n';
        out << "wrote " << join(out_dir, "plan.json") << ", " << join(out_dir, "trace.csv")
            << ", " << join(out_dir, "path.svg") << '\n';
        return kExitOk;
    });
}

int cmd_sweep(const std::string& scenario_path, const std::string& out_dir,
              const CliOverrides& overrides, std::ostream& out, std::ostream& err) {
    return guard_exit(err, [&]() -> int {
        Scenario sc = load_with_overrides(scenario_path, overrides);

        Trace trace = run_homotopy(sc);
        if (trace.terminated_reason == TerminatedReason::max_steps) {
            err << "error: sweep hit the step budget before any terminal event; "
                   "no outputs written\n";
            return kExitNumerical;
        }

        // Keep only requested target lengths the sampled range can serve.
        std::vector<double> targets;
        const double max_len = trace.samples.front().length;
        const double min_len = trace.samples.back().length;
        for (double t : sc.target_lengths) {
            if (t <= max_len + 1e-12 * std::max(1.0, t) &&
                t >= min_len - 1e-12 * std::max(1.0, t)) {
                targets.push_back(t);
            } else {
                err << "warning: target length " << format_double(t)
                    << " outside the sampled range [" << format_double(min_len) << ", "
                    << format_double(max_len) << "]; skipped\n";
            }
        }

        ensure_directory(out_dir);
        atomic_write(join(out_dir, "sweep.csv"), sweep_csv(trace, targets));
        atomic_write(join(out_dir, "trace.csv"), trace_csv(trace));
        atomic_write(join(out_dir, "defect_vs_energy.svg"), defect_vs_energy_svg(trace));
        atomic_write(join(out_dir, "length_vs_step.svg"), length_vs_step_svg(trace));

        out << "sweep: tour " << format_double(trace.tour_length) << ", sampled ["
            << format_double(min_len) << ", " << format_double(max_len) << "] over "
            << trace.samples.size() << " samples, terminated "
            << to_string(trace.terminated_reason) << '\n';
        out << "wrote " << join(out_dir, "sweep.csv") << ", " << join(out_dir, "trace.csv")
            << ", " << join(out_dir, "defect_vs_energy.svg") << ", "
            << join(out_dir, "length_vs_step.svg") << '\n';
        return kExitOk;
    });
}

int cmd_validate(const std::string& scenario_path, const CliOverrides& overrides,
                 std::ostream& out, std::ostream& err) {
    return guard_exit(err, [&]() -> int {
        Scenario sc = load_with_overrides(scenario_path, overrides);
        const std::vector<SuiteResult> results = run_validation_suites(sc);
        bool all_passed = true;
        std::size_t width = 0;
        for (const SuiteResult& r : results) width = std::max(width, r.name.size());
        for (const SuiteResult& r : results) {
            out << r.name << std::string(width - r.name.size(), ' ') << "  "
                << (r.passed ? "PASS" : "FAIL") << "  " << r.detail << '\n';
            all_passed = all_passed && r.passed;
        }
        if (!all_passed) {
            for (const SuiteResult& r : results)
                if (!r.passed) err << "failed invariant: " << r.name << " (" << r.detail << ")\n";
            return kExitSuiteFailure;
        }
        return kExitOk;
    });
}

}  // namespace droneplan
