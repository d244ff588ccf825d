#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dcf/scenario.hpp"
#include "dcf/simulator.hpp"
#include "dcf/solver.hpp"

namespace dcf::sweep {

/// Sweepable scenario fields.
enum class Axis { Lambda, N, W0, M, PE, PayloadBits };

Axis axis_from_name(const std::string& name);
std::string axis_name(Axis axis);

struct SweepSpec {
  Scenario base;
  Axis axis = Axis::Lambda;
  std::vector<double> values;
  std::vector<std::string> outputs;  // empty = all metric columns
  solver::SolverOptions solver_opts;
  bool simulate = false;
  sim::SimConfig sim_config;
};

struct SweepRow {
  double axis_value = 0;
  solver::Solution solution;
  bool solver_ok = false;          // false: non-convergence or degenerate input
  std::string error;
  std::optional<sim::SimMetrics> sim;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int solver_calls = 0;
};

/// Applies one axis value to a copy of the base scenario.
Scenario apply_axis(const Scenario& base, Axis axis, double value);

/// Runs the solver (and optionally the simulator) over every axis value.
/// Per-point failures are recorded in the row; the sweep always finishes.
SweepResult run_sweep(const SweepSpec& spec);

/// CSV with a `# units:` comment, then a header row in the stable order
/// (axis, analytic metrics..., sim metrics..., ci..., converged).
void write_sweep_csv(const SweepSpec& spec, const SweepResult& result, std::ostream& os);

enum class CompareMetric { Throughput, AccessDelay };

struct ComparisonRow {
  double axis_value = 0;
  double analytic = 0;
  double simulated = 0;
  double ci_half_width = 0;
  double rel_error = 0;  // |analytic - simulated| / max(simulated, eps)
  bool converged = false;
};

struct ComparisonResult {
  std::vector<ComparisonRow> rows;
  double max_rel_error = 0;
  double mean_rel_error = 0;
};

ComparisonResult run_compare(const SweepSpec& spec, CompareMetric metric);
void write_compare_csv(const SweepSpec& spec, CompareMetric metric,
                       const ComparisonResult& result, std::ostream& os);

}  // namespace dcf::sweep
