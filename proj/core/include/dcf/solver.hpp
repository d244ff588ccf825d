#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "dcf/analytic.hpp"
#include "dcf/scenario.hpp"

namespace dcf::solver {

enum class SolveMode { Unsaturated, Saturated };

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 10000;
  double damping = 0.5;
  SolveMode mode = SolveMode::Unsaturated;
  double tau_seed = -1.0;  // <= 0 means the zero-contention seed 2/(w0+1)
  bool scan_roots = true;
  int scan_grid = 256;
};

struct ResidualTriple {
  double tau_defect = 0;
  double p_f_defect = 0;
  double p_q_defect = 0;
  double max_abs() const;
};

struct TauBracket {
  double lo = 0;
  double hi = 0;
};

struct Solution {
  analytic::SteadyState state;
  analytic::Metrics metrics;
  int iterations = 0;
  double residual = 0;
  bool converged = false;
  bool multiple_roots = false;
  std::vector<TauBracket> tau_brackets;
  std::vector<std::array<double, 3>> iterate_history;  // (tau, p_f, p_q), kept when not converged
};

class DegenerateInput : public std::runtime_error {
 public:
  explicit DegenerateInput(const std::string& what) : std::runtime_error(what) {}
};

/// Resolves the coupled system tau <-> p_F <-> p_Q <-> d_C by damped Picard
/// iteration: an inner loop solves (tau, p_F) at fixed p_Q, an outer loop
/// updates p_Q from the resulting access delay. Saturated mode pins p_Q = 1.
/// Never throws on plain non-convergence; the Solution carries the flag,
/// residual and recent iterate history instead. Throws DegenerateInput when
/// the failure probability is driven to 1 (e.g. p_e == 1).
Solution solve(const Scenario& s, const SolverOptions& opts = {});

/// The three defining-equation defects at (tau, p_q) without iterating.
/// p_f is derived from tau on the way, so its defect is zero by construction;
/// it is reported for symmetry with the convergence contract.
ResidualTriple residual(const Scenario& s, double tau, double p_q);

/// Sign-scan of the tau defect over a grid in (0,1); one bracket per sign change.
std::vector<TauBracket> scan_tau_roots(const Scenario& s, double p_q, int grid = 256);

}  // namespace dcf::solver
