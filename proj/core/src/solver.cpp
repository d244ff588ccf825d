#include "dcf/solver.hpp"

#include <algorithm>
#include <cmath>

namespace dcf::solver {

namespace {

constexpr double kPfCap = 1.0 - 1e-9;
constexpr double kTauFloor = 1e-15;

struct Timing {
  double t_sigma, t_s, t_f;
};

struct Derived {
  analytic::SteadyState state;
  double t_slot = 0, n_slot = 0, d_c = 0;
};

// Full consistent state from (tau, p_q). With clamp_pf the failure probability
// is capped just below 1 so grid scans stay evaluable; the solve path instead
// reports DegenerateInput.
Derived derive(const Scenario& s, const Timing& tm, double tau, double p_q, bool clamp_pf) {
  Derived d;
  auto& st = d.state;
  st.tau = tau;
  st.p_q = p_q;
  st.p_b = analytic::busy_prob(tau, s.n);
  st.p_c = analytic::collision_prob(tau, s.n);
  st.p_p = analytic::capture_prob(tau, s.n, s.channel);
  st.p_f = analytic::failure_prob(st.p_c, st.p_p, s.channel.p_e);
  if (st.p_f >= kPfCap) {
    if (!clamp_pf) throw DegenerateInput("failure probability driven to 1");
    st.p_f = kPfCap;
  }
  st.p_s = 1.0 - st.p_f;
  d.t_slot = analytic::expected_slot_time(st, tm.t_sigma, tm.t_s, tm.t_f, s.channel.p_e);
  d.n_slot = analytic::hoq_slots(st.p_f, s.protocol.w0, s.protocol.m, s.protocol.m_prime);
  d.d_c = analytic::access_delay(d.n_slot, d.t_slot);
  return d;
}

double next_tau(const Scenario& s, const Derived& d, double p_q) {
  if (p_q <= 0.0) return 0.0;
  const double b =
      analytic::b00(d.state.p_f, p_q, s.protocol.w0, s.protocol.m, s.protocol.m_prime);
  return analytic::tau_from_b00(b, d.state.p_f, s.protocol.m);
}

analytic::Metrics metrics_from(const Scenario& s, const Derived& d) {
  analytic::Metrics m;
  m.slot_time = d.t_slot;
  m.hoq_slots = d.n_slot;
  m.access_delay = d.d_c;
  m.per_station_throughput =
      analytic::throughput(d.state, static_cast<double>(s.total_payload_bits()), d.t_slot);
  m.throughput = s.n * m.per_station_throughput;
  m.network_loss = analytic::network_loss(d.state.p_f, s.protocol.m);
  m.queue_loss =
      s.traffic.lambda > 0 ? analytic::queue_loss(s.traffic.lambda, d.d_c, s.traffic.queue_len) : 0;
  return m;
}

void fill_chain_masses(const Scenario& s, analytic::SteadyState& st) {
  if (st.p_q <= 0.0) {
    st.b00 = 0.0;
    st.b_e = 1.0;
    return;
  }
  st.b00 = analytic::b00(st.p_f, st.p_q, s.protocol.w0, s.protocol.m, s.protocol.m_prime);
  st.b_e = st.b00 * (1.0 - st.p_q) / st.p_q;
}

Solution zero_traffic_solution(const Scenario& s, const Timing& tm) {
  if (s.channel.p_e >= kPfCap) throw DegenerateInput("failure probability driven to 1");
  Solution sol;
  auto& st = sol.state;
  st.tau = 0;
  st.p_b = 0;
  st.p_c = 0;
  st.p_p = 0;
  st.p_f = s.channel.p_e;
  st.p_s = 1.0 - st.p_f;
  st.p_q = 0;
  st.b00 = 0;
  st.b_e = 1;
  Derived d;
  d.state = st;
  d.t_slot = tm.t_sigma;
  d.n_slot = analytic::hoq_slots(st.p_f, s.protocol.w0, s.protocol.m, s.protocol.m_prime);
  d.d_c = analytic::access_delay(d.n_slot, d.t_slot);
  sol.metrics = metrics_from(s, d);
  sol.converged = true;
  sol.iterations = 0;
  sol.residual = 0;
  return sol;
}

double bisect_tau(const Scenario& s, const Timing& tm, double p_q, TauBracket br, double tol) {
  auto defect = [&](double tau) {
    const Derived d = derive(s, tm, tau, p_q, true);
    return next_tau(s, d, p_q) - tau;
  };
  double flo = defect(br.lo);
  for (int it = 0; it < 200 && br.hi - br.lo > tol; ++it) {
    const double mid = 0.5 * (br.lo + br.hi);
    const double fm = defect(mid);
    if ((fm >= 0) == (flo >= 0)) {
      br.lo = mid;
      flo = fm;
    } else {
      br.hi = mid;
    }
  }
  return 0.5 * (br.lo + br.hi);
}

}  // namespace

double ResidualTriple::max_abs() const {
  return std::max({std::abs(tau_defect), std::abs(p_f_defect), std::abs(p_q_defect)});
}

ResidualTriple residual(const Scenario& s, double tau, double p_q) {
  validate(s);
  if (!(tau > 0.0 && tau < 1.0)) throw std::domain_error("tau must be in (0, 1)");
  if (!(p_q >= 0.0 && p_q <= 1.0)) throw std::domain_error("p_q must be in [0, 1]");
  const Timing tm{s.phy.idle_slot, success_duration(s), failure_duration(s)};
  const Derived d = derive(s, tm, tau, p_q, false);
  ResidualTriple r;
  r.tau_defect = next_tau(s, d, p_q) - tau;
  r.p_f_defect = 0.0;  // p_f is derived from tau along the same path
  const double p_q_target =
      s.traffic.lambda > 0
          ? analytic::queue_nonempty_prob(s.traffic.lambda, d.d_c, s.traffic.queue_len)
          : 0.0;
  r.p_q_defect = p_q_target - p_q;
  return r;
}

std::vector<TauBracket> scan_tau_roots(const Scenario& s, double p_q, int grid) {
  validate(s);
  if (grid < 8) grid = 8;
  const Timing tm{s.phy.idle_slot, success_duration(s), failure_duration(s)};
  auto defect = [&](double tau) {
    const Derived d = derive(s, tm, tau, p_q, true);
    return next_tau(s, d, p_q) - tau;
  };
  std::vector<TauBracket> brackets;
  const double lo = 1e-9, hi = 1.0 - 1e-9;
  double prev_tau = lo, prev_f = defect(lo);
  for (int i = 1; i <= grid; ++i) {
    const double tau = lo + (hi - lo) * static_cast<double>(i) / grid;
    const double f = defect(tau);
    if ((f >= 0) != (prev_f >= 0)) brackets.push_back({prev_tau, tau});
    prev_tau = tau;
    prev_f = f;
  }
  return brackets;
}

Solution solve(const Scenario& s, const SolverOptions& opts) {
  validate(s);
  if (!(opts.tol > 0)) throw std::invalid_argument("tol must be > 0");
  if (opts.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(opts.damping > 0 && opts.damping <= 1))
    throw std::invalid_argument("damping must be in (0, 1]");
  if (opts.tau_seed >= 1.0) throw std::invalid_argument("tau_seed must be in (0, 1)");

  const Timing tm{s.phy.idle_slot, success_duration(s), failure_duration(s)};
  const bool saturated = opts.mode == SolveMode::Saturated;
  if (!saturated && s.traffic.lambda == 0.0) return zero_traffic_solution(s, tm);

  double tau = opts.tau_seed > 0 && opts.tau_seed < 1 ? opts.tau_seed
                                                      : 2.0 / (s.protocol.w0 + 1.0);
  double p_q = 1.0;

  Solution sol;
  int used = 0;
  Derived d;
  bool converged = false;

  while (used < opts.max_iter && !converged) {
    // inner: damped Picard on tau at fixed p_q
    double inner_res = 1.0;
    while (used < opts.max_iter) {
      ++used;
      d = derive(s, tm, tau, p_q, false);
      const double tau_next = next_tau(s, d, p_q);
      inner_res = std::abs(tau_next - tau);
      sol.iterate_history.push_back({tau, d.state.p_f, p_q});
      if (sol.iterate_history.size() > 64)
        sol.iterate_history.erase(sol.iterate_history.begin());
      if (inner_res <= opts.tol) break;
      tau = std::clamp(tau + opts.damping * (tau_next - tau), kTauFloor, 1.0 - 1e-12);
    }

    // outer: refresh p_q from the access delay of the converged inner state
    const double p_q_target =
        saturated ? 1.0
                  : analytic::queue_nonempty_prob(s.traffic.lambda, d.d_c, s.traffic.queue_len);
    const double outer_res = std::abs(p_q_target - p_q);
    if (inner_res <= opts.tol && outer_res <= opts.tol) {
      converged = true;
      break;
    }
    p_q = std::clamp(p_q + opts.damping * (p_q_target - p_q), 0.0, 1.0);
    if (p_q <= 0.0) p_q = kTauFloor;
  }

  if (opts.scan_roots) {
    sol.tau_brackets = scan_tau_roots(s, p_q, opts.scan_grid);
    if (sol.tau_brackets.size() > 1) {
      sol.multiple_roots = true;
      tau = bisect_tau(s, tm, p_q, sol.tau_brackets.front(), opts.tol * 0.1);
    }
  }

  d = derive(s, tm, tau, p_q, !converged);
  sol.state = d.state;
  sol.state.p_q = p_q;
  fill_chain_masses(s, sol.state);
  sol.metrics = metrics_from(s, d);
  sol.iterations = used;

  const ResidualTriple r = residual(s, tau, saturated ? 1.0 : p_q);
  sol.residual = saturated ? std::abs(r.tau_defect) : r.max_abs();
  sol.converged = sol.residual <= opts.tol;
  if (sol.converged) sol.iterate_history.clear();
  return sol;
}

}  // namespace dcf::solver
