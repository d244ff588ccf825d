#include "doctest.h"

#include <cmath>
#include <thread>
#include <vector>

#include "dcf/solver.hpp"

using namespace dcf;
using namespace dcf::solver;

namespace {

Scenario table1(int n, double lambda = 0.0) {
  Scenario s = preset("dot11b-dsss");
  s.n = n;
  s.traffic.lambda = lambda;
  return s;
}

SolverOptions saturated() {
  SolverOptions o;
  o.mode = SolveMode::Saturated;
  return o;
}

}  // namespace

TEST_CASE("single saturated station collapses analytically") {
  Scenario s = table1(1);
  s.channel.capture_enabled = false;
  const Solution sol = solve(s, saturated());
  CHECK(sol.converged);
  CHECK(sol.state.p_c == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sol.state.p_f == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sol.state.tau == doctest::Approx(2.0 / 33.0).epsilon(1e-9));
  CHECK(sol.iterations <= 3);
}

TEST_CASE("zero offered load yields the idle network") {
  const Scenario s = table1(10, 0.0);
  const Solution sol = solve(s);
  CHECK(sol.converged);
  CHECK(sol.state.p_q == 0.0);
  CHECK(sol.state.tau == 0.0);
  CHECK(sol.metrics.throughput == 0.0);
  // idle-network lower bound: d_C = (W+1)/2 * t_sigma
  CHECK(sol.metrics.access_delay == doctest::Approx(16.5 * 20e-6).epsilon(1e-9));
}

TEST_CASE("n=15 at lambda=9 sits within 10% of saturation throughput") {
  const Solution unsat = solve(table1(15, 9.0));
  const Solution sat = solve(table1(15), saturated());
  CHECK(unsat.converged);
  CHECK(sat.converged);
  const double rel = std::abs(unsat.metrics.throughput - sat.metrics.throughput) /
                     sat.metrics.throughput;
  CHECK(rel <= 0.10);
}

TEST_CASE("converged solutions satisfy the defining equations") {
  for (double lambda : {2.0, 20.0, 60.0}) {
    const Scenario s = table1(10, lambda);
    const Solution sol = solve(s);
    REQUIRE(sol.converged);
    const ResidualTriple r = residual(s, sol.state.tau, sol.state.p_q);
    CHECK(std::abs(r.tau_defect) <= 1e-10);
    CHECK(std::abs(r.p_f_defect) <= 1e-10);
    CHECK(std::abs(r.p_q_defect) <= 1e-10);
  }
}

TEST_CASE("perturbing p_q leaves a queue-equation defect") {
  const Scenario s = table1(10, 20.0);
  const Solution sol = solve(s);
  REQUIRE(sol.converged);
  const double p_q_pert = sol.state.p_q - 0.1;  // converged p_q sits near 1 here
  const ResidualTriple r = residual(s, sol.state.tau, p_q_pert);
  CHECK(std::abs(r.p_q_defect) > 1e-6);
}

TEST_CASE("tau defect changes sign exactly once at saturation") {
  const auto brackets = scan_tau_roots(table1(10), 1.0, 512);
  CHECK(brackets.size() == 1);
}

TEST_CASE("solve is idempotent from a converged seed") {
  const Scenario s = table1(10, 25.0);
  const Solution first = solve(s);
  REQUIRE(first.converged);
  SolverOptions warm;
  warm.tau_seed = first.state.tau;
  const Solution again = solve(s, warm);
  CHECK(again.converged);
  CHECK(again.iterations <= 2);
}

TEST_CASE("large offered load converges to the saturated solution") {
  const Scenario s = table1(10, 5000.0);
  const Solution unsat = solve(s);
  const Solution sat = solve(table1(10), saturated());
  REQUIRE(unsat.converged);
  REQUIRE(sat.converged);
  CHECK(std::abs(unsat.state.tau - sat.state.tau) <= 10 * 1e-10);
  CHECK(std::abs(unsat.metrics.throughput - sat.metrics.throughput) /
            sat.metrics.throughput <=
        1e-6);
}

TEST_CASE("solution independent of damping and seed") {
  const Scenario s = table1(8, 15.0);
  SolverOptions a;
  a.damping = 0.5;
  SolverOptions b;
  b.damping = 0.9;
  b.tau_seed = 0.2;
  const Solution sa = solve(s, a);
  const Solution sb = solve(s, b);
  REQUIRE(sa.converged);
  REQUIRE(sb.converged);
  CHECK(std::abs(sa.state.tau - sb.state.tau) <= 10 * a.tol);
  CHECK(std::abs(sa.state.p_q - sb.state.p_q) <= 10 * a.tol);
}

TEST_CASE("saturated fixed points move monotonically with n") {
  double prev_pf = -1.0;
  double prev_station_share = 1e12;
  for (int n = 2; n <= 15; ++n) {
    const Solution sol = solve(table1(n), saturated());
    REQUIRE(sol.converged);
    CHECK(sol.state.p_f >= prev_pf - 1e-9);
    CHECK(sol.metrics.per_station_throughput <= prev_station_share + 1e-9);
    prev_pf = sol.state.p_f;
    prev_station_share = sol.metrics.per_station_throughput;
  }
}

TEST_CASE("steady state carries the chain mass identities") {
  const Scenario s = table1(10, 30.0);
  const Solution sol = solve(s);
  REQUIRE(sol.converged);
  const auto& st = sol.state;
  CHECK(st.p_s == doctest::Approx(1.0 - st.p_f).epsilon(1e-12));
  CHECK(st.p_b == doctest::Approx(1.0 - std::pow(1.0 - st.tau, s.n)).epsilon(1e-9));
  CHECK(st.b_e == doctest::Approx(st.b00 * (1.0 - st.p_q) / st.p_q).epsilon(1e-9));
}

TEST_CASE("degenerate channel is reported") {
  Scenario s = table1(5, 10.0);
  s.channel.p_e = 1.0;
  CHECK_THROWS_AS(solve(s), DegenerateInput);
}

TEST_CASE("non-convergence carries residual and history") {
  SolverOptions strangled;
  strangled.max_iter = 1;
  const Solution sol = solve(table1(10, 20.0), strangled);
  CHECK_FALSE(sol.converged);
  CHECK(sol.residual > 0);
  CHECK_FALSE(sol.iterate_history.empty());
}

TEST_CASE("saturated mode pins the queue") {
  const Solution sol = solve(table1(10, 3.0), saturated());
  CHECK(sol.converged);
  CHECK(sol.state.p_q == 1.0);
}

TEST_CASE("concurrent solves match sequential results bit for bit") {
  const Scenario s = table1(12, 18.0);
  const Solution ref = solve(s);
  std::vector<Solution> out(4);
  std::vector<std::thread> pool;
  pool.reserve(4);
  for (auto& slot : out)
    pool.emplace_back([&s, &slot] { slot = solve(s); });
  for (auto& t : pool) t.join();
  for (const auto& sol : out) {
    CHECK(sol.state.tau == ref.state.tau);
    CHECK(sol.metrics.throughput == ref.metrics.throughput);
  }
}

TEST_CASE("throughput stays below the channel rate") {
  for (int n : {1, 4, 10, 15}) {
    const Solution sol = solve(table1(n), saturated());
    REQUIRE(sol.converged);
    CHECK(sol.metrics.throughput >= 0);
    CHECK(sol.metrics.throughput < preset("dot11b-dsss").phy.data_rate);
    CHECK(sol.metrics.access_delay > 0);
    CHECK(sol.metrics.hoq_slots >= (32 + 1) / 2.0 - 1e-9);
  }
}
