#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dcf/simulator.hpp"
#include "dcf/solver.hpp"

using namespace dcf;
using namespace dcf::sim;

namespace {

Scenario table1(int n, double lambda) {
  Scenario s = preset("dot11b-dsss");
  s.n = n;
  s.traffic.lambda = lambda;
  s.channel.capture_enabled = false;
  return s;
}

SimConfig short_run(double duration, double warmup, std::uint64_t seed = 1) {
  SimConfig c;
  c.duration = duration;
  c.warmup = warmup;
  c.seed = seed;
  return c;
}

void check_conservation(const SimMetrics& m) {
  CHECK(m.arrivals_total == m.delivered_total + m.net_dropped_total + m.queue_dropped_total +
                                m.in_queue_at_end);
}

}  // namespace

TEST_CASE("deterministic for a fixed seed") {
  const Scenario s = table1(6, 25.0);
  const SimConfig cfg = short_run(60.0, 5.0, 42);
  const SimMetrics a = run(s, cfg);
  const SimMetrics b = run(s, cfg);
  CHECK(a.throughput.mean == b.throughput.mean);
  CHECK(a.throughput.half_width == b.throughput.half_width);
  CHECK(a.mean_access_delay.mean == b.mean_access_delay.mean);
  CHECK(a.empirical_tau == b.empirical_tau);
  CHECK(a.empirical_p_c == b.empirical_p_c);
  CHECK(a.arrivals_total == b.arrivals_total);
  CHECK(a.delivered_total == b.delivered_total);
  CHECK(a.slots_total == b.slots_total);
}

TEST_CASE("different seeds differ") {
  const Scenario s = table1(6, 25.0);
  const SimMetrics a = run(s, short_run(30.0, 2.0, 1));
  const SimMetrics b = run(s, short_run(30.0, 2.0, 2));
  CHECK(a.arrivals_total != b.arrivals_total);
}

TEST_CASE("packet conservation holds exactly") {
  for (double lambda : {2.0, 30.0, 200.0}) {
    const SimMetrics m = run(table1(5, lambda), short_run(40.0, 4.0, 7));
    check_conservation(m);
  }
  Scenario cap = table1(4, 50.0);
  cap.channel.capture_enabled = true;
  cap.channel.p_e = 0.1;
  check_conservation(run(cap, short_run(40.0, 4.0, 9)));
}

TEST_CASE("zero offered load produces no events") {
  const SimMetrics m = run(table1(5, 0.0), short_run(50.0, 5.0));
  CHECK(m.arrivals_total == 0);
  CHECK(m.delivered_total == 0);
  CHECK(m.throughput.mean == 0.0);
  CHECK(m.transmissions_total == 0);
}

TEST_CASE("single unsaturated station: no collisions, delay near backoff plus exchange") {
  const Scenario s = table1(1, 1.0);
  const SimMetrics m = run(s, short_run(400.0, 20.0, 5));
  CHECK(m.empirical_p_c == 0.0);
  CHECK(m.network_loss_rate == 0.0);
  // mean backoff (W-1)/2 idle slots plus the exchange itself
  const double expect = 15.5 * 20e-6 + 9006e-6;
  const double tol = std::max(3 * m.mean_access_delay.half_width, 30e-6);
  CHECK(std::abs(m.mean_access_delay.mean - expect) < tol);
  check_conservation(m);
}

TEST_CASE("saturated single station transmits every (W+1)/2 slots") {
  const Scenario s = table1(1, 2000.0);  // queue never drains
  const SimMetrics m = run(s, short_run(300.0, 10.0, 11));
  CHECK(std::abs(m.empirical_tau - 2.0 / 33.0) < 0.002);
  check_conservation(m);
}

TEST_CASE("without capture every multi-transmitter slot fails") {
  Scenario s = table1(2, 4000.0);
  s.protocol.w0 = 1;  // both stations transmit in every slot
  s.protocol.m = 0;
  s.protocol.m_prime = 0;
  s.traffic.payload_bits = 0;
  const SimMetrics m = run(s, short_run(20.0, 1.0, 3));
  // a lone transmission can sneak in before the second station's first
  // arrival; after that every slot is an unrescued two-frame collision
  CHECK(m.delivered_total <= 2);
  CHECK(m.throughput.mean == 0.0);
  CHECK(m.empirical_p_c > 0.999);
  CHECK(m.network_loss_rate == 1.0);
  CHECK(m.net_dropped_total > 0);
  check_conservation(m);
}

TEST_CASE("capture rescues the winning frame at the attenuation rate") {
  Scenario s = table1(3, 4000.0);
  s.protocol.w0 = 1;
  s.protocol.m = 0;
  s.protocol.m_prime = 0;
  s.traffic.payload_bits = 0;
  s.channel.capture_enabled = true;  // z = 1, s = 11 from the preset
  const SimConfig cfg = short_run(120.0, 5.0, 17);
  const SimMetrics m = run(s, cfg);
  // every slot is a 3-frame collision; capture succeeds with (1+2/33)^-2
  const double expect = std::pow(33.0 / 35.0, 2.0);
  const double measured =
      static_cast<double>(m.delivered_total) / static_cast<double>(m.slots_total);
  CHECK(std::abs(measured - expect) < 0.01);
  check_conservation(m);
}

TEST_CASE("saturated run lands near the analytic saturation throughput") {
  Scenario s = preset("dot11b-dsss");
  s.n = 10;
  s.traffic.lambda = 60.0;  // well past the saturation onset
  const SimMetrics m = run(s, short_run(200.0, 20.0, 7));
  solver::SolverOptions opts;
  opts.mode = solver::SolveMode::Saturated;
  Scenario sat = s;
  sat.traffic.lambda = 0;
  const auto sol = solver::solve(sat, opts);
  const double rel = std::abs(sol.metrics.throughput - m.throughput.mean) / m.throughput.mean;
  CHECK(rel <= 0.10);
}

TEST_CASE("advance_slot decrements counters in an idle slot") {
  Scenario s = table1(2, 1e-9);
  Simulator sim(s, short_run(1000.0, 0.0));
  auto& a = sim.station(0);
  auto& b = sim.station(1);
  a.queue.push_back(0.0);
  a.phase = Phase::Backoff;
  a.backoff_counter = 3;
  b.queue.push_back(0.0);
  b.phase = Phase::Backoff;
  b.backoff_counter = 5;
  sim.advance_slot();
  CHECK(a.backoff_counter == 2);
  CHECK(b.backoff_counter == 4);
  CHECK(sim.now() == doctest::Approx(20e-6).epsilon(1e-12));
}

TEST_CASE("forced error always takes the failure path") {
  Scenario s = table1(2, 1e-9);
  s.channel.p_e = 1.0;
  Simulator sim(s, short_run(1000.0, 0.0));
  auto& a = sim.station(0);
  a.queue.push_back(0.0);
  a.phase = Phase::Backoff;
  a.backoff_counter = 0;
  sim.advance_slot();
  CHECK(a.retry_stage == 1);
  CHECK(sim.now() == doctest::Approx(9006e-6).epsilon(1e-9));
}

TEST_CASE("frozen stations do not decrement during a busy slot") {
  Scenario s = table1(2, 1e-9);
  Simulator sim(s, short_run(1000.0, 0.0));
  auto& a = sim.station(0);
  auto& b = sim.station(1);
  a.queue.push_back(0.0);
  a.phase = Phase::Backoff;
  a.backoff_counter = 0;
  b.queue.push_back(0.0);
  b.phase = Phase::Backoff;
  b.backoff_counter = 4;
  sim.advance_slot();
  CHECK(b.backoff_counter == 4);
}

TEST_CASE("event trace lands on disk behind the flag") {
  const char* path = "dcf_trace_test.tmp";
  SimConfig cfg = short_run(5.0, 0.0);
  cfg.trace = true;
  cfg.trace_path = path;
  run(table1(3, 40.0), cfg);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "time,station,event,stage,counter,queue_len");
  std::string first;
  CHECK(std::getline(in, first).good());
  in.close();
  std::remove(path);
}

TEST_CASE("queue overflow counts as queue loss") {
  Scenario s = table1(1, 500.0);
  s.traffic.queue_len = 2;
  const SimMetrics m = run(s, short_run(30.0, 2.0, 13));
  CHECK(m.queue_dropped_total > 0);
  CHECK(m.queue_loss_rate > 0.5);
  check_conservation(m);
}

TEST_CASE("retry limit drops count as network loss and keep delays clean") {
  Scenario s = table1(2, 3000.0);
  s.protocol.w0 = 2;
  s.protocol.m = 1;
  s.protocol.m_prime = 1;
  s.channel.p_e = 0.9;
  const SimMetrics m = run(s, short_run(30.0, 2.0, 19));
  CHECK(m.net_dropped_total > 0);
  CHECK(m.network_loss_rate > 0.5);
  check_conservation(m);
}
