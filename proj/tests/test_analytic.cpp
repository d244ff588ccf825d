#include "doctest.h"

#include <cmath>
#include <random>

#include "dcf/analytic.hpp"
#include "dcf/chain.hpp"
#include "dcf/scenario.hpp"

using namespace dcf;
using namespace dcf::analytic;

namespace {

// The b00 closed form in its fully factored shape, used as a cross-check of
// the stage-sum implementation away from p_f == 1/2 where this shape is 0/0.
double b00_closed_form(double p_f, double p_q, int w, int m, int m_prime) {
  const double two_pf = 2.0 * p_f;
  const double num = 2.0 * p_q * (1.0 - p_f) * (1.0 - two_pf);
  const double den =
      p_q * w * (1.0 - p_f) * (1.0 - std::pow(two_pf, m_prime + 1)) +
      p_q * (1.0 - two_pf) * (1.0 - std::pow(p_f, m_prime + 1)) +
      p_q * std::pow(p_f, m_prime + 1) * (1.0 - two_pf) *
          (std::ldexp(static_cast<double>(w), m_prime) + 1.0) *
          (1.0 - std::pow(p_f, m - m_prime)) +
      2.0 * (1.0 - p_f) * (1.0 - two_pf) * (1.0 - p_q) * (1.0 - std::pow(p_f, m)) +
      2.0 * std::pow(p_f, m) * (1.0 - p_f) * (1.0 - two_pf) * (1.0 - p_q);
  return num / den;
}

ChannelConfig capture_channel(double z, int s) {
  ChannelConfig ch;
  ch.capture_enabled = true;
  ch.z = z;
  ch.s = s;
  return ch;
}

}  // namespace

TEST_CASE("busy_prob") {
  CHECK(busy_prob(0.0, 5) == 0.0);
  CHECK(busy_prob(0.5, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(busy_prob(0.1, 2) == doctest::Approx(0.19).epsilon(1e-12));
  CHECK(busy_prob(1.0, 3) == 1.0);
}

TEST_CASE("collision_prob") {
  CHECK(collision_prob(0.7, 1) == 0.0);
  CHECK(collision_prob(0.5, 2) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  // tau -> 0 limit is (n-1)/n
  CHECK(collision_prob(1e-9, 10) == doctest::Approx(0.9).epsilon(1e-6));
  // defined value at exactly zero
  CHECK(collision_prob(0.0, 10) == 0.0);
}

TEST_CASE("capture_prob") {
  const ChannelConfig ch = capture_channel(1.0, 11);
  CHECK(capture_prob(0.5, 1, ch) == 0.0);
  // single i=1 term: C(2,2) tau^2 (1+2/33)^-1 = 0.25 * 33/35
  CHECK(capture_prob(0.5, 2, ch) == doctest::Approx(0.25 * 33.0 / 35.0).epsilon(1e-12));

  ChannelConfig off = ch;
  off.capture_enabled = false;
  CHECK(capture_prob(0.5, 2, off) == 0.0);
}

TEST_CASE("failure_prob") {
  CHECK(failure_prob(0.4, 0.0, 0.0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(failure_prob(0.0, 0.0, 0.25) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(failure_prob(0.3, 0.1, 0.2) == doctest::Approx(0.36).epsilon(1e-12));
  CHECK_THROWS_AS(failure_prob(0.1, 0.2, 0.0), std::domain_error);
}

TEST_CASE("failure_prob identities hold exactly") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double p_c = u(gen);
    const double p_p = p_c * u(gen);
    const double p_e = u(gen);
    CHECK(failure_prob(p_c, p_p, 0.0) == doctest::Approx(p_c - p_p).epsilon(1e-15));
    CHECK(failure_prob(0.0, 0.0, p_e) == doctest::Approx(p_e).epsilon(1e-15));
  }
}

TEST_CASE("queue_nonempty_prob") {
  CHECK(queue_nonempty_prob(0.0, 1.0, 3) == 0.0);
  // lambda*d_c == 1 -> l_q/(l_q+1)
  CHECK(queue_nonempty_prob(2.0, 0.5, 3) == doctest::Approx(0.75).epsilon(1e-12));
  // lambda*d_c == 2, l_q = 2 -> 6/7
  CHECK(queue_nonempty_prob(4.0, 0.5, 2) == doctest::Approx(6.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("queue_nonempty_prob continuous at the unit offered load") {
  const int l_q = 3;
  const double limit = static_cast<double>(l_q) / (l_q + 1);
  CHECK(std::abs(queue_nonempty_prob(1.0 + 1e-8, 1.0, l_q) - limit) < 1e-6);
  CHECK(std::abs(queue_nonempty_prob(1.0 - 1e-8, 1.0, l_q) - limit) < 1e-6);
}

TEST_CASE("b00 closed form") {
  // p_f = 0, saturated: only stage 0 survives -> 2/(W+1)
  for (int w : {2, 8, 32}) CHECK(b00(0.0, 1.0, w, 5, 3) == doctest::Approx(2.0 / (w + 1)).epsilon(1e-12));

  // stage-sum form equals the factored closed form away from p_f = 1/2
  for (double p_f : {0.1, 0.3, 0.62, 0.9})
    for (double p_q : {0.25, 0.7, 1.0})
      CHECK(b00(p_f, p_q, 8, 3, 2) ==
            doctest::Approx(b00_closed_form(p_f, p_q, 8, 3, 2)).epsilon(1e-12));

  // finite at p_f exactly 1/2 where the closed form degenerates to 0/0
  CHECK(std::isfinite(b00(0.5, 1.0, 8, 3, 2)));
  CHECK_THROWS_AS(b00(0.3, 0.0, 8, 3, 2), std::domain_error);
  CHECK_THROWS_AS(b00(1.0, 1.0, 8, 3, 2), std::domain_error);
}

TEST_CASE("b00 and tau match the chain oracle on spot checks") {
  struct Spot {
    double p_f, p_q;
    int w, m, m_prime;
  };
  for (const Spot sp : {Spot{0.5, 1.0, 4, 1, 1}, Spot{0.2, 0.5, 8, 3, 2}}) {
    const auto ch = chain::build_chain({sp.w, sp.m, sp.m_prime, sp.p_f, sp.p_q});
    const auto dist = chain::stationary(ch);
    const double b = b00(sp.p_f, sp.p_q, sp.w, sp.m, sp.m_prime);
    CHECK(std::abs(b - dist(ch, 0, 0)) < 1e-9);
    CHECK(std::abs(tau_from_b00(b, sp.p_f, sp.m) - chain::oracle_tau(ch, dist)) < 1e-9);
  }
}

TEST_CASE("tau_from_b00") {
  CHECK(tau_from_b00(0.1, 0.0, 5) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(tau_from_b00(0.1, 0.7, 0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(tau_from_b00(0.2, 0.5, 1) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(tau_from_b00(0.9, 0.9, 7), std::domain_error);
}

TEST_CASE("expected_slot_time") {
  SteadyState st;
  st.p_b = 0;
  st.p_s = 1;
  CHECK(expected_slot_time(st, 20e-6, 9006e-6, 9006e-6, 0.0) == doctest::Approx(20e-6));

  st.p_b = 1;
  st.p_s = 1;
  CHECK(expected_slot_time(st, 20e-6, 9006e-6, 718e-6, 0.0) == doctest::Approx(9006e-6));

  st.p_b = 0.5;
  st.p_s = 0.8;
  CHECK(expected_slot_time(st, 20e-6, 9006e-6, 9006e-6, 0.1) ==
        doctest::Approx(4513e-6).epsilon(1e-12));
}

TEST_CASE("expected_slot_time bounded by idle and busy durations") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    SteadyState st;
    st.p_b = u(gen);
    st.p_s = u(gen);
    const double p_e = u(gen);
    const double t_s = 9006e-6, t_f = 718e-6, t_sigma = 20e-6;
    const double t = expected_slot_time(st, t_sigma, t_s, t_f, p_e);
    CHECK(t >= t_sigma - 1e-15);
    CHECK(t <= std::max(t_s, t_f) + 1e-15);
  }
}

TEST_CASE("throughput") {
  SteadyState st;
  st.p_b = 0;
  st.p_s = 1;
  CHECK(throughput(st, 8224, 20e-6) == 0.0);

  st.p_b = 0.5;
  st.p_s = 0.8;
  CHECK(throughput(st, 8224, 4513e-6) == doctest::Approx(0.4 * 8224 / 4513e-6).epsilon(1e-12));
  CHECK(throughput(st, 8224, 4513e-6) == doctest::Approx(0.729e6).epsilon(2e-3));
}

TEST_CASE("network_loss") {
  CHECK(network_loss(0.0, 5) == 0.0);
  CHECK(network_loss(0.4, 0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(network_loss(0.5, 3) == doctest::Approx(0.0625).epsilon(1e-15));
}

TEST_CASE("network_loss monotone decreasing in m") {
  for (double p_f : {0.1, 0.5, 0.9}) {
    double prev = 1.0;
    for (int m = 0; m <= 10; ++m) {
      const double e = network_loss(p_f, m);
      CHECK(e < prev);
      CHECK(e == doctest::Approx(std::pow(p_f, m + 1)).epsilon(1e-15));
      prev = e;
    }
  }
}

TEST_CASE("queue_loss") {
  // lambda*d_c == 1 -> 1/(l_q+1)
  CHECK(queue_loss(2.0, 0.5, 4) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(queue_loss(0.0, 1.0, 4) == 0.0);
  // lambda*d_c == 2, l_q = 2 -> 4/7
  CHECK(queue_loss(4.0, 0.5, 2) == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("hoq_slots") {
  CHECK(hoq_slots(0.7, 32, 0, 0) == doctest::Approx(16.5).epsilon(1e-12));
  CHECK(hoq_slots(0.0, 32, 7, 5) == doctest::Approx(16.5).epsilon(1e-12));
  CHECK(hoq_slots(0.5, 4, 1, 1) == doctest::Approx(4.0).epsilon(1e-12));
  // never below the stage-0 contribution
  for (double p_f : {0.0, 0.2, 0.6, 0.9})
    CHECK(hoq_slots(p_f, 16, 6, 4) >= (16 + 1) / 2.0 - 1e-12);
}

TEST_CASE("access_delay") {
  CHECK(access_delay(4.0, 4513e-6) == doctest::Approx(18.052e-3).epsilon(1e-12));
  CHECK(access_delay(16.5, 20e-6) == doctest::Approx(330e-6).epsilon(1e-12));
  CHECK(access_delay(1.0, 1e-3) == doctest::Approx(1e-3).epsilon(1e-15));
}

TEST_CASE("probability outputs stay in [0,1] over random inputs") {
  std::mt19937 gen(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ChannelConfig ch = capture_channel(1.0, 11);
  for (int i = 0; i < 500; ++i) {
    const double tau = u(gen);
    const int n = 1 + static_cast<int>(u(gen) * 30);
    const double pb = busy_prob(tau, n);
    const double pc = collision_prob(tau, n);
    const double pp = capture_prob(tau, n, ch);
    CHECK((pb >= 0 && pb <= 1));
    CHECK((pc >= 0 && pc <= 1));
    CHECK((pp >= 0 && pp <= 1));
    CHECK(pp <= pc + 1e-12);  // capture rescues a subset of collisions
    const double pf = failure_prob(pc, pp, u(gen));
    CHECK((pf >= 0 && pf <= 1));
    const double rho_lambda = u(gen) * 100;
    const double d_c = 1e-4 + u(gen);
    const int l_q = 1 + static_cast<int>(u(gen) * 20);
    const double pq = queue_nonempty_prob(rho_lambda, d_c, l_q);
    const double eq = queue_loss(rho_lambda, d_c, l_q);
    CHECK((pq >= 0 && pq <= 1));
    CHECK((eq >= 0 && eq <= 1));
  }
}

TEST_CASE("busy_prob and capture_prob monotone non-decreasing in tau") {
  // The capture sum peaks once nearly every slot is a many-frame collision
  // (tau ~ 4/n), so its monotone range shrinks with n; busy_prob is monotone
  // everywhere.
  const ChannelConfig ch = capture_channel(1.0, 11);
  for (int n : {2, 5, 10}) {
    const double tau_cap = std::min(0.6, 3.5 / n);
    double prev_b = -1, prev_p = -1;
    for (int i = 0; i <= 19; ++i) {
      const double tau = 0.05 * i;  // [0, 0.95]
      const double pb = busy_prob(tau, n);
      CHECK(pb >= prev_b - 1e-15);
      prev_b = pb;
      if (tau <= tau_cap) {
        const double pp = capture_prob(tau, n, ch);
        CHECK(pp >= prev_p - 1e-15);
        prev_p = pp;
      }
    }
  }
}
