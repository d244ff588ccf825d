#pragma once

#include "dcf/scenario.hpp"

namespace dcf::analytic {

/// Coupled steady-state probabilities of the backoff process.
struct SteadyState {
  double tau = 0;   // P{station transmits in a random slot}
  double p_b = 0;   // P{channel busy} = 1 - (1-tau)^n
  double p_c = 0;   // P{collision | transmission}
  double p_p = 0;   // capture probability
  double p_f = 0;   // P{transmission attempt fails}
  double p_s = 1;   // 1 - p_f
  double p_q = 0;   // P{queue non-empty}
  double b00 = 0;   // stationary mass of backoff state (0,0)
  double b_e = 0;   // stationary mass of the empty-queue state
};

/// Derived performance measures.
struct Metrics {
  double throughput = 0;             // network payload bits per second (n stations)
  double per_station_throughput = 0; // single-station share p_b*p_s*L/t_slot
  double access_delay = 0;           // d_C, head-of-queue to ACK
  double network_loss = 0;           // e_N = p_f^{m+1}
  double queue_loss = 0;             // e_Q, arrivals rejected by a full queue
  double hoq_slots = 0;              // expected backoff slots spent as head of queue
  double slot_time = 0;              // expected slot length t_slot
};

/// p_B = 1 - (1-tau)^n.
double busy_prob(double tau, int n);

/// p_C = (1 - (1-tau)^{n-1}) / p_B. Defined as 0 at tau == 0; the solver
/// never evaluates it there (it seeds tau > 0).
double collision_prob(double tau, int n);

/// Capture probability for a Rayleigh channel with correlation receiver,
/// summed over i simultaneous interferers:
///   sum_{i=1}^{n-1} C(n,i+1) tau^{i+1} (1-tau)^{n-i-1} (1+z*g)^{-i},  g = 2/(3s).
/// Returns 0 when capture is disabled.
double capture_prob(double tau, int n, const ChannelConfig& ch);

/// p_F = (p_C - p_p) + p_E*p_p + (p_E - p_E*p_C), kept in this form so each
/// term stays traceable. Requires p_p <= p_c.
double failure_prob(double p_c, double p_p, double p_e);

/// Non-empty probability of the M/M/1/l_q queue with offered ratio lambda*d_c.
/// Continuous at lambda*d_c == 1 where the value is l_q/(l_q+1).
double queue_nonempty_prob(double lambda, double d_c, int l_q);

/// Stationary mass of backoff state (0,0):
///   b00 = 2 p_q / (p_q * sum_{i=0}^{m} p_f^i (W_i + 1) + 2 (1 - p_q)).
/// The stage sum form is algebraically identical to the usual closed form but
/// stays finite at p_f == 1/2. Requires 0 <= p_f < 1 and 0 < p_q <= 1.
double b00(double p_f, double p_q, int w0, int m, int m_prime);

/// tau = b00 * (1 - p_f^{m+1}) / (1 - p_f). Throws if the result exceeds 1.
double tau_from_b00(double b00, double p_f, int m);

/// Expected slot length:
///   t_slot = (1-p_B) t_sigma + p_B (1-p_S) t_F + p_B p_S p_E t_F + p_B p_S (1-p_E) t_S.
double expected_slot_time(const SteadyState& st, double t_sigma, double t_s, double t_f,
                          double p_e);

/// Single-station throughput share: p_B * p_S * payload_bits_total / t_slot.
double throughput(const SteadyState& st, double payload_bits_total, double t_slot);

/// e_N = p_f^{m+1}.
double network_loss(double p_f, int m);

/// Blocking probability of the M/M/1/l_q queue; 1/(l_q+1) at lambda*d_c == 1.
double queue_loss(double lambda, double d_c, int l_q);

/// n_slot = sum_i (W_i+1)/2 * (p_f^i - p_f^{m+1}) / (1 - p_f^{m+1}).
double hoq_slots(double p_f, int w0, int m, int m_prime);

/// d_C = n_slot * t_slot.
double access_delay(double n_slot, double t_slot);

}  // namespace dcf::analytic
