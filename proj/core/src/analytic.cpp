#include "dcf/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace dcf::analytic {

namespace {

constexpr double kPfDegenerate = 1.0 - 1e-9;

void check_prob(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error(std::string(name) + " must be in [0, 1]");
}

long window(int i, int w0, int m_prime) {
  const int exp = i < m_prime ? i : m_prime;
  return static_cast<long>(w0) << exp;
}

}  // namespace

double busy_prob(double tau, int n) {
  check_prob(tau, "tau");
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (tau >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log1p(-tau));
}

double collision_prob(double tau, int n) {
  check_prob(tau, "tau");
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (tau == 0.0) return 0.0;  // defined limit; the solver seeds tau > 0
  if (n == 1) return 0.0;
  if (tau >= 1.0) return 1.0;
  const double others = -std::expm1(static_cast<double>(n - 1) * std::log1p(-tau));
  return others / busy_prob(tau, n);
}

double capture_prob(double tau, int n, const ChannelConfig& ch) {
  check_prob(tau, "tau");
  if (n < 1) throw std::domain_error("n must be >= 1");
  if (!ch.capture_enabled || n == 1 || tau == 0.0) return 0.0;
  const double g = 2.0 / (3.0 * ch.s);
  const double atten = 1.0 / (1.0 + ch.z * g);

  // sum_{i=1}^{n-1} C(n, i+1) tau^{i+1} (1-tau)^{n-i-1} atten^i
  double sum = 0.0;
  double binom = n;  // C(n, 1)
  double tau_pow = tau;
  double att_pow = 1.0;
  for (int i = 1; i <= n - 1; ++i) {
    binom *= static_cast<double>(n - i) / (i + 1);  // C(n, i+1)
    tau_pow *= tau;
    att_pow *= atten;
    sum += binom * tau_pow * std::pow(1.0 - tau, n - i - 1) * att_pow;
  }
  return sum;
}

double failure_prob(double p_c, double p_p, double p_e) {
  check_prob(p_c, "p_c");
  check_prob(p_p, "p_p");
  check_prob(p_e, "p_e");
  if (p_p > p_c + 1e-15) throw std::domain_error("p_p exceeds p_c");
  const double p_f = (p_c - p_p) + p_e * p_p + (p_e - p_e * p_c);
  return p_f < 0.0 ? 0.0 : (p_f > 1.0 ? 1.0 : p_f);
}

double queue_nonempty_prob(double lambda, double d_c, int l_q) {
  if (lambda < 0) throw std::domain_error("lambda must be >= 0");
  if (d_c <= 0) throw std::domain_error("d_c must be > 0");
  if (l_q < 1) throw std::domain_error("l_q must be >= 1");
  if (lambda == 0.0) return 0.0;
  const double rho = lambda * d_c;
  if (std::abs(rho - 1.0) < 1e-12) return static_cast<double>(l_q) / (l_q + 1);
  if (rho > 1.0) {
    // divide through by rho^{l_q+1} so large offered loads stay finite
    const double inv = 1.0 / rho;
    const double num = std::pow(inv, l_q) - 1.0;
    const double den = std::pow(inv, l_q + 1) - 1.0;
    return num / den;
  }
  const double top = std::pow(rho, l_q + 1);
  return (rho - top) / (1.0 - top);
}

double b00(double p_f, double p_q, int w0, int m, int m_prime) {
  if (!(p_f >= 0.0)) throw std::domain_error("p_f must be >= 0");
  if (p_f >= kPfDegenerate) throw std::domain_error("p_f too close to 1, chain degenerates");
  if (!(p_q > 0.0 && p_q <= 1.0)) throw std::domain_error("p_q must be in (0, 1]");
  if (w0 < 1 || m < 0 || m_prime < 0 || m_prime > m)
    throw std::domain_error("invalid window schedule");

  double stage_sum = 0.0;
  double pf_pow = 1.0;
  for (int i = 0; i <= m; ++i) {
    stage_sum += pf_pow * static_cast<double>(window(i, w0, m_prime) + 1);
    pf_pow *= p_f;
  }
  return 2.0 * p_q / (p_q * stage_sum + 2.0 * (1.0 - p_q));
}

double tau_from_b00(double b00, double p_f, int m) {
  check_prob(b00, "b00");
  if (p_f >= kPfDegenerate) throw std::domain_error("p_f too close to 1, chain degenerates");
  double geo = 0.0;
  double pf_pow = 1.0;
  for (int i = 0; i <= m; ++i) {
    geo += pf_pow;
    pf_pow *= p_f;
  }
  const double tau = b00 * geo;
  if (tau > 1.0 + 1e-12) throw std::domain_error("tau exceeds 1: inconsistent b00/p_f inputs");
  return tau > 1.0 ? 1.0 : tau;
}

double expected_slot_time(const SteadyState& st, double t_sigma, double t_s, double t_f,
                          double p_e) {
  if (t_sigma <= 0 || t_s <= 0 || t_f <= 0) throw std::domain_error("durations must be > 0");
  return (1.0 - st.p_b) * t_sigma + st.p_b * (1.0 - st.p_s) * t_f + st.p_b * st.p_s * p_e * t_f +
         st.p_b * st.p_s * (1.0 - p_e) * t_s;
}

double throughput(const SteadyState& st, double payload_bits_total, double t_slot) {
  if (t_slot <= 0) throw std::domain_error("t_slot must be > 0");
  return st.p_b * st.p_s * payload_bits_total / t_slot;
}

double network_loss(double p_f, int m) {
  check_prob(p_f, "p_f");
  return std::pow(p_f, m + 1);
}

double queue_loss(double lambda, double d_c, int l_q) {
  if (lambda < 0) throw std::domain_error("lambda must be >= 0");
  if (d_c <= 0) throw std::domain_error("d_c must be > 0");
  if (l_q < 1) throw std::domain_error("l_q must be >= 1");
  if (lambda == 0.0) return 0.0;
  const double rho = lambda * d_c;
  if (std::abs(rho - 1.0) < 1e-12) return 1.0 / (l_q + 1);
  if (rho > 1.0) {
    const double inv = 1.0 / rho;
    return (inv - 1.0) / (std::pow(inv, l_q + 1) - 1.0);
  }
  const double top = std::pow(rho, l_q);
  return (top - top * rho) / (1.0 - top * rho);
}

double hoq_slots(double p_f, int w0, int m, int m_prime) {
  if (p_f >= kPfDegenerate) throw std::domain_error("p_f too close to 1, chain degenerates");
  if (w0 < 1 || m < 0 || m_prime < 0 || m_prime > m)
    throw std::domain_error("invalid window schedule");
  const double pf_top = std::pow(p_f, m + 1);
  const double denom = 1.0 - pf_top;
  double sum = 0.0;
  double pf_pow = 1.0;
  for (int i = 0; i <= m; ++i) {
    sum += 0.5 * static_cast<double>(window(i, w0, m_prime) + 1) * (pf_pow - pf_top) / denom;
    pf_pow *= p_f;
  }
  return sum;
}

double access_delay(double n_slot, double t_slot) {
  if (n_slot <= 0 || t_slot <= 0) throw std::domain_error("n_slot and t_slot must be > 0");
  return n_slot * t_slot;
}

}  // namespace dcf::analytic
