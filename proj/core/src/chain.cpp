#include "dcf/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace dcf::chain {

namespace {

void check_spec(const ChainSpec& s) {
  if (s.w0 < 1) throw std::invalid_argument("w0 must be >= 1");
  if (s.m < 0) throw std::invalid_argument("m must be >= 0");
  if (s.m_prime < 0 || s.m_prime > s.m) throw std::invalid_argument("m_prime must be in [0, m]");
  if (!(s.p_f >= 0.0 && s.p_f < 1.0)) throw std::invalid_argument("p_f must be in [0, 1)");
  if (!(s.p_q >= 0.0 && s.p_q <= 1.0)) throw std::invalid_argument("p_q must be in [0, 1]");
}

}  // namespace

MarkovChain::MarkovChain(ChainSpec spec, int n_states)
    : spec_(spec), n_states_(n_states), p_(static_cast<size_t>(n_states) * n_states, 0.0) {}

long MarkovChain::window(int i) const {
  const int exp = std::min(i, spec_.m_prime);
  return static_cast<long>(spec_.w0) << exp;
}

int MarkovChain::index_of(int i, int k) const {
  return stage_offset_[static_cast<size_t>(i)] + k;
}

MarkovChain build_chain(const ChainSpec& spec) {
  check_spec(spec);
  const int w = spec.w0;
  const int m = spec.m;

  std::vector<int> offsets(static_cast<size_t>(m) + 1);
  int count = 1;  // state 0 is E
  for (int i = 0; i <= m; ++i) {
    offsets[static_cast<size_t>(i)] = count;
    const int exp = std::min(i, spec.m_prime);
    count += w << exp;
  }

  MarkovChain c(spec, count);
  c.stage_offset_ = offsets;
  const double p_f = spec.p_f;
  const double p_q = spec.p_q;

  // E: leave only when a packet arrives, then a fresh uniform stage-0 backoff
  c.at(0, 0) = 1.0 - p_q;
  for (int k = 0; k < w; ++k) c.at(0, c.index_of(0, k)) += p_q / w;

  for (int i = 0; i <= m; ++i) {
    const long wi = c.window(i);
    for (int k = 1; k < wi; ++k) c.at(c.index_of(i, k), c.index_of(i, k - 1)) = 1.0;

    const int from = c.index_of(i, 0);
    if (i < m) {
      const long wn = c.window(i + 1);
      for (int k = 0; k < wn; ++k) c.at(from, c.index_of(i + 1, k)) += p_f / wn;
      for (int k = 0; k < w; ++k) c.at(from, c.index_of(0, k)) += p_q * (1.0 - p_f) / w;
      c.at(from, 0) += (1.0 - p_q) * (1.0 - p_f);
    } else {
      // the packet leaves after stage m whether or not the attempt succeeded
      for (int k = 0; k < w; ++k) c.at(from, c.index_of(0, k)) += p_q / w;
      c.at(from, 0) += 1.0 - p_q;
    }
  }
  return c;
}

ChainDistribution stationary(const MarkovChain& chain) {
  if (chain.spec().p_q == 0.0)
    throw ReducibleChain("p_q = 0 makes state E absorbing; chain is reducible");
  const int n = chain.n_states();

  // (P^T - I) pi = 0 with the last balance row replaced by normalization
  std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
  std::vector<double> rhs(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<size_t>(i) * n + j] = chain.at(j, i);
  for (int i = 0; i < n; ++i) a[static_cast<size_t>(i) * n + i] -= 1.0;
  for (int j = 0; j < n; ++j) a[static_cast<size_t>(n - 1) * n + j] = 1.0;
  rhs[static_cast<size_t>(n) - 1] = 1.0;

  // Gaussian elimination with partial pivoting
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a[static_cast<size_t>(col) * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(a[static_cast<size_t>(r) * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0.0) throw ReducibleChain("singular balance system; chain is reducible");
    if (pivot != col) {
      for (int j = 0; j < n; ++j)
        std::swap(a[static_cast<size_t>(pivot) * n + j], a[static_cast<size_t>(col) * n + j]);
      std::swap(rhs[static_cast<size_t>(pivot)], rhs[static_cast<size_t>(col)]);
    }
    const double inv = 1.0 / a[static_cast<size_t>(col) * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[static_cast<size_t>(r) * n + col] * inv;
      if (f == 0.0) continue;
      a[static_cast<size_t>(r) * n + col] = 0.0;
      for (int j = col + 1; j < n; ++j)
        a[static_cast<size_t>(r) * n + j] -= f * a[static_cast<size_t>(col) * n + j];
      rhs[static_cast<size_t>(r)] -= f * rhs[static_cast<size_t>(col)];
    }
  }
  std::vector<double> pi(static_cast<size_t>(n), 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double v = rhs[static_cast<size_t>(r)];
    for (int j = r + 1; j < n; ++j) v -= a[static_cast<size_t>(r) * n + j] * pi[static_cast<size_t>(j)];
    pi[static_cast<size_t>(r)] = v / a[static_cast<size_t>(r) * n + r];
  }

  // transient states can pick up tiny negative round-off
  for (auto& v : pi)
    if (v < 0.0 && v > -1e-12) v = 0.0;
  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (auto& v : pi) v /= total;

  ChainDistribution d;
  d.mass_e = pi[0];
  d.mass.assign(pi.begin() + 1, pi.end());

  double res = 0.0;
  for (int j = 0; j < n; ++j) {
    double pj = 0.0;
    for (int i = 0; i < n; ++i) pj += pi[static_cast<size_t>(i)] * chain.at(i, j);
    res = std::max(res, std::abs(pj - pi[static_cast<size_t>(j)]));
  }
  d.residual = res;
  if (res >= 1e-12)
    throw ReducibleChain("stationary solve residual exceeds 1e-12; chain ill-conditioned");
  return d;
}

ChainDistribution stationary_power(const MarkovChain& chain, double tol, long max_iter) {
  if (chain.spec().p_q == 0.0)
    throw ReducibleChain("p_q = 0 makes state E absorbing; chain is reducible");
  const int n = chain.n_states();
  std::vector<double> pi(static_cast<size_t>(n), 1.0 / n);
  std::vector<double> next(static_cast<size_t>(n), 0.0);
  double res = 1.0;
  for (long it = 0; it < max_iter && res > tol; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const double w = pi[static_cast<size_t>(i)];
      if (w == 0.0) continue;
      for (int j = 0; j < n; ++j) next[static_cast<size_t>(j)] += w * chain.at(i, j);
    }
    res = 0.0;
    for (int j = 0; j < n; ++j)
      res = std::max(res, std::abs(next[static_cast<size_t>(j)] - pi[static_cast<size_t>(j)]));
    pi.swap(next);
  }
  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (auto& v : pi) v /= total;
  ChainDistribution d;
  d.mass_e = pi[0];
  d.mass.assign(pi.begin() + 1, pi.end());
  d.residual = res;
  return d;
}

double oracle_tau(const MarkovChain& chain, const ChainDistribution& dist) {
  double tau = 0.0;
  for (int i = 0; i <= chain.spec().m; ++i) tau += dist(chain, i, 0);
  return tau;
}

void dump_csv(const MarkovChain& chain, const ChainDistribution& dist, std::ostream& os) {
  os << "state,i,k,mass\n";
  os << "E,-1,-1," << dist.mass_e << "\n";
  for (int i = 0; i <= chain.spec().m; ++i)
    for (long k = 0; k < chain.window(i); ++k)
      os << "(" << i << "_" << k << ")," << i << "," << k << ","
         << dist(chain, i, static_cast<int>(k)) << "\n";
}

}  // namespace dcf::chain
