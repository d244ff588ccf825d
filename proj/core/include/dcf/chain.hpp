#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace dcf::chain {

/// Free parameters of the backoff Markov chain. p_f and p_q are not derived
/// from a scenario here: the chain tests the chain-to-closed-form step in
/// isolation.
struct ChainSpec {
  int w0 = 2;
  int m = 0;
  int m_prime = 0;
  double p_f = 0.0;
  double p_q = 1.0;
};

/// Dense row-stochastic transition matrix over {E} + {(i,k)}.
/// State 0 is E; backoff states follow stage by stage, counter-major.
class MarkovChain {
 public:
  MarkovChain(ChainSpec spec, int n_states);

  const ChainSpec& spec() const { return spec_; }
  int n_states() const { return n_states_; }

  double& at(int from, int to) { return p_[static_cast<size_t>(from) * n_states_ + to]; }
  double at(int from, int to) const { return p_[static_cast<size_t>(from) * n_states_ + to]; }

  /// Row index of backoff state (stage i, counter k); E is index 0.
  int index_of(int i, int k) const;
  long window(int i) const;

 private:
  ChainSpec spec_;
  int n_states_;
  std::vector<double> p_;
  std::vector<int> stage_offset_;
  friend MarkovChain build_chain(const ChainSpec&);
};

struct ChainDistribution {
  double mass_e = 0;
  std::vector<double> mass;  // backoff states, same indexing as MarkovChain minus E
  double residual = 0;       // max-norm of pi*P - pi

  double operator()(const MarkovChain& c, int i, int k) const {
    return mass[static_cast<size_t>(c.index_of(i, k)) - 1];
  }
};

class ReducibleChain : public std::runtime_error {
 public:
  explicit ReducibleChain(const std::string& what) : std::runtime_error(what) {}
};

/// Builds the one-step transition matrix:
///   P{i,k | i,k+1}  = 1
///   P{i,k | i-1,0}  = p_f / W_i
///   P{0,k | i,0}    = p_q (1-p_f) / W       for i < m
///   P{E   | i,0}    = (1-p_q)(1-p_f)        for i < m
///   P{0,k | m,0}    = p_q / W
///   P{E   | m,0}    = 1-p_q
///   P{0,k | E}      = p_q / W,   P{E | E} = 1-p_q
/// Every row sums to 1 within 1e-12; state count is 1 + sum_i W_i.
MarkovChain build_chain(const ChainSpec& spec);

/// Stationary distribution by direct linear solve (one balance equation
/// replaced by normalization). Throws ReducibleChain when p_q == 0, where E
/// is absorbing. Residual ||pi P - pi||_inf < 1e-12 on return.
ChainDistribution stationary(const MarkovChain& chain);

/// Power iteration cross-check; same distribution within `tol`.
ChainDistribution stationary_power(const MarkovChain& chain, double tol = 1e-13,
                                   long max_iter = 2000000);

/// tau = sum_i mass(i,0).
double oracle_tau(const MarkovChain& chain, const ChainDistribution& dist);

/// CSV rows (state,i,k,mass); E is written as (E,-1,-1,mass_e).
void dump_csv(const MarkovChain& chain, const ChainDistribution& dist, std::ostream& os);

}  // namespace dcf::chain
