#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dcf/scenario.hpp"

namespace dcf::sim {

struct SimConfig {
  std::uint64_t seed = 1;
  double duration = 2000.0;  // simulated seconds
  double warmup = 100.0;     // excluded from metrics; conservation counts the full run
  int batch_count = 10;      // batch means for the confidence intervals
  bool trace = false;
  std::string trace_path;
};

struct CiValue {
  double mean = 0;
  double half_width = 0;  // 95% Student-t over batch means
};

struct SimMetrics {
  CiValue throughput;         // delivered (l_D+l_I+l_U) bits per second, network total
  CiValue mean_access_delay;  // head-of-queue to ACK, dropped packets excluded
  double network_loss_rate = 0;  // HoQ packets dropped by the retry limit
  double queue_loss_rate = 0;    // arrivals rejected by a full queue
  double empirical_tau = 0;
  double empirical_p_c = 0;

  // full-run packet accounting (conservation check material)
  std::uint64_t arrivals_total = 0;
  std::uint64_t delivered_total = 0;
  std::uint64_t net_dropped_total = 0;
  std::uint64_t queue_dropped_total = 0;
  std::uint64_t in_queue_at_end = 0;
  std::uint64_t slots_total = 0;
  std::uint64_t transmissions_total = 0;
};

enum class Phase { EmptyIdle, Backoff, Transmitting };

struct StationState {
  std::deque<double> queue;  // arrival timestamps, front is head of queue
  int retry_stage = 0;
  int backoff_counter = 0;
  Phase phase = Phase::EmptyIdle;
  double hoq_since = 0;       // when the current head of queue entered service
  double next_arrival = 0;
  std::mt19937_64 rng;
};

/// Slot-synchronous simulation of n homogeneous DCF stations with m-retry
/// binary exponential backoff, Poisson arrivals into finite queues, Bernoulli
/// packet error and optional power capture. One RNG substream per station plus
/// one for channel outcomes keeps runs reproducible and iteration-order free.
class Simulator {
 public:
  Simulator(const Scenario& s, const SimConfig& cfg);
  ~Simulator();

  /// Advances exactly one slot (idle, success or failure period).
  void advance_slot();

  /// Runs until the configured duration and computes the metrics.
  SimMetrics run();

  double now() const { return now_; }
  const std::vector<StationState>& stations() const { return stations_; }
  StationState& station(int i) { return stations_[static_cast<size_t>(i)]; }

 private:
  void deliver_arrivals();
  bool all_queues_empty() const;
  void fast_forward_idle();
  void start_backoff(StationState& st, int stage, double when);
  void on_success(int idx, double finish);
  void on_failure(int idx, double finish);
  double uniform01(std::mt19937_64& g);
  int uniform_counter(std::mt19937_64& g, long w);
  void trace_event(double t, int station, const char* kind);

  Scenario scen_;
  SimConfig cfg_;
  std::vector<StationState> stations_;
  std::mt19937_64 channel_rng_;
  double now_ = 0;
  double t_success_, t_failure_, t_sigma_;
  double capture_base_;  // (1 + z*g)^-1
  long total_payload_bits_;

  // counters: c_* for the whole run, m_* post-warmup
  std::uint64_t c_arrivals_ = 0, c_delivered_ = 0, c_net_drop_ = 0, c_queue_drop_ = 0;
  std::uint64_t m_arrivals_ = 0, m_delivered_ = 0, m_net_drop_ = 0, m_queue_drop_ = 0;
  std::uint64_t m_hoq_done_ = 0, m_slots_ = 0, m_tx_ = 0, m_tx_collided_ = 0;
  std::uint64_t slots_run_ = 0;

  struct Completion {
    double time;
    double delay;
  };
  std::vector<Completion> completions_;           // post-warmup only
  std::vector<std::pair<double, long>> deliveries_;  // (time, bits), post-warmup

  std::unique_ptr<std::ostream> trace_out_;
};

/// Convenience wrapper: build, run, return metrics.
SimMetrics run(const Scenario& s, const SimConfig& cfg);

}  // namespace dcf::sim
