#include "dcf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace dcf::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// 95% two-sided Student-t critical values, df 1..30; 1.96 beyond.
double t_critical(int df) {
  static constexpr double table[30] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1) return 0.0;
  return df <= 30 ? table[df - 1] : 1.96;
}

CiValue ci_from_batches(const std::vector<double>& batch_values) {
  CiValue ci;
  const size_t b = batch_values.size();
  if (b == 0) return ci;
  double mean = 0;
  for (double v : batch_values) mean += v;
  mean /= static_cast<double>(b);
  ci.mean = mean;
  if (b < 2) return ci;
  double var = 0;
  for (double v : batch_values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(b - 1);
  ci.half_width = t_critical(static_cast<int>(b) - 1) * std::sqrt(var / static_cast<double>(b));
  return ci;
}

}  // namespace

Simulator::Simulator(const Scenario& s, const SimConfig& cfg) : scen_(s), cfg_(cfg) {
  validate(s);
  if (!(cfg.duration > cfg.warmup) || cfg.warmup < 0)
    throw std::invalid_argument("duration must exceed warmup and warmup must be >= 0");
  if (cfg.batch_count < 2) throw std::invalid_argument("batch_count must be >= 2");

  t_success_ = success_duration(s);
  t_failure_ = failure_duration(s);
  t_sigma_ = s.phy.idle_slot;
  const double g = 2.0 / (3.0 * s.channel.s);
  capture_base_ = 1.0 / (1.0 + s.channel.z * g);
  total_payload_bits_ = s.total_payload_bits();

  std::uint64_t seq = cfg.seed;
  stations_.resize(static_cast<size_t>(s.n));
  for (auto& st : stations_) {
    st.rng.seed(splitmix64(seq));
    st.next_arrival = s.traffic.lambda > 0
                          ? -std::log1p(-uniform01(st.rng)) / s.traffic.lambda
                          : std::numeric_limits<double>::infinity();
  }
  channel_rng_.seed(splitmix64(seq));

  if (cfg.trace) {
    auto out = std::make_unique<std::ofstream>(cfg.trace_path);
    if (!*out) throw std::invalid_argument("cannot open trace file: " + cfg.trace_path);
    *out << "time,station,event,stage,counter,queue_len\n";
    trace_out_ = std::move(out);
  }
}

Simulator::~Simulator() = default;

double Simulator::uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

int Simulator::uniform_counter(std::mt19937_64& g, long w) {
  const long k = static_cast<long>(uniform01(g) * static_cast<double>(w));
  return static_cast<int>(k >= w ? w - 1 : k);
}

void Simulator::trace_event(double t, int station, const char* kind) {
  if (!trace_out_) return;
  const auto& st = stations_[static_cast<size_t>(station)];
  *trace_out_ << t << ',' << station << ',' << kind << ',' << st.retry_stage << ','
              << st.backoff_counter << ',' << st.queue.size() << '\n';
}

void Simulator::start_backoff(StationState& st, int stage, double when) {
  st.retry_stage = stage;
  st.backoff_counter = uniform_counter(st.rng, window_at_stage(stage, scen_.protocol));
  st.phase = Phase::Backoff;
  st.hoq_since = when;
}

void Simulator::deliver_arrivals() {
  for (size_t i = 0; i < stations_.size(); ++i) {
    auto& st = stations_[i];
    while (st.next_arrival <= now_) {
      const double ts = st.next_arrival;
      st.next_arrival = ts - std::log1p(-uniform01(st.rng)) / scen_.traffic.lambda;
      ++c_arrivals_;
      if (st.queue.size() < static_cast<size_t>(scen_.traffic.queue_len)) {
        st.queue.push_back(ts);
        if (st.phase == Phase::EmptyIdle) start_backoff(st, 0, ts);
        trace_event(ts, static_cast<int>(i), "arrival");
      } else {
        ++c_queue_drop_;
        if (ts >= cfg_.warmup) ++m_queue_drop_;
        trace_event(ts, static_cast<int>(i), "queue_drop");
      }
      if (ts >= cfg_.warmup) ++m_arrivals_;
    }
  }
}

bool Simulator::all_queues_empty() const {
  for (const auto& st : stations_)
    if (st.phase != Phase::EmptyIdle) return false;
  return true;
}

void Simulator::fast_forward_idle() {
  double target = cfg_.duration;
  for (const auto& st : stations_) target = std::min(target, st.next_arrival);
  if (target < now_ + t_sigma_) target = now_ + t_sigma_;
  const auto k = static_cast<std::uint64_t>(std::ceil((target - now_) / t_sigma_));
  // idle slots with nothing to decrement; only the clock and slot count move
  std::uint64_t past_warmup = k;
  if (now_ < cfg_.warmup) {
    const double gap = cfg_.warmup - now_;
    const auto before = static_cast<std::uint64_t>(std::min(
        static_cast<double>(k), std::ceil(gap / t_sigma_)));
    past_warmup = k - before;
  }
  m_slots_ += past_warmup;
  slots_run_ += k;
  now_ += static_cast<double>(k) * t_sigma_;
}

void Simulator::on_success(int idx, double finish) {
  auto& st = stations_[static_cast<size_t>(idx)];
  const bool measured = finish >= cfg_.warmup;
  ++c_delivered_;
  if (measured) {
    ++m_delivered_;
    ++m_hoq_done_;
    completions_.push_back({finish, finish - st.hoq_since});
    deliveries_.push_back({finish, total_payload_bits_});
  }
  trace_event(now_, idx, "tx_success");
  st.queue.pop_front();
  if (!st.queue.empty()) {
    start_backoff(st, 0, finish);
  } else {
    st.phase = Phase::EmptyIdle;
    st.retry_stage = 0;
    st.backoff_counter = 0;
  }
}

void Simulator::on_failure(int idx, double finish) {
  auto& st = stations_[static_cast<size_t>(idx)];
  if (st.retry_stage >= scen_.protocol.m) {
    // retry limit exhausted: drop, delay does not count
    ++c_net_drop_;
    if (finish >= cfg_.warmup) {
      ++m_net_drop_;
      ++m_hoq_done_;
    }
    trace_event(now_, idx, "net_drop");
    st.queue.pop_front();
    if (!st.queue.empty()) {
      start_backoff(st, 0, finish);
    } else {
      st.phase = Phase::EmptyIdle;
      st.retry_stage = 0;
      st.backoff_counter = 0;
    }
  } else {
    start_backoff(st, st.retry_stage + 1, st.hoq_since);
  }
}

void Simulator::advance_slot() {
  deliver_arrivals();
  if (all_queues_empty()) {
    fast_forward_idle();
    return;
  }

  const bool measured = now_ >= cfg_.warmup;
  std::vector<int> tx;
  for (size_t i = 0; i < stations_.size(); ++i)
    if (stations_[i].phase == Phase::Backoff && stations_[i].backoff_counter == 0)
      tx.push_back(static_cast<int>(i));

  ++slots_run_;
  if (measured) ++m_slots_;

  if (tx.empty()) {
    for (auto& st : stations_)
      if (st.phase == Phase::Backoff && st.backoff_counter > 0) --st.backoff_counter;
    now_ += t_sigma_;
    return;
  }

  if (measured) m_tx_ += tx.size();

  if (tx.size() == 1) {
    const bool error = uniform01(channel_rng_) < scen_.channel.p_e;
    if (!error) {
      on_success(tx[0], now_ + t_success_);
      now_ += t_success_;
    } else {
      trace_event(now_, tx[0], "tx_error");
      on_failure(tx[0], now_ + t_failure_);
      now_ += t_failure_;
    }
    return;
  }

  // collision of j frames; with capture one uniformly-chosen frame may survive
  const int j = static_cast<int>(tx.size());
  if (measured) m_tx_collided_ += tx.size();
  int winner = -1;
  if (scen_.channel.capture_enabled) {
    const int pick = static_cast<int>(uniform01(channel_rng_) * j) % j;
    const double p_capture = std::pow(capture_base_, j - 1);
    if (uniform01(channel_rng_) < p_capture &&
        !(uniform01(channel_rng_) < scen_.channel.p_e))
      winner = tx[static_cast<size_t>(pick)];
  }
  const double dur = winner >= 0 ? t_success_ : t_failure_;
  for (int idx : tx) {
    if (idx == winner) {
      trace_event(now_, idx, "capture");
      on_success(idx, now_ + dur);
    } else {
      trace_event(now_, idx, "tx_collide");
      on_failure(idx, now_ + dur);
    }
  }
  now_ += dur;
}

SimMetrics Simulator::run() {
  while (now_ < cfg_.duration) advance_slot();

  SimMetrics m;
  const double window = cfg_.duration - cfg_.warmup;
  const int b = cfg_.batch_count;
  auto batch_of = [&](double t) {
    int idx = static_cast<int>((t - cfg_.warmup) / window * b);
    return std::clamp(idx, 0, b - 1);
  };

  std::vector<double> bits(static_cast<size_t>(b), 0.0);
  for (const auto& [t, nbits] : deliveries_) bits[static_cast<size_t>(batch_of(t))] += nbits;
  std::vector<double> thr(static_cast<size_t>(b));
  for (int i = 0; i < b; ++i) thr[static_cast<size_t>(i)] = bits[static_cast<size_t>(i)] / (window / b);
  m.throughput = ci_from_batches(thr);

  std::vector<double> dsum(static_cast<size_t>(b), 0.0);
  std::vector<std::uint64_t> dcnt(static_cast<size_t>(b), 0);
  double total_delay = 0;
  for (const auto& c : completions_) {
    const auto idx = static_cast<size_t>(batch_of(c.time));
    dsum[idx] += c.delay;
    ++dcnt[idx];
    total_delay += c.delay;
  }
  std::vector<double> dmeans;
  for (int i = 0; i < b; ++i)
    if (dcnt[static_cast<size_t>(i)] > 0)
      dmeans.push_back(dsum[static_cast<size_t>(i)] / dcnt[static_cast<size_t>(i)]);
  m.mean_access_delay = ci_from_batches(dmeans);
  if (!completions_.empty())
    m.mean_access_delay.mean = total_delay / static_cast<double>(completions_.size());

  const std::uint64_t hoq_resolved = m_delivered_ + m_net_drop_;
  m.network_loss_rate =
      hoq_resolved > 0 ? static_cast<double>(m_net_drop_) / hoq_resolved : 0.0;
  m.queue_loss_rate =
      m_arrivals_ > 0 ? static_cast<double>(m_queue_drop_) / m_arrivals_ : 0.0;
  m.empirical_tau = m_slots_ > 0
                        ? static_cast<double>(m_tx_) / (static_cast<double>(m_slots_) * scen_.n)
                        : 0.0;
  m.empirical_p_c = m_tx_ > 0 ? static_cast<double>(m_tx_collided_) / m_tx_ : 0.0;

  m.arrivals_total = c_arrivals_;
  m.delivered_total = c_delivered_;
  m.net_dropped_total = c_net_drop_;
  m.queue_dropped_total = c_queue_drop_;
  std::uint64_t queued = 0;
  for (const auto& st : stations_) queued += st.queue.size();
  m.in_queue_at_end = queued;
  m.slots_total = slots_run_;
  m.transmissions_total = m_tx_;
  return m;
}

SimMetrics run(const Scenario& s, const SimConfig& cfg) { return Simulator(s, cfg).run(); }

}  // namespace dcf::sim
