#include "dcf/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

namespace dcf::sweep {

namespace {

constexpr double kRelErrEps = 1e-12;

void format_row_value(std::ostream& os, double v) { os << v; }

// durations on the wire are rounded to nanosecond precision
double round_ns(double seconds) { return std::round(seconds * 1e9) / 1e9; }

struct MetricColumn {
  const char* name;
  std::function<double(const SweepRow&)> get;
};

const std::vector<MetricColumn>& analytic_columns() {
  static const std::vector<MetricColumn> cols = {
      {"throughput", [](const SweepRow& r) { return r.solution.metrics.throughput; }},
      {"per_station_throughput",
       [](const SweepRow& r) { return r.solution.metrics.per_station_throughput; }},
      {"access_delay", [](const SweepRow& r) { return round_ns(r.solution.metrics.access_delay); }},
      {"network_loss", [](const SweepRow& r) { return r.solution.metrics.network_loss; }},
      {"queue_loss", [](const SweepRow& r) { return r.solution.metrics.queue_loss; }},
      {"hoq_slots", [](const SweepRow& r) { return r.solution.metrics.hoq_slots; }},
      {"slot_time", [](const SweepRow& r) { return round_ns(r.solution.metrics.slot_time); }},
      {"tau", [](const SweepRow& r) { return r.solution.state.tau; }},
      {"p_b", [](const SweepRow& r) { return r.solution.state.p_b; }},
      {"p_c", [](const SweepRow& r) { return r.solution.state.p_c; }},
      {"p_p", [](const SweepRow& r) { return r.solution.state.p_p; }},
      {"p_f", [](const SweepRow& r) { return r.solution.state.p_f; }},
      {"p_q", [](const SweepRow& r) { return r.solution.state.p_q; }},
      {"b00", [](const SweepRow& r) { return r.solution.state.b00; }},
  };
  return cols;
}

std::vector<MetricColumn> selected_columns(const std::vector<std::string>& outputs) {
  if (outputs.empty()) return analytic_columns();
  std::vector<MetricColumn> cols;
  for (const auto& name : outputs) {
    const auto& all = analytic_columns();
    const auto it = std::find_if(all.begin(), all.end(),
                                 [&](const MetricColumn& c) { return name == c.name; });
    if (it == all.end()) throw ValidationError("unknown sweep output: '" + name + "'");
    cols.push_back(*it);
  }
  return cols;
}

}  // namespace

Axis axis_from_name(const std::string& name) {
  if (name == "lambda") return Axis::Lambda;
  if (name == "n") return Axis::N;
  if (name == "w0") return Axis::W0;
  if (name == "m") return Axis::M;
  if (name == "p_e") return Axis::PE;
  if (name == "payload_bits") return Axis::PayloadBits;
  throw ValidationError("unknown sweep axis: '" + name + "'");
}

std::string axis_name(Axis axis) {
  switch (axis) {
    case Axis::Lambda: return "lambda";
    case Axis::N: return "n";
    case Axis::W0: return "w0";
    case Axis::M: return "m";
    case Axis::PE: return "p_e";
    case Axis::PayloadBits: return "payload_bits";
  }
  return "?";
}

Scenario apply_axis(const Scenario& base, Axis axis, double value) {
  Scenario s = base;
  switch (axis) {
    case Axis::Lambda:
      s.traffic.lambda = value;
      break;
    case Axis::N:
      s.n = static_cast<int>(value);
      break;
    case Axis::W0:
      s.protocol.w0 = static_cast<int>(value);
      break;
    case Axis::M:
      s.protocol.m = static_cast<int>(value);
      s.protocol.m_prime = std::min(s.protocol.m_prime, s.protocol.m);
      break;
    case Axis::PE:
      s.channel.p_e = value;
      break;
    case Axis::PayloadBits:
      s.traffic.payload_bits = static_cast<long>(value);
      break;
  }
  return s;
}

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw ValidationError("sweep values must be nonempty");
  for (double v : spec.values) validate(apply_axis(spec.base, spec.axis, v));
  selected_columns(spec.outputs);  // reject unknown output names up front

  SweepResult result;
  result.rows.reserve(spec.values.size());
  for (double v : spec.values) {
    SweepRow row;
    row.axis_value = v;
    const Scenario s = apply_axis(spec.base, spec.axis, v);
    ++result.solver_calls;
    try {
      row.solution = solver::solve(s, spec.solver_opts);
      row.solver_ok = row.solution.converged;
      if (!row.solution.converged) row.error = "non-convergence";
    } catch (const solver::DegenerateInput& e) {
      row.solver_ok = false;
      row.error = e.what();
    }
    if (spec.simulate) row.sim = sim::run(s, spec.sim_config);
    result.rows.push_back(std::move(row));
  }
  return result;
}

void write_sweep_csv(const SweepSpec& spec, const SweepResult& result, std::ostream& os) {
  const auto cols = selected_columns(spec.outputs);
  const auto old_precision = os.precision(12);
  os << "# units: seconds, bits/second, packets/second\n";
  os << axis_name(spec.axis);
  for (const auto& c : cols) os << ',' << c.name;
  if (spec.simulate)
    os << ",sim_throughput,sim_access_delay,sim_network_loss,sim_queue_loss"
          ",sim_tau,sim_p_c,ci_throughput,ci_access_delay";
  os << ",converged\n";
  for (const auto& row : result.rows) {
    os << row.axis_value;
    for (const auto& c : cols) os << ',' << c.get(row);
    if (spec.simulate) {
      if (row.sim) {
        const auto& sm = *row.sim;
        os << ',' << sm.throughput.mean << ',' << round_ns(sm.mean_access_delay.mean) << ','
           << sm.network_loss_rate << ',' << sm.queue_loss_rate << ',' << sm.empirical_tau << ','
           << sm.empirical_p_c << ',' << sm.throughput.half_width << ','
           << round_ns(sm.mean_access_delay.half_width);
      } else {
        os << ",,,,,,,,";
      }
    }
    os << ',' << (row.solver_ok ? 1 : 0) << '\n';
  }
  os.precision(old_precision);
}

ComparisonResult run_compare(const SweepSpec& spec, CompareMetric metric) {
  SweepSpec with_sim = spec;
  with_sim.simulate = true;
  const SweepResult swept = run_sweep(with_sim);

  ComparisonResult result;
  double sum = 0;
  for (const auto& row : swept.rows) {
    ComparisonRow c;
    c.axis_value = row.axis_value;
    c.converged = row.solver_ok;
    if (metric == CompareMetric::Throughput) {
      c.analytic = row.solution.metrics.throughput;
      c.simulated = row.sim->throughput.mean;
      c.ci_half_width = row.sim->throughput.half_width;
    } else {
      c.analytic = row.solution.metrics.access_delay;
      c.simulated = row.sim->mean_access_delay.mean;
      c.ci_half_width = row.sim->mean_access_delay.half_width;
    }
    c.rel_error = std::abs(c.analytic - c.simulated) / std::max(c.simulated, kRelErrEps);
    result.max_rel_error = std::max(result.max_rel_error, c.rel_error);
    sum += c.rel_error;
    result.rows.push_back(c);
  }
  if (!result.rows.empty()) result.mean_rel_error = sum / static_cast<double>(result.rows.size());
  return result;
}

void write_compare_csv(const SweepSpec& spec, CompareMetric metric,
                       const ComparisonResult& result, std::ostream& os) {
  const char* name = metric == CompareMetric::Throughput ? "throughput" : "access_delay";
  const auto old_precision = os.precision(12);
  os << "# units: seconds, bits/second, packets/second\n";
  os << axis_name(spec.axis) << ",analytic_" << name << ",sim_" << name << ",ci_half_width"
     << ",rel_error,converged\n";
  const bool durations = metric == CompareMetric::AccessDelay;
  for (const auto& row : result.rows) {
    os << row.axis_value << ',';
    format_row_value(os, durations ? round_ns(row.analytic) : row.analytic);
    os << ',';
    format_row_value(os, durations ? round_ns(row.simulated) : row.simulated);
    os << ',' << row.ci_half_width << ',' << row.rel_error << ',' << (row.converged ? 1 : 0)
       << '\n';
  }
  os << "# summary: max_rel_error=" << result.max_rel_error
     << " mean_rel_error=" << result.mean_rel_error << '\n';
  os.precision(old_precision);
}

}  // namespace dcf::sweep
