// dcf: analytic model, chain oracle and slot simulator for m-retry BEB DCF.
// Subcommands: analyze, sweep, simulate, compare.
// Exit codes: 0 ok, 2 validation error, 3 solver non-convergence (analyze).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dcf/scenario.hpp"
#include "dcf/simulator.hpp"
#include "dcf/solver.hpp"
#include "dcf/sweep.hpp"

using nlohmann::ordered_json;

namespace {

struct ScenarioArgs {
  std::string preset_name;
  std::string config_path;
  std::optional<int> n;
  std::optional<double> idle_slot_us, sifs_us, difs_us, prop_delay_us;
  std::optional<int> plcp_header_bits, preamble_bits;
  std::optional<double> data_rate, basic_rate, plcp_rate;
  std::optional<int> w0, m, m_prime;
  std::optional<std::string> access;
  std::optional<double> lambda;
  std::optional<long> payload_bits, payload_bytes;
  std::optional<int> ip_header_bits, transport_header_bits, queue_len;
  std::optional<double> p_e, z;
  std::optional<int> s_factor;
  std::optional<bool> capture;
  std::optional<int> mac_data, mac_ack, mac_rts, mac_cts;
};

void add_scenario_flags(CLI::App* cmd, ScenarioArgs& a) {
  cmd->add_option("--preset", a.preset_name, "named preset (dot11b-dsss)");
  cmd->add_option("--config", a.config_path, "key = value scenario file");
  cmd->add_option("--n", a.n, "contending stations");
  cmd->add_option("--idle-slot", a.idle_slot_us, "idle slot, microseconds");
  cmd->add_option("--sifs", a.sifs_us, "SIFS, microseconds");
  cmd->add_option("--difs", a.difs_us, "DIFS, microseconds");
  cmd->add_option("--prop-delay", a.prop_delay_us, "propagation delay, microseconds");
  cmd->add_option("--plcp-header-bits", a.plcp_header_bits);
  cmd->add_option("--preamble-bits", a.preamble_bits);
  cmd->add_option("--data-rate", a.data_rate, "bit/s");
  cmd->add_option("--basic-rate", a.basic_rate, "bit/s");
  cmd->add_option("--plcp-rate", a.plcp_rate, "bit/s");
  cmd->add_option("--w0", a.w0, "initial contention window");
  cmd->add_option("--m", a.m, "retry limit");
  cmd->add_option("--m-prime", a.m_prime, "window-doubling cap");
  cmd->add_option("--access", a.access, "basic|rtscts");
  cmd->add_option("--lambda", a.lambda, "arrivals per second per station");
  cmd->add_option("--payload-bits", a.payload_bits);
  cmd->add_option("--payload-bytes", a.payload_bytes);
  cmd->add_option("--ip-header-bits", a.ip_header_bits);
  cmd->add_option("--transport-header-bits", a.transport_header_bits);
  cmd->add_option("--queue-len", a.queue_len);
  cmd->add_option("--p-e", a.p_e, "packet error rate");
  cmd->add_flag("--capture,!--no-capture", a.capture, "power capture on/off");
  cmd->add_option("--z", a.z, "capture threshold");
  cmd->add_option("--s", a.s_factor, "spreading factor");
  cmd->add_option("--mac-overhead-data-bits", a.mac_data);
  cmd->add_option("--mac-overhead-ack-bits", a.mac_ack);
  cmd->add_option("--mac-overhead-rts-bits", a.mac_rts);
  cmd->add_option("--mac-overhead-cts-bits", a.mac_cts);
}

dcf::Scenario scenario_from(const ScenarioArgs& a) {
  dcf::Scenario s;
  if (!a.preset_name.empty()) s = dcf::preset(a.preset_name);
  if (!a.config_path.empty()) s = dcf::load_config(a.config_path);
  if (a.n) s.n = *a.n;
  if (a.idle_slot_us) s.phy.idle_slot = *a.idle_slot_us * 1e-6;
  if (a.sifs_us) s.phy.sifs = *a.sifs_us * 1e-6;
  if (a.difs_us) s.phy.difs = *a.difs_us * 1e-6;
  if (a.prop_delay_us) s.phy.prop_delay = *a.prop_delay_us * 1e-6;
  if (a.plcp_header_bits) s.phy.plcp_header_bits = *a.plcp_header_bits;
  if (a.preamble_bits) s.phy.preamble_bits = *a.preamble_bits;
  if (a.data_rate) s.phy.data_rate = *a.data_rate;
  if (a.basic_rate) s.phy.basic_rate = *a.basic_rate;
  if (a.plcp_rate) s.phy.plcp_rate = *a.plcp_rate;
  if (a.w0) s.protocol.w0 = *a.w0;
  if (a.m) s.protocol.m = *a.m;
  if (a.m_prime) s.protocol.m_prime = *a.m_prime;
  if (a.access) {
    if (*a.access == "basic") s.protocol.access_mode = dcf::AccessMode::Basic;
    else if (*a.access == "rtscts") s.protocol.access_mode = dcf::AccessMode::RtsCts;
    else throw dcf::ValidationError("invalid --access: '" + *a.access + "'");
  }
  if (a.lambda) s.traffic.lambda = *a.lambda;
  if (a.payload_bits) s.traffic.payload_bits = *a.payload_bits;
  if (a.payload_bytes) s.traffic.payload_bits = *a.payload_bytes * 8;
  if (a.ip_header_bits) s.traffic.ip_header_bits = *a.ip_header_bits;
  if (a.transport_header_bits) s.traffic.transport_header_bits = *a.transport_header_bits;
  if (a.queue_len) s.traffic.queue_len = *a.queue_len;
  if (a.p_e) s.channel.p_e = *a.p_e;
  if (a.capture) s.channel.capture_enabled = *a.capture;
  if (a.z) s.channel.z = *a.z;
  if (a.s_factor) s.channel.s = *a.s_factor;
  if (a.mac_data) s.mac_overhead_bits.data = *a.mac_data;
  if (a.mac_ack) s.mac_overhead_bits.ack = *a.mac_ack;
  if (a.mac_rts) s.mac_overhead_bits.rts = *a.mac_rts;
  if (a.mac_cts) s.mac_overhead_bits.cts = *a.mac_cts;
  return s;
}

struct SolverArgs {
  std::string mode = "unsaturated";
  double tol = 1e-10;
  int max_iter = 10000;
  double damping = 0.5;
  double tau_seed = -1;
};

void add_solver_flags(CLI::App* cmd, SolverArgs& a) {
  cmd->add_option("--mode", a.mode, "saturated|unsaturated")
      ->check(CLI::IsMember({"saturated", "unsaturated"}));
  cmd->add_option("--tol", a.tol, "fixed-point tolerance");
  cmd->add_option("--max-iter", a.max_iter);
  cmd->add_option("--damping", a.damping, "Picard damping in (0,1]");
  cmd->add_option("--tau-seed", a.tau_seed, "initial tau; default 2/(w0+1)");
}

dcf::solver::SolverOptions solver_opts_from(const SolverArgs& a) {
  dcf::solver::SolverOptions o;
  o.mode = a.mode == "saturated" ? dcf::solver::SolveMode::Saturated
                                 : dcf::solver::SolveMode::Unsaturated;
  o.tol = a.tol;
  o.max_iter = a.max_iter;
  o.damping = a.damping;
  o.tau_seed = a.tau_seed;
  return o;
}

struct SimArgs {
  std::uint64_t seed = 1;
  double duration = 2000.0;
  double warmup = 100.0;
  int batches = 10;
  std::string trace_path;
};

void add_sim_flags(CLI::App* cmd, SimArgs& a) {
  cmd->add_option("--seed", a.seed, "RNG seed");
  cmd->add_option("--duration", a.duration, "simulated seconds");
  cmd->add_option("--warmup", a.warmup, "seconds excluded from metrics");
  cmd->add_option("--batches", a.batches, "batch count for confidence intervals");
  cmd->add_option("--trace", a.trace_path, "per-event CSV trace file");
}

dcf::sim::SimConfig sim_config_from(const SimArgs& a) {
  dcf::sim::SimConfig c;
  c.seed = a.seed;
  c.duration = a.duration;
  c.warmup = a.warmup;
  c.batch_count = a.batches;
  if (!a.trace_path.empty()) {
    c.trace = true;
    c.trace_path = a.trace_path;
  }
  return c;
}

std::vector<double> parse_values(const std::string& csv, double from, double to, double step) {
  std::vector<double> out;
  if (!csv.empty()) {
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    return out;
  }
  if (step > 0 && to >= from)
    for (double v = from; v <= to + 1e-12; v += step) out.push_back(v);
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw dcf::ValidationError("cannot open output file: " + out_path);
  out << text;
}

ordered_json solution_json(const dcf::solver::Solution& sol) {
  ordered_json j;
  j["tau"] = sol.state.tau;
  j["p_b"] = sol.state.p_b;
  j["p_c"] = sol.state.p_c;
  j["p_p"] = sol.state.p_p;
  j["p_f"] = sol.state.p_f;
  j["p_s"] = sol.state.p_s;
  j["p_q"] = sol.state.p_q;
  j["b00"] = sol.state.b00;
  j["b_e"] = sol.state.b_e;
  j["throughput"] = sol.metrics.throughput;
  j["per_station_throughput"] = sol.metrics.per_station_throughput;
  j["access_delay"] = sol.metrics.access_delay;
  j["network_loss"] = sol.metrics.network_loss;
  j["queue_loss"] = sol.metrics.queue_loss;
  j["hoq_slots"] = sol.metrics.hoq_slots;
  j["slot_time"] = sol.metrics.slot_time;
  j["iterations"] = sol.iterations;
  j["residual"] = sol.residual;
  j["converged"] = sol.converged;
  j["multiple_roots"] = sol.multiple_roots;
  return j;
}

ordered_json sim_json(const dcf::sim::SimMetrics& m, const SimArgs& a) {
  ordered_json j;
  j["seed"] = a.seed;
  j["duration"] = a.duration;
  j["warmup"] = a.warmup;
  j["throughput"] = m.throughput.mean;
  j["throughput_ci"] = m.throughput.half_width;
  j["mean_access_delay"] = m.mean_access_delay.mean;
  j["mean_access_delay_ci"] = m.mean_access_delay.half_width;
  j["network_loss_rate"] = m.network_loss_rate;
  j["queue_loss_rate"] = m.queue_loss_rate;
  j["empirical_tau"] = m.empirical_tau;
  j["empirical_p_c"] = m.empirical_p_c;
  j["arrivals"] = m.arrivals_total;
  j["delivered"] = m.delivered_total;
  j["net_dropped"] = m.net_dropped_total;
  j["queue_dropped"] = m.queue_dropped_total;
  j["in_queue_at_end"] = m.in_queue_at_end;
  j["slots"] = m.slots_total;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analytic model and slot simulator for m-retry BEB DCF networks"};
  app.require_subcommand(1);

  ScenarioArgs scen_args;
  SolverArgs solver_args;
  SimArgs sim_args;
  std::string out_path;
  std::string axis_name = "lambda";
  std::string values_csv;
  double from = 0, to = -1, step = -1;
  bool with_sim = false;
  std::string compare_metric = "throughput";

  CLI::App* analyze = app.add_subcommand("analyze", "solve one scenario, report JSON");
  add_scenario_flags(analyze, scen_args);
  add_solver_flags(analyze, solver_args);
  analyze->add_option("--out", out_path, "write to file instead of stdout");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "sweep one parameter, emit CSV");
  add_scenario_flags(sweep_cmd, scen_args);
  add_solver_flags(sweep_cmd, solver_args);
  add_sim_flags(sweep_cmd, sim_args);
  sweep_cmd->add_option("--axis", axis_name, "lambda|n|w0|m|p_e|payload_bits");
  sweep_cmd->add_option("--values", values_csv, "comma-separated axis values");
  sweep_cmd->add_option("--from", from);
  sweep_cmd->add_option("--to", to);
  sweep_cmd->add_option("--step", step);
  sweep_cmd->add_flag("--simulate", with_sim, "add simulation columns");
  sweep_cmd->add_option("--out", out_path);

  CLI::App* simulate = app.add_subcommand("simulate", "run the slot simulator, report JSON");
  add_scenario_flags(simulate, scen_args);
  add_sim_flags(simulate, sim_args);
  simulate->add_option("--out", out_path);

  CLI::App* compare = app.add_subcommand("compare", "analytic vs simulated, emit CSV");
  add_scenario_flags(compare, scen_args);
  add_solver_flags(compare, solver_args);
  add_sim_flags(compare, sim_args);
  compare->add_option("--axis", axis_name);
  compare->add_option("--values", values_csv);
  compare->add_option("--from", from);
  compare->add_option("--to", to);
  compare->add_option("--step", step);
  compare->add_option("--metric", compare_metric, "throughput|access-delay")
      ->check(CLI::IsMember({"throughput", "access-delay"}));
  compare->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) {
      const dcf::Scenario s = scenario_from(scen_args);
      dcf::solver::Solution sol;
      try {
        sol = dcf::solver::solve(s, solver_opts_from(solver_args));
      } catch (const dcf::solver::DegenerateInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
      }
      emit(solution_json(sol).dump(2) + "\n", out_path);
      return sol.converged ? 0 : 3;
    }

    if (simulate->parsed()) {
      const dcf::Scenario s = scenario_from(scen_args);
      const dcf::sim::SimMetrics m = dcf::sim::run(s, sim_config_from(sim_args));
      emit(sim_json(m, sim_args).dump(2) + "\n", out_path);
      return 0;
    }

    dcf::sweep::SweepSpec spec;
    spec.base = scenario_from(scen_args);
    spec.axis = dcf::sweep::axis_from_name(axis_name);
    spec.values = parse_values(values_csv, from, to, step);
    spec.solver_opts = solver_opts_from(solver_args);
    spec.sim_config = sim_config_from(sim_args);

    std::ostringstream os;
    if (sweep_cmd->parsed()) {
      spec.simulate = with_sim;
      const auto result = dcf::sweep::run_sweep(spec);
      dcf::sweep::write_sweep_csv(spec, result, os);
    } else {
      const auto metric = compare_metric == "throughput"
                              ? dcf::sweep::CompareMetric::Throughput
                              : dcf::sweep::CompareMetric::AccessDelay;
      const auto result = dcf::sweep::run_compare(spec, metric);
      dcf::sweep::write_compare_csv(spec, metric, result, os);
    }
    emit(os.str(), out_path);
    return 0;
  } catch (const dcf::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
