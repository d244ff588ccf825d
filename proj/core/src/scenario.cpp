#include "dcf/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace dcf {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw ValidationError(msg);
}

double parse_double(const std::string& key, const std::string& value) {
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ValidationError("invalid numeric value for " + key + ": '" + value + "'");
  }
  while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) ++pos;
  if (pos != value.size())
    throw ValidationError("invalid numeric value for " + key + ": '" + value + "'");
  return v;
}

long parse_long(const std::string& key, const std::string& value) {
  double v = parse_double(key, value);
  long l = static_cast<long>(v);
  if (static_cast<double>(l) != v)
    throw ValidationError(key + " must be an integer, got '" + value + "'");
  return l;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ValidationError("invalid boolean for " + key + ": '" + value + "'");
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

const Scenario& validate(const Scenario& s) {
  require(s.n >= 1, "n must be >= 1");

  require(s.phy.idle_slot > 0, "idle_slot must be > 0");
  require(s.phy.sifs > 0, "sifs must be > 0");
  require(s.phy.difs > 0, "difs must be > 0");
  require(s.phy.prop_delay > 0, "prop_delay must be > 0");
  require(s.phy.plcp_header_bits > 0, "plcp_header_bits must be > 0");
  require(s.phy.preamble_bits > 0, "preamble_bits must be > 0");
  require(s.phy.data_rate > 0, "data_rate must be > 0");
  require(s.phy.basic_rate > 0, "basic_rate must be > 0");
  require(s.phy.plcp_rate > 0, "plcp_rate must be > 0");
  require(s.phy.difs > s.phy.sifs, "difs must exceed sifs");

  require(s.protocol.w0 >= 1, "w0 must be >= 1");
  require(s.protocol.m >= 0, "m must be >= 0");
  require(s.protocol.m_prime >= 0, "m_prime must be >= 0");
  require(s.protocol.m_prime <= s.protocol.m, "m_prime exceeds m");

  require(s.traffic.lambda >= 0, "lambda must be >= 0");
  require(s.traffic.payload_bits >= 0, "payload_bits must be >= 0");
  require(s.traffic.ip_header_bits >= 0, "ip_header_bits must be >= 0");
  require(s.traffic.transport_header_bits >= 0, "transport_header_bits must be >= 0");
  require(s.traffic.queue_len >= 1, "queue_len must be >= 1");

  require(s.channel.p_e >= 0 && s.channel.p_e <= 1, "p_e must be in [0, 1]");
  if (s.channel.capture_enabled) require(s.channel.z > 0, "z must be > 0 when capture enabled");
  require(s.channel.s >= 1, "s must be >= 1");

  require(s.mac_overhead_bits.data >= 0, "mac_overhead_data_bits must be >= 0");
  require(s.mac_overhead_bits.ack >= 0, "mac_overhead_ack_bits must be >= 0");
  require(s.mac_overhead_bits.rts >= 0, "mac_overhead_rts_bits must be >= 0");
  require(s.mac_overhead_bits.cts >= 0, "mac_overhead_cts_bits must be >= 0");
  return s;
}

double frame_duration(FrameKind kind, const Scenario& s) {
  const double phy_overhead =
      static_cast<double>(s.phy.preamble_bits + s.phy.plcp_header_bits) / s.phy.plcp_rate;
  switch (kind) {
    case FrameKind::Data: {
      const double body_bits = static_cast<double>(s.mac_overhead_bits.data) +
                               s.traffic.ip_header_bits + s.traffic.transport_header_bits +
                               s.traffic.payload_bits;
      return phy_overhead + body_bits / s.phy.data_rate;
    }
    case FrameKind::Ack:
      return phy_overhead + static_cast<double>(s.mac_overhead_bits.ack) / s.phy.basic_rate;
    case FrameKind::Rts:
      return phy_overhead + static_cast<double>(s.mac_overhead_bits.rts) / s.phy.basic_rate;
    case FrameKind::Cts:
      return phy_overhead + static_cast<double>(s.mac_overhead_bits.cts) / s.phy.basic_rate;
  }
  throw std::logic_error("unreachable frame kind");
}

double success_duration(const Scenario& s) {
  const double t_d = frame_duration(FrameKind::Data, s);
  const double t_a = frame_duration(FrameKind::Ack, s);
  const double delta = s.phy.prop_delay;
  if (s.protocol.access_mode == AccessMode::Basic)
    return s.phy.difs + t_d + delta + s.phy.sifs + t_a + delta;
  const double t_r = frame_duration(FrameKind::Rts, s);
  const double t_c = frame_duration(FrameKind::Cts, s);
  return s.phy.difs + t_r + delta + s.phy.sifs + t_c + delta + s.phy.sifs + t_d + delta +
         s.phy.sifs + t_a + delta;
}

double failure_duration(const Scenario& s) {
  if (s.protocol.access_mode == AccessMode::Basic) return success_duration(s);
  const double t_r = frame_duration(FrameKind::Rts, s);
  const double t_c = frame_duration(FrameKind::Cts, s);
  const double delta = s.phy.prop_delay;
  return s.phy.difs + t_r + delta + s.phy.sifs + t_c + delta;
}

long window_at_stage(int i, const ProtocolConfig& p) {
  if (i < 0 || i > p.m) throw std::out_of_range("backoff stage out of range [0, m]");
  const int exp = std::min(i, p.m_prime);
  return static_cast<long>(p.w0) << exp;
}

Scenario preset(const std::string& name) {
  if (name == "dot11b-dsss") {
    Scenario s;
    s.n = 10;
    s.phy = PhyTimings{};  // defaults carry the 802.11b DSSS values
    s.protocol = ProtocolConfig{32, 7, 5, AccessMode::Basic};
    s.traffic.lambda = 0.0;
    s.traffic.payload_bits = 8000;  // 1000 bytes
    s.traffic.ip_header_bits = 160;
    s.traffic.transport_header_bits = 64;
    s.traffic.queue_len = 50;
    s.channel.p_e = 0.0;
    s.channel.capture_enabled = true;
    s.channel.z = 1.0;
    s.channel.s = 11;
    return s;
  }
  throw ValidationError("unknown preset: " + name);
}

void apply_config_entry(Scenario& s, const std::string& key, const std::string& value) {
  // durations arrive in microseconds
  auto us = [&](const std::string& v) { return parse_double(key, v) * 1e-6; };

  if (key == "n") s.n = static_cast<int>(parse_long(key, value));
  else if (key == "idle_slot") s.phy.idle_slot = us(value);
  else if (key == "sifs") s.phy.sifs = us(value);
  else if (key == "difs") s.phy.difs = us(value);
  else if (key == "prop_delay") s.phy.prop_delay = us(value);
  else if (key == "plcp_header_bits") s.phy.plcp_header_bits = static_cast<int>(parse_long(key, value));
  else if (key == "preamble_bits") s.phy.preamble_bits = static_cast<int>(parse_long(key, value));
  else if (key == "data_rate") s.phy.data_rate = parse_double(key, value);
  else if (key == "basic_rate") s.phy.basic_rate = parse_double(key, value);
  else if (key == "plcp_rate") s.phy.plcp_rate = parse_double(key, value);
  else if (key == "w0") s.protocol.w0 = static_cast<int>(parse_long(key, value));
  else if (key == "m") s.protocol.m = static_cast<int>(parse_long(key, value));
  else if (key == "m_prime") s.protocol.m_prime = static_cast<int>(parse_long(key, value));
  else if (key == "access_mode") {
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "basic") s.protocol.access_mode = AccessMode::Basic;
    else if (v == "rtscts" || v == "rts/cts" || v == "rts_cts")
      s.protocol.access_mode = AccessMode::RtsCts;
    else throw ValidationError("invalid access_mode: '" + value + "'");
  }
  else if (key == "lambda") s.traffic.lambda = parse_double(key, value);
  else if (key == "payload_bits") s.traffic.payload_bits = parse_long(key, value);
  else if (key == "ip_header_bits") s.traffic.ip_header_bits = static_cast<int>(parse_long(key, value));
  else if (key == "transport_header_bits")
    s.traffic.transport_header_bits = static_cast<int>(parse_long(key, value));
  else if (key == "queue_len") s.traffic.queue_len = static_cast<int>(parse_long(key, value));
  else if (key == "p_e") s.channel.p_e = parse_double(key, value);
  else if (key == "capture_enabled") s.channel.capture_enabled = parse_bool(key, value);
  else if (key == "z") s.channel.z = parse_double(key, value);
  else if (key == "s") s.channel.s = static_cast<int>(parse_long(key, value));
  else if (key == "mac_overhead_data_bits") s.mac_overhead_bits.data = static_cast<int>(parse_long(key, value));
  else if (key == "mac_overhead_ack_bits") s.mac_overhead_bits.ack = static_cast<int>(parse_long(key, value));
  else if (key == "mac_overhead_rts_bits") s.mac_overhead_bits.rts = static_cast<int>(parse_long(key, value));
  else if (key == "mac_overhead_cts_bits") s.mac_overhead_bits.cts = static_cast<int>(parse_long(key, value));
  else throw ValidationError("unknown config key: '" + key + "'");
}

Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  Scenario s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected `key = value`");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    apply_config_entry(s, key, value);
  }
  return s;
}

}  // namespace dcf
