#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dcf {

enum class AccessMode { Basic, RtsCts };
enum class FrameKind { Data, Ack, Rts, Cts };

/// PHY-layer timing and rate parameters. Durations in seconds, rates in bit/s.
struct PhyTimings {
  double idle_slot = 20e-6;
  double sifs = 10e-6;
  double difs = 50e-6;
  double prop_delay = 1e-6;
  int plcp_header_bits = 144;
  int preamble_bits = 48;
  double data_rate = 1e6;
  double basic_rate = 1e6;
  double plcp_rate = 1e6;
};

struct ProtocolConfig {
  int w0 = 32;       // initial contention window
  int m = 7;         // retry limit (packet dropped after m failures at stage m)
  int m_prime = 5;   // window-doubling cap: W_i = 2^min(i, m_prime) * w0
  AccessMode access_mode = AccessMode::Basic;
};

struct TrafficConfig {
  double lambda = 0.0;           // packet arrivals per second per station
  long payload_bits = 8000;      // application payload l_D
  int ip_header_bits = 160;      // l_I (IPv4)
  int transport_header_bits = 64;  // l_U (UDP)
  int queue_len = 50;            // per-station queue capacity, head of queue included
};

struct ChannelConfig {
  double p_e = 0.0;              // packet error rate
  bool capture_enabled = false;
  double z = 1.0;                // capture threshold
  int s = 11;                    // spreading factor; inverse processing gain g = 2/(3s)
};

/// MAC frame body sizes in bits (header + FCS for data; whole body for control frames).
struct MacOverheadBits {
  int data = 224;  // 28 bytes
  int ack = 112;   // 14 bytes
  int rts = 160;   // 20 bytes
  int cts = 112;   // 14 bytes
};

struct Scenario {
  int n = 10;  // contending stations
  PhyTimings phy;
  ProtocolConfig protocol;
  TrafficConfig traffic;
  ChannelConfig channel;
  MacOverheadBits mac_overhead_bits;

  long total_payload_bits() const {
    return traffic.payload_bits + traffic.ip_header_bits + traffic.transport_header_bits;
  }
};

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Checks every scenario invariant and returns the scenario unchanged.
/// Throws ValidationError naming the first violated invariant.
const Scenario& validate(const Scenario& s);

/// Airtime of one frame: PLCP preamble + header at plcp_rate plus the frame body.
/// Data bodies go out at data_rate, control frame bodies at basic_rate.
double frame_duration(FrameKind kind, const Scenario& s);

/// t_S: DIFS + the full successful exchange including the ACK.
double success_duration(const Scenario& s);

/// t_F: time a sender waits before declaring the attempt failed.
/// Equals t_S in Basic mode; in RTS/CTS mode only the RTS/CTS part is lost.
double failure_duration(const Scenario& s);

/// W_i = 2^i * w0 for i <= m_prime, capped at 2^m_prime * w0 beyond.
/// Throws std::out_of_range unless 0 <= i <= m.
long window_at_stage(int i, const ProtocolConfig& p);

/// Named parameter presets. "dot11b-dsss" carries the 802.11b DSSS values.
Scenario preset(const std::string& name);

/// Loads a flat `key = value` config file; keys match the field names,
/// durations are microseconds, rates bit/s. Unknown keys are an error.
Scenario load_config(const std::string& path);

/// Applies one `key = value` assignment to a scenario (same keys as load_config).
void apply_config_entry(Scenario& s, const std::string& key, const std::string& value);

}  // namespace dcf
