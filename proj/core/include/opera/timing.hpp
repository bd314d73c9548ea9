#pragma once

#include <cstdint>

namespace opera {

// All times in seconds, rates in bits/s. The simulator converts to integer
// nanoseconds at its boundary.
struct TimingParams {
  double link_rate = 10e9;
  int mtu_bytes = 1500;
  int header_bytes = 64;
  // Worst-case standing queue a data packet can find ahead of it at one
  // hop, including its own slot: full data queue plus full header queue.
  int queue_capacity_bytes = 8 * 1500 + 187 * 64;
  double prop_delay_per_hop = 500e-9;
  int worst_case_hops = 5;
  double reconfiguration_delay = 10e-6;  // r
  double guard_band = 1e-6;              // g, per slice boundary
  // If positive, overrides the computed end-to-end drain bound when
  // building schedules (deployments round epsilon to a design value).
  double epsilon_override = 0;
};

struct EpsilonBreakdown {
  double queue_drain_s = 0;     // (queue_capacity - mtu) ahead of the packet
  double serialization_s = 0;   // the packet's own slot
  double propagation_s = 0;
  double per_hop_s = 0;
  double total_s = 0;           // worst_case_hops * per_hop_s
};

// Worst-case time for a packet to clear the network: at each of the
// worst_case_hops ToR hops it may have to wait out a full queue (its own
// transmission is the tail of that drain) plus the hop propagation.
EpsilonBreakdown compute_epsilon(const TimingParams& p);

void validate_timing(const TimingParams& p);

}  // namespace opera
