#include "opera/timing.hpp"

#include <stdexcept>

namespace opera {

void validate_timing(const TimingParams& p) {
  if (p.link_rate <= 0) throw std::invalid_argument("timing: link_rate must be positive");
  if (p.mtu_bytes <= 0) throw std::invalid_argument("timing: mtu must be positive");
  if (p.header_bytes <= 0 || p.header_bytes > p.mtu_bytes)
    throw std::invalid_argument("timing: header size must be in (0, mtu]");
  if (p.queue_capacity_bytes < p.mtu_bytes)
    throw std::invalid_argument("timing: queue capacity must hold at least one packet");
  if (p.prop_delay_per_hop < 0) throw std::invalid_argument("timing: negative propagation");
  if (p.worst_case_hops < 1) throw std::invalid_argument("timing: hops must be >= 1");
  if (p.reconfiguration_delay < 0) throw std::invalid_argument("timing: negative r");
  if (p.guard_band < 0) throw std::invalid_argument("timing: negative guard band");
  if (p.epsilon_override < 0) throw std::invalid_argument("timing: negative epsilon override");
}

EpsilonBreakdown compute_epsilon(const TimingParams& p) {
  validate_timing(p);
  EpsilonBreakdown e;
  // The queue capacity bounds everything serialized ahead of the packet
  // plus the packet itself, so the drain term excludes one mtu slot and
  // the serialization term puts it back.
  e.queue_drain_s = static_cast<double>(p.queue_capacity_bytes - p.mtu_bytes) * 8.0 /
                    p.link_rate;
  e.serialization_s = static_cast<double>(p.mtu_bytes) * 8.0 / p.link_rate;
  e.propagation_s = p.prop_delay_per_hop;
  e.per_hop_s = e.queue_drain_s + e.serialization_s + e.propagation_s;
  e.total_s = p.worst_case_hops * e.per_hop_s;
  return e;
}

}  // namespace opera
