#pragma once

#include <string>
#include <vector>

namespace opera {

// Cost-equivalence arithmetic used to size comparison networks. All of it
// assumes every network is built from the same packet-switch silicon and
// differs only in how many switch ports each host effectively consumes:
//   folded Clos, T tiers, F:1 oversubscription: alpha = 2(T-1)/F
//   static expander, u of k ToR ports facing the network: alpha = u/(k-u)
// and a rotor network with u = d = k/2 lands at alpha = 1 plus the circuit
// switch adder.

double alpha_clos(int tiers, double oversub);
double alpha_expander(int uplinks, int tor_radix);

struct HostsForAlpha {
  double oversub = 0;     // F implied by alpha at 3 tiers
  double hosts_exact = 0; // (4F/(F+1)) * (k/2)^3
  long hosts = 0;         // rounded to nearest integer
};

// Host count of the 3-tier folded Clos with ToR radix k whose per-host
// switch-port cost equals `alpha`.
HostsForAlpha hosts_for_alpha(int tor_radix, double alpha);

struct PartCost {
  std::string component;
  double static_dollars = 0;  // per-port cost in a static network
  double opera_dollars = 0;   // per-port cost including rotor adders
};

// Per-port cost ratio from a bill-of-materials table.
double alpha_from_parts(const std::vector<PartCost>& parts);

std::vector<PartCost> load_parts_csv(const std::string& path);
void save_parts_csv(const std::vector<PartCost>& parts, const std::string& path);

// Reference bill of materials: NIC, ToR port, fiber, plus rotor adders
// (circuit switch port share, amortized internals) on the rotor side.
std::vector<PartCost> default_parts();

}  // namespace opera
