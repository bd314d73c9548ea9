#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opera/matching.hpp"

namespace opera {

struct CircuitSwitch {
  int id = 0;
  int group = 0;                    // reconfiguration-group index
  std::vector<Matching> matchings;  // cyclic presentation order
};

// Rotor-switched network: num_racks ToRs, each with uplinks_per_rack ports
// up (one per circuit switch) and hosts_per_rack ports down. The matchings
// across all switches decompose the all-ones rack adjacency matrix: every
// unordered rack pair appears in exactly one matching on one switch, and
// every rack is a fixed point of exactly one matching.
struct OperaTopology {
  int tor_radix = 0;  // k; uplinks + host ports
  int num_racks = 0;
  int hosts_per_rack = 0;   // d = k/2
  int uplinks_per_rack = 0;  // u = k/2, also the switch count
  uint64_t seed = 0;
  std::vector<CircuitSwitch> switches;

  int num_hosts() const { return num_racks * hosts_per_rack; }
  int num_switches() const { return static_cast<int>(switches.size()); }
  int matchings_per_switch() const {
    return switches.empty() ? 0 : static_cast<int>(switches[0].matchings.size());
  }
  int rack_of_host(int host) const { return host / hosts_per_rack; }
  int first_host(int rack) const { return rack * hosts_per_rack; }
};

// Decomposes the n x n all-ones matrix into n symmetric permutations:
// a 1-factorization of the complete graph plus one matching's worth of
// fixed points. Seeded: relabeling, mixing walk and output order all come
// from `seed`. Requires n even (n >= 2).
std::vector<Matching> factorize_complete_graph(int n, uint64_t seed);

// Expands a factorization on n racks to one on n*factor racks. Base rack a
// becomes the block a*factor .. a*factor+factor-1; each base edge (a,b)
// expands to `factor` bijections between the two blocks and each base fixed
// point to a factorization of the block's own all-ones matrix. Output:
// n*factor matchings on n*factor racks.
std::vector<Matching> lift_factorization(const std::vector<Matching>& base,
                                         int factor, uint64_t seed);

// Full rotor topology for ToR radix k (even): u = k/2 switches, each
// holding num_racks/u matchings in a seeded random cyclic order.
// Requires num_racks even and divisible by u.
OperaTopology build_opera(int tor_radix, int num_racks, uint64_t seed);

struct ValidationCheck {
  std::string name;
  bool pass = true;
  std::vector<std::string> offenders;  // capped, for reporting
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  std::string summary() const;
};

// Checks: parameter consistency, per-matching involution, exact pair
// coverage, exact fixed-point coverage, per-switch matching counts.
ValidationReport validate_topology(const OperaTopology& topo);

// Lossless JSON round trip.
std::string topology_to_json(const OperaTopology& topo);
OperaTopology topology_from_json(const std::string& text);
void save_topology(const OperaTopology& topo, const std::string& path);
OperaTopology load_topology(const std::string& path);

}  // namespace opera
