#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "opera/matching.hpp"

namespace opera {

enum class BaselineKind { FoldedClos, StaticExpander };

// Static comparison network sized to cost parity with the rotor design at
// the same ToR radix: equal switch silicon, alpha-matched port budget,
// host count matched as closely as integral rack sizes allow.
struct BaselineTopology {
  BaselineKind kind = BaselineKind::FoldedClos;
  int tor_radix = 0;
  double alpha = 0;
  int num_racks = 0;
  int hosts_per_rack = 0;   // d
  int uplinks_per_rack = 0;  // u
  uint64_t seed = 0;

  // Expander only: inter-rack edges, u random rack-level matchings
  // unioned (parallel edges allowed, each is its own physical link).
  std::vector<std::pair<int, int>> edges;
  // Same links grouped by matching; matchings[m] wires uplink m of every
  // rack. The simulator runs these as one eternal slice.
  std::vector<Matching> matchings;

  // Clos only: implied oversubscription factor.
  double oversub = 0;

  int num_hosts() const { return num_racks * hosts_per_rack; }
  int rack_of_host(int host) const { return host / hosts_per_rack; }
};

// host_target = 0 sizes the network against the rotor build of the same
// radix (the 3-tier Clos equivalence point); nonzero requests a smaller
// test instance with the same per-rack shape.
BaselineTopology build_baseline(BaselineKind kind, int tor_radix, double alpha,
                                uint64_t seed, long host_target = 0);

std::string baseline_kind_name(BaselineKind kind);

}  // namespace opera
