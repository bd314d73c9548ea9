#pragma once

#include <string>
#include <vector>

#include "opera/graph.hpp"
#include "opera/timing.hpp"
#include "opera/topology.hpp"

namespace opera {

// One slice of the rotation: which switches are mid-reconfiguration and
// what every other switch presents. A reconfiguring switch carries no
// routed traffic for its whole slice; physically it still serves its old
// matching for the leading epsilon and flips during the trailing r, which
// is what lets packets admitted late in the previous slice drain safely.
struct TopologySlice {
  int index = 0;
  double start_s = 0;
  double end_s = 0;
  std::vector<int> reconfiguring;          // switch ids, size == group size
  std::vector<int> active_matching;        // per switch, -1 while dark
  // peer[s][r]: rack r's circuit peer through switch s (r itself on a
  // fixed point), -1 while s is dark.
  std::vector<std::vector<int>> peer;

  // Inter-rack union of the active matchings: (neighbor, switch id).
  std::vector<std::vector<std::pair<int, int>>> adj;

  Graph union_graph() const;
};

struct SliceSchedule {
  OperaTopology topology;
  TimingParams timing;
  int group_size = 1;
  double epsilon = 0;         // effective (override or computed)
  double slice_duration = 0;  // epsilon + r
  int num_slices = 0;         // per full cycle: N / group_size
  double cycle_time = 0;
  double per_switch_period = 0;  // time between a switch's reconfigurations
  double duty_cycle = 0;         // 1 - r / per_switch_period
  std::vector<TopologySlice> slices;

  const TopologySlice& slice_at_time(double t) const;
  int slice_index_at(double t) const;
};

// allow_empty_slices permits group_size == switch count (every slice dark),
// which is only useful for tests.
SliceSchedule build_schedule(const OperaTopology& topo, const TimingParams& timing,
                             int group_size = 1, bool allow_empty_slices = false);

struct GuardBandLoss {
  double ll_fraction = 0;    // guard time lost per slice
  double bulk_fraction = 0;  // guard time lost per matching window
};

GuardBandLoss guard_band_loss(const SliceSchedule& sched, double guard_s);

// Cost-equivalent rack count for a ToR radix (the 3:1 Clos normalization
// point): 3 * (k/2)^2 racks of k/2 hosts each.
long racks_for_radix(int tor_radix);

// Full-cycle time at scale: (racks / simultaneous reconfigurations) slices.
// group_size may be fractional here to express "one switch per group of g"
// arrangements whose group count does not divide the switch count.
double cycle_time_scaling(int tor_radix, double group_size, const TimingParams& timing);

void export_schedule_csv(const SliceSchedule& sched, const std::string& path);

}  // namespace opera
