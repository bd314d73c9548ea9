#include "opera/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "opera/csv.hpp"

namespace opera {

Graph TopologySlice::union_graph() const {
  Graph g(static_cast<int>(adj.size()));
  for (int r = 0; r < static_cast<int>(adj.size()); ++r) {
    for (const auto& [peer_rack, sw] : adj[r]) {
      (void)sw;
      if (peer_rack > r) g.add_edge(r, peer_rack);
    }
  }
  return g;
}

int SliceSchedule::slice_index_at(double t) const {
  if (slice_duration <= 0 || num_slices == 0) return 0;
  long idx = static_cast<long>(std::floor(t / slice_duration));
  long m = idx % num_slices;
  if (m < 0) m += num_slices;
  return static_cast<int>(m);
}

const TopologySlice& SliceSchedule::slice_at_time(double t) const {
  return slices[slice_index_at(t)];
}

SliceSchedule build_schedule(const OperaTopology& topo, const TimingParams& timing,
                             int group_size, bool allow_empty_slices) {
  validate_timing(timing);
  int u = topo.num_switches();
  if (u < 1) throw std::invalid_argument("build_schedule: topology has no switches");
  if (group_size < 1) throw std::invalid_argument("build_schedule: group_size must be >= 1");
  if (u % group_size != 0)
    throw std::invalid_argument("build_schedule: group_size must divide the switch count");
  int groups = u / group_size;
  if (groups < 2 && !allow_empty_slices)
    throw std::invalid_argument(
        "build_schedule: all switches would reconfigure at once; pass "
        "allow_empty_slices to permit dark slices");

  SliceSchedule sched;
  sched.topology = topo;
  sched.timing = timing;
  sched.group_size = group_size;
  auto eps = compute_epsilon(timing);
  sched.epsilon = timing.epsilon_override > 0 ? timing.epsilon_override : eps.total_s;
  sched.slice_duration = sched.epsilon + timing.reconfiguration_delay;
  if (timing.guard_band >= sched.slice_duration)
    throw std::invalid_argument("build_schedule: guard band swallows the slice");

  int n = topo.num_racks;
  int per_switch = topo.matchings_per_switch();
  if (per_switch < 1) throw std::invalid_argument("build_schedule: switches hold no matchings");
  sched.num_slices = n / group_size;
  sched.cycle_time = sched.num_slices * sched.slice_duration;
  sched.per_switch_period = groups * sched.slice_duration;
  sched.duty_cycle = 1.0 - timing.reconfiguration_delay / sched.per_switch_period;

  sched.slices.resize(sched.num_slices);
  for (int i = 0; i < sched.num_slices; ++i) {
    auto& slice = sched.slices[i];
    slice.index = i;
    slice.start_s = i * sched.slice_duration;
    slice.end_s = slice.start_s + sched.slice_duration;
    slice.active_matching.assign(u, -1);
    slice.peer.assign(u, std::vector<int>(n, -1));
    slice.adj.assign(n, {});

    int dark_group = i % groups;
    for (int s = 0; s < u; ++s) {
      int g = s / group_size;
      if (g == dark_group) {
        slice.reconfiguring.push_back(s);
        continue;
      }
      // Completed reconfigurations strictly before slice i determine the
      // presented matching; switch s reconfigures in slices == g (mod groups).
      long rel = i - g - 1;
      long wrapped = ((rel % sched.num_slices) + sched.num_slices) % sched.num_slices;
      int midx = static_cast<int>((wrapped / groups + 1) % per_switch);
      slice.active_matching[s] = midx;

      const Matching& m = topo.switches[s].matchings[midx];
      auto& peer = slice.peer[s];
      for (const auto& p : m.pairs) {
        peer[p.first] = p.second;
        peer[p.second] = p.first;
        slice.adj[p.first].emplace_back(p.second, s);
        slice.adj[p.second].emplace_back(p.first, s);
      }
      for (int f : m.fixed_points) peer[f] = f;
    }
    for (auto& a : slice.adj) std::sort(a.begin(), a.end());
  }
  return sched;
}

GuardBandLoss guard_band_loss(const SliceSchedule& sched, double guard_s) {
  if (guard_s < 0) throw std::invalid_argument("guard_band_loss: negative guard");
  if (guard_s >= sched.slice_duration)
    throw std::invalid_argument("guard_band_loss: guard exceeds the slice");
  GuardBandLoss loss;
  loss.ll_fraction = guard_s / sched.slice_duration;
  double window = sched.per_switch_period - sched.timing.reconfiguration_delay;
  loss.bulk_fraction = guard_s / window;
  return loss;
}

long racks_for_radix(int tor_radix) {
  if (tor_radix < 2 || tor_radix % 2 != 0)
    throw std::invalid_argument("racks_for_radix: tor_radix must be even and >= 2");
  long half = tor_radix / 2;
  return 3 * half * half;
}

double cycle_time_scaling(int tor_radix, double group_size, const TimingParams& timing) {
  if (group_size <= 0) throw std::invalid_argument("cycle_time_scaling: group_size <= 0");
  auto eps = compute_epsilon(timing);
  double epsilon = timing.epsilon_override > 0 ? timing.epsilon_override : eps.total_s;
  double slice = epsilon + timing.reconfiguration_delay;
  return racks_for_radix(tor_radix) / group_size * slice;
}

void export_schedule_csv(const SliceSchedule& sched, const std::string& path) {
  CsvWriter w(path);
  w.row({"slice_index", "switch_id", "matching_index", "reconfiguring", "start_time_s",
         "end_time_s"});
  for (const auto& slice : sched.slices) {
    for (int s = 0; s < sched.topology.num_switches(); ++s) {
      bool dark = slice.active_matching[s] < 0;
      w.row({std::to_string(slice.index), std::to_string(s),
             std::to_string(slice.active_matching[s]), dark ? "1" : "0",
             fmt_double(slice.start_s), fmt_double(slice.end_s)});
    }
  }
}

}  // namespace opera
