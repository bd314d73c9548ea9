#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opera/schedule.hpp"

namespace opera {

struct SliceMetricsRow {
  int slice = 0;
  bool connected = false;
  int diameter = -1;
  double avg_path_length = 0;
  std::vector<long> hop_histogram;
  double avg_degree = 0;
  double spectral_gap = 0;  // avg_degree - |lambda_2| of the slice union
};

std::vector<SliceMetricsRow> slice_metrics(const SliceSchedule& sched,
                                           bool with_spectral = true);
void export_slice_metrics_csv(const std::vector<SliceMetricsRow>& rows,
                              const std::string& path);

// Where each ordered rack pair gets its once-per-cycle direct circuit.
struct DirectWindow {
  int first_slice = -1;  // first slice of the presentation window
  int switch_id = -1;
  int matching_index = -1;
};

struct DirectCoverage {
  int num_racks = 0;
  std::vector<DirectWindow> windows;  // src * num_racks + dst, src != dst
  const DirectWindow& at(int src, int dst) const {
    return windows[static_cast<size_t>(src) * num_racks + dst];
  }
  // true when every ordered pair maps to exactly one window and the map
  // agrees with the matching decomposition
  bool total = false;
};

DirectCoverage direct_coverage(const SliceSchedule& sched);

struct FailureSet {
  std::vector<std::pair<int, int>> links;  // (rack, switch) uplink
  std::vector<int> switches;
  std::vector<int> tors;
  bool empty() const { return links.empty() && switches.empty() && tors.empty(); }
};

struct FaultImpact {
  long surviving_racks = 0;
  long worst_slice_disconnected_pairs = 0;  // ordered, max over slices
  long integrated_disconnected_pairs = 0;   // ordered, disconnected in >= 1 slice
  double worst_loss_fraction = 0;
  double integrated_loss_fraction = 0;
  double avg_path_length = 0;  // over connected pairs, all slices
  int max_path_length = 0;
};

FaultImpact inject_and_measure(const SliceSchedule& sched, const FailureSet& failures);

enum class FailureKind { Link, Switch, Tor };

struct SweepPoint {
  double fraction = 0;
  int failed_count = 0;
  double mean_loss = 0;  // integrated loss fraction averaged over seeds
  double max_loss = 0;
};

// Monte-Carlo sweep; failure sets are nested per seed (prefixes of one
// seeded shuffle) so per-seed loss is monotone in the fraction.
std::vector<SweepPoint> failure_sweep(const SliceSchedule& sched, FailureKind kind,
                                      const std::vector<double>& fractions,
                                      const std::vector<uint64_t>& seeds);

// Largest swept fraction whose mean loss is exactly zero.
double zero_loss_threshold(const std::vector<SweepPoint>& sweep);

void export_sweep_csv(const std::vector<SweepPoint>& sweep, const std::string& path);

// Forwarding state per ToR: one low-latency entry per (slice, other rack)
// plus the per-slice direct entries, N(N-1) + N(u-1).
long ruleset_size(long num_racks, long uplinks);

// Per-row uplink count that makes ruleset_size reproduce a published entry
// count, when one exists.
std::optional<long> infer_uplinks(long num_racks, long entries);

// Mean expansion gap of unions of `active` independent random perfect
// matchings on `racks` vertices: the degree-matched figure a slice union
// is expected to track.
double expander_baseline_gap(int active, int racks, int trials, uint64_t seed);

}  // namespace opera
