#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opera/schedule.hpp"

namespace opera {

class Rng;

enum class FlowClass { LowLatency, Bulk };

inline constexpr int64_t kDefaultBulkThreshold = 15'000'000;  // bytes

// bulk iff flow_size >= threshold. Application tags can override later.
FlowClass classify(int64_t flow_size_bytes, int64_t threshold_bytes = kDefaultBulkThreshold);

struct LlEntry {
  int next_hop;    // rack
  int switch_id;   // uplink carrying the (src, next_hop) circuit
  bool operator==(const LlEntry&) const = default;
};

struct SliceTables {
  int slice_index = -1;
  int src_rack = -1;
  // dst rack -> equal-cost shortest-path next hops, (next_hop, switch_id) ascending.
  // Unreachable dsts are absent.
  std::map<int, std::vector<LlEntry>> low_latency;
  // dst rack -> switch id, present only when a direct circuit exists this slice.
  std::map<int, int> bulk_direct;
};

// Returns true when the rack-to-rack circuit via switch_id is usable.
using EdgeFilter = std::function<bool(int rack_a, int rack_b, int switch_id)>;

SliceTables build_slice_tables(const TopologySlice& slice, int src_rack);
SliceTables build_slice_tables(const TopologySlice& slice, int src_rack,
                               const EdgeFilter& alive);

struct CycleTables {
  int num_racks = 0;
  int num_slices = 0;
  std::vector<std::vector<SliceTables>> per_slice;  // [slice][src]
  const SliceTables& at(int slice, int src) const;
};

CycleTables build_cycle_tables(const SliceSchedule& sched);
CycleTables build_cycle_tables(const SliceSchedule& sched, const EdgeFilter& alive);

// Relay pick for two-hop offload. candidates = racks with spare direct
// capacity from src this slice whose own direct window to dst is still to
// come (in a full rotation every rack qualifies on the second condition).
// Empty set after filtering src/dst means wait for a direct circuit.
std::optional<int> vlb_intermediate(int src, int dst, const std::vector<int>& candidates,
                                    Rng& rng);

// CSV rows: slice,src,dst,kind,next_hop_or_switch. LL rows list each distinct
// next hop; BULK rows carry the uplink switch id.
void export_tables_csv(const CycleTables& tables, const std::string& path);

}  // namespace opera
