#include "opera/routing.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "opera/csv.hpp"
#include "opera/rng.hpp"

namespace opera {

FlowClass classify(int64_t flow_size_bytes, int64_t threshold_bytes) {
  if (flow_size_bytes < 0) throw std::invalid_argument("classify: negative flow size");
  if (threshold_bytes <= 0) throw std::invalid_argument("classify: threshold must be > 0");
  return flow_size_bytes >= threshold_bytes ? FlowClass::Bulk : FlowClass::LowLatency;
}

namespace {

using Adj = std::vector<std::vector<std::pair<int, int>>>;  // [rack] -> (peer, switch)

Adj filtered_adj(const TopologySlice& slice, const EdgeFilter& alive) {
  if (!alive) return slice.adj;
  Adj adj(slice.adj.size());
  for (size_t r = 0; r < slice.adj.size(); ++r) {
    for (const auto& [peer, sw] : slice.adj[r]) {
      if (alive(static_cast<int>(r), peer, sw)) adj[r].emplace_back(peer, sw);
    }
  }
  return adj;
}

std::vector<int> bfs_racks(const Adj& adj, int src) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> q{src};
  dist[src] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (const auto& [peer, sw] : adj[v]) {
      (void)sw;
      if (dist[peer] < 0) {
        dist[peer] = dist[v] + 1;
        q.push_back(peer);
      }
    }
  }
  return dist;
}

SliceTables tables_from_adj(const Adj& adj, int slice_index, int src) {
  const int n = static_cast<int>(adj.size());
  if (src < 0 || src >= n) throw std::invalid_argument("build_slice_tables: bad src rack");

  SliceTables t;
  t.slice_index = slice_index;
  t.src_rack = src;

  auto dist_src = bfs_racks(adj, src);
  // One BFS per distinct neighbor rack; parallel circuits share it.
  std::map<int, std::vector<int>> dist_from;
  for (const auto& [peer, sw] : adj[src]) {
    (void)sw;
    if (!dist_from.count(peer)) dist_from[peer] = bfs_racks(adj, peer);
  }

  for (int dst = 0; dst < n; ++dst) {
    if (dst == src || dist_src[dst] < 0) continue;
    std::vector<LlEntry> eq;
    for (const auto& [peer, sw] : adj[src]) {
      if (dist_from[peer][dst] >= 0 && dist_from[peer][dst] + 1 == dist_src[dst])
        eq.push_back({peer, sw});
    }
    std::sort(eq.begin(), eq.end(), [](const LlEntry& a, const LlEntry& b) {
      return std::tie(a.next_hop, a.switch_id) < std::tie(b.next_hop, b.switch_id);
    });
    t.low_latency[dst] = std::move(eq);
  }

  for (const auto& [peer, sw] : adj[src]) {
    // at most one direct circuit per (src,dst) per slice by construction
    t.bulk_direct[peer] = sw;
  }
  t.bulk_direct.erase(src);
  return t;
}

}  // namespace

SliceTables build_slice_tables(const TopologySlice& slice, int src_rack) {
  return tables_from_adj(slice.adj, slice.index, src_rack);
}

SliceTables build_slice_tables(const TopologySlice& slice, int src_rack,
                               const EdgeFilter& alive) {
  return tables_from_adj(filtered_adj(slice, alive), slice.index, src_rack);
}

const SliceTables& CycleTables::at(int slice, int src) const {
  if (slice < 0 || slice >= num_slices || src < 0 || src >= num_racks)
    throw std::out_of_range("CycleTables::at");
  return per_slice[slice][src];
}

CycleTables build_cycle_tables(const SliceSchedule& sched) {
  return build_cycle_tables(sched, EdgeFilter{});
}

CycleTables build_cycle_tables(const SliceSchedule& sched, const EdgeFilter& alive) {
  CycleTables ct;
  ct.num_racks = sched.topology.num_racks;
  ct.num_slices = sched.num_slices;
  ct.per_slice.resize(sched.slices.size());
  for (size_t i = 0; i < sched.slices.size(); ++i) {
    Adj adj = filtered_adj(sched.slices[i], alive);
    ct.per_slice[i].reserve(ct.num_racks);
    for (int src = 0; src < ct.num_racks; ++src)
      ct.per_slice[i].push_back(tables_from_adj(adj, sched.slices[i].index, src));
  }
  return ct;
}

std::optional<int> vlb_intermediate(int src, int dst, const std::vector<int>& candidates,
                                    Rng& rng) {
  if (src == dst) throw std::invalid_argument("vlb_intermediate: src == dst");
  std::vector<int> mids;
  mids.reserve(candidates.size());
  for (int m : candidates)
    if (m != src && m != dst) mids.push_back(m);
  if (mids.empty()) return std::nullopt;
  return mids[rng.below(mids.size())];
}

void export_tables_csv(const CycleTables& tables, const std::string& path) {
  CsvWriter w(path);
  w.row({"slice", "src", "dst", "kind", "next_hop_or_switch"});
  for (const auto& slice_row : tables.per_slice) {
    for (const auto& t : slice_row) {
      for (const auto& [dst, eq] : t.low_latency) {
        int last = -1;
        for (const auto& e : eq) {
          if (e.next_hop == last) continue;  // parallel circuits, one rule
          last = e.next_hop;
          w.row({std::to_string(t.slice_index), std::to_string(t.src_rack),
                 std::to_string(dst), "LL", std::to_string(e.next_hop)});
        }
      }
      for (const auto& [dst, sw] : t.bulk_direct) {
        w.row({std::to_string(t.slice_index), std::to_string(t.src_rack),
               std::to_string(dst), "BULK", std::to_string(sw)});
      }
    }
  }
}

}  // namespace opera
