#include "opera/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "opera/csv.hpp"
#include "opera/rng.hpp"

namespace opera {

std::vector<SliceMetricsRow> slice_metrics(const SliceSchedule& sched,
                                           bool with_spectral) {
  std::vector<SliceMetricsRow> rows;
  rows.reserve(sched.slices.size());
  for (const auto& slice : sched.slices) {
    SliceMetricsRow row;
    row.slice = slice.index;
    Graph g = slice.union_graph();
    auto st = all_pairs_path_stats(g);
    row.connected = st.connected;
    row.diameter = st.diameter;
    row.avg_path_length = st.avg_path_length;
    row.hop_histogram = st.hop_histogram;
    if (with_spectral) {
      auto sp = spectral_info(g);
      row.avg_degree = sp.avg_degree;
      row.spectral_gap = sp.gap();
    } else {
      row.avg_degree = g.size() > 0 ? 2.0 * g.num_edges() / g.size() : 0;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void export_slice_metrics_csv(const std::vector<SliceMetricsRow>& rows,
                              const std::string& path) {
  CsvWriter w(path);
  w.row({"slice", "connected", "diameter", "avg_path_length", "avg_degree",
         "spectral_gap"});
  for (const auto& r : rows) {
    w.row({std::to_string(r.slice), r.connected ? "1" : "0", std::to_string(r.diameter),
           fmt_double(r.avg_path_length), fmt_double(r.avg_degree),
           fmt_double(r.spectral_gap)});
  }
}

DirectCoverage direct_coverage(const SliceSchedule& sched) {
  const auto& topo = sched.topology;
  int n = topo.num_racks;
  int groups = topo.num_switches() / sched.group_size;
  int per_switch = topo.matchings_per_switch();

  DirectCoverage cov;
  cov.num_racks = n;
  cov.windows.assign(static_cast<size_t>(n) * n, DirectWindow{});
  std::vector<int> hits(static_cast<size_t>(n) * n, 0);

  for (const auto& sw : topo.switches) {
    int g = sw.id / sched.group_size;
    for (int midx = 0; midx < per_switch; ++midx) {
      // Presentation window of (switch, matching): starts right after the
      // reconfiguration that installs it.
      int start =
          static_cast<int>((g + 1 + static_cast<long>((midx - 1 + per_switch) % per_switch) *
                                        groups) %
                           sched.num_slices);
      for (const auto& p : sw.matchings[midx].pairs) {
        DirectWindow w{start, sw.id, midx};
        cov.windows[static_cast<size_t>(p.first) * n + p.second] = w;
        cov.windows[static_cast<size_t>(p.second) * n + p.first] = w;
        hits[static_cast<size_t>(p.first) * n + p.second]++;
        hits[static_cast<size_t>(p.second) * n + p.first]++;
      }
    }
  }
  cov.total = true;
  for (int s = 0; s < n && cov.total; ++s) {
    for (int d = 0; d < n; ++d) {
      if (s == d) continue;
      if (hits[static_cast<size_t>(s) * n + d] != 1) {
        cov.total = false;
        break;
      }
    }
  }
  return cov;
}

namespace {

struct FailureIndex {
  std::vector<char> switch_failed;
  std::vector<char> tor_failed;
  std::vector<std::vector<char>> link_failed;  // [rack][switch]

  FailureIndex(const SliceSchedule& sched, const FailureSet& f) {
    int n = sched.topology.num_racks;
    int u = sched.topology.num_switches();
    switch_failed.assign(u, 0);
    tor_failed.assign(n, 0);
    link_failed.assign(n, std::vector<char>(u, 0));
    for (int s : f.switches) {
      if (s < 0 || s >= u) throw std::invalid_argument("failure: bad switch id");
      switch_failed[s] = 1;
    }
    for (int t : f.tors) {
      if (t < 0 || t >= n) throw std::invalid_argument("failure: bad rack id");
      tor_failed[t] = 1;
    }
    for (auto [r, s] : f.links) {
      if (r < 0 || r >= n || s < 0 || s >= u)
        throw std::invalid_argument("failure: bad uplink");
      link_failed[r][s] = 1;
    }
  }

  bool edge_alive(int a, int b, int sw) const {
    if (switch_failed[sw]) return false;
    if (tor_failed[a] || tor_failed[b]) return false;
    if (link_failed[a][sw] || link_failed[b][sw]) return false;
    return true;
  }
};

}  // namespace

FaultImpact inject_and_measure(const SliceSchedule& sched, const FailureSet& failures) {
  FailureIndex idx(sched, failures);
  const int n = sched.topology.num_racks;

  std::vector<int> survivors;
  for (int r = 0; r < n; ++r)
    if (!idx.tor_failed[r]) survivors.push_back(r);

  FaultImpact impact;
  impact.surviving_racks = static_cast<long>(survivors.size());
  long ordered_pairs =
      impact.surviving_racks * std::max<long>(0, impact.surviving_racks - 1);
  if (ordered_pairs == 0) return impact;

  std::vector<char> ever_disconnected(static_cast<size_t>(n) * n, 0);
  double path_total = 0;
  long path_count = 0;

  Graph g;
  for (const auto& slice : sched.slices) {
    g = Graph(n);
    for (int r = 0; r < n; ++r) {
      for (const auto& [peer, sw] : slice.adj[r]) {
        if (peer > r && idx.edge_alive(r, peer, sw)) g.add_edge(r, peer);
      }
    }
    long slice_disconnected = 0;
    for (int s : survivors) {
      auto dist = g.bfs_dist(s);
      for (int t : survivors) {
        if (t == s) continue;
        if (dist[t] < 0) {
          ++slice_disconnected;
          ever_disconnected[static_cast<size_t>(s) * n + t] = 1;
        } else {
          path_total += dist[t];
          ++path_count;
          impact.max_path_length = std::max(impact.max_path_length, dist[t]);
        }
      }
    }
    impact.worst_slice_disconnected_pairs =
        std::max(impact.worst_slice_disconnected_pairs, slice_disconnected);
  }
  for (char c : ever_disconnected) impact.integrated_disconnected_pairs += c;
  impact.worst_loss_fraction =
      static_cast<double>(impact.worst_slice_disconnected_pairs) / ordered_pairs;
  impact.integrated_loss_fraction =
      static_cast<double>(impact.integrated_disconnected_pairs) / ordered_pairs;
  impact.avg_path_length = path_count > 0 ? path_total / path_count : 0;
  return impact;
}

std::vector<SweepPoint> failure_sweep(const SliceSchedule& sched, FailureKind kind,
                                      const std::vector<double>& fractions,
                                      const std::vector<uint64_t>& seeds) {
  const int n = sched.topology.num_racks;
  const int u = sched.topology.num_switches();
  if (seeds.empty()) throw std::invalid_argument("failure_sweep: need seeds");

  long population = 0;
  switch (kind) {
    case FailureKind::Link: population = static_cast<long>(n) * u; break;
    case FailureKind::Switch: population = u; break;
    case FailureKind::Tor: population = n; break;
  }

  std::vector<SweepPoint> sweep;
  for (double f : fractions) {
    if (f < 0 || f > 1) throw std::invalid_argument("failure_sweep: fraction out of range");
    SweepPoint pt;
    pt.fraction = f;
    pt.failed_count = static_cast<int>(std::llround(f * population));
    sweep.push_back(pt);
  }

  for (uint64_t seed : seeds) {
    // One shuffle per seed; each fraction takes a prefix, so larger
    // fractions strictly contain smaller ones.
    Rng rng(mix_seed(seed, 0x5EE9));
    std::vector<int> order(population);
    for (long i = 0; i < population; ++i) order[i] = static_cast<int>(i);
    rng.shuffle(order);

    for (auto& pt : sweep) {
      FailureSet fs;
      for (int i = 0; i < pt.failed_count; ++i) {
        int x = order[i];
        switch (kind) {
          case FailureKind::Link: fs.links.emplace_back(x / u, x % u); break;
          case FailureKind::Switch: fs.switches.push_back(x); break;
          case FailureKind::Tor: fs.tors.push_back(x); break;
        }
      }
      auto impact = inject_and_measure(sched, fs);
      pt.mean_loss += impact.integrated_loss_fraction / seeds.size();
      pt.max_loss = std::max(pt.max_loss, impact.integrated_loss_fraction);
    }
  }
  return sweep;
}

double zero_loss_threshold(const std::vector<SweepPoint>& sweep) {
  double best = 0;
  for (const auto& pt : sweep) {
    if (pt.mean_loss == 0.0) best = std::max(best, pt.fraction);
  }
  return best;
}

void export_sweep_csv(const std::vector<SweepPoint>& sweep, const std::string& path) {
  CsvWriter w(path);
  w.row({"fraction", "failed_count", "mean_loss_fraction", "max_loss_fraction"});
  for (const auto& pt : sweep) {
    w.row({fmt_double(pt.fraction), std::to_string(pt.failed_count),
           fmt_double(pt.mean_loss), fmt_double(pt.max_loss)});
  }
}

long ruleset_size(long num_racks, long uplinks) {
  if (num_racks < 1 || uplinks < 1)
    throw std::invalid_argument("ruleset_size: need positive sizes");
  return num_racks * (num_racks - 1) + num_racks * (uplinks - 1);
}

std::optional<long> infer_uplinks(long num_racks, long entries) {
  if (num_racks < 1) return std::nullopt;
  long rem = entries - num_racks * (num_racks - 1);
  if (rem < 0 || rem % num_racks != 0) return std::nullopt;
  long u = rem / num_racks + 1;
  if (u < 1) return std::nullopt;
  return u;
}

double expander_baseline_gap(int active, int racks, int trials, uint64_t seed) {
  if (racks < 2 || racks % 2 != 0)
    throw std::invalid_argument("expander_baseline_gap: racks must be even and >= 2");
  if (active < 1) throw std::invalid_argument("expander_baseline_gap: active must be >= 1");
  if (trials < 1) throw std::invalid_argument("expander_baseline_gap: trials must be >= 1");
  Rng rng(mix_seed(seed, 0x6A9));
  double total = 0;
  for (int t = 0; t < trials; ++t) {
    Graph g(racks);
    for (int m = 0; m < active; ++m) {
      auto perm = rng.permutation(racks);
      for (int i = 0; i < racks; i += 2) g.add_edge(perm[i], perm[i + 1]);
    }
    total += spectral_info(g).gap();
  }
  return total / trials;
}

}  // namespace opera
