#include "opera/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "opera/costmodel.hpp"
#include "opera/graph.hpp"
#include "opera/rng.hpp"

namespace opera {

namespace {

// u disjoint-per-round random perfect matchings over racks; the union may
// contain parallel edges, which simply become parallel physical links.
// Regenerates until connected (u >= 2 fails rarely).
std::vector<Matching> random_regular_matchings(int racks, int uplinks, uint64_t seed) {
  if (racks % 2 != 0)
    throw std::invalid_argument("expander baseline needs an even rack count");
  for (int attempt = 0; attempt < 64; ++attempt) {
    Rng rng(mix_seed(seed, 0xE8, static_cast<uint64_t>(attempt)));
    std::vector<Matching> matchings(uplinks);
    Graph g(racks);
    for (int m = 0; m < uplinks; ++m) {
      auto perm = rng.permutation(racks);
      for (int i = 0; i < racks; i += 2) {
        matchings[m].pairs.emplace_back(perm[i], perm[i + 1]);
        g.add_edge(perm[i], perm[i + 1]);
      }
      matchings[m].normalize();
    }
    if (g.connected()) return matchings;
  }
  throw std::runtime_error("expander baseline: could not produce a connected union");
}

}  // namespace

BaselineTopology build_baseline(BaselineKind kind, int tor_radix, double alpha,
                                uint64_t seed, long host_target) {
  if (tor_radix < 4 || tor_radix % 2 != 0)
    throw std::invalid_argument("build_baseline: tor_radix must be even and >= 4");

  BaselineTopology b;
  b.kind = kind;
  b.tor_radix = tor_radix;
  b.alpha = alpha;
  b.seed = seed;

  if (kind == BaselineKind::FoldedClos) {
    auto sizing = hosts_for_alpha(tor_radix, alpha);  // validates alpha
    double F = sizing.oversub;
    // Per-ToR split: d hosts down, u up, d:u = F:1.
    double d_exact = tor_radix * F / (F + 1.0);
    int d = static_cast<int>(std::lround(d_exact));
    if (std::abs(d_exact - d) > 1e-9)
      throw std::invalid_argument(
          "build_baseline: alpha does not split the ToR radix integrally; nearest d = " +
          std::to_string(d));
    b.hosts_per_rack = d;
    b.uplinks_per_rack = tor_radix - d;
    b.oversub = F;
    long hosts = host_target > 0 ? host_target : sizing.hosts;
    long racks = (hosts + d - 1) / d;
    b.num_racks = static_cast<int>(racks);
    return b;
  }

  // Static expander: pick the uplink count that matches alpha, give the
  // rest of the radix to hosts, then match the rotor host count.
  int u = static_cast<int>(std::lround(alpha * tor_radix / (1.0 + alpha)));
  if (u <= 0)
    throw std::invalid_argument("build_baseline: alpha leaves no uplinks (u = 0)");
  if (u >= tor_radix)
    throw std::invalid_argument("build_baseline: alpha leaves no host ports");
  int d = tor_radix - u;
  b.uplinks_per_rack = u;
  b.hosts_per_rack = d;

  long hosts = host_target;
  if (hosts <= 0) {
    // same-radix rotor build: d_rotor = k/2 hosts per rack, Clos-equivalent
    // host count at the alpha = 4/3 normalization point
    hosts = hosts_for_alpha(tor_radix, 4.0 / 3.0).hosts;
  }
  long racks = (hosts + d - 1) / d;
  if (racks % 2 != 0) ++racks;  // matchings need an even rack count
  b.num_racks = static_cast<int>(racks);
  b.matchings = random_regular_matchings(b.num_racks, u, seed);
  for (const auto& m : b.matchings)
    for (const auto& e : m.pairs) b.edges.push_back(e);
  std::sort(b.edges.begin(), b.edges.end());
  return b;
}

std::string baseline_kind_name(BaselineKind kind) {
  return kind == BaselineKind::FoldedClos ? "folded_clos" : "static_expander";
}

}  // namespace opera
