#include "opera/topology.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "opera/rng.hpp"

namespace opera {
namespace {

// Round-robin ("circle method") decomposition of the all-ones matrix.
// Even n: n-1 perfect matchings plus the identity. Odd n: n matchings,
// each with one fixed point. Either way: n matchings, every unordered
// pair covered once, every vertex fixed exactly once.
std::vector<Matching> circle_factorization(int n) {
  std::vector<Matching> out;
  if (n == 1) {
    Matching m;
    m.fixed_points.push_back(0);
    out.push_back(std::move(m));
    return out;
  }
  if (n % 2 == 0) {
    int h = n - 1;  // rotating set size, vertex n-1 is the hub
    for (int r = 0; r < h; ++r) {
      Matching m;
      m.pairs.emplace_back(n - 1, r);
      for (int i = 1; i <= n / 2 - 1; ++i) {
        int a = (r + i) % h;
        int b = (r - i + h) % h;
        m.pairs.emplace_back(a, b);
      }
      m.normalize();
      out.push_back(std::move(m));
    }
    out.push_back(Matching::identity(n));
  } else {
    for (int r = 0; r < n; ++r) {
      Matching m;
      m.fixed_points.push_back(r);
      for (int i = 1; i <= (n - 1) / 2; ++i) {
        int a = (r + i) % n;
        int b = (r - i + n) % n;
        m.pairs.emplace_back(a, b);
      }
      m.normalize();
      out.push_back(std::move(m));
    }
  }
  return out;
}

void relabel(std::vector<Matching>& ms, const std::vector<int>& perm) {
  for (auto& m : ms) {
    for (auto& p : m.pairs) {
      p.first = perm[p.first];
      p.second = perm[p.second];
    }
    for (auto& f : m.fixed_points) f = perm[f];
    m.normalize();
  }
}

// Peer-array view of a factorization: peer[m][r] = partner of r in matching
// m (r itself for a fixed point). Used by the mixing walk.
std::vector<std::vector<int>> to_peers(const std::vector<Matching>& ms, int n) {
  std::vector<std::vector<int>> peers(ms.size(), std::vector<int>(n, -1));
  for (size_t m = 0; m < ms.size(); ++m) {
    for (const auto& p : ms[m].pairs) {
      peers[m][p.first] = p.second;
      peers[m][p.second] = p.first;
    }
    for (int f : ms[m].fixed_points) peers[m][f] = f;
  }
  return peers;
}

std::vector<Matching> from_peers(const std::vector<std::vector<int>>& peers) {
  std::vector<Matching> ms(peers.size());
  for (size_t m = 0; m < peers.size(); ++m) {
    int n = static_cast<int>(peers[m].size());
    for (int r = 0; r < n; ++r) {
      int q = peers[m][r];
      if (q == r) {
        ms[m].fixed_points.push_back(r);
      } else if (r < q) {
        ms[m].pairs.emplace_back(r, q);
      }
    }
    ms[m].normalize();
  }
  return ms;
}

// Random walk over factorizations of the same all-ones matrix. The round
// robin construction is highly structured (slices of it look like
// circulants, which expand poorly), so we scramble it: take two matchings,
// decompose their union into alternating paths and cycles, and re-color
// every component with a fair coin. Each component admits exactly two
// alternating colorings, so the coin toss resamples the pair uniformly
// given its union; over many random pairs the macro structure dissolves.
// Every invariant stays exact: pairs remain covered once, and each
// vertex's single fixed point just moves between the two matchings when a
// path is flipped.
void mix_factorization(std::vector<std::vector<int>>& peers, int n, Rng& rng,
                       int moves) {
  int k = static_cast<int>(peers.size());
  if (k < 2 || n < 2) return;
  std::vector<char> seen(n);
  std::vector<std::vector<int>> comps;
  for (int step = 0; step < moves; ++step) {
    int i = rng.below_int(k);
    int j = rng.below_int(k - 1);
    if (j >= i) ++j;
    auto& pa = peers[i];
    auto& pb = peers[j];

    // Decompose the union of the two involutions into alternating
    // components (even cycles and paths whose endpoints are fixed points).
    comps.clear();
    std::fill(seen.begin(), seen.end(), 0);
    for (int v = 0; v < n; ++v) {
      if (seen[v]) continue;
      std::vector<int> comp{v};
      seen[v] = 1;
      bool closed = false;
      int cur = v, color = 0;  // 0: take the pa edge next, 1: pb
      while (true) {
        int nxt = color == 0 ? pa[cur] : pb[cur];
        if (nxt == cur) break;  // path end: cur fixed in that matching
        if (nxt == v) {
          closed = true;  // cycle complete
          break;
        }
        comp.push_back(nxt);
        seen[nxt] = 1;
        cur = nxt;
        color ^= 1;
      }
      if (!closed) {
        cur = v;
        color = 1;  // other direction starts on the pb edge
        while (true) {
          int nxt = color == 1 ? pb[cur] : pa[cur];
          if (nxt == cur) break;
          comp.push_back(nxt);
          seen[nxt] = 1;
          cur = nxt;
          color ^= 1;
        }
      }
      comps.push_back(std::move(comp));
    }

    // Components are closed under both involutions, so a per-vertex peer
    // swap rewires both matchings consistently; flipping a path also
    // migrates the fixed points at its ends between the two matchings.
    for (auto& comp : comps) {
      if (rng.below(2) == 0) continue;
      for (int v : comp) std::swap(pa[v], pb[v]);
    }
  }
}

void validate_factorization_input(const std::vector<Matching>& base,
                                  const char* who) {
  int n = static_cast<int>(base.size());
  if (n == 0) throw std::invalid_argument(std::string(who) + ": empty factorization");
  std::vector<int> fixed_count(n, 0);
  std::vector<std::vector<char>> pair_seen(n, std::vector<char>(n, 0));
  for (const auto& m : base) {
    if (!m.is_valid(n))
      throw std::invalid_argument(std::string(who) +
                                  ": matching is not an involution on the rack set");
    for (const auto& p : m.pairs) {
      if (pair_seen[p.first][p.second]++)
        throw std::invalid_argument(std::string(who) + ": duplicate pair coverage");
    }
    for (int f : m.fixed_points) fixed_count[f]++;
  }
  for (int a = 0; a < n; ++a) {
    if (fixed_count[a] != 1)
      throw std::invalid_argument(std::string(who) + ": fixed-point coverage broken");
    for (int b = a + 1; b < n; ++b) {
      if (!pair_seen[a][b])
        throw std::invalid_argument(std::string(who) + ": missing pair coverage");
    }
  }
}

}  // namespace

std::vector<Matching> factorize_complete_graph(int n, uint64_t seed) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("factorize_complete_graph: n must be even and >= 2");
  auto ms = circle_factorization(n);
  Rng rng(mix_seed(seed, 0xFAC7));
  relabel(ms, rng.permutation(n));
  auto peers = to_peers(ms, n);
  mix_factorization(peers, n, rng, 48 * n);
  ms = from_peers(peers);
  rng.shuffle(ms);
  return ms;
}

std::vector<Matching> lift_factorization(const std::vector<Matching>& base,
                                         int factor, uint64_t seed) {
  validate_factorization_input(base, "lift_factorization");
  if (factor < 1) throw std::invalid_argument("lift_factorization: factor must be >= 1");
  if (factor == 1) return base;

  int nb = static_cast<int>(base.size());
  int L = factor;
  Rng order_rng(mix_seed(seed, 0x11F7));
  std::vector<Matching> out;
  out.reserve(static_cast<size_t>(nb) * L);

  for (int m = 0; m < nb; ++m) {
    // Per-block expansions prepared once per base matching.
    std::vector<Matching> lifted(L);
    for (const auto& e : base[m].pairs) {
      Rng perm_rng(mix_seed(seed, static_cast<uint64_t>(m), static_cast<uint64_t>(e.first),
                            static_cast<uint64_t>(e.second)));
      auto sigma = perm_rng.permutation(L);
      for (int t = 0; t < L; ++t) {
        for (int i = 0; i < L; ++i) {
          int a = e.first * L + i;
          int b = e.second * L + (sigma[i] + t) % L;
          lifted[t].pairs.emplace_back(std::min(a, b), std::max(a, b));
        }
      }
    }
    for (int f : base[m].fixed_points) {
      // The diagonal block needs its own all-ones decomposition; the odd
      // case falls back to the rotating construction with one fixed point
      // per sub-matching.
      std::vector<Matching> sub = circle_factorization(L);
      Rng sub_rng(mix_seed(seed, static_cast<uint64_t>(m), static_cast<uint64_t>(f), 0x5D));
      relabel(sub, sub_rng.permutation(L));
      sub_rng.shuffle(sub);
      for (int t = 0; t < L; ++t) {
        for (const auto& p : sub[t].pairs)
          lifted[t].pairs.emplace_back(f * L + p.first, f * L + p.second);
        for (int x : sub[t].fixed_points) lifted[t].fixed_points.push_back(f * L + x);
      }
    }
    for (auto& lm : lifted) {
      lm.normalize();
      out.push_back(std::move(lm));
    }
  }
  order_rng.shuffle(out);
  return out;
}

OperaTopology build_opera(int tor_radix, int num_racks, uint64_t seed) {
  if (tor_radix < 2 || tor_radix % 2 != 0)
    throw std::invalid_argument("build_opera: tor_radix must be even and >= 2");
  int u = tor_radix / 2;
  if (num_racks < 2 || num_racks % 2 != 0)
    throw std::invalid_argument("build_opera: num_racks must be even and >= 2");
  if (num_racks % u != 0)
    throw std::invalid_argument("build_opera: num_racks must be divisible by k/2");

  OperaTopology topo;
  topo.tor_radix = tor_radix;
  topo.num_racks = num_racks;
  topo.hosts_per_rack = u;
  topo.uplinks_per_rack = u;
  topo.seed = seed;

  auto ms = factorize_complete_graph(num_racks, mix_seed(seed, 0x10));
  int per_switch = num_racks / u;
  Rng rng(mix_seed(seed, 0x20));
  topo.switches.resize(u);
  for (int s = 0; s < u; ++s) {
    auto& sw = topo.switches[s];
    sw.id = s;
    sw.group = s;
    sw.matchings.assign(ms.begin() + static_cast<long>(s) * per_switch,
                        ms.begin() + static_cast<long>(s + 1) * per_switch);
    rng.shuffle(sw.matchings);  // cyclic presentation order
  }
  return topo;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << c.name << ": " << (c.pass ? "pass" : "FAIL");
    if (!c.pass) {
      for (const auto& o : c.offenders) os << "\n  " << o;
    }
    os << '\n';
  }
  return os.str();
}

ValidationReport validate_topology(const OperaTopology& topo) {
  ValidationReport rep;
  const int n = topo.num_racks;
  const size_t offender_cap = 8;

  ValidationCheck params{"parameters", true, {}};
  auto param_fail = [&](const std::string& why) {
    params.pass = false;
    if (params.offenders.size() < offender_cap) params.offenders.push_back(why);
  };
  if (topo.tor_radix % 2 != 0) param_fail("tor_radix is odd");
  if (topo.uplinks_per_rack != topo.tor_radix / 2)
    param_fail("uplinks_per_rack != tor_radix/2");
  if (topo.hosts_per_rack != topo.tor_radix / 2)
    param_fail("hosts_per_rack != tor_radix/2");
  if (topo.num_switches() != topo.uplinks_per_rack)
    param_fail("switch count != uplinks_per_rack");
  if (n < 2 || n % 2 != 0) param_fail("num_racks not even");
  if (topo.uplinks_per_rack > 0 && n % topo.uplinks_per_rack != 0)
    param_fail("num_racks not divisible by uplink count");
  rep.checks.push_back(std::move(params));

  ValidationCheck invol{"involution", true, {}};
  for (const auto& sw : topo.switches) {
    for (size_t mi = 0; mi < sw.matchings.size(); ++mi) {
      if (!sw.matchings[mi].is_valid(n)) {
        invol.pass = false;
        if (invol.offenders.size() < offender_cap)
          invol.offenders.push_back("switch " + std::to_string(sw.id) + " matching " +
                                    std::to_string(mi) +
                                    ": some rack not covered exactly once");
      }
    }
  }
  rep.checks.push_back(std::move(invol));

  ValidationCheck cover{"pair_coverage", true, {}};
  ValidationCheck fixed{"fixed_point_coverage", true, {}};
  if (n > 0) {
    std::vector<std::vector<int>> pair_count(n, std::vector<int>(n, 0));
    std::vector<int> fixed_count(n, 0);
    for (const auto& sw : topo.switches) {
      for (const auto& m : sw.matchings) {
        for (const auto& p : m.pairs) {
          if (p.first >= 0 && p.first < n && p.second >= 0 && p.second < n)
            pair_count[std::min(p.first, p.second)][std::max(p.first, p.second)]++;
        }
        for (int f : m.fixed_points) {
          if (f >= 0 && f < n) fixed_count[f]++;
        }
      }
    }
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (pair_count[a][b] != 1) {
          cover.pass = false;
          if (cover.offenders.size() < offender_cap)
            cover.offenders.push_back("pair (" + std::to_string(a) + "," +
                                      std::to_string(b) + ") covered " +
                                      std::to_string(pair_count[a][b]) + " times");
        }
      }
      if (fixed_count[a] != 1) {
        fixed.pass = false;
        if (fixed.offenders.size() < offender_cap)
          fixed.offenders.push_back("rack " + std::to_string(a) + " fixed " +
                                    std::to_string(fixed_count[a]) + " times");
      }
    }
  }
  rep.checks.push_back(std::move(cover));
  rep.checks.push_back(std::move(fixed));

  ValidationCheck counts{"matching_counts", true, {}};
  if (topo.uplinks_per_rack > 0 && n % topo.uplinks_per_rack == 0) {
    int want = n / topo.uplinks_per_rack;
    for (const auto& sw : topo.switches) {
      if (static_cast<int>(sw.matchings.size()) != want) {
        counts.pass = false;
        if (counts.offenders.size() < offender_cap)
          counts.offenders.push_back("switch " + std::to_string(sw.id) + " holds " +
                                     std::to_string(sw.matchings.size()) +
                                     " matchings, expected " + std::to_string(want));
      }
    }
  }
  rep.checks.push_back(std::move(counts));
  return rep;
}

std::string topology_to_json(const OperaTopology& topo) {
  nlohmann::ordered_json j;
  j["k"] = topo.tor_radix;
  j["N"] = topo.num_racks;
  j["d"] = topo.hosts_per_rack;
  j["u"] = topo.uplinks_per_rack;
  j["seed"] = topo.seed;
  j["switches"] = nlohmann::ordered_json::array();
  for (const auto& sw : topo.switches) {
    nlohmann::ordered_json js;
    js["id"] = sw.id;
    js["group"] = sw.group;
    js["matchings"] = nlohmann::ordered_json::array();
    for (const auto& m : sw.matchings) {
      nlohmann::ordered_json jm;
      jm["pairs"] = nlohmann::ordered_json::array();
      for (const auto& p : m.pairs) jm["pairs"].push_back({p.first, p.second});
      jm["fixed_points"] = m.fixed_points;
      js["matchings"].push_back(std::move(jm));
    }
    j["switches"].push_back(std::move(js));
  }
  return j.dump(2) + "\n";
}

OperaTopology topology_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  OperaTopology topo;
  topo.tor_radix = j.at("k").get<int>();
  topo.num_racks = j.at("N").get<int>();
  topo.hosts_per_rack = j.at("d").get<int>();
  topo.uplinks_per_rack = j.at("u").get<int>();
  topo.seed = j.at("seed").get<uint64_t>();
  for (const auto& js : j.at("switches")) {
    CircuitSwitch sw;
    sw.id = js.at("id").get<int>();
    sw.group = js.at("group").get<int>();
    for (const auto& jm : js.at("matchings")) {
      Matching m;
      for (const auto& jp : jm.at("pairs"))
        m.pairs.emplace_back(jp.at(0).get<int>(), jp.at(1).get<int>());
      m.fixed_points = jm.at("fixed_points").get<std::vector<int>>();
      m.normalize();
      sw.matchings.push_back(std::move(m));
    }
    topo.switches.push_back(std::move(sw));
  }
  return topo;
}

void save_topology(const OperaTopology& topo, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << topology_to_json(topo);
}

OperaTopology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return topology_from_json(ss.str());
}

}  // namespace opera
