#include "opera/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "opera/csv.hpp"
#include "opera/rng.hpp"

namespace opera {

void SizeDistribution::validate() const {
  if (points.empty()) throw std::invalid_argument("cdf: empty");
  for (size_t i = 0; i < points.size(); ++i) {
    auto [s, p] = points[i];
    if (s <= 0) throw std::invalid_argument("cdf: sizes must be positive");
    if (p < 0 || p > 1) throw std::invalid_argument("cdf: probabilities in [0,1]");
    if (i > 0) {
      if (s <= points[i - 1].first)
        throw std::invalid_argument("cdf: sizes must be strictly increasing");
      if (p < points[i - 1].second)
        throw std::invalid_argument("cdf: probabilities must be non-decreasing");
    }
  }
  if (points.back().second != 1.0) throw std::invalid_argument("cdf: must end at 1.0");
}

double SizeDistribution::sample(double u) const {
  if (u <= points.front().second) return points.front().first;
  for (size_t i = 1; i < points.size(); ++i) {
    auto [s1, p1] = points[i];
    if (u <= p1) {
      auto [s0, p0] = points[i - 1];
      if (p1 == p0) return s1;
      double t = (u - p0) / (p1 - p0);
      return s0 * std::pow(s1 / s0, t);
    }
  }
  return points.back().first;
}

double SizeDistribution::mean_bytes() const {
  // point mass at the first size, log-linear segments after
  double m = points.front().first * points.front().second;
  for (size_t i = 1; i < points.size(); ++i) {
    auto [s0, p0] = points[i - 1];
    auto [s1, p1] = points[i];
    double dp = p1 - p0;
    if (dp == 0) continue;
    double rho = s1 / s0;
    // integral of s0 * rho^t over t in [0,1]
    double seg = rho == 1.0 ? s0 : s0 * (rho - 1.0) / std::log(rho);
    m += dp * seg;
  }
  return m;
}

double SizeDistribution::max_bytes() const { return points.back().first; }

SizeDistribution load_cdf(const std::string& path) {
  auto rows = read_csv(path);
  SizeDistribution cdf;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i == 0 && !rows[i].empty() && rows[i][0] == "size_bytes") continue;
    if (rows[i].size() < 2) throw std::runtime_error(path + ": short cdf row");
    cdf.points.emplace_back(std::stod(rows[i][0]), std::stod(rows[i][1]));
  }
  cdf.validate();
  return cdf;
}

void save_cdf(const SizeDistribution& cdf, const std::string& path) {
  CsvWriter w(path);
  w.row({"size_bytes", "cum_prob"});
  for (auto [s, p] : cdf.points) w.row({fmt_double(s, 17), fmt_double(p, 17)});
}

std::string tag_name(FlowTag t) {
  switch (t) {
    case FlowTag::BySize: return "by_size";
    case FlowTag::Bulk: return "bulk";
    case FlowTag::LowLatency: return "ll";
  }
  return "by_size";
}

FlowTag tag_from_name(const std::string& s) {
  if (s == "by_size") return FlowTag::BySize;
  if (s == "bulk") return FlowTag::Bulk;
  if (s == "ll") return FlowTag::LowLatency;
  throw std::invalid_argument("unknown flow tag: " + s);
}

std::vector<FlowRecord> gen_poisson(const PoissonSpec& spec, const SizeDistribution& cdf) {
  cdf.validate();
  if (spec.load <= 0 || spec.load > 1)
    throw std::invalid_argument("gen_poisson: load must be in (0,1]");
  if (spec.hosts < 2) throw std::invalid_argument("gen_poisson: need >= 2 hosts");
  if (spec.duration_s <= 0 && spec.flow_count <= 0)
    throw std::invalid_argument("gen_poisson: set duration_s or flow_count");

  double mean_bits = cdf.mean_bytes() * 8.0;
  double lambda = spec.load * spec.hosts * spec.link_rate_bps / mean_bits;
  if (!std::isfinite(lambda) || lambda <= 0)
    throw std::invalid_argument("gen_poisson: arrival rate out of range");

  Rng rng(mix_seed(spec.seed, 0x90155074));
  std::vector<FlowRecord> trace;
  double t = 0;
  long id = 0;
  while (true) {
    t += rng.exponential(lambda);
    if (spec.duration_s > 0 && t > spec.duration_s) break;
    if (spec.flow_count > 0 && id >= spec.flow_count) break;
    FlowRecord f;
    f.id = id++;
    f.src = rng.below_int(spec.hosts);
    f.dst = rng.below_int(spec.hosts - 1);
    if (f.dst >= f.src) ++f.dst;
    f.size_bytes = std::max<int64_t>(1, std::llround(cdf.sample(rng.uniform01())));
    f.arrival_s = t;
    f.tag = spec.tagging;
    trace.push_back(f);
  }
  return trace;
}

std::vector<FlowRecord> gen_shuffle(int64_t flow_size, int hosts, double window_s,
                                    uint64_t seed, FlowTag tagging) {
  if (hosts < 2) throw std::invalid_argument("gen_shuffle: need >= 2 hosts");
  if (flow_size <= 0) throw std::invalid_argument("gen_shuffle: flow size must be > 0");
  Rng rng(mix_seed(seed, 0x5F0FF1E));
  std::vector<FlowRecord> trace;
  trace.reserve(static_cast<size_t>(hosts) * (hosts - 1));
  long id = 0;
  for (int s = 0; s < hosts; ++s) {
    for (int d = 0; d < hosts; ++d) {
      if (s == d) continue;
      FlowRecord f;
      f.id = id++;
      f.src = s;
      f.dst = d;
      f.size_bytes = flow_size;
      f.arrival_s = window_s > 0 ? rng.uniform01() * window_s : 0.0;
      f.tag = tagging;
      trace.push_back(f);
    }
  }
  return trace;
}

namespace {

std::vector<int> non_local_permutation(int hosts, int hosts_per_rack, Rng& rng) {
  auto rack_of = [&](int h) { return h / hosts_per_rack; };
  auto perm = rng.permutation(hosts);
  for (int pass = 0; pass < 1000; ++pass) {
    bool clean = true;
    for (int i = 0; i < hosts; ++i) {
      if (rack_of(perm[i]) != rack_of(i)) continue;
      clean = false;
      int j = rng.below_int(hosts);
      std::swap(perm[i], perm[j]);
    }
    if (clean) return perm;
  }
  // deterministic cleanup: swap each leftover with a partner that fixes both
  for (int i = 0; i < hosts; ++i) {
    if (rack_of(perm[i]) != rack_of(i)) continue;
    bool fixed = false;
    for (int j = 0; j < hosts && !fixed; ++j) {
      if (rack_of(perm[j]) != rack_of(i) && rack_of(perm[i]) != rack_of(j)) {
        std::swap(perm[i], perm[j]);
        fixed = true;
      }
    }
    if (!fixed) throw std::runtime_error("permutation: no non-local assignment exists");
  }
  return perm;
}

}  // namespace

std::vector<FlowRecord> gen_pattern(const PatternSpec& spec) {
  if (spec.racks < 2) throw std::invalid_argument("gen_pattern: need >= 2 racks");
  if (spec.hosts_per_rack < 1) throw std::invalid_argument("gen_pattern: need hosts per rack");
  const int hosts = spec.racks * spec.hosts_per_rack;
  Rng rng(mix_seed(spec.seed, 0x9A77E24));
  std::vector<FlowRecord> trace;
  long id = 0;

  auto host_in = [&](int rack) { return rack * spec.hosts_per_rack + rng.below_int(spec.hosts_per_rack); };

  if (spec.kind == PatternKind::Permutation) {
    auto perm = non_local_permutation(hosts, spec.hosts_per_rack, rng);
    for (int h = 0; h < hosts; ++h) {
      FlowRecord f;
      f.id = id++;
      f.src = h;
      f.dst = perm[h];
      f.size_bytes = spec.flow_size;
      f.arrival_s = 0;
      f.tag = spec.tagging;
      trace.push_back(f);
    }
    return trace;
  }

  if (spec.load <= 0 || spec.load > 1)
    throw std::invalid_argument("gen_pattern: load must be in (0,1]");
  if (spec.duration_s <= 0) throw std::invalid_argument("gen_pattern: need duration");
  if (spec.flow_size <= 0) throw std::invalid_argument("gen_pattern: flow size must be > 0");

  std::vector<int> active;  // sending racks
  int rack_a = -1, rack_b = -1;
  if (spec.kind == PatternKind::HotRack) {
    rack_a = rng.below_int(spec.racks);
    rack_b = rng.below_int(spec.racks - 1);
    if (rack_b >= rack_a) ++rack_b;
    active = {rack_a};
  } else {
    if (spec.skew_p <= 0 || spec.skew_p > 1)
      throw std::invalid_argument("gen_pattern: skew p must be in (0,1]");
    int k = static_cast<int>(std::ceil(spec.skew_p * spec.racks));
    k = std::max(2, k);
    auto order = rng.permutation(spec.racks);
    active.assign(order.begin(), order.begin() + k);
    std::sort(active.begin(), active.end());
  }

  double sending_hosts = static_cast<double>(active.size()) * spec.hosts_per_rack;
  double lambda = spec.load * sending_hosts * spec.link_rate_bps / (spec.flow_size * 8.0);
  double t = 0;
  while (true) {
    t += rng.exponential(lambda);
    if (t > spec.duration_s) break;
    FlowRecord f;
    f.id = id++;
    if (spec.kind == PatternKind::HotRack) {
      f.src = host_in(rack_a);
      f.dst = host_in(rack_b);
    } else {
      int si = rng.below_int(static_cast<int>(active.size()));
      int di = rng.below_int(static_cast<int>(active.size()) - 1);
      if (di >= si) ++di;
      f.src = host_in(active[si]);
      f.dst = host_in(active[di]);
    }
    f.size_bytes = spec.flow_size;
    f.arrival_s = t;
    f.tag = spec.tagging;
    trace.push_back(f);
  }
  return trace;
}

void save_trace(const std::vector<FlowRecord>& trace, const std::string& path) {
  CsvWriter w(path);
  w.row({"id", "src", "dst", "size_bytes", "arrival_s", "tag"});
  for (const auto& f : trace) {
    w.row({std::to_string(f.id), std::to_string(f.src), std::to_string(f.dst),
           std::to_string(f.size_bytes), fmt_double(f.arrival_s, 17), tag_name(f.tag)});
  }
}

std::vector<FlowRecord> load_trace(const std::string& path) {
  auto rows = read_csv(path);
  std::vector<FlowRecord> trace;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i == 0 && !rows[i].empty() && rows[i][0] == "id") continue;
    if (rows[i].size() < 6) throw std::runtime_error(path + ": short trace row");
    FlowRecord f;
    f.id = std::stol(rows[i][0]);
    f.src = std::stoi(rows[i][1]);
    f.dst = std::stoi(rows[i][2]);
    f.size_bytes = std::stoll(rows[i][3]);
    f.arrival_s = std::stod(rows[i][4]);
    f.tag = tag_from_name(rows[i][5]);
    trace.push_back(f);
  }
  return trace;
}

}  // namespace opera
