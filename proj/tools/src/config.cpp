#include "config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "opera/workload.hpp"

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& scope,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(scope + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown field " + scope + "." + it.key());
}

template <typename T>
T field(const json& j, const std::string& scope, const char* key, T def) {
  if (!j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for " + scope + "." + key);
  }
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (j.contains("config") && j.contains("command")) j = j.at("config");  // manifest

  check_keys(j, "config",
             {"seed", "out", "topology", "schedule", "timing", "workload", "simulate",
              "faults", "cost"});
  RunConfig c;
  c.seed = field<uint64_t>(j, "config", "seed", c.seed);
  c.out = field<std::string>(j, "config", "out", c.out);

  if (j.contains("topology")) {
    const json& t = j["topology"];
    check_keys(t, "topology", {"tor_radix", "num_racks"});
    c.tor_radix = field(t, "topology", "tor_radix", c.tor_radix);
    c.num_racks = field(t, "topology", "num_racks", c.num_racks);
  }
  if (c.tor_radix < 4 || c.tor_radix % 2)
    throw ConfigError("topology.tor_radix must be even and >= 4");
  if (c.num_racks < 0) throw ConfigError("topology.num_racks must be >= 0");

  if (j.contains("schedule")) {
    const json& s = j["schedule"];
    check_keys(s, "schedule", {"group_size"});
    c.group_size = field(s, "schedule", "group_size", c.group_size);
    if (c.group_size < 1) throw ConfigError("schedule.group_size must be >= 1");
  }

  if (j.contains("timing")) {
    const json& t = j["timing"];
    check_keys(t, "timing",
               {"link_rate_bps", "mtu_bytes", "header_bytes", "queue_capacity_bytes",
                "prop_delay_ns", "worst_case_hops", "reconfig_us", "guard_us",
                "epsilon_us"});
    auto& p = c.timing;
    p.link_rate = field(t, "timing", "link_rate_bps", p.link_rate);
    p.mtu_bytes = field(t, "timing", "mtu_bytes", p.mtu_bytes);
    p.header_bytes = field(t, "timing", "header_bytes", p.header_bytes);
    p.queue_capacity_bytes =
        field(t, "timing", "queue_capacity_bytes", p.queue_capacity_bytes);
    p.prop_delay_per_hop =
        field(t, "timing", "prop_delay_ns", p.prop_delay_per_hop * 1e9) * 1e-9;
    p.worst_case_hops = field(t, "timing", "worst_case_hops", p.worst_case_hops);
    p.reconfiguration_delay =
        field(t, "timing", "reconfig_us", p.reconfiguration_delay * 1e6) * 1e-6;
    p.guard_band = field(t, "timing", "guard_us", p.guard_band * 1e6) * 1e-6;
    p.epsilon_override = field(t, "timing", "epsilon_us", p.epsilon_override * 1e6) * 1e-6;
  }

  if (j.contains("workload")) {
    const json& w = j["workload"];
    check_keys(w, "workload",
               {"kind", "cdf", "trace", "load", "duration_s", "flow_count", "flow_size",
                "window_s", "skew_p", "tagging"});
    c.workload_kind = field<std::string>(w, "workload", "kind", c.workload_kind);
    c.cdf_path = field<std::string>(w, "workload", "cdf", c.cdf_path);
    c.trace_path = field<std::string>(w, "workload", "trace", c.trace_path);
    c.load = field(w, "workload", "load", c.load);
    c.wl_duration_s = field(w, "workload", "duration_s", c.wl_duration_s);
    c.flow_count = field(w, "workload", "flow_count", c.flow_count);
    c.flow_size = field(w, "workload", "flow_size", c.flow_size);
    c.window_s = field(w, "workload", "window_s", c.window_s);
    c.skew_p = field(w, "workload", "skew_p", c.skew_p);
    std::string tag = field<std::string>(w, "workload", "tagging", "by_size");
    try {
      c.tagging = opera::tag_from_name(tag);
    } catch (const std::exception&) {
      throw ConfigError("bad value for workload.tagging");
    }
    static const std::set<std::string> kinds{"",      "poisson",     "shuffle", "hotrack",
                                             "skew",  "permutation", "trace"};
    if (!kinds.count(c.workload_kind))
      throw ConfigError("unknown workload.kind \"" + c.workload_kind + "\"");
    if (c.workload_kind == "poisson" && c.cdf_path.empty())
      throw ConfigError("workload.cdf is required for poisson");
    if (c.workload_kind == "trace" && c.trace_path.empty())
      throw ConfigError("workload.trace is required for kind trace");
  }

  if (j.contains("simulate")) {
    const json& s = j["simulate"];
    check_keys(s, "simulate",
               {"network", "alpha", "host_target", "horizon_s", "bulk_threshold_bytes",
                "ll_window_packets", "ll_rto_us", "vlb", "force_ll", "series_bin_ms",
                "max_hops"});
    c.network = field<std::string>(s, "simulate", "network", c.network);
    if (c.network != "opera" && c.network != "expander" && c.network != "clos")
      throw ConfigError("simulate.network must be opera, expander or clos");
    c.alpha = field(s, "simulate", "alpha", c.alpha);
    c.host_target = field(s, "simulate", "host_target", c.host_target);
    auto& p = c.sim;
    p.horizon_s = field(s, "simulate", "horizon_s", p.horizon_s);
    p.bulk_threshold_bytes =
        field(s, "simulate", "bulk_threshold_bytes", p.bulk_threshold_bytes);
    p.ll_window_packets = field(s, "simulate", "ll_window_packets", p.ll_window_packets);
    p.ll_rto_s = field(s, "simulate", "ll_rto_us", p.ll_rto_s * 1e6) * 1e-6;
    p.vlb_enabled = field(s, "simulate", "vlb", p.vlb_enabled);
    p.force_ll_transport = field(s, "simulate", "force_ll", p.force_ll_transport);
    p.series_bin_s = field(s, "simulate", "series_bin_ms", p.series_bin_s * 1e3) * 1e-3;
    p.max_hops = field(s, "simulate", "max_hops", p.max_hops);
    if (p.horizon_s <= 0) throw ConfigError("simulate.horizon_s must be > 0");
  }

  if (j.contains("faults")) {
    const json& f = j["faults"];
    check_keys(f, "faults", {"kind", "fractions", "counts", "seeds"});
    c.fault_kind = field<std::string>(f, "faults", "kind", c.fault_kind);
    if (c.fault_kind != "link" && c.fault_kind != "switch" && c.fault_kind != "tor")
      throw ConfigError("faults.kind must be link, switch or tor");
    c.fractions = field(f, "faults", "fractions", c.fractions);
    c.counts = field(f, "faults", "counts", c.counts);
    c.fault_seeds = field(f, "faults", "seeds", c.fault_seeds);
    if (c.fault_seeds < 1) throw ConfigError("faults.seeds must be >= 1");
    for (double x : c.fractions)
      if (x < 0 || x > 1) throw ConfigError("faults.fractions entries must be in [0,1]");
  }

  if (j.contains("cost")) {
    const json& k = j["cost"];
    check_keys(k, "cost", {"parts_csv", "radixes", "alpha"});
    c.parts_csv = field<std::string>(k, "cost", "parts_csv", c.parts_csv);
    c.cost_radixes = field(k, "cost", "radixes", c.cost_radixes);
    c.cost_alpha = field(k, "cost", "alpha", c.cost_alpha);
  }
  return c;
}

json config_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["topology"] = {{"tor_radix", c.tor_radix}, {"num_racks", c.num_racks}};
  j["schedule"] = {{"group_size", c.group_size}};
  const auto& p = c.timing;
  j["timing"] = {{"link_rate_bps", p.link_rate},
                 {"mtu_bytes", p.mtu_bytes},
                 {"header_bytes", p.header_bytes},
                 {"queue_capacity_bytes", p.queue_capacity_bytes},
                 {"prop_delay_ns", p.prop_delay_per_hop * 1e9},
                 {"worst_case_hops", p.worst_case_hops},
                 {"reconfig_us", p.reconfiguration_delay * 1e6},
                 {"guard_us", p.guard_band * 1e6},
                 {"epsilon_us", p.epsilon_override * 1e6}};
  j["workload"] = {{"kind", c.workload_kind},
                   {"cdf", c.cdf_path},
                   {"trace", c.trace_path},
                   {"load", c.load},
                   {"duration_s", c.wl_duration_s},
                   {"flow_count", c.flow_count},
                   {"flow_size", c.flow_size},
                   {"window_s", c.window_s},
                   {"skew_p", c.skew_p},
                   {"tagging", opera::tag_name(c.tagging)}};
  j["simulate"] = {{"network", c.network},
                   {"alpha", c.alpha},
                   {"host_target", c.host_target},
                   {"horizon_s", c.sim.horizon_s},
                   {"bulk_threshold_bytes", c.sim.bulk_threshold_bytes},
                   {"ll_window_packets", c.sim.ll_window_packets},
                   {"ll_rto_us", c.sim.ll_rto_s * 1e6},
                   {"vlb", c.sim.vlb_enabled},
                   {"force_ll", c.sim.force_ll_transport},
                   {"series_bin_ms", c.sim.series_bin_s * 1e3},
                   {"max_hops", c.sim.max_hops}};
  j["faults"] = {{"kind", c.fault_kind},
                 {"fractions", c.fractions},
                 {"counts", c.counts},
                 {"seeds", c.fault_seeds}};
  j["cost"] = {{"parts_csv", c.parts_csv},
               {"radixes", c.cost_radixes},
               {"alpha", c.cost_alpha}};
  return j;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_manifest(const RunConfig& c, const std::string& command) {
  json cfg = config_json(c);
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(cfg.dump())));
  json m;
  m["command"] = command;
  m["version"] = "0.1.0";
  m["seed"] = c.seed;
  m["config_hash"] = hash;
  m["config"] = cfg;
  std::ofstream out(std::filesystem::path(c.out) / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest under " + c.out);
  out << m.dump(2) << '\n';
}
