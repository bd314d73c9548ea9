#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "config.hpp"
#include "opera/analysis.hpp"
#include "opera/baseline.hpp"
#include "opera/costmodel.hpp"
#include "opera/csv.hpp"
#include "opera/metrics.hpp"
#include "opera/schedule.hpp"
#include "opera/sim.hpp"
#include "opera/topology.hpp"
#include "opera/workload.hpp"

namespace fs = std::filesystem;
using namespace opera;

namespace {

int effective_racks(const RunConfig& c) {
  long n = c.num_racks ? c.num_racks : racks_for_radix(c.tor_radix);
  return static_cast<int>(n);
}

SliceSchedule make_schedule(const RunConfig& c) {
  OperaTopology topo = build_opera(c.tor_radix, effective_racks(c), c.seed);
  auto rep = validate_topology(topo);
  if (!rep.ok()) throw std::runtime_error("generated topology failed validation:\n" + rep.summary());
  return build_schedule(topo, c.timing, c.group_size);
}

int cmd_gen(const RunConfig& c) {
  OperaTopology topo = build_opera(c.tor_radix, effective_racks(c), c.seed);
  auto rep = validate_topology(topo);
  std::cout << rep.summary();
  if (!rep.ok()) return 1;
  SliceSchedule sched = build_schedule(topo, c.timing, c.group_size);
  fs::create_directories(c.out);
  save_topology(topo, c.out + "/topology.json");
  export_schedule_csv(sched, c.out + "/schedule.csv");
  write_manifest(c, "gen");
  std::printf("racks=%d switches=%d matchings/switch=%d slices=%d\n", topo.num_racks,
              topo.num_switches(), topo.matchings_per_switch(), sched.num_slices);
  std::printf("epsilon=%.3gus slice=%.3gus cycle=%.6gms duty=%.4f\n",
              sched.epsilon * 1e6, sched.slice_duration * 1e6, sched.cycle_time * 1e3,
              sched.duty_cycle);
  return 0;
}

int cmd_analyze(const RunConfig& c) {
  SliceSchedule sched = make_schedule(c);
  fs::create_directories(c.out);
  auto rows = slice_metrics(sched);
  export_slice_metrics_csv(rows, c.out + "/slices.csv");

  int connected = 0, worst_diameter = 0;
  double min_gap = rows.empty() ? 0 : rows[0].spectral_gap;
  for (const auto& r : rows) {
    connected += r.connected;
    worst_diameter = std::max(worst_diameter, r.diameter);
    min_gap = std::min(min_gap, r.spectral_gap);
  }

  DirectCoverage cov = direct_coverage(sched);
  {
    CsvWriter w(c.out + "/coverage.csv");
    w.row({"src", "dst", "slice", "switch", "matching"});
    int n = cov.num_racks;
    for (int s = 0; s < n; ++s)
      for (int d = 0; d < n; ++d) {
        if (s == d) continue;
        const auto& win = cov.at(s, d);
        w.row({std::to_string(s), std::to_string(d), std::to_string(win.first_slice),
               std::to_string(win.switch_id), std::to_string(win.matching_index)});
      }
  }

  long rules = ruleset_size(sched.topology.num_racks, sched.topology.uplinks_per_rack);
  write_manifest(c, "analyze");
  std::printf("slices=%zu connected=%d worst_diameter=%d min_spectral_gap=%.4f\n",
              rows.size(), connected, worst_diameter, min_gap);
  std::printf("direct_coverage_total=%s ruleset_entries_per_tor=%ld\n",
              cov.total ? "yes" : "no", rules);
  if (!cov.total) return 1;
  return 0;
}

int cmd_faults(const RunConfig& c) {
  SliceSchedule sched = make_schedule(c);
  FailureKind kind = c.fault_kind == "switch" ? FailureKind::Switch
                     : c.fault_kind == "tor"  ? FailureKind::Tor
                                              : FailureKind::Link;
  long population = c.fault_kind == "switch" ? sched.topology.num_switches()
                    : c.fault_kind == "tor"
                        ? sched.topology.num_racks
                        : static_cast<long>(sched.topology.num_racks) *
                              sched.topology.uplinks_per_rack;
  std::vector<double> fractions = c.fractions;
  for (int n : c.counts) fractions.push_back(static_cast<double>(n) / population);
  if (fractions.empty())
    throw ConfigError("faults needs faults.fractions or faults.counts");
  std::sort(fractions.begin(), fractions.end());

  std::vector<uint64_t> seeds;
  for (int i = 0; i < c.fault_seeds; ++i) seeds.push_back(c.seed + i);
  auto sweep = failure_sweep(sched, kind, fractions, seeds);
  fs::create_directories(c.out);
  export_sweep_csv(sweep, c.out + "/sweep.csv");
  write_manifest(c, "faults");
  std::printf("kind=%s population=%ld points=%zu seeds=%zu\n", c.fault_kind.c_str(),
              population, sweep.size(), seeds.size());
  std::printf("zero_loss_threshold=%.4f\n", zero_loss_threshold(sweep));
  for (const auto& p : sweep)
    std::printf("  fraction=%.4f failed=%d mean_loss=%.6f max_loss=%.6f\n", p.fraction,
                p.failed_count, p.mean_loss, p.max_loss);
  return 0;
}

int cmd_cost(const RunConfig& c) {
  auto parts = c.parts_csv.empty() ? default_parts() : load_parts_csv(c.parts_csv);
  double a = alpha_from_parts(parts);
  fs::create_directories(c.out);
  nlohmann::json j;
  j["alpha_parts"] = a;
  j["alpha_target"] = c.cost_alpha;
  for (int k : c.cost_radixes) {
    auto h = hosts_for_alpha(k, c.cost_alpha);
    j["hosts_for_alpha"][std::to_string(k)] = {{"oversub", h.oversub},
                                               {"hosts_exact", h.hosts_exact},
                                               {"hosts", h.hosts}};
    long racks = racks_for_radix(k);
    j["ruleset"][std::to_string(k)] = ruleset_size(racks, k / 2);
  }
  {
    std::ofstream out(c.out + "/cost.json");
    out << j.dump(2) << '\n';
  }
  save_parts_csv(parts, c.out + "/parts.csv");
  write_manifest(c, "cost");
  std::printf("alpha_parts=%.4f\n", a);
  for (int k : c.cost_radixes)
    std::printf("  k=%d hosts_for_alpha(%.4g)=%ld\n", k, c.cost_alpha,
                hosts_for_alpha(k, c.cost_alpha).hosts);
  return 0;
}

int cmd_simulate(const RunConfig& c) {
  fs::create_directories(c.out);

  // the network decides the host count the workload must target
  SliceSchedule sched;
  BaselineTopology base;
  int hosts, racks, hpr;
  if (c.network == "opera") {
    sched = make_schedule(c);
    hosts = sched.topology.num_hosts();
    racks = sched.topology.num_racks;
    hpr = sched.topology.hosts_per_rack;
  } else {
    base = build_baseline(
        c.network == "clos" ? BaselineKind::FoldedClos : BaselineKind::StaticExpander,
        c.tor_radix, c.alpha, c.seed, c.host_target);
    hosts = base.num_hosts();
    racks = base.num_racks;
    hpr = base.hosts_per_rack;
  }

  std::vector<FlowRecord> trace;
  bool generated = true;
  if (c.workload_kind == "trace") {
    trace = load_trace(c.trace_path);
    generated = false;
  } else if (c.workload_kind == "poisson") {
    PoissonSpec spec;
    spec.load = c.load;
    spec.link_rate_bps = c.timing.link_rate;
    spec.hosts = hosts;
    spec.duration_s = c.wl_duration_s;
    spec.flow_count = c.flow_count;
    spec.seed = c.seed;
    spec.tagging = c.tagging;
    trace = gen_poisson(spec, load_cdf(c.cdf_path));
  } else if (c.workload_kind == "shuffle") {
    trace = gen_shuffle(c.flow_size, hosts, c.window_s, c.seed, c.tagging);
  } else if (!c.workload_kind.empty()) {
    PatternSpec spec;
    spec.kind = c.workload_kind == "hotrack" ? PatternKind::HotRack
                : c.workload_kind == "skew"  ? PatternKind::Skew
                                             : PatternKind::Permutation;
    spec.skew_p = c.skew_p;
    spec.load = c.load;
    spec.link_rate_bps = c.timing.link_rate;
    spec.hosts_per_rack = hpr;
    spec.racks = racks;
    spec.flow_size = c.flow_size;
    spec.duration_s = c.wl_duration_s;
    spec.seed = c.seed;
    spec.tagging = c.tagging;
    trace = gen_pattern(spec);
  }
  if (generated) save_trace(trace, c.out + "/trace.csv");

  MetricsReport rep = c.network == "opera"
                          ? run_opera(sched, trace, c.sim, c.seed)
                          : run_baseline(base, c.timing, trace, c.sim, c.seed);

  save_flow_csv(rep, c.out + "/flows.csv");
  save_series_csv(rep, c.out + "/series.csv");
  save_summary_json(rep, c.out + "/summary.json");
  write_manifest(c, "simulate");
  std::printf("network=%s hosts=%d flows=%zu completed=%ld\n", c.network.c_str(), hosts,
              rep.flows.size(), rep.completed_flows());
  std::printf("delivered=%lldB tax=%.6f goodput=%.4f lost=%ld\n",
              static_cast<long long>(rep.delivered_payload_bytes()), rep.bandwidth_tax(),
              rep.goodput_fraction(), rep.drops.total_lost());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotor-network design and simulation toolkit"};
  app.require_subcommand(1);

  struct Common {
    std::string config;
    int64_t seed = -1;
    std::string out;
  };
  std::map<std::string, Common> opts;
  for (const char* name : {"gen", "analyze", "simulate", "faults", "cost"}) {
    auto* sub = app.add_subcommand(name);
    auto& o = opts[name];
    sub->add_option("--config", o.config, "run configuration JSON")->required();
    sub->add_option("--seed", o.seed, "override config seed");
    sub->add_option("--out", o.out, "override output directory");
  }
  app.get_subcommand("gen")->description("build a topology and its slice schedule");
  app.get_subcommand("analyze")->description("per-slice metrics and direct coverage");
  app.get_subcommand("simulate")->description("packet-level run on a workload");
  app.get_subcommand("faults")->description("failure sweeps over links, switches or ToRs");
  app.get_subcommand("cost")->description("cost-equivalence arithmetic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const Common& o = opts[name];
  try {
    RunConfig c = load_config(o.config);
    if (o.seed >= 0) c.seed = static_cast<uint64_t>(o.seed);
    if (!o.out.empty()) c.out = o.out;
    if (name == "gen") return cmd_gen(c);
    if (name == "analyze") return cmd_analyze(c);
    if (name == "simulate") return cmd_simulate(c);
    if (name == "faults") return cmd_faults(c);
    return cmd_cost(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
