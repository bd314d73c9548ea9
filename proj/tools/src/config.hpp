#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "opera/sim.hpp"
#include "opera/timing.hpp"

// Run configuration: one JSON file drives every subcommand; unknown or
// ill-typed fields are config errors (exit 2) naming the field.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // topology / schedule
  int tor_radix = 12;
  int num_racks = 0;  // 0: cost-equivalence scale for the radix
  int group_size = 1;
  opera::TimingParams timing;

  // workload
  std::string workload_kind;  // poisson|shuffle|hotrack|skew|permutation|trace|(empty)
  std::string cdf_path;
  std::string trace_path;
  double load = 0.25;
  double wl_duration_s = 0.01;
  long flow_count = 0;
  int64_t flow_size = 100'000;
  double window_s = 0;
  double skew_p = 0.1;
  opera::FlowTag tagging = opera::FlowTag::BySize;

  // simulate
  std::string network = "opera";  // opera|expander|clos
  double alpha = 4.0 / 3.0;
  long host_target = 0;
  opera::SimParams sim;

  // faults
  std::string fault_kind = "link";
  std::vector<double> fractions;
  std::vector<int> counts;
  int fault_seeds = 10;

  // cost
  std::string parts_csv;
  std::vector<int> cost_radixes{12, 24};
  double cost_alpha = 4.0 / 3.0;

  // common
  uint64_t seed = 1;
  std::string out = "out";
};

// Throws ConfigError with the offending field's dotted name. A manifest
// file (with an embedded "config" object) is accepted in place of a raw
// config, so any run can be reproduced from its own output directory.
RunConfig load_config(const std::string& path);

// The resolved configuration, canonical key order, "out" excluded so the
// hash does not depend on where results land.
nlohmann::json config_json(const RunConfig& c);

uint64_t fnv1a(const std::string& s);

void write_manifest(const RunConfig& c, const std::string& command);
