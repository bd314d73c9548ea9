#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace opera {

// Empirical flow-size CDF. Sampling interpolates log-linearly in size, so a
// distribution spanning 100 B to 1 GB stays sane.
struct SizeDistribution {
  std::vector<std::pair<double, double>> points;  // (size_bytes, cum_prob)

  void validate() const;  // throws on bad shape
  double sample(double u) const;
  double mean_bytes() const;  // closed form per segment
  double max_bytes() const;
};

SizeDistribution load_cdf(const std::string& path);
void save_cdf(const SizeDistribution& cdf, const std::string& path);

enum class FlowTag { BySize, Bulk, LowLatency };

std::string tag_name(FlowTag t);
FlowTag tag_from_name(const std::string& s);

struct FlowRecord {
  long id = 0;
  int src = 0;  // host
  int dst = 0;  // host
  int64_t size_bytes = 0;
  double arrival_s = 0;
  FlowTag tag = FlowTag::BySize;
};

struct PoissonSpec {
  double load = 0.1;  // fraction of aggregate host link capacity
  double link_rate_bps = 10e9;
  int hosts = 0;
  double duration_s = 0;  // generate until this horizon, or
  long flow_count = 0;    // exactly this many flows (set one of the two)
  uint64_t seed = 1;
  FlowTag tagging = FlowTag::BySize;
};

std::vector<FlowRecord> gen_poisson(const PoissonSpec& spec, const SizeDistribution& cdf);

// One flow per ordered host pair (rack-local pairs included; accounting can
// split them out later). window_s == 0 starts everything at t = 0.
std::vector<FlowRecord> gen_shuffle(int64_t flow_size, int hosts, double window_s,
                                    uint64_t seed = 1, FlowTag tagging = FlowTag::Bulk);

enum class PatternKind { HotRack, Skew, Permutation };

struct PatternSpec {
  PatternKind kind = PatternKind::Permutation;
  double skew_p = 1.0;  // fraction of racks active (Skew only)
  double load = 0.25;
  double link_rate_bps = 10e9;
  int hosts_per_rack = 0;
  int racks = 0;
  int64_t flow_size = 15'000'000;
  double duration_s = 0.01;
  uint64_t seed = 1;
  FlowTag tagging = FlowTag::Bulk;
};

std::vector<FlowRecord> gen_pattern(const PatternSpec& spec);

// CSV: id,src,dst,size_bytes,arrival_s,tag. Full-precision arrivals so a
// round trip is lossless.
void save_trace(const std::vector<FlowRecord>& trace, const std::string& path);
std::vector<FlowRecord> load_trace(const std::string& path);

}  // namespace opera
