#pragma once

#include <string>
#include <vector>

#include "opera/sim.hpp"

namespace opera {

// Nearest-rank percentile. `sorted` ascending, p in (0, 100].
double percentile(const std::vector<double>& sorted, double p);

struct FctBucket {
  int64_t lo = 0;  // size range [lo, hi)
  int64_t hi = 0;
  long flows = 0;
  long completed = 0;
  double p50_s = 0;  // over completed flows
  double p99_s = 0;
  double mean_s = 0;
};

// Completion-time stats bucketed by flow size. `edges` are ascending byte
// boundaries; bucket i covers [edges[i], edges[i+1]), plus a tail bucket.
std::vector<FctBucket> fct_by_size(const MetricsReport& rep,
                                   const std::vector<int64_t>& edges);

void save_flow_csv(const MetricsReport& rep, const std::string& path);
void save_series_csv(const MetricsReport& rep, const std::string& path);

// One-object run summary with stable key order and fixed float formatting:
// identical runs serialize to identical bytes.
std::string summary_json(const MetricsReport& rep);
void save_summary_json(const MetricsReport& rep, const std::string& path);

}  // namespace opera
