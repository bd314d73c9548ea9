#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "opera/baseline.hpp"
#include "opera/routing.hpp"
#include "opera/schedule.hpp"
#include "opera/workload.hpp"

namespace opera {

struct SimParams {
  double horizon_s = 0.05;
  int64_t bulk_threshold_bytes = kDefaultBulkThreshold;

  // trimming/pull transport
  int ll_window_packets = 16;
  double ll_rto_s = 1e-3;  // last-resort sender poke, exponential backoff

  // per-port queue caps, bytes
  int ll_data_queue_bytes = 12 * 1000;
  int ctrl_queue_bytes = 12 * 1000;
  int bulk_queue_bytes = 256 * 1024;       // uplink staging, ~2 slices worth
  int down_bulk_queue_bytes = 512 * 1024;  // ToR->host fan-in

  double nack_delay_s = 2e-6;  // drop notice back to the buffering host
  int max_hops = 8;
  double tor_proc_s = 0;      // per-ToR forwarding constant
  double series_bin_s = 1e-3;
  bool vlb_enabled = true;
  bool force_ll_transport = false;  // baselines push everything through LL
};

struct FlowResult {
  long id = 0;
  int src = 0;
  int dst = 0;
  int64_t size_bytes = 0;
  FlowClass cls = FlowClass::LowLatency;
  bool completed = false;
  double arrival_s = 0;
  double fct_s = 0;  // valid when completed
  double mean_hops = 0;
  int64_t delivered_bytes = 0;
};

struct DropCounters {
  long trims = 0;          // data cut to headers (recovered, not lost)
  long control = 0;        // control-queue overflow, metadata lost
  long dark = 0;           // circuit dark or pointing elsewhere at dequeue
  long bulk_overflow = 0;  // bulk queue full (NACKed back to the host)
  long hop_limit = 0;
  long no_route = 0;
  long total_lost() const { return control + dark + bulk_overflow + hop_limit + no_route; }
};

struct MetricsReport {
  double duration_s = 0;
  int hosts = 0;
  double link_rate_bps = 0;
  double series_bin_s = 1e-3;

  std::vector<FlowResult> flows;
  std::vector<double> series_bits;  // delivered payload bits per bin

  // delivered payload by ToR-to-ToR hop count
  std::map<int, int64_t> hop_payload_bytes;
  int64_t local_payload_bytes = 0;     // hops == 0, stays inside the rack
  int64_t direct_payload_bytes = 0;    // hops == 1
  int64_t indirect_payload_bytes = 0;  // hops >= 2
  int64_t extra_link_bytes = 0;        // sum (hops-1) * payload over hops >= 1
  int64_t vlb_payload_bytes = 0;       // delivered via a relay rack

  DropCounters drops;
  long nacks = 0;
  long retransmits = 0;
  long ll_timeouts = 0;
  long duplicates = 0;
  long routing_violations = 0;  // packets routed onto their own slice's dark switch
  int64_t max_ll_queue_bytes = 0;
  long events = 0;

  int64_t delivered_payload_bytes() const;
  long completed_flows() const;
  // extra_link_bytes / payload delivered over hops >= 1 (rack-local excluded)
  double bandwidth_tax() const;
  // delivered payload bits / (hosts * link rate * duration)
  double goodput_fraction() const;
  // same, restricted to deliveries inside [from_s, to_s)
  double windowed_goodput_fraction(double from_s, double to_s) const;
};

MetricsReport run_opera(const SliceSchedule& sched, const std::vector<FlowRecord>& trace,
                        const SimParams& params, uint64_t seed);

MetricsReport run_baseline(const BaselineTopology& net, const TimingParams& timing,
                           const std::vector<FlowRecord>& trace, const SimParams& params,
                           uint64_t seed);

}  // namespace opera
