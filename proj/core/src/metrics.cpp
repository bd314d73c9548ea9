#include "opera/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "opera/csv.hpp"

namespace opera {

double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("percentile of empty set");
  if (p <= 0 || p > 100) throw std::invalid_argument("percentile p out of range");
  size_t rank = static_cast<size_t>(std::ceil(p / 100.0 * sorted.size()));
  if (rank == 0) rank = 1;
  return sorted[rank - 1];
}

std::vector<FctBucket> fct_by_size(const MetricsReport& rep,
                                   const std::vector<int64_t>& edges) {
  if (edges.empty()) throw std::invalid_argument("fct_by_size: no edges");
  std::vector<FctBucket> out(edges.size());
  for (size_t i = 0; i < edges.size(); ++i) {
    out[i].lo = edges[i];
    out[i].hi = i + 1 < edges.size() ? edges[i + 1] : INT64_MAX;
  }
  std::vector<std::vector<double>> fcts(out.size());
  for (const auto& f : rep.flows) {
    if (f.size_bytes < edges.front()) continue;
    size_t b = std::upper_bound(edges.begin(), edges.end(), f.size_bytes) -
               edges.begin() - 1;
    ++out[b].flows;
    if (f.completed) {
      ++out[b].completed;
      fcts[b].push_back(f.fct_s);
    }
  }
  for (size_t b = 0; b < out.size(); ++b) {
    if (fcts[b].empty()) continue;
    std::sort(fcts[b].begin(), fcts[b].end());
    out[b].p50_s = percentile(fcts[b], 50);
    out[b].p99_s = percentile(fcts[b], 99);
    double sum = 0;
    for (double v : fcts[b]) sum += v;
    out[b].mean_s = sum / fcts[b].size();
  }
  return out;
}

void save_flow_csv(const MetricsReport& rep, const std::string& path) {
  CsvWriter w(path);
  w.row({"id", "src", "dst", "size_bytes", "class", "completed", "arrival_s", "fct_s",
         "mean_hops", "delivered_bytes"});
  for (const auto& f : rep.flows) {
    w.row({std::to_string(f.id), std::to_string(f.src), std::to_string(f.dst),
           std::to_string(f.size_bytes), f.cls == FlowClass::Bulk ? "bulk" : "ll",
           f.completed ? "1" : "0", fmt_double(f.arrival_s, 12), fmt_double(f.fct_s, 12),
           fmt_double(f.mean_hops, 9), std::to_string(f.delivered_bytes)});
  }
}

void save_series_csv(const MetricsReport& rep, const std::string& path) {
  CsvWriter w(path);
  w.row({"t_s", "delivered_bits"});
  for (size_t i = 0; i < rep.series_bits.size(); ++i)
    w.row({fmt_double(i * rep.series_bin_s, 9), fmt_double(rep.series_bits[i], 15)});
}

namespace {

void kv(std::ostringstream& o, const char* key, const std::string& val, bool& first) {
  if (!first) o << ',';
  first = false;
  o << '"' << key << "\":" << val;
}

std::string num(int64_t v) { return std::to_string(v); }
std::string num(double v) { return fmt_double(v, 12); }

}  // namespace

std::string summary_json(const MetricsReport& rep) {
  std::vector<double> fcts;
  for (const auto& f : rep.flows)
    if (f.completed) fcts.push_back(f.fct_s);
  std::sort(fcts.begin(), fcts.end());

  std::ostringstream o;
  bool first = true;
  o << '{';
  kv(o, "hosts", num(static_cast<long>(rep.hosts)), first);
  kv(o, "duration_s", num(rep.duration_s), first);
  kv(o, "link_rate_bps", num(rep.link_rate_bps), first);
  kv(o, "flows", num(static_cast<long>(rep.flows.size())), first);
  kv(o, "completed", num(rep.completed_flows()), first);
  kv(o, "delivered_payload_bytes", num(rep.delivered_payload_bytes()), first);
  kv(o, "local_payload_bytes", num(rep.local_payload_bytes), first);
  kv(o, "direct_payload_bytes", num(rep.direct_payload_bytes), first);
  kv(o, "indirect_payload_bytes", num(rep.indirect_payload_bytes), first);
  kv(o, "extra_link_bytes", num(rep.extra_link_bytes), first);
  kv(o, "vlb_payload_bytes", num(rep.vlb_payload_bytes), first);
  kv(o, "bandwidth_tax", num(rep.bandwidth_tax()), first);
  kv(o, "goodput_fraction", num(rep.goodput_fraction()), first);
  {
    std::ostringstream h;
    bool hf = true;
    h << '{';
    for (const auto& [hops, bytes] : rep.hop_payload_bytes) {
      if (!hf) h << ',';
      hf = false;
      h << '"' << hops << "\":" << bytes;
    }
    h << '}';
    kv(o, "hop_payload_bytes", h.str(), first);
  }
  {
    std::ostringstream d;
    bool df = true;
    d << '{';
    kv(d, "trims", num(rep.drops.trims), df);
    kv(d, "control", num(rep.drops.control), df);
    kv(d, "dark", num(rep.drops.dark), df);
    kv(d, "bulk_overflow", num(rep.drops.bulk_overflow), df);
    kv(d, "hop_limit", num(rep.drops.hop_limit), df);
    kv(d, "no_route", num(rep.drops.no_route), df);
    kv(d, "total_lost", num(rep.drops.total_lost()), df);
    d << '}';
    kv(o, "drops", d.str(), first);
  }
  kv(o, "nacks", num(rep.nacks), first);
  kv(o, "retransmits", num(rep.retransmits), first);
  kv(o, "ll_timeouts", num(rep.ll_timeouts), first);
  kv(o, "duplicates", num(rep.duplicates), first);
  kv(o, "routing_violations", num(rep.routing_violations), first);
  kv(o, "max_ll_queue_bytes", num(rep.max_ll_queue_bytes), first);
  kv(o, "events", num(rep.events), first);
  if (!fcts.empty()) {
    std::ostringstream f;
    bool ff = true;
    f << '{';
    kv(f, "p50_s", num(percentile(fcts, 50)), ff);
    kv(f, "p99_s", num(percentile(fcts, 99)), ff);
    double sum = 0;
    for (double v : fcts) sum += v;
    kv(f, "mean_s", num(sum / fcts.size()), ff);
    f << '}';
    kv(o, "fct", f.str(), first);
  }
  o << '}';
  return o.str();
}

void save_summary_json(const MetricsReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << summary_json(rep) << '\n';
}

}  // namespace opera
