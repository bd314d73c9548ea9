#include "opera/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <queue>
#include <stdexcept>

#include "opera/rng.hpp"

namespace opera {

int64_t MetricsReport::delivered_payload_bytes() const {
  return local_payload_bytes + direct_payload_bytes + indirect_payload_bytes;
}

long MetricsReport::completed_flows() const {
  long n = 0;
  for (const auto& f : flows)
    if (f.completed) ++n;
  return n;
}

double MetricsReport::bandwidth_tax() const {
  int64_t denom = direct_payload_bytes + indirect_payload_bytes;
  return denom > 0 ? static_cast<double>(extra_link_bytes) / denom : 0.0;
}

double MetricsReport::goodput_fraction() const {
  double cap = static_cast<double>(hosts) * link_rate_bps * duration_s;
  return cap > 0 ? delivered_payload_bytes() * 8.0 / cap : 0.0;
}

double MetricsReport::windowed_goodput_fraction(double from_s, double to_s) const {
  double bits = 0, covered = 0;
  for (size_t i = 0; i < series_bits.size(); ++i) {
    double b0 = i * series_bin_s, b1 = b0 + series_bin_s;
    if (b0 >= from_s && b1 <= to_s) {
      bits += series_bits[i];
      covered += series_bin_s;
    }
  }
  double cap = static_cast<double>(hosts) * link_rate_bps * covered;
  return cap > 0 ? bits / cap : 0.0;
}

namespace {

enum : int { kCtrl = 0, kLl = 1, kBulk = 2 };

enum class PktKind : uint8_t { LlData, LlHeader, Pull, BulkData };

struct Pkt {
  PktKind kind = PktKind::LlData;
  uint8_t cls = kLl;
  int8_t owner_relay = 0;
  long flow = -1;
  long seq = -1;
  int payload = 0;
  int wire = 0;
  int dst_host = -1;
  int dst_rack = -1;
  int stamp = -1;  // slice pinned at the first ToR
  int hops = 0;
  int uplink = -1;     // bulk: granted switch
  int peer = -1;       // expected rack across the circuit
  int relay_rack = -1; // bulk: VLB relay still ahead
  int owner_host = -1; // bulk: buffer to restore on NACK
};

enum class Ev : uint8_t {
  FlowArrive,
  Arrival,
  TxDone,
  SliceStart,
  PullPace,
  RtoCheck,
  NackRestore
};

struct Event {
  int64_t t = 0;
  uint64_t order = 0;
  Ev kind = Ev::Arrival;
  int a = 0;        // node, port, flow or host id
  int64_t big = 0;  // absolute slice number
  Pkt pkt;
};

struct EventLater {
  bool operator()(const Event& x, const Event& y) const {
    if (x.t != y.t) return x.t > y.t;
    return x.order > y.order;
  }
};

enum class PortKind : uint8_t { HostUp, TorDown, TorUp, TorFabric, FabricDown };

struct Port {
  PortKind kind = PortKind::HostUp;
  int rack = -1;
  int sw = -1;
  int target = -1;  // static target node; TorUp resolves at dequeue
  double rate = 10e9;
  bool busy = false;
  Pkt in_flight;
  int in_flight_target = -1;
  std::array<std::deque<Pkt>, 3> q;
  std::array<int64_t, 3> qbytes{0, 0, 0};
  std::array<int64_t, 3> cap{0, 0, 0};
};

struct Chunk {
  long flow;
  int64_t bytes;
};

struct Buf {
  // One lane per destination host within the rack, pulled round robin.
  // A single FIFO would let every sender in the fabric grind through its
  // flow list in the same order and gang up on one down-link at a time.
  std::vector<std::deque<Chunk>> lane;
  int64_t bytes = 0;
  size_t rr = 0;

  std::deque<Chunk>* front_lane() {
    if (bytes == 0) return nullptr;
    size_t L = lane.size();
    for (size_t t = 0; t < L; ++t) {
      auto& q = lane[(rr + t) % L];
      if (!q.empty()) {
        rr = (rr + t) % L;
        return &q;
      }
    }
    return nullptr;
  }
  void advance() { rr = (rr + 1) % lane.size(); }
};

struct HostSt {
  std::vector<Buf> own;    // keyed by destination rack
  std::vector<Buf> relay;  // relayed traffic parked here until its direct slice
  std::deque<std::pair<int, long>> pull_q;  // (flow index, seq), seq -1 = next fresh
  int64_t pacer_free = 0;
  bool pacer_armed = false;
};

struct FlowSt {
  FlowRecord rec;
  FlowClass cls = FlowClass::LowLatency;
  bool ll = true;
  long total_pkts = 0;
  int64_t arrival_ns = 0;
  // sender side
  long next_fresh = 0;
  long bulk_seq = 0;
  int64_t rto_ns = 0;
  long progress_mark = -1;
  long progress = 0;
  // receiver side
  std::vector<bool> got;
  long got_count = 0;
  long req_fresh = 0;
  int64_t delivered = 0;
  double hop_payload = 0;
  int64_t done_ns = -1;
  bool completed = false;
};

enum class NetKind { Rotor, Expander, Clos };

class Engine {
 public:
  Engine(NetKind net, const SliceSchedule* sched, const BaselineTopology* base,
         const TimingParams& timing, const std::vector<FlowRecord>& trace,
         const SimParams& params, uint64_t seed)
      : P(params), net_(net), timing_(timing), rng_(mix_seed(seed, 0x51f7ed)) {
    hdr_ = timing.mtu_bytes > timing.header_bytes ? timing.header_bytes : 64;
    payload_max_ = timing.mtu_bytes - hdr_;
    if (payload_max_ <= 0) throw std::invalid_argument("sim: mtu vs header mismatch");
    horizon_ = ns(P.horizon_s);
    if (horizon_ <= 0) throw std::invalid_argument("sim: need a positive horizon");
    prop_ns_ = ns(timing.prop_delay_per_hop);
    proc_ns_ = ns(P.tor_proc_s);
    nack_ns_ = std::max<int64_t>(1, ns(P.nack_delay_s));
    rto_base_ = std::max<int64_t>(1, ns(P.ll_rto_s));
    pull_interval_ = ser_at(timing_.mtu_bytes, timing.link_rate);
    bin_ns_ = std::max<int64_t>(1, ns(P.series_bin_s));

    if (net_ == NetKind::Rotor) {
      sched_ = sched;
      init_rotor();
    } else if (net_ == NetKind::Expander) {
      init_expander(*base);
      sched_ = &synth_;
    } else {
      init_clos(*base);
    }
    if (net_ != NetKind::Clos) tables_ = build_cycle_tables(*sched_);
    build_ports();
    load_trace(trace);
  }

  MetricsReport run() {
    if (net_ == NetKind::Rotor && !P.force_ll_transport)
      schedule(0, Ev::SliceStart, 0, 0);
    while (!pq_.empty()) {
      Event e = pq_.top();
      pq_.pop();
      if (e.t > horizon_) break;
      now_ = e.t;
      ++rep_.events;
      switch (e.kind) {
        case Ev::FlowArrive: flow_arrive(e.a); break;
        case Ev::Arrival: arrival(e.a, e.pkt); break;
        case Ev::TxDone: tx_done(e.a); break;
        case Ev::SliceStart: slice_start(e.big); break;
        case Ev::PullPace: pull_pace(e.a); break;
        case Ev::RtoCheck: rto_check(e.a); break;
        case Ev::NackRestore: nack_restore(e.pkt); break;
      }
    }
    finalize();
    return std::move(rep_);
  }

 private:
  // ---- setup -------------------------------------------------------------

  void init_rotor() {
    const auto& topo = sched_->topology;
    N_ = topo.num_racks;
    hpr_ = topo.hosts_per_rack;
    H_ = topo.num_hosts();
    U_ = topo.num_switches();
    S_ = sched_->num_slices;
    slice_ns_ = ns(sched_->slice_duration);
    eps_ns_ = ns(sched_->epsilon);
    guard_ns_ = ns(timing_.guard_band);
    if (slice_ns_ <= 0) throw std::invalid_argument("sim: empty slice duration");
    int64_t usable = std::max<int64_t>(0, slice_ns_ - guard_ns_);
    credit_bytes_ = static_cast<int64_t>(usable * timing_.link_rate / 8e9);
    // Grants traverse two serialization stages (host uplink, then the rack
    // uplink) plus a prop hop before the last octet clears the circuit, so
    // leave that much in-flight headroom or the tail of every slice's batch
    // gets caught by the reconfiguration and bounced back for retry.
    credit_bytes_ -= 2 * (timing_.mtu_bytes + timing_.header_bytes);
    if (credit_bytes_ < 0) credit_bytes_ = 0;
    up_rate_ = timing_.link_rate;
  }

  void init_expander(const BaselineTopology& b) {
    if (b.kind != BaselineKind::StaticExpander)
      throw std::invalid_argument("sim: expander init with wrong baseline kind");
    N_ = b.num_racks;
    hpr_ = b.hosts_per_rack;
    H_ = b.num_hosts();
    U_ = b.uplinks_per_rack;
    S_ = 1;
    slice_ns_ = horizon_ + 1;  // one eternal slice
    eps_ns_ = 0;
    guard_ns_ = 0;
    up_rate_ = timing_.link_rate;

    synth_.topology.num_racks = N_;
    synth_.topology.hosts_per_rack = hpr_;
    synth_.topology.uplinks_per_rack = U_;
    synth_.num_slices = 1;
    synth_.slice_duration = P.horizon_s + 1;
    TopologySlice sl;
    sl.index = 0;
    sl.start_s = 0;
    sl.end_s = P.horizon_s + 1;
    sl.active_matching.assign(U_, 0);
    sl.peer.assign(U_, std::vector<int>(N_, -1));
    sl.adj.assign(N_, {});
    for (int s = 0; s < U_; ++s) {
      if (static_cast<size_t>(s) >= b.matchings.size())
        throw std::invalid_argument("sim: expander baseline missing matchings");
      for (int r = 0; r < N_; ++r) {
        auto p = b.matchings[s].peer_of(r);
        if (!p) throw std::invalid_argument("sim: expander matching not perfect");
        sl.peer[s][r] = *p;
        if (*p != r) sl.adj[r].push_back({*p, s});
      }
    }
    for (auto& a : sl.adj) std::sort(a.begin(), a.end());
    synth_.slices.push_back(std::move(sl));
  }

  void init_clos(const BaselineTopology& b) {
    if (b.kind != BaselineKind::FoldedClos)
      throw std::invalid_argument("sim: clos init with wrong baseline kind");
    N_ = b.num_racks;
    hpr_ = b.hosts_per_rack;
    H_ = b.num_hosts();
    U_ = 0;
    S_ = 1;
    slice_ns_ = horizon_ + 1;
    up_rate_ = timing_.link_rate * b.uplinks_per_rack;  // aggregated uplink pipe
    fabric_ = H_ + N_;
  }

  void build_ports() {
    auto add_port = [&](PortKind kind, int rack, int sw, int target, double rate,
                        int64_t cap_ll, int64_t cap_ctrl, int64_t cap_bulk) {
      Port p;
      p.kind = kind;
      p.rack = rack;
      p.sw = sw;
      p.target = target;
      p.rate = rate;
      p.cap = {cap_ctrl, cap_ll, cap_bulk};
      ports_.push_back(std::move(p));
      return static_cast<int>(ports_.size() - 1);
    };
    const int64_t big = int64_t(1) << 40;
    const double R = timing_.link_rate;

    host_up_.resize(H_);
    for (int h = 0; h < H_; ++h)
      host_up_[h] = add_port(PortKind::HostUp, rack_of(h), -1, tor_node(rack_of(h)), R,
                             big, big, big);
    tor_down_.assign(N_, std::vector<int>(hpr_));
    for (int r = 0; r < N_; ++r)
      for (int i = 0; i < hpr_; ++i)
        tor_down_[r][i] = add_port(PortKind::TorDown, r, -1, r * hpr_ + i, R,
                                   P.ll_data_queue_bytes, P.ctrl_queue_bytes,
                                   P.down_bulk_queue_bytes);
    if (net_ == NetKind::Clos) {
      tor_fabric_.resize(N_);
      fabric_down_.resize(N_);
      for (int r = 0; r < N_; ++r) {
        tor_fabric_[r] = add_port(PortKind::TorFabric, r, -1, fabric_, up_rate_,
                                  P.ll_data_queue_bytes, P.ctrl_queue_bytes,
                                  P.bulk_queue_bytes);
        fabric_down_[r] = add_port(PortKind::FabricDown, r, -1, tor_node(r), up_rate_,
                                   P.ll_data_queue_bytes, P.ctrl_queue_bytes,
                                   P.bulk_queue_bytes);
      }
    } else {
      tor_up_.assign(N_, std::vector<int>(U_));
      for (int r = 0; r < N_; ++r)
        for (int s = 0; s < U_; ++s)
          tor_up_[r][s] = add_port(PortKind::TorUp, r, s, -1, up_rate_,
                                   P.ll_data_queue_bytes, P.ctrl_queue_bytes,
                                   P.bulk_queue_bytes);
    }

    hosts_.resize(H_);
    for (auto& h : hosts_) {
      h.own.resize(N_);
      h.relay.resize(N_);
      for (auto& b : h.own) b.lane.resize(hpr_);
      for (auto& b : h.relay) b.lane.resize(hpr_);
    }
  }

  void load_trace(const std::vector<FlowRecord>& trace) {
    flows_.reserve(trace.size());
    for (const auto& rec : trace) {
      if (rec.src < 0 || rec.src >= H_ || rec.dst < 0 || rec.dst >= H_)
        throw std::invalid_argument("sim: trace host out of range");
      if (rec.src == rec.dst) throw std::invalid_argument("sim: flow src == dst");
      if (rec.size_bytes <= 0) throw std::invalid_argument("sim: flow size must be > 0");
      FlowSt f;
      f.rec = rec;
      f.arrival_ns = ns(rec.arrival_s);
      flows_.push_back(std::move(f));
    }
    for (size_t i = 0; i < flows_.size(); ++i)
      schedule(flows_[i].arrival_ns, Ev::FlowArrive, static_cast<int>(i), 0);
  }

  // ---- small helpers -----------------------------------------------------

  static int64_t ns(double s) { return static_cast<int64_t>(std::llround(s * 1e9)); }
  int64_t ser_at(int wire, double rate) const {
    return std::max<int64_t>(1, static_cast<int64_t>(std::llround(wire * 8e9 / rate)));
  }
  int rack_of(int host) const { return host / hpr_; }
  int tor_node(int rack) const { return H_ + rack; }
  int slice_idx(int64_t t) const { return static_cast<int>((t / slice_ns_) % S_); }

  void schedule(int64_t t, Ev kind, int a, int64_t big) {
    Event e;
    e.t = t;
    e.order = order_++;
    e.kind = kind;
    e.a = a;
    e.big = big;
    pq_.push(std::move(e));
  }
  void schedule_pkt(int64_t t, Ev kind, int a, Pkt&& pkt) {
    Event e;
    e.t = t;
    e.order = order_++;
    e.kind = kind;
    e.a = a;
    e.pkt = std::move(pkt);
    pq_.push(std::move(e));
  }

  // physically presented circuit peer of rack r through switch s
  int presented_peer(int s, int r, int64_t t) const {
    long abs = t / slice_ns_;
    int idx = static_cast<int>(abs % S_);
    const TopologySlice& sl = sched_->slices[idx];
    bool dark = false;
    for (int d : sl.reconfiguring)
      if (d == s) { dark = true; break; }
    if (!dark) return sl.peer[s][r];
    int64_t phase = t - abs * slice_ns_;
    if (phase < eps_ns_) return sched_->slices[(idx + S_ - 1) % S_].peer[s][r];
    return -1;
  }

  bool reconfig_now(int s, int64_t t) const {
    const TopologySlice& sl = sched_->slices[slice_idx(t)];
    for (int d : sl.reconfiguring)
      if (d == s) return true;
    return false;
  }

  // ---- queueing ----------------------------------------------------------

  void enqueue(int pid, Pkt&& pk) {
    Port& p = ports_[pid];
    int cls = pk.cls;
    if (cls == kLl && p.qbytes[kLl] + pk.wire > p.cap[kLl]) {
      // trim the payload, keep the metadata moving
      ++rep_.drops.trims;
      Pkt h = pk;
      h.kind = PktKind::LlHeader;
      h.cls = kCtrl;
      h.wire = hdr_;
      h.payload = 0;
      if (p.qbytes[kCtrl] + h.wire > p.cap[kCtrl]) {
        ++rep_.drops.control;
        return;
      }
      p.q[kCtrl].push_back(std::move(h));
      p.qbytes[kCtrl] += hdr_;
    } else if (p.qbytes[cls] + pk.wire > p.cap[cls]) {
      if (cls == kBulk) {
        ++rep_.drops.bulk_overflow;
        nack(pk);
      } else {
        ++rep_.drops.control;
      }
      return;
    } else {
      p.qbytes[cls] += pk.wire;
      if (cls == kLl && p.kind != PortKind::HostUp)
        rep_.max_ll_queue_bytes = std::max(rep_.max_ll_queue_bytes, p.qbytes[kLl]);
      p.q[cls].push_back(std::move(pk));
    }
    pump(pid);
  }

  void pump(int pid) {
    Port& p = ports_[pid];
    if (p.busy) return;
    for (;;) {
      int cls = -1;
      for (int c = 0; c < 3; ++c)
        if (!p.q[c].empty()) {
          cls = c;
          break;
        }
      if (cls < 0) return;
      Pkt pk = std::move(p.q[cls].front());
      p.q[cls].pop_front();
      p.qbytes[cls] -= pk.wire;

      int target;
      if (p.kind == PortKind::TorUp) {
        int peer = presented_peer(p.sw, p.rack, now_);
        if (peer < 0 || peer != pk.peer) {
          ++rep_.drops.dark;
          if (pk.cls == kBulk) nack(pk);
          continue;
        }
        if (pk.stamp == slice_idx(now_) && reconfig_now(p.sw, now_))
          ++rep_.routing_violations;
        ++pk.hops;
        target = tor_node(peer);
      } else if (p.kind == PortKind::TorFabric) {
        ++pk.hops;
        target = fabric_;
      } else {
        target = p.target;
      }
      p.busy = true;
      p.in_flight = std::move(pk);
      p.in_flight_target = target;
      schedule(now_ + ser_at(p.in_flight.wire, p.rate), Ev::TxDone, pid, 0);
      return;
    }
  }

  void tx_done(int pid) {
    Port& p = ports_[pid];
    p.busy = false;
    int target = p.in_flight_target;
    int64_t extra = (target >= H_) ? proc_ns_ : 0;  // ToR or fabric lookup time
    schedule_pkt(now_ + prop_ns_ + extra, Ev::Arrival, target, std::move(p.in_flight));
    pump(pid);
  }

  void nack(const Pkt& pk) {
    ++rep_.nacks;
    Pkt keep = pk;
    schedule_pkt(now_ + nack_ns_, Ev::NackRestore, 0, std::move(keep));
  }

  void nack_restore(const Pkt& pk) {
    HostSt& h = hosts_[pk.owner_host];
    Buf& b = (pk.owner_relay ? h.relay : h.own)[pk.dst_rack];
    b.lane[pk.dst_host % hpr_].push_front({pk.flow, pk.payload});
    b.bytes += pk.payload;
  }

  // ---- forwarding --------------------------------------------------------

  void arrival(int node, Pkt& pk) {
    if (node < H_) host_handle(node, pk);
    else if (node == fabric_) enqueue(fabric_down_[pk.dst_rack], std::move(pk));
    else tor_handle(node - H_, pk);
  }

  void tor_handle(int r, Pkt& pk) {
    if (pk.kind == PktKind::BulkData) {
      if (pk.relay_rack == r) {
        int h = r * hpr_ + static_cast<int>((pk.flow + pk.seq) % hpr_);
        enqueue(tor_down_[r][h - r * hpr_], std::move(pk));
      } else if (pk.dst_rack == r) {
        enqueue(tor_down_[r][pk.dst_host - r * hpr_], std::move(pk));
      } else if (pk.uplink >= 0) {
        enqueue(tor_up_[r][pk.uplink], std::move(pk));
      } else {
        ++rep_.drops.no_route;
        nack(pk);
      }
      return;
    }
    // trimming-transport traffic (data, headers, pulls)
    if (pk.stamp < 0) pk.stamp = slice_idx(now_);
    if (pk.dst_rack == r) {
      enqueue(tor_down_[r][pk.dst_host - r * hpr_], std::move(pk));
      return;
    }
    if (net_ == NetKind::Clos) {
      enqueue(tor_fabric_[r], std::move(pk));
      return;
    }
    if (pk.hops + 1 > P.max_hops) {
      ++rep_.drops.hop_limit;
      return;
    }
    const SliceTables& t = tables_.at(pk.stamp, r);
    auto it = t.low_latency.find(pk.dst_rack);
    if (it == t.low_latency.end() || it->second.empty()) {
      ++rep_.drops.no_route;
      return;
    }
    const LlEntry& e = it->second[rng_.below(it->second.size())];
    pk.peer = e.next_hop;
    enqueue(tor_up_[r][e.switch_id], std::move(pk));
  }

  void host_handle(int h, Pkt& pk) {
    switch (pk.kind) {
      case PktKind::LlData: recv_data(pk); break;
      case PktKind::LlHeader: recv_header(pk); break;
      case PktKind::Pull: sender_pull(pk); break;
      case PktKind::BulkData: {
        if (pk.relay_rack == rack_of(h) && pk.dst_rack != pk.relay_rack) {
          Buf& b = hosts_[h].relay[pk.dst_rack];
          b.lane[pk.dst_host % hpr_].push_back({pk.flow, pk.payload});
          b.bytes += pk.payload;
        } else {
          deliver(static_cast<int>(pk.flow), pk.payload, pk.hops, pk.owner_relay != 0);
        }
        break;
      }
    }
  }

  void deliver(int fi, int payload, int hops, bool via_relay) {
    FlowSt& f = flows_[fi];
    f.delivered += payload;
    f.hop_payload += static_cast<double>(hops) * payload;
    ++f.progress;
    rep_.hop_payload_bytes[hops] += payload;
    if (hops == 0) rep_.local_payload_bytes += payload;
    else if (hops == 1) rep_.direct_payload_bytes += payload;
    else rep_.indirect_payload_bytes += payload;
    if (hops >= 1) rep_.extra_link_bytes += static_cast<int64_t>(hops - 1) * payload;
    if (via_relay) rep_.vlb_payload_bytes += payload;
    size_t bin = static_cast<size_t>(now_ / bin_ns_);
    if (rep_.series_bits.size() <= bin) rep_.series_bits.resize(bin + 1, 0.0);
    rep_.series_bits[bin] += payload * 8.0;
    if (!f.completed && f.delivered >= f.rec.size_bytes) {
      f.completed = true;
      f.done_ns = now_;
    }
  }

  // ---- trimming/pull transport --------------------------------------------

  void send_ll(int fi, long seq) {
    FlowSt& f = flows_[fi];
    int payload = static_cast<int>(
        std::min<int64_t>(payload_max_, f.rec.size_bytes - seq * payload_max_));
    Pkt pk;
    pk.kind = PktKind::LlData;
    pk.cls = kLl;
    pk.flow = fi;
    pk.seq = seq;
    pk.payload = payload;
    pk.wire = payload + hdr_;
    pk.dst_host = f.rec.dst;
    pk.dst_rack = rack_of(f.rec.dst);
    enqueue(host_up_[f.rec.src], std::move(pk));
  }

  void recv_data(const Pkt& pk) {
    FlowSt& f = flows_[pk.flow];
    if (f.completed || f.got[pk.seq]) {
      ++rep_.duplicates;
      if (!f.completed) rescan(static_cast<int>(pk.flow));
      return;
    }
    f.got[pk.seq] = true;
    ++f.got_count;
    deliver(static_cast<int>(pk.flow), pk.payload, pk.hops, false);
    if (f.req_fresh < f.total_pkts) {
      ++f.req_fresh;
      queue_pull(static_cast<int>(pk.flow), -1, false);
    }
  }

  void recv_header(const Pkt& pk) {
    FlowSt& f = flows_[pk.flow];
    ++f.progress;
    if (!f.completed && !f.got[pk.seq])
      queue_pull(static_cast<int>(pk.flow), pk.seq, true);
  }

  void rescan(int fi) {
    FlowSt& f = flows_[fi];
    for (long s = 0; s < f.total_pkts; ++s)
      if (!f.got[s]) queue_pull(fi, s, true);
    f.req_fresh = f.total_pkts;
  }

  void sender_pull(const Pkt& pk) {
    FlowSt& f = flows_[pk.flow];
    ++f.progress;
    if (f.completed) return;
    if (pk.seq < 0) {
      if (f.next_fresh < f.total_pkts) send_ll(static_cast<int>(pk.flow), f.next_fresh++);
      return;
    }
    if (pk.seq < f.next_fresh) ++rep_.retransmits;
    else f.next_fresh = pk.seq + 1;
    send_ll(static_cast<int>(pk.flow), pk.seq);
  }

  void queue_pull(int fi, long seq, bool front) {
    FlowSt& f = flows_[fi];
    HostSt& h = hosts_[f.rec.dst];
    if (front) h.pull_q.emplace_front(fi, seq);
    else h.pull_q.emplace_back(fi, seq);
    if (!h.pacer_armed) {
      h.pacer_armed = true;
      schedule(std::max(now_, h.pacer_free), Ev::PullPace, f.rec.dst, 0);
    }
  }

  void pull_pace(int host) {
    HostSt& h = hosts_[host];
    h.pacer_armed = false;
    if (h.pull_q.empty()) return;
    auto [fi, seq] = h.pull_q.front();
    h.pull_q.pop_front();
    const FlowSt& f = flows_[fi];
    Pkt pk;
    pk.kind = PktKind::Pull;
    pk.cls = kCtrl;
    pk.flow = fi;
    pk.seq = seq;
    pk.wire = hdr_;
    pk.dst_host = f.rec.src;
    pk.dst_rack = rack_of(f.rec.src);
    enqueue(host_up_[host], std::move(pk));
    h.pacer_free = now_ + pull_interval_;
    if (!h.pull_q.empty()) {
      h.pacer_armed = true;
      schedule(h.pacer_free, Ev::PullPace, host, 0);
    }
  }

  void rto_check(int fi) {
    FlowSt& f = flows_[fi];
    if (f.completed || !f.ll) return;
    if (f.progress == f.progress_mark) {
      long seq = -1;
      for (long s = 0; s < f.total_pkts; ++s)
        if (!f.got[s]) {
          seq = s;
          break;
        }
      if (seq >= 0) {
        ++rep_.ll_timeouts;
        ++rep_.retransmits;
        send_ll(fi, seq);
      }
      f.rto_ns = std::min(f.rto_ns * 2, rto_base_ * 8);
    }
    f.progress_mark = f.progress;
    schedule(now_ + f.rto_ns, Ev::RtoCheck, fi, 0);
  }

  // ---- flow admission ------------------------------------------------------

  void flow_arrive(int fi) {
    FlowSt& f = flows_[fi];
    if (P.force_ll_transport) f.cls = FlowClass::LowLatency;
    else if (f.rec.tag == FlowTag::Bulk) f.cls = FlowClass::Bulk;
    else if (f.rec.tag == FlowTag::LowLatency) f.cls = FlowClass::LowLatency;
    else f.cls = classify(f.rec.size_bytes, P.bulk_threshold_bytes);
    f.ll = f.cls == FlowClass::LowLatency;
    f.total_pkts = (f.rec.size_bytes + payload_max_ - 1) / payload_max_;

    if (f.ll) {
      f.got.assign(f.total_pkts, false);
      long w = std::min<long>(P.ll_window_packets, f.total_pkts);
      f.req_fresh = w;
      f.next_fresh = w;
      for (long s = 0; s < w; ++s) send_ll(fi, s);
      f.rto_ns = rto_base_;
      f.progress_mark = f.progress;
      schedule(now_ + f.rto_ns, Ev::RtoCheck, fi, 0);
    } else {
      Buf& b = hosts_[f.rec.src].own[rack_of(f.rec.dst)];
      b.lane[f.rec.dst % hpr_].push_back({fi, f.rec.size_bytes});
      b.bytes += f.rec.size_bytes;
    }
  }

  // ---- bulk admission (slice polling) --------------------------------------

  void grant(int h, Buf& b, int uplink, int peer, int relay_rack, int stamp,
             int8_t owner_relay) {
    std::deque<Chunk>& q = *b.front_lane();
    Chunk& c = q.front();
    int fi = static_cast<int>(c.flow);
    int payload = static_cast<int>(std::min<int64_t>(payload_max_, c.bytes));
    c.bytes -= payload;
    b.bytes -= payload;
    if (c.bytes == 0) q.pop_front();
    b.advance();
    FlowSt& f = flows_[fi];
    Pkt pk;
    pk.kind = PktKind::BulkData;
    pk.cls = kBulk;
    pk.flow = fi;
    pk.seq = f.bulk_seq++;
    pk.payload = payload;
    pk.wire = payload + hdr_;
    pk.dst_host = f.rec.dst;
    pk.dst_rack = rack_of(f.rec.dst);
    pk.stamp = stamp;
    pk.hops = owner_relay;  // relayed bytes already crossed one circuit
    pk.uplink = uplink;
    pk.peer = peer;
    pk.relay_rack = relay_rack;
    pk.owner_host = h;
    pk.owner_relay = owner_relay;
    enqueue(host_up_[h], std::move(pk));
  }

  void slice_start(int64_t abs) {
    if (now_ >= horizon_) return;
    int idx = static_cast<int>(abs % S_);
    const TopologySlice& sl = sched_->slices[idx];
    std::vector<int64_t> hb(hpr_);

    // Rack-level backlog snapshot toward each destination rack. A relay
    // accepts offloaded traffic only while its own next direct window to
    // that destination has spare room; under uniform saturation nobody
    // does, and everything rides direct.
    if (P.vlb_enabled) {
      backlog_.assign(static_cast<size_t>(N_) * N_, 0);
      for (int h = 0; h < H_; ++h) {
        int r = rack_of(h);
        for (int d = 0; d < N_; ++d)
          backlog_[static_cast<size_t>(r) * N_ + d] +=
              hosts_[h].own[d].bytes + hosts_[h].relay[d].bytes;
      }
      vlb_acc_.assign(static_cast<size_t>(N_) * N_, 0);
    }

    for (int r = 0; r < N_; ++r) {
      for (int i = 0; i < hpr_; ++i) hb[i] = credit_bytes_;
      int rot = static_cast<int>((abs + r) % hpr_);

      for (int s = 0; s < U_; ++s) {
        int q = sl.peer[s][r];
        if (q < 0 || q == r) continue;
        int64_t credit = credit_bytes_;
        // direct phase: parked relay traffic first, then our own
        for (int relay_pass = 1; relay_pass >= 0; --relay_pass) {
          bool any = true;
          while (credit > 0 && any) {
            any = false;
            for (int i = 0; i < hpr_ && credit > 0; ++i) {
              int hi = (rot + i) % hpr_;
              int h = r * hpr_ + hi;
              Buf& b = relay_pass ? hosts_[h].relay[q] : hosts_[h].own[q];
              if (b.bytes == 0) continue;
              int64_t wire = std::min<int64_t>(payload_max_, b.front_lane()->front().bytes) + hdr_;
              if (credit < wire || hb[hi] < wire) continue;
              grant(h, b, s, q, -1, idx, relay_pass ? 1 : 0);
              credit -= wire;
              hb[hi] -= wire;
              any = true;
            }
          }
        }
        // spare capacity: offload backlog beyond a window's worth via q
        if (P.vlb_enabled && credit > 0) {
          bool any = true;
          while (credit > 0 && any) {
            any = false;
            for (int i = 0; i < hpr_ && credit > 0; ++i) {
              int hi = (rot + i) % hpr_;
              int h = r * hpr_ + hi;
              if (hb[hi] <= 0) continue;
              int d0 = static_cast<int>((abs + h) % N_);
              for (int j = 0; j < N_; ++j) {
                int d = (d0 + j) % N_;
                if (d == r || d == q) continue;
                Buf& b = hosts_[h].own[d];
                int64_t excess = b.bytes - credit_bytes_;
                if (excess <= 0) continue;
                int64_t pay = std::min<int64_t>(payload_max_, b.front_lane()->front().bytes);
                int64_t wire = pay + hdr_;
                if (credit < wire || hb[hi] < wire) continue;
                size_t qd = static_cast<size_t>(q) * N_ + d;
                if (backlog_[qd] + vlb_acc_[qd] + pay > credit_bytes_) continue;
                vlb_acc_[qd] += pay;
                grant(h, b, s, q, q, idx, 0);
                credit -= wire;
                hb[hi] -= wire;
                any = true;
                break;
              }
            }
          }
        }
      }

      // rack-local bulk rides the host links only, paced by the same budget
      for (int i = 0; i < hpr_; ++i) {
        int hi = (rot + i) % hpr_;
        int h = r * hpr_ + hi;
        Buf& b = hosts_[h].own[r];
        while (b.bytes > 0) {
          int64_t wire = std::min<int64_t>(payload_max_, b.front_lane()->front().bytes) + hdr_;
          if (hb[hi] < wire) break;
          grant(h, b, -1, -1, -1, idx, 0);
          hb[hi] -= wire;
        }
      }
    }
    if ((abs + 1) * slice_ns_ < horizon_)
      schedule((abs + 1) * slice_ns_, Ev::SliceStart, 0, abs + 1);
  }

  // ---- wrap-up -------------------------------------------------------------

  void finalize() {
    rep_.duration_s = P.horizon_s;
    rep_.hosts = H_;
    rep_.link_rate_bps = timing_.link_rate;
    rep_.series_bin_s = P.series_bin_s;
    size_t bins = static_cast<size_t>(horizon_ / bin_ns_) + 1;
    if (rep_.series_bits.size() < bins) rep_.series_bits.resize(bins, 0.0);
    rep_.flows.reserve(flows_.size());
    for (const auto& f : flows_) {
      FlowResult fr;
      fr.id = f.rec.id;
      fr.src = f.rec.src;
      fr.dst = f.rec.dst;
      fr.size_bytes = f.rec.size_bytes;
      fr.cls = f.cls;
      fr.completed = f.completed;
      fr.arrival_s = f.rec.arrival_s;
      fr.fct_s = f.completed ? (f.done_ns - f.arrival_ns) / 1e9 : 0.0;
      fr.delivered_bytes = f.delivered;
      fr.mean_hops = f.delivered > 0 ? f.hop_payload / f.delivered : 0.0;
      rep_.flows.push_back(fr);
    }
  }

  // ---- members -------------------------------------------------------------

  SimParams P;
  NetKind net_;
  TimingParams timing_;
  Rng rng_;

  const SliceSchedule* sched_ = nullptr;
  SliceSchedule synth_;
  CycleTables tables_;

  int H_ = 0, N_ = 0, hpr_ = 0, U_ = 0, S_ = 1;
  int fabric_ = -1;
  double up_rate_ = 10e9;
  int payload_max_ = 1436, hdr_ = 64;
  int64_t horizon_ = 0, slice_ns_ = 0, eps_ns_ = 0, guard_ns_ = 0;
  int64_t credit_bytes_ = 0;
  int64_t prop_ns_ = 0, proc_ns_ = 0, nack_ns_ = 0, rto_base_ = 0, pull_interval_ = 0;
  int64_t bin_ns_ = 1;

  std::vector<Port> ports_;
  std::vector<int> host_up_, tor_fabric_, fabric_down_;
  std::vector<std::vector<int>> tor_up_, tor_down_;
  std::vector<HostSt> hosts_;
  std::vector<FlowSt> flows_;
  std::vector<int64_t> backlog_;  // rack x rack, rebuilt each slice
  std::vector<int64_t> vlb_acc_;
  std::priority_queue<Event, std::vector<Event>, EventLater> pq_;
  uint64_t order_ = 0;
  int64_t now_ = 0;
  MetricsReport rep_;
};

}  // namespace

MetricsReport run_opera(const SliceSchedule& sched, const std::vector<FlowRecord>& trace,
                        const SimParams& params, uint64_t seed) {
  Engine e(NetKind::Rotor, &sched, nullptr, sched.timing, trace, params, seed);
  return e.run();
}

MetricsReport run_baseline(const BaselineTopology& net, const TimingParams& timing,
                           const std::vector<FlowRecord>& trace, const SimParams& params,
                           uint64_t seed) {
  SimParams p = params;
  p.force_ll_transport = true;  // static fabrics run everything on the trimming transport
  NetKind kind =
      net.kind == BaselineKind::StaticExpander ? NetKind::Expander : NetKind::Clos;
  Engine e(kind, nullptr, &net, timing, trace, p, seed);
  return e.run();
}

}  // namespace opera
