#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "opera/baseline.hpp"
#include "opera/graph.hpp"
#include "opera/workload.hpp"

using namespace opera;

namespace {

SizeDistribution two_point() {
  // Atom of mass 0.5 at 1 KB, log-linear ramp up to 1 MB.
  SizeDistribution d;
  d.points = {{1000.0, 0.5}, {1'000'000.0, 1.0}};
  return d;
}

}  // namespace

TEST_SUITE("workload") {
  TEST_CASE("cdf validation rejects malformed tables") {
    SizeDistribution d;
    CHECK_THROWS(d.validate());  // empty
    d.points = {{100.0, 0.0}, {200.0, 0.9}};
    CHECK_THROWS(d.validate());  // does not end at 1
    d.points = {{100.0, 0.0}, {50.0, 1.0}};
    CHECK_THROWS(d.validate());  // sizes not monotone
    d.points = {{100.0, 0.0}, {100.0, 1.0}};
    CHECK_THROWS(d.validate());  // duplicate size
    d.points = {{-5.0, 0.0}, {200.0, 1.0}};
    CHECK_THROWS(d.validate());  // negative size
    d.points = {{100.0, 0.0}, {200.0, 0.6}, {300.0, 0.5}, {400.0, 1.0}};
    CHECK_THROWS(d.validate());  // probs not monotone
    d.points = {{100.0, 0.0}, {200.0, 1.0}};
    CHECK_NOTHROW(d.validate());
    // Probability mass at the first size is legal: that is how atoms and
    // single-size (constant) distributions are written.
    d.points = {{100.0, 0.2}, {200.0, 1.0}};
    CHECK_NOTHROW(d.validate());
    d.points = {{100.0, 1.0}};
    CHECK_NOTHROW(d.validate());
  }

  TEST_CASE("first point carries an atom, segments interpolate in log size") {
    auto d = two_point();
    d.validate();
    CHECK(d.sample(0.1) == doctest::Approx(1000.0));
    CHECK(d.sample(0.5) == doctest::Approx(1000.0));
    // Halfway through the ramp in probability is halfway in log size:
    // 1000 * (1e6/1e3)^0.5 = 10^4.5.
    CHECK(d.sample(0.75) == doctest::Approx(std::pow(10.0, 4.5)).epsilon(1e-12));
    CHECK(d.sample(1.0) == doctest::Approx(1'000'000.0));
    CHECK(d.max_bytes() == doctest::Approx(1'000'000.0));
    // E[X] = 0.5*1000 + 0.5*E[1000^(1+U)] with U uniform: the segment mean is
    // s0*(rho-1)/ln(rho).
    double seg = 1000.0 * 999.0 / std::log(1000.0);
    CHECK(d.mean_bytes() == doctest::Approx(500.0 + 0.5 * seg).epsilon(1e-12));

    SizeDistribution c;
    c.points = {{4096.0, 1.0}};
    CHECK(c.sample(0.0) == doctest::Approx(4096.0));
    CHECK(c.sample(0.999) == doctest::Approx(4096.0));
    CHECK(c.mean_bytes() == doctest::Approx(4096.0));
  }

  TEST_CASE("log-linear interpolation between points") {
    SizeDistribution d;
    d.points = {{100.0, 0.0}, {10000.0, 1.0}};
    d.validate();
    // Midway in probability lands midway in log-size.
    CHECK(d.sample(0.5) == doctest::Approx(1000.0).epsilon(1e-9));
    CHECK(d.sample(0.0) == doctest::Approx(100.0));
    CHECK(d.sample(1.0) == doctest::Approx(10000.0));
  }

  TEST_CASE("cdf file round trip") {
    auto d = two_point();
    std::string path = "cdf_roundtrip_test.tmp.csv";
    save_cdf(d, path);
    auto back = load_cdf(path);
    REQUIRE(back.points.size() == d.points.size());
    for (size_t i = 0; i < d.points.size(); ++i) {
      CHECK(back.points[i].first == doctest::Approx(d.points[i].first));
      CHECK(back.points[i].second == doctest::Approx(d.points[i].second));
    }
    std::remove(path.c_str());
  }

  TEST_CASE("tag names round trip") {
    for (FlowTag t : {FlowTag::BySize, FlowTag::Bulk, FlowTag::LowLatency}) {
      CHECK(tag_from_name(tag_name(t)) == t);
    }
    CHECK_THROWS(tag_from_name("no_such_tag"));
  }

  TEST_CASE("poisson generator hits the requested load") {
    PoissonSpec spec;
    spec.load = 0.3;
    spec.link_rate_bps = 10e9;
    spec.hosts = 64;
    spec.duration_s = 0.25;
    spec.seed = 5;
    auto trace = gen_poisson(spec, two_point());
    REQUIRE(trace.size() > 100);
    double bytes = 0;
    for (const auto& f : trace) {
      CHECK(f.src != f.dst);
      CHECK(f.src >= 0);
      CHECK(f.src < 64);
      CHECK(f.dst >= 0);
      CHECK(f.dst < 64);
      CHECK(f.arrival_s >= 0);
      CHECK(f.arrival_s < spec.duration_s);
      bytes += static_cast<double>(f.size_bytes);
    }
    double offered = bytes * 8 / spec.duration_s;
    double capacity = spec.hosts * spec.link_rate_bps;
    CHECK(offered / capacity == doctest::Approx(spec.load).epsilon(0.1));
    // Arrivals are sorted.
    CHECK(std::is_sorted(trace.begin(), trace.end(),
                         [](auto& a, auto& b) { return a.arrival_s < b.arrival_s; }));
  }

  TEST_CASE("poisson flow_count mode emits exactly that many flows") {
    PoissonSpec spec;
    spec.hosts = 16;
    spec.duration_s = 0;
    spec.flow_count = 500;
    auto trace = gen_poisson(spec, two_point());
    CHECK(trace.size() == 500);
    // ids are consecutive from zero
    for (size_t i = 0; i < trace.size(); ++i) CHECK(trace[i].id == static_cast<long>(i));
  }

  TEST_CASE("poisson generation is seed-deterministic") {
    PoissonSpec spec;
    spec.hosts = 16;
    spec.flow_count = 200;
    spec.seed = 9;
    auto a = gen_poisson(spec, two_point());
    auto b = gen_poisson(spec, two_point());
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].src == b[i].src);
      CHECK(a[i].size_bytes == b[i].size_bytes);
      CHECK(a[i].arrival_s == b[i].arrival_s);
    }
    spec.seed = 10;
    auto c = gen_poisson(spec, two_point());
    bool differs = false;
    for (size_t i = 0; i < a.size(); ++i)
      if (a[i].src != c[i].src || a[i].arrival_s != c[i].arrival_s) differs = true;
    CHECK(differs);
  }

  TEST_CASE("shuffle emits one flow per ordered host pair") {
    auto trace = gen_shuffle(100'000, 12, 0.0, 1);
    CHECK(trace.size() == 12 * 11);
    std::set<std::pair<int, int>> pairs;
    for (const auto& f : trace) {
      CHECK(f.size_bytes == 100'000);
      CHECK(f.arrival_s == 0.0);
      CHECK(f.tag == FlowTag::Bulk);
      pairs.insert({f.src, f.dst});
    }
    CHECK(pairs.size() == 12 * 11);
    auto windowed = gen_shuffle(100'000, 12, 0.01, 2);
    double mx = 0;
    for (const auto& f : windowed) mx = std::max(mx, f.arrival_s);
    CHECK(mx > 0.0);
    CHECK(mx < 0.01);
  }

  TEST_CASE("hot rack pattern pins one src rack and one dst rack") {
    PatternSpec spec;
    spec.kind = PatternKind::HotRack;
    spec.hosts_per_rack = 4;
    spec.racks = 8;
    spec.duration_s = 0.005;
    spec.flow_size = 100'000;  // small enough for dozens of arrivals in 5 ms
    auto trace = gen_pattern(spec);
    REQUIRE(trace.size() > 10);
    std::set<int> src_racks, dst_racks;
    double last = 0;
    for (const auto& f : trace) {
      src_racks.insert(f.src / 4);
      dst_racks.insert(f.dst / 4);
      CHECK(f.arrival_s >= last);
      CHECK(f.arrival_s <= spec.duration_s);
      last = f.arrival_s;
    }
    CHECK(src_racks.size() == 1);
    CHECK(dst_racks.size() == 1);
    CHECK(*src_racks.begin() != *dst_racks.begin());
  }

  TEST_CASE("permutation pattern pairs every host with a remote partner") {
    PatternSpec spec;
    spec.kind = PatternKind::Permutation;
    spec.hosts_per_rack = 4;
    spec.racks = 8;
    spec.seed = 3;
    auto trace = gen_pattern(spec);
    REQUIRE(trace.size() == 32);
    std::set<int> srcs, dsts;
    for (const auto& f : trace) {
      srcs.insert(f.src);
      dsts.insert(f.dst);
      CHECK(f.src / 4 != f.dst / 4);  // never rack-local
      CHECK(f.arrival_s == 0.0);
      CHECK(f.size_bytes == spec.flow_size);
    }
    // A bijection: each host appears exactly once on each side.
    CHECK(srcs.size() == 32);
    CHECK(dsts.size() == 32);
  }

  TEST_CASE("skew pattern only wakes the requested fraction of racks") {
    PatternSpec spec;
    spec.kind = PatternKind::Skew;
    spec.skew_p = 0.25;
    spec.hosts_per_rack = 4;
    spec.racks = 8;
    spec.duration_s = 0.005;
    spec.flow_size = 100'000;
    auto trace = gen_pattern(spec);
    REQUIRE(trace.size() > 10);
    std::set<int> active;
    for (const auto& f : trace) {
      active.insert(f.src / 4);
      active.insert(f.dst / 4);
      CHECK(f.src / 4 != f.dst / 4);
    }
    CHECK(active.size() <= 2);  // quarter of eight racks

    // skew_p = 1 lights every rack up (given enough flows).
    spec.skew_p = 1.0;
    spec.duration_s = 0.02;
    auto wide = gen_pattern(spec);
    std::set<int> wide_active;
    for (const auto& f : wide) wide_active.insert(f.src / 4);
    CHECK(wide_active.size() == 8);
  }

  TEST_CASE("trace csv round trip keeps arrivals exactly") {
    PoissonSpec spec;
    spec.hosts = 8;
    spec.flow_count = 50;
    auto trace = gen_poisson(spec, two_point());
    std::string path = "trace_roundtrip_test.tmp.csv";
    save_trace(trace, path);
    auto back = load_trace(path);
    REQUIRE(back.size() == trace.size());
    for (size_t i = 0; i < trace.size(); ++i) {
      CHECK(back[i].id == trace[i].id);
      CHECK(back[i].src == trace[i].src);
      CHECK(back[i].dst == trace[i].dst);
      CHECK(back[i].size_bytes == trace[i].size_bytes);
      CHECK(back[i].arrival_s == trace[i].arrival_s);
      CHECK(back[i].tag == trace[i].tag);
    }
    std::remove(path.c_str());
  }
}

TEST_SUITE("baseline") {
  TEST_CASE("cost-matched expander at full size") {
    auto net = build_baseline(BaselineKind::StaticExpander, 12, 1.4, 1);
    CHECK(net.uplinks_per_rack == 7);
    CHECK(net.hosts_per_rack == 5);
    CHECK(net.num_racks == 130);
    CHECK(net.num_hosts() == 650);
    CHECK(net.alpha == doctest::Approx(7.0 / 5.0));
    REQUIRE(net.matchings.size() == 7);
    // Each matching wires one uplink of every rack.
    for (const auto& m : net.matchings) CHECK(m.is_valid(net.num_racks));
    CHECK(net.edges.size() == 7u * (130 / 2));
    // The union must come out connected, else the instance is useless.
    Graph g(net.num_racks);
    for (auto [a, b] : net.edges) g.add_edge(a, b);
    CHECK(g.connected());
  }

  TEST_CASE("host_target shrinks the expander but keeps the rack shape") {
    // Radix 8 at 5:3 port split: five uplinks, three hosts per rack. The
    // smallest build covering 64 hosts is 22 racks.
    auto net = build_baseline(BaselineKind::StaticExpander, 8, 5.0 / 3.0, 2, 64);
    CHECK(net.uplinks_per_rack == 5);
    CHECK(net.hosts_per_rack == 3);
    CHECK(net.num_racks == 22);
    CHECK(net.num_hosts() == 66);
    REQUIRE(net.matchings.size() == 5);
    for (const auto& m : net.matchings) CHECK(m.is_valid(22));
  }

  TEST_CASE("clos baseline carries the oversubscription") {
    auto net = build_baseline(BaselineKind::FoldedClos, 12, 4.0 / 3.0, 1);
    CHECK(net.kind == BaselineKind::FoldedClos);
    CHECK(net.oversub == doctest::Approx(3.0));
    CHECK(net.num_hosts() == 648);
    auto full = build_baseline(BaselineKind::FoldedClos, 12, 4.0, 1);
    CHECK(full.oversub == doctest::Approx(1.0));
    CHECK(full.num_hosts() == 432);
  }

  TEST_CASE("expander build is seed-deterministic") {
    auto a = build_baseline(BaselineKind::StaticExpander, 12, 1.4, 7);
    auto b = build_baseline(BaselineKind::StaticExpander, 12, 1.4, 7);
    auto c = build_baseline(BaselineKind::StaticExpander, 12, 1.4, 8);
    CHECK(a.edges == b.edges);
    CHECK(a.edges != c.edges);
  }
}
