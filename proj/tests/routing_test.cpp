#include <doctest.h>

#include <cstdio>
#include <set>

#include "opera/csv.hpp"
#include "opera/rng.hpp"
#include "opera/routing.hpp"

#include "example_net.hpp"

using namespace opera;

namespace {

opera::TopologySlice panel_a() {
  return testnet::panel_slice(testnet::example_topology(), {-1, 0, 0, 0});
}

opera::TopologySlice panel_b() {
  return testnet::panel_slice(testnet::example_topology(), {-1, 1, 1, 1});
}

}  // namespace

TEST_SUITE("routing") {
  TEST_CASE("size classification splits at the bulk threshold") {
    CHECK(classify(0) == FlowClass::LowLatency);
    CHECK(classify(14'999'999) == FlowClass::LowLatency);
    CHECK(classify(15'000'000) == FlowClass::Bulk);
    CHECK(classify(kDefaultBulkThreshold + 1) == FlowClass::Bulk);
    CHECK(classify(100, 50) == FlowClass::Bulk);
    CHECK(classify(100, 101) == FlowClass::LowLatency);
  }

  TEST_CASE("all-A composition: two-hop detour when no direct circuit") {
    auto tables = build_slice_tables(panel_a(), 0);
    CHECK(tables.src_rack == 0);
    // Direct neighbors this slice: 3 via switch 1, 4 via switch 2, 5 via 3.
    REQUIRE(tables.bulk_direct.size() == 3);
    CHECK(tables.bulk_direct.at(3) == 1);
    CHECK(tables.bulk_direct.at(4) == 2);
    CHECK(tables.bulk_direct.at(5) == 3);
    // Rack 7 is two hops away, only through rack 5.
    REQUIRE(tables.low_latency.count(7) == 1);
    auto& e7 = tables.low_latency.at(7);
    REQUIRE(e7.size() == 1);
    CHECK(e7[0] == LlEntry{5, 3});
    // Rack 1 has two equal-cost detours, listed in ascending order.
    auto& e1 = tables.low_latency.at(1);
    REQUIRE(e1.size() == 2);
    CHECK(e1[0] == LlEntry{3, 1});
    CHECK(e1[1] == LlEntry{4, 2});
    // Direct destinations keep one-hop entries.
    CHECK(tables.low_latency.at(5) == std::vector<LlEntry>{{5, 3}});
  }

  TEST_CASE("all-B composition: 0 and 7 are direct on switch 1") {
    auto tables = build_slice_tables(panel_b(), 0);
    REQUIRE(tables.bulk_direct.size() == 3);
    CHECK(tables.bulk_direct.at(7) == 1);
    CHECK(tables.bulk_direct.at(6) == 2);
    CHECK(tables.bulk_direct.at(1) == 3);
    CHECK(tables.low_latency.at(7) == std::vector<LlEntry>{{7, 1}});
  }

  TEST_CASE("low-latency entries are shortest and use live first hops") {
    auto topo = testnet::example_topology();
    TimingParams t;
    auto sched = build_schedule(topo, t);
    for (const auto& sl : sched.slices) {
      auto g = sl.union_graph();
      for (int src = 0; src < topo.num_racks; ++src) {
        auto dist = g.bfs_dist(src);
        auto tables = build_slice_tables(sl, src);
        for (int dst = 0; dst < topo.num_racks; ++dst) {
          if (dst == src) continue;
          REQUIRE(tables.low_latency.count(dst) == 1);
          for (const auto& e : tables.low_latency.at(dst)) {
            // First hop is a real circuit this slice.
            CHECK(sl.peer[e.switch_id][src] == e.next_hop);
            // And it makes progress along a shortest path.
            auto dd = g.bfs_dist(e.next_hop);
            CHECK(dd[dst] == dist[dst] - 1);
          }
        }
        // Direct table matches the slice's circuits exactly.
        for (const auto& [dst, sw] : tables.bulk_direct) {
          CHECK(sl.peer[sw][src] == dst);
        }
      }
    }
  }

  TEST_CASE("an edge filter reroutes around a dead circuit") {
    auto sl = panel_a();
    EdgeFilter alive = [](int a, int b, int sw) {
      (void)sw;
      int lo = std::min(a, b), hi = std::max(a, b);
      return !(lo == 0 && hi == 5);  // kill the 0-5 circuit
    };
    auto tables = build_slice_tables(sl, 0, alive);
    CHECK(tables.bulk_direct.count(5) == 0);
    REQUIRE(tables.low_latency.count(7) == 1);
    // Three hops now, two ways to start.
    auto& e7 = tables.low_latency.at(7);
    REQUIRE(e7.size() == 2);
    CHECK(e7[0].next_hop == 3);
    CHECK(e7[1].next_hop == 4);
  }

  TEST_CASE("unreachable destinations are simply absent") {
    auto topo = testnet::example_topology();
    auto sl = testnet::panel_slice(topo, {-1, 0, 0, 0});
    EdgeFilter alive = [](int a, int b, int sw) {
      (void)sw;
      return a != 0 && b != 0;  // rack 0 loses every uplink
    };
    auto tables = build_slice_tables(sl, 0, alive);
    CHECK(tables.low_latency.empty());
    CHECK(tables.bulk_direct.empty());
  }

  TEST_CASE("cycle tables cover every slice and rack with full windows") {
    auto topo = testnet::example_topology();
    TimingParams t;
    auto sched = build_schedule(topo, t);
    auto cyc = build_cycle_tables(sched);
    CHECK(cyc.num_racks == 8);
    CHECK(cyc.num_slices == 8);
    REQUIRE(cyc.per_slice.size() == 8);
    for (int sl = 0; sl < 8; ++sl) {
      for (int src = 0; src < 8; ++src) {
        CHECK(cyc.at(sl, src).slice_index == sl);
        CHECK(cyc.at(sl, src).src_rack == src);
      }
    }
    // Each matching is presented for three slices of the 8-slice cycle, so
    // every src sees each of its 7 peers direct in exactly 3 slices.
    for (int src = 0; src < 8; ++src) {
      std::map<int, int> direct_slices;
      for (int sl = 0; sl < 8; ++sl)
        for (const auto& [dst, sw] : cyc.at(sl, src).bulk_direct) direct_slices[dst]++;
      REQUIRE(direct_slices.size() == 7);
      for (auto& [dst, cnt] : direct_slices) CHECK(cnt == 3);
    }
  }

  TEST_CASE("relay pick avoids the endpoints and is seed-stable") {
    std::vector<int> cand{0, 1, 2, 3, 4, 5, 6, 7};
    Rng a(11), b(11);
    for (int i = 0; i < 200; ++i) {
      auto r = vlb_intermediate(0, 7, cand, a);
      REQUIRE(r.has_value());
      CHECK(*r != 0);
      CHECK(*r != 7);
      auto r2 = vlb_intermediate(0, 7, cand, b);
      CHECK(*r == *r2);
    }
    std::vector<int> none{0, 7};
    Rng c(1);
    CHECK_FALSE(vlb_intermediate(0, 7, none, c).has_value());
  }

  TEST_CASE("table export walks every slice") {
    auto topo = testnet::example_topology();
    TimingParams t;
    auto sched = build_schedule(topo, t);
    auto cyc = build_cycle_tables(sched);
    std::string path = "tables_export_test.tmp.csv";
    export_tables_csv(cyc, path);
    auto rows = read_csv(path);
    REQUIRE(rows.size() > 100);
    CHECK(rows[0][0] == "slice");
    std::set<std::string> kinds;
    for (size_t i = 1; i < rows.size(); ++i) kinds.insert(rows[i][3]);
    CHECK(kinds.count("LL") == 1);
    CHECK(kinds.count("BULK") == 1);
    std::remove(path.c_str());
  }
}
