#include <doctest.h>

#include <cstdio>
#include <set>

#include "opera/csv.hpp"
#include "opera/schedule.hpp"

#include "example_net.hpp"

using namespace opera;

namespace {

TimingParams design_timing() {
  TimingParams t;
  t.epsilon_override = 90e-6;  // rounded deployment value
  return t;
}

}  // namespace

TEST_SUITE("schedule") {
  TEST_CASE("full-size rotation: slice count, cycle time, duty cycle") {
    auto topo = build_opera(12, 108, 1);
    auto sched = build_schedule(topo, design_timing());
    CHECK(sched.group_size == 1);
    CHECK(sched.epsilon == doctest::Approx(90e-6));
    CHECK(sched.slice_duration == doctest::Approx(100e-6));
    CHECK(sched.num_slices == 108);
    CHECK(sched.cycle_time == doctest::Approx(10.8e-3));
    // Each switch cycles 18 matchings, so it reconfigures every 6 slices.
    CHECK(sched.per_switch_period == doctest::Approx(600e-6));
    CHECK(sched.duty_cycle == doctest::Approx(1.0 - 10e-6 / 600e-6));
    CHECK(sched.slices.size() == 108);
  }

  TEST_CASE("computed drain bound drives the slice length when no override") {
    auto topo = build_opera(12, 108, 1);
    TimingParams t;  // epsilon computed: 98.372us
    auto sched = build_schedule(topo, t);
    CHECK(sched.epsilon == doctest::Approx(98.372e-6).epsilon(1e-9));
    CHECK(sched.slice_duration == doctest::Approx(108.372e-6).epsilon(1e-9));
  }

  TEST_CASE("every slice darkens exactly group_size switches, round robin") {
    auto topo = testnet::example_topology();
    auto sched = build_schedule(topo, design_timing());
    REQUIRE(sched.num_slices == 8);
    std::vector<int> dark_count(4, 0);
    for (const auto& sl : sched.slices) {
      REQUIRE(sl.reconfiguring.size() == 1);
      int s = sl.reconfiguring[0];
      dark_count[s]++;
      CHECK(sl.active_matching[s] == -1);
      for (int r = 0; r < topo.num_racks; ++r) CHECK(sl.peer[s][r] == -1);
      // Live switches expose a full involution.
      for (int sw = 0; sw < 4; ++sw) {
        if (sw == s) continue;
        CHECK(sl.active_matching[sw] >= 0);
        for (int r = 0; r < topo.num_racks; ++r) {
          int p = sl.peer[sw][r];
          CHECK(p >= 0);
          CHECK(sl.peer[sw][p] == r);
        }
      }
    }
    // Two reconfigurations per switch per cycle, one per matching.
    for (int s = 0; s < 4; ++s) CHECK(dark_count[s] == 2);
  }

  TEST_CASE("every switch presents each matching in one contiguous window") {
    auto topo = testnet::example_topology();
    auto sched = build_schedule(topo, design_timing());
    for (int s = 0; s < 4; ++s) {
      std::set<int> shown;
      for (const auto& sl : sched.slices)
        if (sl.active_matching[s] >= 0) shown.insert(sl.active_matching[s]);
      CHECK(shown == std::set<int>{0, 1});
    }
  }

  TEST_CASE("example schedule hits the all-A and all-B compositions") {
    auto topo = testnet::example_topology();
    auto sched = build_schedule(topo, design_timing());
    CHECK(testnet::find_slice(sched, {-1, 0, 0, 0}) >= 0);
    CHECK(testnet::find_slice(sched, {-1, 1, 1, 1}) >= 0);
  }

  TEST_CASE("slice times tile the cycle and lookup wraps") {
    auto topo = testnet::example_topology();
    auto sched = build_schedule(topo, design_timing());
    double d = sched.slice_duration;
    for (int i = 0; i < sched.num_slices; ++i) {
      CHECK(sched.slices[i].start_s == doctest::Approx(i * d));
      CHECK(sched.slices[i].end_s == doctest::Approx((i + 1) * d));
    }
    CHECK(sched.slice_index_at(0.0) == 0);
    CHECK(sched.slice_index_at(1.5 * d) == 1);
    CHECK(sched.slice_index_at(sched.cycle_time + 0.25 * d) == 0);
    CHECK(sched.slice_at_time(sched.cycle_time + 1.25 * d).index == 1);
  }

  TEST_CASE("union graph of a slice has one edge per live circuit") {
    auto topo = testnet::example_topology();
    auto sched = build_schedule(topo, design_timing());
    int panel = testnet::find_slice(sched, {-1, 0, 0, 0});
    REQUIRE(panel >= 0);
    auto g = sched.slices[panel].union_graph();
    CHECK(g.size() == 8);
    CHECK(g.num_edges() == 12);  // three live matchings, four pairs each
  }

  TEST_CASE("group size two halves the slice count") {
    auto topo = testnet::example_topology();
    auto sched = build_schedule(topo, design_timing(), 2);
    CHECK(sched.num_slices == 4);
    for (const auto& sl : sched.slices) CHECK(sl.reconfiguring.size() == 2);
    CHECK(sched.cycle_time == doctest::Approx(4 * sched.slice_duration));
  }

  TEST_CASE("all switches dark at once is test-only") {
    auto topo = testnet::example_topology();
    CHECK_THROWS(build_schedule(topo, design_timing(), 4));
    auto sched = build_schedule(topo, design_timing(), 4, true);
    CHECK(sched.num_slices == 2);
    for (const auto& sl : sched.slices)
      for (int m : sl.active_matching) CHECK(m == -1);
  }

  TEST_CASE("group size must divide the switch count") {
    auto topo = testnet::example_topology();
    CHECK_THROWS(build_schedule(topo, design_timing(), 3));
  }

  TEST_CASE("guard band cost: one guard per slice, one per matching window") {
    auto topo = build_opera(12, 108, 1);
    auto sched = build_schedule(topo, design_timing());
    auto loss = guard_band_loss(sched, 1e-6);
    CHECK(loss.ll_fraction == doctest::Approx(0.01));            // 1us / 100us
    CHECK(loss.bulk_fraction == doctest::Approx(1.0 / 590.0));   // 1us / 590us
    CHECK_THROWS(guard_band_loss(sched, sched.slice_duration));  // eats the slice
  }

  TEST_CASE("cost-equivalent rack counts per radix") {
    CHECK(racks_for_radix(8) == 48);
    CHECK(racks_for_radix(12) == 108);
    CHECK(racks_for_radix(24) == 432);
    CHECK(racks_for_radix(64) == 3072);
  }

  TEST_CASE("cycle time scaling: radix doubling with paired groups") {
    TimingParams t = design_timing();
    double base = cycle_time_scaling(12, 1.0, t);
    CHECK(base == doctest::Approx(10.8e-3));
    // Four times the racks, two switches flipping together: 2x the cycle.
    double doubled = cycle_time_scaling(24, 2.0, t);
    CHECK(doubled / base == doctest::Approx(2.0));
    // Radix 64 arranged as six groups: 3072 racks / (32/6 per group) slices.
    double big = cycle_time_scaling(64, 32.0 / 6.0, t);
    CHECK(big / base == doctest::Approx(3072.0 / (32.0 / 6.0) / 108.0));
    CHECK(big / base == doctest::Approx(6.0).epsilon(0.2));
  }

  TEST_CASE("schedule csv has one row per switch per slice") {
    auto topo = testnet::example_topology();
    auto sched = build_schedule(topo, design_timing());
    std::string path = "sched_export_test.tmp.csv";
    export_schedule_csv(sched, path);
    auto rows = read_csv(path);
    REQUIRE(rows.size() == 1 + 8 * 4);
    CHECK(rows[0][0] == "slice_index");
    // First slice, reconfiguring switch flagged with matching -1.
    bool saw_dark = false;
    for (size_t i = 1; i <= 4; ++i) {
      if (rows[i][3] == "1") {
        saw_dark = true;
        CHECK(rows[i][2] == "-1");
      }
    }
    CHECK(saw_dark);
    std::remove(path.c_str());
  }
}
