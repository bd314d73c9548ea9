#include <doctest.h>

#include <cstdio>
#include <set>

#include "opera/analysis.hpp"
#include "opera/csv.hpp"

#include "example_net.hpp"

using namespace opera;

namespace {

SliceSchedule full_size() {
  static SliceSchedule sched = [] {
    TimingParams t;
    t.epsilon_override = 90e-6;
    return build_schedule(build_opera(12, 108, 1), t);
  }();
  return sched;
}

SliceSchedule small() {
  TimingParams t;
  t.epsilon_override = 90e-6;
  return build_schedule(testnet::example_topology(), t);
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("full-size slices stay connected with small diameter") {
    auto rows = slice_metrics(full_size());
    REQUIRE(rows.size() == 108);
    double apl_sum = 0;
    for (const auto& r : rows) {
      CHECK(r.connected);
      CHECK(r.diameter >= 3);
      CHECK(r.diameter <= 6);
      CHECK(r.avg_degree > 4.4);
      CHECK(r.avg_degree <= 5.0);
      CHECK(r.spectral_gap > 0.5);
      apl_sum += r.avg_path_length;
    }
    CHECK(apl_sum / rows.size() == doctest::Approx(3.1).epsilon(0.1));
  }

  TEST_CASE("spectral work can be skipped") {
    auto rows = slice_metrics(small(), false);
    for (const auto& r : rows) {
      CHECK(r.spectral_gap == 0.0);
      CHECK(r.connected);
    }
  }

  TEST_CASE("slice metrics csv round trip") {
    auto rows = slice_metrics(small(), false);
    std::string path = "slice_metrics_test.tmp.csv";
    export_slice_metrics_csv(rows, path);
    auto back = read_csv(path);
    REQUIRE(back.size() == rows.size() + 1);
    CHECK(back[0][0] == "slice");
    std::remove(path.c_str());
  }

  TEST_CASE("direct coverage is a total map agreeing with the matchings") {
    auto sched = small();
    auto cov = direct_coverage(sched);
    CHECK(cov.total);
    CHECK(cov.num_racks == 8);
    for (int s = 0; s < 8; ++s) {
      for (int d = 0; d < 8; ++d) {
        if (s == d) continue;
        const auto& w = cov.at(s, d);
        CHECK(w.first_slice >= 0);
        CHECK(w.first_slice < 8);
        CHECK(w.switch_id >= 0);
        CHECK(w.switch_id < 4);
        // Symmetric circuit: both directions share the window.
        const auto& back = cov.at(d, s);
        CHECK(back.switch_id == w.switch_id);
        CHECK(back.matching_index == w.matching_index);
        CHECK(back.first_slice == w.first_slice);
      }
    }
    // Pinned example facts: 0<->7 rides switch 1's second matching, and
    // the two-hop panel pair (0,5) rides switch 3's first matching.
    CHECK(cov.at(0, 7).switch_id == 1);
    CHECK(cov.at(0, 7).matching_index == 1);
    CHECK(cov.at(0, 5).switch_id == 3);
    CHECK(cov.at(0, 5).matching_index == 0);
    CHECK(cov.at(5, 7).switch_id == 1);
    CHECK(cov.at(5, 7).matching_index == 0);
  }

  TEST_CASE("full-size coverage gives every ordered pair one window") {
    auto cov = direct_coverage(full_size());
    CHECK(cov.total);
    long have = 0;
    for (int s = 0; s < 108; ++s)
      for (int d = 0; d < 108; ++d)
        if (s != d && cov.at(s, d).first_slice >= 0) ++have;
    CHECK(have == 108L * 107);
  }

  TEST_CASE("no failures, no loss") {
    auto impact = inject_and_measure(small(), FailureSet{});
    CHECK(impact.surviving_racks == 8);
    CHECK(impact.worst_slice_disconnected_pairs == 0);
    CHECK(impact.integrated_disconnected_pairs == 0);
    CHECK(impact.worst_loss_fraction == 0.0);
    CHECK(impact.integrated_loss_fraction == 0.0);
    CHECK(impact.avg_path_length > 1.0);
    CHECK(impact.max_path_length >= impact.avg_path_length);
  }

  TEST_CASE("single uplink failure is absorbed") {
    FailureSet f;
    f.links.push_back({0, 1});
    auto impact = inject_and_measure(small(), f);
    CHECK(impact.surviving_racks == 8);
    CHECK(impact.integrated_loss_fraction == 0.0);
  }

  TEST_CASE("dead tor removes its pairs from the population") {
    FailureSet f;
    f.tors.push_back(7);
    auto impact = inject_and_measure(small(), f);
    CHECK(impact.surviving_racks == 7);
    CHECK(impact.integrated_loss_fraction == 0.0);
  }

  TEST_CASE("three dead switches black out every slice") {
    FailureSet f;
    f.switches = {0, 1, 2};
    auto impact = inject_and_measure(small(), f);
    // Slices where switch 3 reconfigures have no circuits at all.
    CHECK(impact.worst_slice_disconnected_pairs == 56);
    CHECK(impact.integrated_loss_fraction == 1.0);
  }

  TEST_CASE("sweep points are seeded, nested and exported") {
    auto sched = small();
    auto sweep = failure_sweep(sched, FailureKind::Link, {0.0, 0.25}, {1, 2, 3});
    REQUIRE(sweep.size() == 2);
    CHECK(sweep[0].fraction == 0.0);
    CHECK(sweep[0].failed_count == 0);
    CHECK(sweep[0].mean_loss == 0.0);
    CHECK(sweep[1].failed_count == 8);  // quarter of 32 uplinks
    CHECK(sweep[1].mean_loss >= sweep[0].mean_loss);
    CHECK(sweep[1].max_loss >= sweep[1].mean_loss);

    auto again = failure_sweep(sched, FailureKind::Link, {0.0, 0.25}, {1, 2, 3});
    CHECK(again[1].mean_loss == sweep[1].mean_loss);

    std::string path = "sweep_test.tmp.csv";
    export_sweep_csv(sweep, path);
    auto rows = read_csv(path);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == "fraction");
    std::remove(path.c_str());
  }

  TEST_CASE("zero loss threshold picks the last silent fraction") {
    std::vector<SweepPoint> sweep(3);
    sweep[0] = {0.01, 1, 0.0, 0.0};
    sweep[1] = {0.02, 2, 0.0, 0.0};
    sweep[2] = {0.04, 4, 0.001, 0.01};
    CHECK(zero_loss_threshold(sweep) == doctest::Approx(0.02));
    sweep[2].mean_loss = 0;
    CHECK(zero_loss_threshold(sweep) == doctest::Approx(0.04));
  }

  TEST_CASE("ruleset size formula and inversion") {
    CHECK(ruleset_size(108, 6) == 12096);
    CHECK(ruleset_size(8, 4) == 8 * 7 + 8 * 3);
    CHECK(infer_uplinks(108, 12096) == 6);
    CHECK(infer_uplinks(252, 65268) == 9);
    CHECK(infer_uplinks(520, 276120) == 13);
    CHECK(infer_uplinks(768, 600576) == 16);
    CHECK(infer_uplinks(1008, 1032192) == 18);
    CHECK(infer_uplinks(1200, 1461600) == 20);
    CHECK_FALSE(infer_uplinks(108, 99999).has_value());
  }

  TEST_CASE("random-matching union gap baseline is stable and sane") {
    double g1 = expander_baseline_gap(5, 108, 20, 7);
    double g2 = expander_baseline_gap(5, 108, 20, 7);
    CHECK(g1 == g2);
    CHECK(g1 > 0.3);
    CHECK(g1 < 2.5);
  }
}
