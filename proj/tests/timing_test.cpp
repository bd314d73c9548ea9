#include <doctest.h>

#include "opera/timing.hpp"

using namespace opera;

TEST_SUITE("timing") {
  TEST_CASE("default drain bound comes out just under 100 microseconds") {
    TimingParams p;  // 10G, 1500B MTU, 64B headers, 8 data + 187 header slots
    auto e = compute_epsilon(p);
    // Per hop: full queue drain (own slot included) plus propagation.
    // queue = 8*1500 + 187*64 = 23968 B -> 19.1744us, +1.2us own slot
    // folds into the queue total, +0.5us prop = 19.6744us. Five hops.
    CHECK(e.per_hop_s == doctest::Approx(19.6744e-6).epsilon(1e-9));
    CHECK(e.total_s == doctest::Approx(98.372e-6).epsilon(1e-9));
    CHECK(e.queue_drain_s + e.serialization_s ==
          doctest::Approx(23968 * 8.0 / 10e9).epsilon(1e-12));
  }

  TEST_CASE("single hop with a bare one-packet queue is one slot plus prop") {
    TimingParams p;
    p.worst_case_hops = 1;
    p.queue_capacity_bytes = p.mtu_bytes;  // nothing ahead of the packet
    p.prop_delay_per_hop = 0;
    auto e = compute_epsilon(p);
    CHECK(e.queue_drain_s == doctest::Approx(0.0));
    CHECK(e.total_s == doctest::Approx(1500 * 8.0 / 10e9).epsilon(1e-12));
  }

  TEST_CASE("epsilon scales linearly in hop count") {
    TimingParams p;
    auto e1 = compute_epsilon(p);
    p.worst_case_hops = 10;
    auto e2 = compute_epsilon(p);
    CHECK(e2.total_s == doctest::Approx(2 * e1.total_s).epsilon(1e-12));
    CHECK(e2.per_hop_s == doctest::Approx(e1.per_hop_s).epsilon(1e-12));
  }

  TEST_CASE("validate_timing rejects nonsense") {
    TimingParams p;
    p.link_rate = 0;
    CHECK_THROWS(validate_timing(p));
    p = TimingParams{};
    p.mtu_bytes = 0;
    CHECK_THROWS(validate_timing(p));
    p = TimingParams{};
    p.queue_capacity_bytes = p.mtu_bytes - 1;  // cannot even hold one packet
    CHECK_THROWS(validate_timing(p));
    p = TimingParams{};
    p.worst_case_hops = 0;
    CHECK_THROWS(validate_timing(p));
    p = TimingParams{};
    p.reconfiguration_delay = -1;
    CHECK_THROWS(validate_timing(p));
    p = TimingParams{};
    CHECK_NOTHROW(validate_timing(p));
  }
}
