#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "opera/csv.hpp"
#include "opera/graph.hpp"

using namespace opera;

TEST_SUITE("csv") {
  TEST_CASE("split handles empty cells and carriage returns") {
    auto c = split_csv_line("a,b,,d\r");
    REQUIRE(c.size() == 4);
    CHECK(c[0] == "a");
    CHECK(c[2] == "");
    CHECK(c[3] == "d");
    CHECK(split_csv_line("").size() == 1);
  }

  TEST_CASE("writer and reader round trip") {
    std::string path = "csv_roundtrip_test.tmp.csv";
    {
      CsvWriter w(path);
      w.row({"x", "y"});
      w.row({"1", "2.5"});
      w.row({"3", fmt_double(1.0 / 3.0)});
    }
    auto rows = read_csv(path);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][1] == "y");
    CHECK(rows[2][1] == fmt_double(1.0 / 3.0));
    std::remove(path.c_str());
  }

  TEST_CASE("fmt_double is stable and round-trippable at 9 digits") {
    CHECK(fmt_double(0.1) == "0.1");
    CHECK(fmt_double(98.372e-6) == fmt_double(98.372e-6));
    CHECK(std::stod(fmt_double(3.14159265358979)) == doctest::Approx(3.14159265));
  }

  TEST_CASE("read_csv throws on a missing file") {
    CHECK_THROWS(read_csv("definitely_not_here.csv"));
  }
}

TEST_SUITE("graph") {
  TEST_CASE("8-cycle path stats") {
    Graph g(8);
    for (int i = 0; i < 8; ++i) g.add_edge(i, (i + 1) % 8);
    auto st = all_pairs_path_stats(g);
    CHECK(st.connected);
    CHECK(st.diameter == 4);
    // Distances from any vertex: 1,1,2,2,3,3,4 -> mean 16/7.
    CHECK(st.avg_path_length == doctest::Approx(16.0 / 7.0));
    CHECK(st.unreachable_pairs == 0);
    CHECK(st.hop_histogram.at(1) == 16);  // ordered pairs
    CHECK(st.hop_histogram.at(4) == 8);
  }

  TEST_CASE("disconnected graph reports unreachable pairs") {
    Graph g(4);
    g.add_edge(0, 1);
    g.add_edge(2, 3);
    auto st = all_pairs_path_stats(g);
    CHECK_FALSE(st.connected);
    CHECK(st.unreachable_pairs == 8);  // ordered cross pairs
  }

  TEST_CASE("bfs distances on a path graph") {
    Graph g(5);
    for (int i = 0; i < 4; ++i) g.add_edge(i, i + 1);
    auto d = g.bfs_dist(0);
    CHECK(d[4] == 4);
    CHECK(d[0] == 0);
  }

  TEST_CASE("component ids partition the vertex set") {
    Graph g(6);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(4, 5);
    auto ids = g.component_ids();
    CHECK(ids[0] == ids[2]);
    CHECK(ids[4] == ids[5]);
    CHECK(ids[0] != ids[3]);
    CHECK(ids[3] != ids[4]);
  }

  TEST_CASE("complete graph spectral gap is the full degree") {
    // K8: adjacency eigenvalues are 7 and -1, so degree - |lambda2| = 6.
    Graph g(8);
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j) g.add_edge(i, j);
    auto sp = spectral_info(g);
    CHECK(sp.avg_degree == doctest::Approx(7.0));
    CHECK(sp.lambda2_abs == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sp.gap() == doctest::Approx(6.0).epsilon(1e-6));
  }

  TEST_CASE("bipartite cycle has zero absolute spectral gap") {
    // C8 adjacency spectrum is symmetric about zero, so the second-largest
    // absolute eigenvalue equals the degree and the expansion gap vanishes.
    Graph g(8);
    for (int i = 0; i < 8; ++i) g.add_edge(i, (i + 1) % 8);
    auto sp = spectral_info(g);
    CHECK(sp.lambda2_abs == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(sp.gap() == doctest::Approx(0.0).epsilon(1e-6));
  }

  TEST_CASE("petersen graph spectral gap is exactly one") {
    // Eigenvalues 3, 1 (x5), -2 (x4): second-largest absolute value is 2.
    Graph g(10);
    for (int i = 0; i < 5; ++i) {
      g.add_edge(i, (i + 1) % 5);          // outer cycle
      g.add_edge(5 + i, 5 + (i + 2) % 5);  // inner pentagram
      g.add_edge(i, 5 + i);                // spokes
    }
    auto sp = spectral_info(g);
    CHECK(sp.avg_degree == doctest::Approx(3.0));
    CHECK(sp.lambda2_abs == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(sp.gap() == doctest::Approx(1.0).epsilon(1e-6));
  }
}
