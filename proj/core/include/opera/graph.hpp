#pragma once

#include <cstdint>
#include <vector>

namespace opera {

// Undirected multigraph on [0, n). Parallel edges are kept (they matter
// for capacity and spectral weight) but BFS naturally ignores duplicates.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : adj_(n) {}

  int size() const { return static_cast<int>(adj_.size()); }
  void add_edge(int a, int b) {
    adj_[a].push_back(b);
    adj_[b].push_back(a);
    ++edges_;
  }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  long num_edges() const { return edges_; }

  // -1 for unreachable vertices.
  std::vector<int> bfs_dist(int src) const;
  bool connected() const;
  std::vector<int> component_ids() const;  // per-vertex component index

 private:
  std::vector<std::vector<int>> adj_;
  long edges_ = 0;
};

struct PathStats {
  bool connected = false;
  int diameter = -1;            // over reachable ordered pairs
  double avg_path_length = 0;   // over reachable ordered pairs, src != dst
  std::vector<long> hop_histogram;  // index = hops, ordered pairs
  long unreachable_pairs = 0;   // ordered, src != dst
};

PathStats all_pairs_path_stats(const Graph& g);

// Second-largest adjacency eigenvalue by magnitude and the average degree.
// The gap d_avg - |lambda_2| is the expansion figure of merit; self-loops
// are expected to be stripped before building the graph.
struct SpectralInfo {
  double avg_degree = 0;
  double lambda2_abs = 0;
  double gap() const { return avg_degree - lambda2_abs; }
};

SpectralInfo spectral_info(const Graph& g);

}  // namespace opera
