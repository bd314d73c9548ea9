#include "opera/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <Eigen/Dense>

namespace opera {

std::vector<int> Graph::bfs_dist(int src) const {
  std::vector<int> dist(size(), -1);
  std::vector<int> frontier{src};
  dist[src] = 0;
  std::vector<int> next;
  int d = 0;
  while (!frontier.empty()) {
    next.clear();
    ++d;
    for (int v : frontier) {
      for (int w : adj_[v]) {
        if (dist[w] < 0) {
          dist[w] = d;
          next.push_back(w);
        }
      }
    }
    frontier.swap(next);
  }
  return dist;
}

bool Graph::connected() const {
  if (size() == 0) return true;
  auto dist = bfs_dist(0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

std::vector<int> Graph::component_ids() const {
  std::vector<int> comp(size(), -1);
  int next_id = 0;
  for (int v = 0; v < size(); ++v) {
    if (comp[v] >= 0) continue;
    comp[v] = next_id;
    std::vector<int> stack{v};
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int w : adj_[x]) {
        if (comp[w] < 0) {
          comp[w] = next_id;
          stack.push_back(w);
        }
      }
    }
    ++next_id;
  }
  return comp;
}

PathStats all_pairs_path_stats(const Graph& g) {
  PathStats st;
  int n = g.size();
  long reachable = 0;
  double total = 0;
  for (int s = 0; s < n; ++s) {
    auto dist = g.bfs_dist(s);
    for (int t = 0; t < n; ++t) {
      if (t == s) continue;
      if (dist[t] < 0) {
        ++st.unreachable_pairs;
        continue;
      }
      ++reachable;
      total += dist[t];
      st.diameter = std::max(st.diameter, dist[t]);
      if (static_cast<size_t>(dist[t]) >= st.hop_histogram.size())
        st.hop_histogram.resize(dist[t] + 1, 0);
      st.hop_histogram[dist[t]]++;
    }
  }
  st.connected = st.unreachable_pairs == 0 && n > 0;
  st.avg_path_length = reachable > 0 ? total / reachable : 0;
  return st;
}

SpectralInfo spectral_info(const Graph& g) {
  SpectralInfo info;
  int n = g.size();
  if (n == 0) return info;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  long deg_total = 0;
  for (int v = 0; v < n; ++v) {
    for (int w : g.neighbors(v)) {
      if (w == v) continue;  // ignore self loops for expansion purposes
      a(v, w) += 0.5;        // each edge visits both endpoints
      a(w, v) += 0.5;
      ++deg_total;
    }
  }
  info.avg_degree = static_cast<double>(deg_total) / n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();  // ascending
  double lead = 0, second = 0;
  for (int i = 0; i < ev.size(); ++i) {
    double v = std::abs(ev[i]);
    if (v > lead) {
      second = lead;
      lead = v;
    } else if (v > second) {
      second = v;
    }
  }
  info.lambda2_abs = second;
  return info;
}

}  // namespace opera
