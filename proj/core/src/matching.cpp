#include "opera/matching.hpp"

#include <algorithm>

namespace opera {

Matching Matching::identity(int num_racks) {
  Matching m;
  m.fixed_points.resize(num_racks);
  for (int i = 0; i < num_racks; ++i) m.fixed_points[i] = i;
  return m;
}

void Matching::normalize() {
  for (auto& p : pairs) {
    if (p.first > p.second) std::swap(p.first, p.second);
  }
  std::sort(pairs.begin(), pairs.end());
  std::sort(fixed_points.begin(), fixed_points.end());
}

std::optional<int> Matching::peer_of(int r) const {
  for (const auto& p : pairs) {
    if (p.first == r) return p.second;
    if (p.second == r) return p.first;
  }
  for (int f : fixed_points) {
    if (f == r) return r;
  }
  return std::nullopt;
}

bool Matching::is_valid(int num_racks) const {
  std::vector<int> seen(num_racks, 0);
  for (const auto& p : pairs) {
    if (p.first < 0 || p.first >= num_racks) return false;
    if (p.second < 0 || p.second >= num_racks) return false;
    if (p.first == p.second) return false;  // self pair must be a fixed point
    seen[p.first]++;
    seen[p.second]++;
  }
  for (int f : fixed_points) {
    if (f < 0 || f >= num_racks) return false;
    seen[f]++;
  }
  for (int r = 0; r < num_racks; ++r) {
    if (seen[r] != 1) return false;
  }
  return true;
}

}  // namespace opera
