#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace opera {

// One circuit configuration: a symmetric permutation of racks, stored as
// disjoint unordered pairs plus the racks mapped to themselves. A rack with
// a fixed point has no circuit in this configuration (its port points back
// at itself, carrying nothing).
struct Matching {
  std::vector<std::pair<int, int>> pairs;  // normalized a < b, sorted
  std::vector<int> fixed_points;           // sorted

  static Matching identity(int num_racks);

  void normalize();
  bool operator==(const Matching& other) const = default;

  // Number of racks this matching touches (each exactly once if valid).
  int touched() const {
    return static_cast<int>(2 * pairs.size() + fixed_points.size());
  }

  // Peer of rack r: the paired rack, r itself for a fixed point,
  // nullopt if r does not appear.
  std::optional<int> peer_of(int r) const;

  // Involution check: every rack in [0, num_racks) appears exactly once.
  bool is_valid(int num_racks) const;
};

}  // namespace opera
