#pragma once

#include <vector>

namespace sslmseg {

/// Sorted boundary instants in seconds.
struct BoundarySet {
  std::vector<double> times;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }

  /// Sorts and removes duplicates closer than 1e-9 s.
  static BoundarySet from_unsorted(std::vector<double> times);
  bool is_canonical() const;

  friend bool operator==(const BoundarySet&, const BoundarySet&) = default;
};

}  // namespace sslmseg
