#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "ssm/cloud.hpp"
#include "ssm/mass.hpp"
#include "ssm/neighbors.hpp"

namespace ssm::detail {

enum class Objective { Maximize, Minimize };

/// Packing (Maximize): open-ball mass, representative distance restricted to
/// [window_lo, window_hi]. Centered (Minimize): closed-ball mass, groups from
/// the first one holding a partner in another basic cylinder.
struct SearchSpec {
  Objective objective = Objective::Maximize;
  double s = 1.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double cross_floor = 0.0;  // lower bound on distances across basic cylinders
  double tie_tol = kDefaultTieTol;
  double near_tol = kDefaultNearTol;
  unsigned threads = 1;
};

struct Witness {
  bool found = false;
  double value = 0.0;
  std::size_t center = 0;
  std::size_t partner = 0;
  double radius = 0.0;
  Mass mass;
  std::uint64_t center_key = 0;
  std::uint64_t partner_key = 0;
};

/// True when v is within the near-tie band of the extreme value m.
inline bool in_band(double v, double m, double near_tol, Objective obj) {
  const double slack = near_tol * std::abs(m);
  return obj == Objective::Maximize ? v >= m - slack : v <= m + slack;
}

/// Among near-tied candidates: smaller center construction key, then smaller
/// partner index.
inline bool key_less(const Witness& a, const Witness& b) {
  if (a.center_key != b.center_key) return a.center_key < b.center_key;
  return a.partner_key < b.partner_key;
}

/// Returns the key-smallest candidate inside the near-tie band of the extreme
/// value, with its own value.
Witness run_search(const PointCloud& cloud, const CylinderTree& tree, const SearchSpec& spec);

}  // namespace ssm::detail
