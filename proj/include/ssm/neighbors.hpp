#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "ssm/cloud.hpp"
#include "ssm/mass.hpp"

namespace ssm {

inline constexpr double kDefaultTieTol = 1e-12;
// Candidate values this close (relative) to the extreme count as equal.
inline constexpr double kDefaultNearTol = 1e-12;

/// Uniform grid over the bounding box of a cloud. Cell coordinates are
/// floor((x - lower) / cell_size), clamped to the box so boundary points fall
/// into the last cell.
struct SpatialIndex {
  double cell_size = 0.0;
  std::size_t dim = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<long long> cells_per_axis;
  std::map<std::vector<long long>, std::vector<std::size_t>> buckets;

  std::vector<long long> cell_of(const double* x) const;
};

SpatialIndex build_index(const PointCloud& cloud, double cell_size);

struct DistanceRecord {
  std::size_t partner_index = 0;
  double dist = 0.0;
  double partner_weight = 0.0;
};

/// Partners whose distances chain together within the tie tolerance.
struct TieGroup {
  double dist = 0.0;  // smallest member distance
  std::vector<DistanceRecord> members;
  Mass mass;

  double weight() const { return mass.to_double(); }
};

/// True when d_next continues a tie chain whose previous distance is d_prev.
inline bool ties_with(double d_prev, double d_next, double tie_tol) {
  return d_next - d_prev <= tie_tol * (d_next > 1.0 ? d_next : 1.0);
}

/// Partners y != x with d_lo <= |x - y| <= d_hi, sorted by distance then by
/// index, grouped into ties.
std::vector<TieGroup> ranked_distances(const SpatialIndex& index, const PointCloud& cloud,
                                       std::size_t center, double d_lo, double d_hi,
                                       double tie_tol = kDefaultTieTol);

/// Mass of the groups strictly before group j.
double cumulative_mass_below(const std::vector<TieGroup>& ranked, std::size_t j);

/// Bounding balls of all code-prefix cylinders of a cloud, level by level.
/// Node j at level l covers points [j * span(l), (j + 1) * span(l)).
class CylinderTree {
 public:
  explicit CylinderTree(const PointCloud& cloud);

  int depth() const { return depth_; }
  std::size_t alphabet() const { return m_; }
  std::size_t count(int level) const { return counts_[level]; }
  std::size_t span(int level) const { return spans_[level]; }
  std::size_t node(int level, std::size_t j) const { return offsets_[level] + j; }

  const double* center(std::size_t node) const { return centers_.data() + node * dim_; }
  double radius(std::size_t node) const { return radii_[node]; }
  const Mass& mass(std::size_t node) const { return masses_[node]; }
  double mass_value(std::size_t node) const { return mass_values_[node]; }

 private:
  int depth_ = 0;
  std::size_t m_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> spans_;
  std::vector<std::size_t> offsets_;
  std::vector<double> centers_;
  std::vector<double> radii_;
  std::vector<Mass> masses_;
  std::vector<double> mass_values_;
};

}  // namespace ssm
