#include "ssm/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssm/error.hpp"

namespace ssm {

std::vector<long long> SpatialIndex::cell_of(const double* x) const {
  std::vector<long long> cell(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    auto c = static_cast<long long>(std::floor((x[d] - lower[d]) / cell_size));
    cell[d] = std::clamp(c, 0LL, cells_per_axis[d] - 1);
  }
  return cell;
}

SpatialIndex build_index(const PointCloud& cloud, double cell_size) {
  if (!(cell_size > 0.0)) throw Error(ErrorCode::IndexOutOfRange, "cell_size must be positive");
  SpatialIndex idx;
  idx.cell_size = cell_size;
  idx.dim = cloud.dim;
  idx.lower.assign(cloud.dim, std::numeric_limits<double>::infinity());
  idx.upper.assign(cloud.dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t d = 0; d < cloud.dim; ++d) {
      idx.lower[d] = std::min(idx.lower[d], cloud.point(i)[d]);
      idx.upper[d] = std::max(idx.upper[d], cloud.point(i)[d]);
    }
  }
  idx.cells_per_axis.resize(cloud.dim);
  for (std::size_t d = 0; d < cloud.dim; ++d) {
    const double cells = std::ceil((idx.upper[d] - idx.lower[d]) / cell_size);
    idx.cells_per_axis[d] = std::max(1LL, static_cast<long long>(cells));
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) idx.buckets[idx.cell_of(cloud.point(i))].push_back(i);
  return idx;
}

namespace {

// Nearest and farthest distance from x to the box of a cell.
std::pair<double, double> cell_distance_range(const SpatialIndex& idx, const std::vector<long long>& cell,
                                              const double* x) {
  double near = 0.0;
  double far = 0.0;
  for (std::size_t d = 0; d < idx.dim; ++d) {
    const double lo = idx.lower[d] + static_cast<double>(cell[d]) * idx.cell_size;
    double hi = lo + idx.cell_size;
    if (cell[d] == idx.cells_per_axis[d] - 1) hi = std::max(hi, idx.upper[d]);
    const double below = lo - x[d];
    const double above = x[d] - hi;
    const double gap = std::max({below, above, 0.0});
    const double span = std::max(std::abs(x[d] - lo), std::abs(x[d] - hi));
    near += gap * gap;
    far += span * span;
  }
  return {std::sqrt(near), std::sqrt(far)};
}

}  // namespace

std::vector<TieGroup> ranked_distances(const SpatialIndex& index, const PointCloud& cloud,
                                       std::size_t center, double d_lo, double d_hi, double tie_tol) {
  if (center >= cloud.size()) throw Error(ErrorCode::IndexOutOfRange, "center index out of range");
  const double* x = cloud.point(center);
  const double slack = 1e-9 * std::max(1.0, d_hi);
  std::vector<std::pair<double, std::size_t>> hits;
  auto scan_bucket = [&](const std::vector<long long>& cell, const std::vector<std::size_t>& members) {
    const auto [near, far] = cell_distance_range(index, cell, x);
    if (near > d_hi + slack || far + slack < d_lo) return;
    for (std::size_t j : members) {
      if (j == center) continue;
      const double d = distance(cloud, center, j);
      if (d >= d_lo && d <= d_hi) hits.emplace_back(d, j);
    }
  };

  // Walk the cells covering the ball of radius d_hi, or all buckets if that is fewer.
  std::vector<long long> lo_cell(index.dim);
  std::vector<long long> hi_cell(index.dim);
  double box_cells = 1.0;
  for (std::size_t d = 0; d < index.dim; ++d) {
    const auto a = static_cast<long long>(std::floor((x[d] - d_hi - index.lower[d]) / index.cell_size)) - 1;
    const auto b = static_cast<long long>(std::floor((x[d] + d_hi - index.lower[d]) / index.cell_size)) + 1;
    lo_cell[d] = std::max(a, 0LL);
    hi_cell[d] = std::min(b, index.cells_per_axis[d] - 1);
    box_cells *= static_cast<double>(std::max(0LL, hi_cell[d] - lo_cell[d] + 1));
  }
  if (box_cells >= static_cast<double>(index.buckets.size())) {
    for (const auto& [cell, members] : index.buckets) scan_bucket(cell, members);
  } else if (box_cells > 0.0) {
    std::vector<long long> cell = lo_cell;
    while (true) {
      if (auto it = index.buckets.find(cell); it != index.buckets.end()) scan_bucket(cell, it->second);
      std::size_t d = 0;
      while (d < index.dim && ++cell[d] > hi_cell[d]) {
        cell[d] = lo_cell[d];
        ++d;
      }
      if (d == index.dim) break;
    }
  }

  std::sort(hits.begin(), hits.end(), [&](const auto& a, const auto& b) {
    return a < b;
  });
  std::vector<TieGroup> groups;
  double prev = 0.0;
  for (const auto& [d, j] : hits) {
    if (groups.empty() || !ties_with(prev, d, tie_tol)) {
      groups.emplace_back();
      groups.back().dist = d;
    }
    groups.back().members.push_back({j, d, cloud.weights[j]});
    groups.back().mass += cloud.masses[j];
    prev = d;
  }
  return groups;
}

double cumulative_mass_below(const std::vector<TieGroup>& ranked, std::size_t j) {
  if (j >= ranked.size()) throw Error(ErrorCode::IndexOutOfRange, "tie group index out of range");
  Mass acc;
  for (std::size_t g = 0; g < j; ++g) acc += ranked[g].mass;
  return acc.to_double();
}

CylinderTree::CylinderTree(const PointCloud& cloud)
    : depth_(cloud.level), m_(cloud.alphabet), dim_(cloud.dim) {
  counts_.resize(depth_ + 1);
  spans_.resize(depth_ + 1);
  offsets_.resize(depth_ + 1);
  std::size_t c = 1;
  std::size_t total = 0;
  for (int l = 0; l <= depth_; ++l) {
    counts_[l] = c;
    spans_[l] = cloud.size() / c;
    offsets_[l] = total;
    total += c;
    c *= m_;
  }
  centers_.resize(total * dim_);
  radii_.assign(total, 0.0);
  masses_.resize(total);
  mass_values_.resize(total);
  std::vector<double> box_lo(total * dim_);
  std::vector<double> box_hi(total * dim_);

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const std::size_t nd = node(depth_, i);
    for (std::size_t d = 0; d < dim_; ++d) {
      centers_[nd * dim_ + d] = cloud.point(i)[d];
      box_lo[nd * dim_ + d] = cloud.point(i)[d];
      box_hi[nd * dim_ + d] = cloud.point(i)[d];
    }
    masses_[nd] = cloud.masses[i];
  }
  for (int l = depth_ - 1; l >= 0; --l) {
    for (std::size_t j = 0; j < counts_[l]; ++j) {
      const std::size_t nd = node(l, j);
      Mass acc;
      for (std::size_t d = 0; d < dim_; ++d) {
        box_lo[nd * dim_ + d] = std::numeric_limits<double>::infinity();
        box_hi[nd * dim_ + d] = -std::numeric_limits<double>::infinity();
      }
      for (std::size_t ch = 0; ch < m_; ++ch) {
        const std::size_t kid = node(l + 1, j * m_ + ch);
        acc += masses_[kid];
        for (std::size_t d = 0; d < dim_; ++d) {
          box_lo[nd * dim_ + d] = std::min(box_lo[nd * dim_ + d], box_lo[kid * dim_ + d]);
          box_hi[nd * dim_ + d] = std::max(box_hi[nd * dim_ + d], box_hi[kid * dim_ + d]);
        }
      }
      masses_[nd] = acc;
      for (std::size_t d = 0; d < dim_; ++d) {
        centers_[nd * dim_ + d] = 0.5 * (box_lo[nd * dim_ + d] + box_hi[nd * dim_ + d]);
      }
      double rad = 0.0;
      const double* ctr = center(nd);
      for (std::size_t i = j * spans_[l]; i < (j + 1) * spans_[l]; ++i) {
        double acc2 = 0.0;
        for (std::size_t d = 0; d < dim_; ++d) {
          const double diff = cloud.point(i)[d] - ctr[d];
          acc2 += diff * diff;
        }
        rad = std::max(rad, std::sqrt(acc2));
      }
      radii_[nd] = rad * (1.0 + 1e-12) + 1e-15;
    }
  }
  for (std::size_t nd = 0; nd < total; ++nd) mass_values_[nd] = masses_[nd].to_double();
}

}  // namespace ssm
