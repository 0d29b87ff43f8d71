#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ssm/ifs.hpp"
#include "ssm/mass.hpp"

namespace ssm {

inline constexpr std::size_t kDefaultPointBudget = 2'000'000;

/// The point set A_k with its code words and masses.
///
/// Point i has the code word whose base-m digits (most significant first) are
/// the digits of i, so points are in lexicographic code order and every code
/// prefix is a contiguous index range. order_keys hold the construction order
/// of A_k = S(A_{k-1}), which reads the code last letter first.
struct PointCloud {
  int level = 0;
  std::size_t dim = 0;
  std::size_t alphabet = 0;
  std::vector<double> coords;  // size() * dim
  std::vector<double> weights;
  std::vector<Mass> masses;
  std::vector<std::uint64_t> order_keys;
  std::vector<std::uint16_t> first_letters;  // 0-based

  std::size_t size() const { return weights.size(); }
  const double* point(std::size_t i) const { return coords.data() + i * dim; }

  /// Code word with letters 1..m.
  std::vector<int> code(std::size_t i) const;
};

PointCloud fixed_points(const IFSystem& system);
PointCloud extend_cloud(const IFSystem& system, const PointCloud& cloud,
                        std::size_t budget = kDefaultPointBudget);
PointCloud build_cloud(const IFSystem& system, int k, std::size_t budget = kDefaultPointBudget);

/// Total mass of points whose code starts with the prefix (letters 1..m).
double mass_of_code_prefix(const PointCloud& cloud, const std::vector<int>& prefix);

inline double distance(const PointCloud& cloud, std::size_t i, std::size_t j) {
  const double* a = cloud.point(i);
  const double* b = cloud.point(j);
  double acc = 0.0;
  for (std::size_t d = 0; d < cloud.dim; ++d) {
    const double diff = a[d] - b[d];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

std::string format_code(const std::vector<int>& code, std::size_t alphabet);

void write_cloud_csv(std::ostream& out, const PointCloud& cloud);

}  // namespace ssm
