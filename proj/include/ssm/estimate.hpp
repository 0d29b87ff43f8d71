#pragma once

#include <cstddef>
#include <vector>

#include "ssm/cloud.hpp"
#include "ssm/neighbors.hpp"

namespace ssm {

enum class MeasureKind { Packing, CenteredHausdorff };

const char* kind_name(MeasureKind kind);

struct MeasureEstimate {
  MeasureKind kind = MeasureKind::Packing;
  int level = 0;
  double s = 0.0;
  double value = 0.0;
  std::vector<double> witness_center;
  std::vector<int> center_code;
  std::vector<double> witness_partner;
  std::vector<int> partner_code;
  double witness_radius = 0.0;
  double witness_mass = 0.0;
  double epsilon = 0.0;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
  int q = 0;
  double Q = 0.0;
  double elapsed_ms = 0.0;
};

struct EstimateOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  std::size_t budget = kDefaultPointBudget;
  double tie_tol = kDefaultTieTol;
  double near_tol = kDefaultNearTol;
};

unsigned resolve_threads(unsigned requested);

/// Fills value, witness fields and codes from a witness pair of the cloud.
MeasureEstimate witness_estimate(MeasureKind kind, const PointCloud& cloud, double s,
                                 std::size_t center, std::size_t partner, double radius,
                                 double mass, double value);

/// Sets epsilon and the interval value -/+ epsilon.
void attach_bound(MeasureEstimate& est, double epsilon, int q, double Q);

}  // namespace ssm
