#pragma once

#include <cstddef>
#include <vector>

#include "ssm/estimate.hpp"
#include "ssm/ifs.hpp"
#include "ssm/neighbors.hpp"

namespace ssm {

struct CenteredBoundInputs {
  int q = 0;
  double Qc = 0.0;
};

struct CenteredBound {
  double epsilon = 0.0;
  CenteredBoundInputs inputs;
};

CenteredBound centered_error_bound(const DerivedConstants& dc, int k);
CenteredBound centered_error_bound(const IFSystem& system, int k);

/// Index of the first tie group holding a partner whose code starts with a
/// different letter than the center's.
std::size_t first_admissible_index(const std::vector<TieGroup>& ranked, const PointCloud& cloud,
                                   std::size_t center);

MeasureEstimate estimate_centered(const IFSystem& system, const DerivedConstants& dc, int k,
                                  const EstimateOptions& opts = {});
MeasureEstimate estimate_centered(const IFSystem& system, int k, const EstimateOptions& opts = {});

}  // namespace ssm
