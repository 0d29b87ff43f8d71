#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ssm/estimate.hpp"
#include "ssm/ifs.hpp"

namespace ssm {

struct ErrorBoundInputs {
  int q_k = 0;
  double Q = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

struct PackingBound {
  double epsilon = 0.0;
  ErrorBoundInputs inputs;
};

PackingBound packing_error_bound(const DerivedConstants& dc, int k);
PackingBound packing_error_bound(const IFSystem& system, int k);

MeasureEstimate estimate_packing(const IFSystem& system, const DerivedConstants& dc, int k,
                                 const EstimateOptions& opts = {});
MeasureEstimate estimate_packing(const IFSystem& system, int k, const EstimateOptions& opts = {});

/// First level from which every value agrees to 14 decimals; none when the
/// last two differ. Input is (k, value), ascending in k.
std::optional<int> detect_stabilization(const std::vector<std::pair<int, double>>& values);

}  // namespace ssm
