#pragma once

#include <cstddef>

#include "ssm/estimate.hpp"
#include "ssm/ifs.hpp"

namespace ssm::oracle {

inline constexpr std::size_t kMaxPoints = 10'000;

/// Literal evaluation over all of A_k x A_k. Single-threaded.
MeasureEstimate brute_packing(const IFSystem& system, int k);
MeasureEstimate brute_centered(const IFSystem& system, int k);

}  // namespace ssm::oracle
