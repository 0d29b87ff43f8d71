#include "ssm/packing.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "search.hpp"
#include "ssm/cloud.hpp"
#include "ssm/error.hpp"
#include "ssm/neighbors.hpp"

namespace ssm {

PackingBound packing_error_bound(const DerivedConstants& dc, int k) {
  if (k < 1 || !window_feasible(dc, k)) {
    throw Error(ErrorCode::WindowInfeasible, "packing window is empty at k=" + std::to_string(k));
  }
  const double R = dc.R_hi;
  const double r = dc.r_max;
  const double rk = std::pow(r, k);
  const double rk1 = std::pow(r, k + 1);
  PackingBound out;
  out.inputs.window_lo = dc.c_lo - 2.0 * R * rk - 2.0 * R * rk1;
  out.inputs.window_hi = dc.c_hi / dc.r_min;

  // Smallest q with R r^q <= c - 2R r^{k+1} - 2R r^k.
  const double target = dc.c_lo - 2.0 * R * rk1 - 2.0 * R * rk;
  int q = 1;
  double t = R * r;
  while (t > target) {
    t *= r;
    ++q;
  }
  out.inputs.q_k = q;
  out.inputs.Q = dc.s >= 1.0 ? std::pow(dc.c_hi / dc.r_min, dc.s - 1.0) : std::pow(target, dc.s - 1.0);
  out.epsilon = dc.s * std::pow(2.0, dc.s + 1.0) * R * out.inputs.Q * rk /
                std::pow(dc.r_min, dc.s * q);
  return out;
}

PackingBound packing_error_bound(const IFSystem& system, int k) {
  return packing_error_bound(derive_constants(system), k);
}

MeasureEstimate estimate_packing(const IFSystem& system, const DerivedConstants& dc, int k,
                                 const EstimateOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const PackingBound bound = packing_error_bound(dc, k);
  const PointCloud cloud = build_cloud(system, k, opts.budget);
  const CylinderTree tree(cloud);
  detail::SearchSpec spec;
  spec.objective = detail::Objective::Maximize;
  spec.s = dc.s;
  spec.window_lo = bound.inputs.window_lo;
  spec.window_hi = bound.inputs.window_hi;
  spec.cross_floor = dc.c_lo;
  spec.tie_tol = opts.tie_tol;
  spec.near_tol = opts.near_tol;
  spec.threads = resolve_threads(opts.threads);
  const detail::Witness w = detail::run_search(cloud, tree, spec);
  if (!w.found) {
    throw Error(ErrorCode::WindowInfeasible, "no admissible distance at k=" + std::to_string(k));
  }
  MeasureEstimate est = witness_estimate(MeasureKind::Packing, cloud, dc.s, w.center, w.partner,
                                         w.radius, w.mass.to_double(), w.value);
  attach_bound(est, bound.epsilon, bound.inputs.q_k, bound.inputs.Q);
  est.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return est;
}

MeasureEstimate estimate_packing(const IFSystem& system, int k, const EstimateOptions& opts) {
  return estimate_packing(system, derive_constants(system), k, opts);
}

std::optional<int> detect_stabilization(const std::vector<std::pair<int, double>>& values) {
  if (values.size() < 2) return std::nullopt;
  auto fmt = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.14f", v);
    return std::string(buf);
  };
  const std::string last = fmt(values.back().second);
  if (fmt(values[values.size() - 2].second) != last) return std::nullopt;
  std::size_t i = values.size() - 1;
  while (i > 0 && fmt(values[i - 1].second) == last) --i;
  return values[i].first;
}

}  // namespace ssm
