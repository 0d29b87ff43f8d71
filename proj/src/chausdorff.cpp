#include "ssm/chausdorff.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "search.hpp"
#include "ssm/cloud.hpp"
#include "ssm/error.hpp"

namespace ssm {

CenteredBound centered_error_bound(const DerivedConstants& dc, int k) {
  const double R = dc.R_hi;
  const double r = dc.r_max;
  // Smallest q with R r^q <= c.
  int q = 1;
  double t = R * r;
  while (t > dc.c_lo) {
    t *= r;
    ++q;
  }
  CenteredBound out;
  out.inputs.q = q;
  out.inputs.Qc = dc.s >= 1.0 ? std::pow(R, dc.s - 1.0) : std::pow(dc.c_lo, dc.s - 1.0);
  out.epsilon = dc.s * std::pow(2.0, dc.s + 1.0) * R * out.inputs.Qc * std::pow(r, k) /
                std::pow(dc.r_min, q * dc.s);
  return out;
}

CenteredBound centered_error_bound(const IFSystem& system, int k) {
  return centered_error_bound(derive_constants(system), k);
}

std::size_t first_admissible_index(const std::vector<TieGroup>& ranked, const PointCloud& cloud,
                                   std::size_t center) {
  const auto fx = cloud.first_letters.at(center);
  for (std::size_t j = 0; j < ranked.size(); ++j) {
    for (const auto& rec : ranked[j].members) {
      if (cloud.first_letters[rec.partner_index] != fx) return j;
    }
  }
  throw Error(ErrorCode::NoAdmissible, "no partner outside the center's basic cylinder");
}

MeasureEstimate estimate_centered(const IFSystem& system, const DerivedConstants& dc, int k,
                                  const EstimateOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const CenteredBound bound = centered_error_bound(dc, k);
  const PointCloud cloud = build_cloud(system, k, opts.budget);
  const CylinderTree tree(cloud);
  detail::SearchSpec spec;
  spec.objective = detail::Objective::Minimize;
  spec.s = dc.s;
  spec.cross_floor = dc.c_lo;
  spec.tie_tol = opts.tie_tol;
  spec.near_tol = opts.near_tol;
  spec.threads = resolve_threads(opts.threads);
  const detail::Witness w = detail::run_search(cloud, tree, spec);
  if (!w.found) throw Error(ErrorCode::NoAdmissible, "no admissible ball at k=" + std::to_string(k));
  MeasureEstimate est = witness_estimate(MeasureKind::CenteredHausdorff, cloud, dc.s, w.center,
                                         w.partner, w.radius, w.mass.to_double(), w.value);
  attach_bound(est, bound.epsilon, bound.inputs.q, bound.inputs.Qc);
  est.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return est;
}

MeasureEstimate estimate_centered(const IFSystem& system, int k, const EstimateOptions& opts) {
  return estimate_centered(system, derive_constants(system), k, opts);
}

}  // namespace ssm
