#include "ssm/estimate.hpp"

#include <thread>

namespace ssm {

const char* kind_name(MeasureKind kind) {
  return kind == MeasureKind::Packing ? "packing" : "centered";
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

MeasureEstimate witness_estimate(MeasureKind kind, const PointCloud& cloud, double s,
                                 std::size_t center, std::size_t partner, double radius,
                                 double mass, double value) {
  MeasureEstimate est;
  est.kind = kind;
  est.level = cloud.level;
  est.s = s;
  est.value = value;
  est.witness_center.assign(cloud.point(center), cloud.point(center) + cloud.dim);
  est.center_code = cloud.code(center);
  est.witness_partner.assign(cloud.point(partner), cloud.point(partner) + cloud.dim);
  est.partner_code = cloud.code(partner);
  est.witness_radius = radius;
  est.witness_mass = mass;
  return est;
}

void attach_bound(MeasureEstimate& est, double epsilon, int q, double Q) {
  est.epsilon = epsilon;
  est.interval_lo = est.value - epsilon;
  est.interval_hi = est.value + epsilon;
  est.q = q;
  est.Q = Q;
}

}  // namespace ssm
