#include "ssm/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ssm/chausdorff.hpp"
#include "ssm/cloud.hpp"
#include "ssm/error.hpp"
#include "ssm/packing.hpp"

namespace ssm::oracle {

namespace {

constexpr double kTieTol = 1e-12;
constexpr double kNearTol = 1e-12;

struct Candidate {
  double value = 0.0;
  std::uint64_t ckey = 0;
  std::size_t center = 0;
  std::size_t partner = 0;
  double radius = 0.0;
  double mass = 0.0;
};

// Every candidate is kept; the choice happens once all are known.
struct Best {
  bool found = false;
  double value = 0.0;
  Candidate pick;
};

PointCloud checked_cloud(const IFSystem& system, int k) {
  double count = 1.0;
  for (int i = 0; i < k; ++i) count *= static_cast<double>(system.size());
  if (count > static_cast<double>(kMaxPoints)) {
    throw Error(ErrorCode::TooLarge, "oracle is limited to 10^4 points");
  }
  return build_cloud(system, k, kMaxPoints);
}

// Visits every tie group around every center in (distance, index) order, with
// its nearest member and the first member at its largest distance.
template <typename Visit>
void for_each_group(const PointCloud& cloud, Visit&& visit) {
  const std::size_t n = cloud.size();
  std::vector<double> d(n);
  std::vector<std::size_t> order(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) d[y] = distance(cloud, x, y);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return d[a] < d[b] || (d[a] == d[b] && a < b);
    });
    Mass below;
    std::size_t j = 0;
    while (j < n) {
      std::size_t end = j + 1;
      while (end < n && d[order[end]] - d[order[end - 1]] <= kTieTol * std::max(1.0, d[order[end]])) ++end;
      Mass group;
      bool cross = false;
      for (std::size_t t = j; t < end; ++t) {
        group += cloud.masses[order[t]];
        if (cloud.first_letters[order[t]] != cloud.first_letters[x]) cross = true;
      }
      std::size_t far = end - 1;
      while (far > j && d[order[far - 1]] == d[order[end - 1]]) --far;
      visit(x, order[j], d[order[j]], order[far], d[order[far]], below, group, cross);
      below += group;
      j = end;
    }
  }
}

Best select(const std::vector<Candidate>& all, bool maximize) {
  Best best;
  for (const auto& c : all) {
    if (!best.found || (maximize ? c.value > best.value : c.value < best.value)) best.value = c.value;
    best.found = true;
  }
  const double slack = kNearTol * std::abs(best.value);
  bool picked = false;
  for (const auto& c : all) {
    const bool near = maximize ? c.value >= best.value - slack : c.value <= best.value + slack;
    if (!near) continue;
    if (!picked || c.ckey < best.pick.ckey ||
        (c.ckey == best.pick.ckey && c.partner < best.pick.partner)) {
      best.pick = c;
      picked = true;
    }
  }
  return best;
}

}  // namespace

MeasureEstimate brute_packing(const IFSystem& system, int k) {
  const auto start = std::chrono::steady_clock::now();
  const DerivedConstants dc = derive_constants(system);
  const PackingBound bound = packing_error_bound(dc, k);
  const PointCloud cloud = checked_cloud(system, k);
  const double lo = bound.inputs.window_lo;
  const double hi = bound.inputs.window_hi;
  std::vector<Candidate> all;
  for_each_group(cloud, [&](std::size_t x, std::size_t y, double d, std::size_t, double,
                            const Mass& below, const Mass&, bool) {
    if (d < lo || d > hi) return;
    const double mass = below.to_double();
    all.push_back({std::pow(2.0 * d, dc.s) / mass, cloud.order_keys[x], x, y, d, mass});
  });
  const Best best = select(all, true);
  if (!best.found) throw Error(ErrorCode::WindowInfeasible, "no admissible distance");
  const Candidate& w = best.pick;
  MeasureEstimate est = witness_estimate(MeasureKind::Packing, cloud, dc.s, w.center, w.partner,
                                         w.radius, w.mass, w.value);
  attach_bound(est, bound.epsilon, bound.inputs.q_k, bound.inputs.Q);
  est.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return est;
}

MeasureEstimate brute_centered(const IFSystem& system, int k) {
  const auto start = std::chrono::steady_clock::now();
  const DerivedConstants dc = derive_constants(system);
  const CenteredBound bound = centered_error_bound(dc, k);
  const PointCloud cloud = checked_cloud(system, k);
  std::vector<Candidate> all;
  std::size_t current = cloud.size();
  bool admissible = false;
  for_each_group(cloud, [&](std::size_t x, std::size_t, double, std::size_t y, double d,
                            const Mass& below, const Mass& group, bool cross) {
    if (x != current) {
      current = x;
      admissible = false;
    }
    admissible = admissible || cross;
    if (!admissible) return;
    const double mass = (below + group).to_double();
    all.push_back({std::pow(2.0 * d, dc.s) / mass, cloud.order_keys[x], x, y, d, mass});
  });
  const Best best = select(all, false);
  if (!best.found) throw Error(ErrorCode::NoAdmissible, "no admissible ball");
  const Candidate& w = best.pick;
  MeasureEstimate est = witness_estimate(MeasureKind::CenteredHausdorff, cloud, dc.s, w.center,
                                         w.partner, w.radius, w.mass, w.value);
  attach_bound(est, bound.epsilon, bound.inputs.q, bound.inputs.Qc);
  est.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return est;
}

}  // namespace ssm::oracle
