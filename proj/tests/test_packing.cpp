#include <cmath>
#include <cstdio>
#include <string>

#include "doctest.h"
#include "ssm/error.hpp"
#include "ssm/formulas.hpp"
#include "ssm/packing.hpp"
#include "ssm/report.hpp"

using namespace ssm;

namespace {

std::string sci6(double v) { return format_sci(v, false); }

std::string fixed8(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8f", v);
  return buf;
}

EstimateOptions single() {
  EstimateOptions o;
  o.threads = 1;
  return o;
}

}  // namespace

TEST_SUITE("packing") {

TEST_CASE("error bound examples") {
  const PackingBound c = packing_error_bound(cantor_system(0.25), 20);
  CHECK(c.inputs.q_k == 1);
  CHECK(c.inputs.Q == doctest::Approx(std::sqrt(2.0)));
  CHECK(sci6(c.epsilon) == "3.63798e-12");

  const PackingBound s = packing_error_bound(sierpinski_system(1.0 / 27.0), 10);
  CHECK(s.inputs.q_k == 1);
  CHECK(s.inputs.Q == doctest::Approx(1.05265).epsilon(1e-5));
  CHECK(sci6(s.epsilon) == "1.28830e-14");

  const PackingBound w = packing_error_bound(cantor_system(0.45), 20);
  CHECK(w.inputs.q_k == 3);
  CHECK(w.inputs.Q == doctest::Approx(1.35502).epsilon(1e-5));
  CHECK(sci6(w.epsilon) == "3.98266e-06");
}

TEST_CASE("q_k sandwich and window ends") {
  for (double r : {0.2, 0.3, 0.42}) {
    const IFSystem sys = sierpinski_system(r);
    const DerivedConstants dc = derive_constants(sys);
    for (int k = 4; k <= 12; ++k) {
      if (!window_feasible(dc, k)) continue;
      const ErrorBoundInputs in = packing_error_bound(dc, k).inputs;
      const double target = dc.c_lo - 2 * dc.R_hi * std::pow(r, k) - 2 * dc.R_hi * std::pow(r, k + 1);
      CHECK(in.window_lo == doctest::Approx(target));
      CHECK(in.window_hi == doctest::Approx(dc.c_hi / r));
      CHECK(dc.R_hi * std::pow(r, in.q_k) <= target * (1 + 1e-12));
      CHECK(dc.R_hi * std::pow(r, in.q_k - 1) > target * (1 - 1e-12));
    }
  }
}

TEST_CASE("infeasible window") {
  CHECK_THROWS_AS(packing_error_bound(cantor_system(0.45), 2), Error);
  try {
    estimate_packing(cantor_system(0.45), 2);
    FAIL("expected WindowInfeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowInfeasible);
  }
}

TEST_CASE("estimates from the tables") {
  CHECK(format_value(estimate_packing(cantor_system(0.25), 3).value, false) == "2.449489742783");
  CHECK(estimate_packing(planar_cantor_system(0.25), 3).value == doctest::Approx(6.0).epsilon(1e-14));

  const MeasureEstimate s = estimate_packing(sierpinski_system(0.42), 5);
  CHECK(fixed8(s.value) == "3.67050829");
  CHECK(s.witness_center == std::vector<double>{0.0, 0.0});
  CHECK(fixed8(s.witness_radius) == "0.26055578");
  CHECK(format_directed(s.interval_lo, 8, false) == "2.00793066");
  CHECK(format_directed(s.interval_hi, 8, true) == "5.33308593");
}

TEST_CASE("witness invariants") {
  const IFSystem systems[] = {cantor_system(0.3), sierpinski_system(0.3), planar_cantor_system(0.3)};
  for (const auto& sys : systems) {
    const DerivedConstants dc = derive_constants(sys);
    for (int k = 2; k <= 5; ++k) {
      if (!window_feasible(dc, k)) continue;
      const MeasureEstimate e = estimate_packing(sys, dc, k, single());
      const ErrorBoundInputs in = packing_error_bound(dc, k).inputs;
      CHECK(std::pow(2.0 * e.witness_radius, e.s) / e.witness_mass == e.value);
      CHECK(e.witness_radius >= in.window_lo);
      CHECK(e.witness_radius <= in.window_hi);
      CHECK(e.witness_mass >= std::pow(dc.r_min, in.q_k * dc.s) * (1 - 1e-12));
      CHECK(e.interval_lo == e.value - e.epsilon);
      CHECK(e.interval_hi == e.value + e.epsilon);
    }
  }
}

TEST_CASE("proven closed forms lie inside the interval") {
  struct Case {
    IFSystem sys;
    Family family;
    double r;
    int k_max;
  };
  const Case cases[] = {
      {cantor_system(0.2), Family::Cantor, 0.2, 10},
      {cantor_system(0.38), Family::Cantor, 0.38, 10},
      {sierpinski_system(0.2), Family::Sierpinski, 0.2, 6},
      {planar_cantor_system(0.3), Family::Planar, 0.3, 5},
  };
  for (const auto& cs : cases) {
    const Formula f = default_formula(cs.family, MeasureKind::Packing);
    const FormulaResult g = closed_form(f, cs.r, cs.family);
    REQUIRE(g.proven);
    const DerivedConstants dc = derive_constants(cs.sys);
    for (int k = 1; k <= cs.k_max; ++k) {
      if (!window_feasible(dc, k)) continue;
      const MeasureEstimate e = estimate_packing(cs.sys, dc, k);
      CHECK(test_hypothesis(g.value, e).verdict == Verdict::Consistent);
    }
  }
}

TEST_CASE("thread count does not change the result") {
  const IFSystem sys = sierpinski_system(0.42);
  EstimateOptions one = single();
  const MeasureEstimate a = estimate_packing(sys, 7, one);
  for (unsigned t : {2u, 4u}) {
    EstimateOptions o;
    o.threads = t;
    const MeasureEstimate b = estimate_packing(sys, 7, o);
    CHECK(b.value == a.value);
    CHECK(b.witness_center == a.witness_center);
    CHECK(b.witness_partner == a.witness_partner);
    CHECK(b.witness_radius == a.witness_radius);
    CHECK(b.witness_mass == a.witness_mass);
  }
}

TEST_CASE("stabilization") {
  std::vector<std::pair<int, double>> run;
  const DerivedConstants dc = derive_constants(cantor_system(0.25));
  for (int k = 2; k <= 8; ++k) run.emplace_back(k, estimate_packing(cantor_system(0.25), dc, k).value);
  CHECK(detect_stabilization(run) == 2);
  CHECK_FALSE(detect_stabilization({{1, 1.0}, {2, 1.5}, {3, 1.25}}).has_value());
  CHECK(detect_stabilization({{1, 1.0}, {2, 1.5}, {3, 1.5 + 1e-16}}) == 2);
  CHECK_FALSE(detect_stabilization({{1, 1.0}}).has_value());
}

}
