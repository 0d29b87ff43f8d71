#include <cmath>
#include <string>

#include "doctest.h"
#include "ssm/error.hpp"
#include "ssm/formulas.hpp"
#include "ssm/report.hpp"

using namespace ssm;

namespace {

MeasureEstimate interval(double value, double eps) {
  MeasureEstimate e;
  e.value = value;
  attach_bound(e, eps, 1, 1.0);
  return e;
}

}  // namespace

TEST_SUITE("formulas") {

TEST_CASE("closed form examples") {
  const FormulaResult g1 = closed_form(Formula::G1, 0.25, Family::Cantor);
  CHECK(format_value(g1.value, false) == "2.449489742783");
  CHECK(g1.proven);
  CHECK(format_value(closed_form("g3", 1.0 / 3.0, Family::Cantor).value, false) == "1.199023144561");
  const FormulaResult g5 = closed_form(Formula::G5, 0.4, Family::Planar);
  CHECK(format_value(g5.value, false) == "2.225958183662");
  CHECK_FALSE(g5.proven);
  const FormulaResult g4 = closed_form(Formula::G4, 1.0 / 3.0, Family::Sierpinski);
  CHECK(format_value(g4.value, false) == "1.602467233540");
  CHECK_FALSE(g4.proven);
  CHECK(format_value(closed_form(Formula::G1, 0.39, Family::Sierpinski).value, false) ==
        "3.783386572225");
  CHECK(format_value(closed_form(Formula::G3, 0.3519, Family::Cantor).value, false) ==
        "1.187893625780");
}

TEST_CASE("proven ranges") {
  CHECK(closed_form(Formula::G1, 1.0 / 3.0, Family::Sierpinski).proven);
  CHECK_FALSE(closed_form(Formula::G1, 0.34, Family::Sierpinski).proven);
  CHECK(closed_form(Formula::G2, 0.35, Family::Planar).proven);
  CHECK_FALSE(closed_form(Formula::G2, 0.36, Family::Planar).proven);
  CHECK(closed_form(Formula::G3, 0.3, Family::Cantor).proven);
  CHECK_FALSE(closed_form(Formula::G3, 0.34, Family::Cantor).proven);
  // the g5 conditions switch near 0.10832764
  CHECK(g5_conditions_hold(0.1083));
  CHECK_FALSE(g5_conditions_hold(0.1084));
}

TEST_CASE("domain and name errors") {
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ParseError;
  };
  CHECK(code([] { closed_form(Formula::G1, 0.5, Family::Cantor); }) == ErrorCode::ROutOfDomain);
  CHECK(code([] { closed_form(Formula::G1, 0.0, Family::Cantor); }) == ErrorCode::ROutOfDomain);
  CHECK(code([] { closed_form("g7", 0.2, Family::Cantor); }) == ErrorCode::UnknownFormula);
  CHECK(code([] { closed_form(Formula::G4, 0.2, Family::Cantor); }) == ErrorCode::UnknownFormula);
}

TEST_CASE("g1 and g2 decrease in r past their peak") {
  // they rise on (0, 0.227) and fall afterwards
  for (Family fam : {Family::Cantor, Family::Sierpinski, Family::Planar}) {
    const Formula f = default_formula(fam, MeasureKind::Packing);
    double prev = INFINITY;
    for (double r = 0.23; r < 0.5; r += 0.01) {
      const double v = closed_form(f, r, fam).value;
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("hypothesis tests") {
  // S_0.39 at k=13: 3.783682419751 with error bound 2.06943e-4
  const HypothesisVerdict rej = test_hypothesis(3.783386572225, interval(3.783682419751, 2.06943e-4));
  CHECK(rej.verdict == Verdict::Rejected);
  CHECK(rej.slack > 0.0);
  CHECK_FALSE(rej.guaranteed_bound.has_value());

  const MeasureEstimate e = interval(1.5, 0.1);
  const HypothesisVerdict self = test_hypothesis(1.5, e);
  CHECK(self.verdict == Verdict::Consistent);
  CHECK(self.slack <= 0.0);
  CHECK(self.guaranteed_bound == doctest::Approx(0.2));
  CHECK(test_hypothesis(1.6, e).verdict == Verdict::Consistent);
  CHECK(test_hypothesis(1.61, e).verdict == Verdict::Rejected);
  CHECK(test_hypothesis(1.39, e).slack == doctest::Approx(0.01));
}

TEST_CASE("spectral interval") {
  const SpectralInterval c = spectral_interval(interval(2.449489742783, 1e-9), interval(1.224744871392, 1e-9));
  CHECK(c.lower_end.lo == doctest::Approx(0.408248).epsilon(1e-6));
  CHECK(c.upper_end.hi == doctest::Approx(0.816497).epsilon(1e-6));
  CHECK(c.lower_end.lo <= 1 / 2.449489742783);
  CHECK(c.lower_end.hi >= 1 / 2.449489742783);
  const SpectralInterval s = spectral_interval(interval(3.732511156817, 1e-12), interval(1.252010347930, 1e-12));
  CHECK(s.lower_end.lo == doctest::Approx(1 / 3.732511156817));
  CHECK(s.upper_end.lo == doctest::Approx(1 / 1.252010347930));
  CHECK_THROWS_AS(spectral_interval(interval(2.0, 2.5), interval(1.0, 0.1)), Error);
}

}
