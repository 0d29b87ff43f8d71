#include "ssm/formulas.hpp"

#include <algorithm>
#include <cmath>

#include "ssm/error.hpp"

namespace ssm {

std::optional<Formula> parse_formula(const std::string& name) {
  if (name == "g1") return Formula::G1;
  if (name == "g2") return Formula::G2;
  if (name == "g3") return Formula::G3;
  if (name == "g4") return Formula::G4;
  if (name == "g5") return Formula::G5;
  return std::nullopt;
}

const char* formula_name(Formula f) {
  switch (f) {
    case Formula::G1: return "g1";
    case Formula::G2: return "g2";
    case Formula::G3: return "g3";
    case Formula::G4: return "g4";
    case Formula::G5: return "g5";
  }
  return "?";
}

Formula default_formula(Family family, MeasureKind kind) {
  if (kind == MeasureKind::Packing) return family == Family::Planar ? Formula::G2 : Formula::G1;
  switch (family) {
    case Family::Cantor: return Formula::G3;
    case Family::Sierpinski: return Formula::G4;
    case Family::Planar: return Formula::G5;
  }
  return Formula::G3;
}

namespace {

double family_dimension(Family family, double r) {
  const double m = family == Family::Cantor ? 2.0 : family == Family::Sierpinski ? 3.0 : 4.0;
  return std::log(m) / -std::log(r);
}

}  // namespace

bool g5_conditions_hold(double r) {
  const double s = family_dimension(Family::Planar, r);
  if (!(s > 0.0 && s < 1.0)) return false;
  // The companion inequality (1-r) r^((2s-1)/(1-s)) >= 2 as usually quoted
  // fails already at r = 0.05, which contradicts the tabulated range; only
  // this one is checked. It flips at r ~ 0.10832764.
  const double lhs = 3.0 * std::pow(r, s) / std::pow(1.0 - r, s);
  return lhs <= std::pow(2.0, -s / 2.0);
}

FormulaResult closed_form(Formula f, double r, Family family) {
  if (!(r > 0.0 && r < 0.5)) throw Error(ErrorCode::ROutOfDomain, "r must lie in (0, 1/2)");
  const bool ok = (f == Formula::G1 && family != Family::Planar) ||
                  (f == Formula::G2 && family == Family::Planar) ||
                  (f == Formula::G3 && family == Family::Cantor) ||
                  (f == Formula::G4 && family == Family::Sierpinski) ||
                  (f == Formula::G5 && family == Family::Planar);
  if (!ok) {
    throw Error(ErrorCode::UnknownFormula,
                std::string(formula_name(f)) + " is not defined for the " + family_name(family) + " family");
  }
  const double s = family_dimension(family, r);
  FormulaResult out;
  out.name = formula_name(f);
  switch (f) {
    case Formula::G1:
      out.value = std::pow(2.0 * (1.0 - r) / r, s);
      if (family == Family::Cantor) {
        out.proven = true;
        out.range_note = "proven for every r in (0, 1/2)";
      } else {
        out.proven = r <= 1.0 / 3.0;
        out.range_note = "proven for r <= 1/3";
      }
      break;
    case Formula::G2:
      out.value = std::pow(2.0 * (1.0 - r) / r, s);
      out.proven = r <= std::sqrt(2.0) / 4.0;
      out.range_note = "proven for r <= sqrt(2)/4";
      break;
    case Formula::G3:
      out.value = std::pow(2.0 * (1.0 - r), s);
      out.proven = r <= 1.0 / 3.0;
      out.range_note = "proven for r <= 1/3";
      break;
    case Formula::G4:
      out.value = std::pow(2.0 * (1.0 - r) * std::sqrt(r * r + r + 1.0), s);
      out.proven = false;
      out.range_note = "conjectural";
      break;
    case Formula::G5:
      out.value = std::pow(2.0 * std::sqrt(2.0) * (1.0 - r), s);
      out.proven = g5_conditions_hold(r);
      out.range_note = "proven where the sufficient conditions hold (r below about 0.1083)";
      break;
  }
  return out;
}

FormulaResult closed_form(const std::string& name, double r, Family family) {
  const auto f = parse_formula(name);
  if (!f) throw Error(ErrorCode::UnknownFormula, "unknown formula '" + name + "'");
  return closed_form(*f, r, family);
}

HypothesisVerdict test_hypothesis(double alpha, const MeasureEstimate& estimate) {
  HypothesisVerdict v;
  v.alpha = alpha;
  v.lo = estimate.interval_lo;
  v.hi = estimate.interval_hi;
  if (alpha >= v.lo && alpha <= v.hi) {
    v.verdict = Verdict::Consistent;
    v.slack = -std::min(alpha - v.lo, v.hi - alpha);
    v.guaranteed_bound = 2.0 * estimate.epsilon;
  } else {
    v.verdict = Verdict::Rejected;
    v.slack = alpha < v.lo ? v.lo - alpha : alpha - v.hi;
  }
  return v;
}

SpectralInterval spectral_interval(const MeasureEstimate& packing, const MeasureEstimate& centered) {
  if (packing.epsilon >= packing.value || centered.epsilon >= centered.value) {
    throw Error(ErrorCode::DegenerateInterval, "error bound is not smaller than the estimate");
  }
  SpectralInterval out;
  out.lower_end = {1.0 / (packing.value + packing.epsilon), 1.0 / (packing.value - packing.epsilon)};
  out.upper_end = {1.0 / (centered.value + centered.epsilon), 1.0 / (centered.value - centered.epsilon)};
  return out;
}

}  // namespace ssm
