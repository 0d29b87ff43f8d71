#pragma once

#include <optional>
#include <string>

#include "ssm/estimate.hpp"
#include "ssm/ifs.hpp"

namespace ssm {

enum class Formula { G1, G2, G3, G4, G5 };

std::optional<Formula> parse_formula(const std::string& name);
const char* formula_name(Formula f);

/// The formula usually compared against each family and measure.
Formula default_formula(Family family, MeasureKind kind);

struct FormulaResult {
  std::string name;
  double value = 0.0;
  bool proven = false;
  std::string range_note;
};

/// g1: (2(1-r)/r)^s on the line (m=2) or the gasket (m=3); g2: same on the
/// planar family; g3: (2(1-r))^s on the line; g4: (2(1-r)(r^2+r+1)^(1/2))^s on
/// the gasket; g5: (2 sqrt(2) (1-r))^s on the planar family.
FormulaResult closed_form(Formula f, double r, Family family);
FormulaResult closed_form(const std::string& name, double r, Family family);

/// Whether the sufficient conditions for g5 hold at r.
bool g5_conditions_hold(double r);

enum class Verdict { Rejected, Consistent };

struct HypothesisVerdict {
  double alpha = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  Verdict verdict = Verdict::Consistent;
  double slack = 0.0;  // <= 0 inside the interval, distance to it outside
  std::optional<double> guaranteed_bound;  // 2 epsilon, only when consistent
};

HypothesisVerdict test_hypothesis(double alpha, const MeasureEstimate& estimate);

struct SpectralInterval {
  Bracket lower_end;  // encloses 1 / P^s(E)
  Bracket upper_end;  // encloses 1 / C^s(E)
};

SpectralInterval spectral_interval(const MeasureEstimate& packing, const MeasureEstimate& centered);

}  // namespace ssm
