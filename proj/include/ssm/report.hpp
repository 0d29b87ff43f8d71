#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssm/estimate.hpp"
#include "ssm/formulas.hpp"
#include "ssm/ifs.hpp"

namespace ssm {

/// 12 decimals, or 17 significant digits when full is set.
std::string format_value(double v, bool full);
/// Fixed decimals rounded toward +inf (up) or -inf, so a printed interval
/// still encloses the computed one.
std::string format_directed(double v, int decimals, bool up);

/// Interval ends: directed at 12 decimals, or 17 significant digits when full is set.
std::string format_lower(double v, bool full);
std::string format_upper(double v, bool full);

/// 6 significant digits in scientific form, or 17 when full is set.
std::string format_sci(double v, bool full);
/// Coordinates joined by ';'.
std::string format_point(const std::vector<double>& p, bool full);

std::string measure_csv_header();
std::string measure_csv_row(const MeasureEstimate& est, bool full);
std::string stabilization_line(std::optional<int> k_stb);

struct SweepRow {
  double r = 0.0;
  std::optional<MeasureEstimate> estimate;
  std::optional<double> closed_form;
  std::string error;
};

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row, bool full);

nlohmann::json to_json(const MeasureEstimate& est);
nlohmann::json to_json(const DerivedConstants& dc);
nlohmann::json to_json(const HypothesisVerdict& v);

}  // namespace ssm
