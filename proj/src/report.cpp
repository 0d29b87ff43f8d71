#include "ssm/report.hpp"

#include <cfenv>
#include <cstdio>

namespace ssm {

namespace {

std::string printf_string(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

std::string format_value(double v, bool full) {
  return printf_string(full ? "%.17g" : "%.12f", v);
}

std::string format_directed(double v, int decimals, bool up) {
  char buf[400];
  const int saved = std::fegetround();
  std::fesetround(up ? FE_UPWARD : FE_DOWNWARD);
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::fesetround(saved);
  return buf;
}

std::string format_lower(double v, bool full) {
  return full ? format_value(v, true) : format_directed(v, 12, false);
}

std::string format_upper(double v, bool full) {
  return full ? format_value(v, true) : format_directed(v, 12, true);
}

std::string format_sci(double v, bool full) {
  return printf_string(full ? "%.16e" : "%.5e", v);
}

std::string format_point(const std::vector<double>& p, bool full) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i > 0) out += ';';
    out += format_value(p[i], full);
  }
  return out;
}

std::string measure_csv_header() {
  return "k,estimate,epsilon,interval_lo,interval_hi,witness_center,witness_partner,"
         "witness_radius,q_or_qk,Q,elapsed_ms";
}

std::string measure_csv_row(const MeasureEstimate& est, bool full) {
  std::string row = std::to_string(est.level);
  row += ',' + format_value(est.value, full);
  row += ',' + format_sci(est.epsilon, full);
  row += ',' + format_lower(est.interval_lo, full);
  row += ',' + format_upper(est.interval_hi, full);
  row += ',' + format_point(est.witness_center, full);
  row += ',' + format_point(est.witness_partner, full);
  row += ',' + format_value(est.witness_radius, full);
  row += ',' + std::to_string(est.q);
  row += ',' + printf_string(full ? "%.17g" : "%.5f", est.Q);
  row += ',' + printf_string("%.1f", est.elapsed_ms);
  return row;
}

std::string stabilization_line(std::optional<int> k_stb) {
  return k_stb ? "# k_stb=" + std::to_string(*k_stb) : std::string("# not stabilized");
}

std::string sweep_csv_header() { return "r,lower,estimate,upper,closed_form"; }

std::string sweep_csv_row(const SweepRow& row, bool full) {
  std::string out = printf_string(full ? "%.17g" : "%.6f", row.r);
  if (row.estimate) {
    out += ',' + format_lower(row.estimate->interval_lo, full);
    out += ',' + format_value(row.estimate->value, full);
    out += ',' + format_upper(row.estimate->interval_hi, full);
  } else {
    out += ",,,";
  }
  out += ',';
  if (row.closed_form) out += format_value(*row.closed_form, full);
  return out;
}

nlohmann::json to_json(const MeasureEstimate& est) {
  return {
      {"kind", kind_name(est.kind)},
      {"k", est.level},
      {"s", est.s},
      {"estimate", est.value},
      {"epsilon", est.epsilon},
      {"interval", {est.interval_lo, est.interval_hi}},
      {"witness_center", est.witness_center},
      {"witness_center_code", est.center_code},
      {"witness_partner", est.witness_partner},
      {"witness_partner_code", est.partner_code},
      {"witness_radius", est.witness_radius},
      {"witness_mass", est.witness_mass},
      {"q", est.q},
      {"Q", est.Q},
      {"elapsed_ms", est.elapsed_ms},
  };
}

nlohmann::json to_json(const DerivedConstants& dc) {
  return {
      {"s", dc.s},
      {"r_min", dc.r_min},
      {"r_max", dc.r_max},
      {"c", {dc.c_lo, dc.c_hi}},
      {"R", {dc.R_lo, dc.R_hi}},
  };
}

nlohmann::json to_json(const HypothesisVerdict& v) {
  nlohmann::json j = {
      {"alpha", v.alpha},
      {"interval", {v.lo, v.hi}},
      {"verdict", v.verdict == Verdict::Rejected ? "rejected" : "consistent"},
      {"slack", v.slack},
  };
  if (v.guaranteed_bound) j["guaranteed_bound"] = *v.guaranteed_bound;
  return j;
}

}  // namespace ssm
