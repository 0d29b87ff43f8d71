// ssmeasure: packing and centered Hausdorff measure estimates from the command line.
//
//   ssmeasure [flags] cantor|sierpinski|planar --r R <command>
//   ssmeasure [flags] config FILE <command>
//
// commands: dimension | measure KIND --k A..B | sweep KIND --k K | test KIND G|ALPHA --k K

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssm/chausdorff.hpp"
#include "ssm/error.hpp"
#include "ssm/formulas.hpp"
#include "ssm/ifs.hpp"
#include "ssm/oracle.hpp"
#include "ssm/packing.hpp"
#include "ssm/report.hpp"

namespace {

using nlohmann::json;

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kRejected = 3 };

struct Globals {
  unsigned threads = 0;
  bool full = false;
  bool oracle = false;
  bool json_out = false;
  std::size_t budget = ssm::kDefaultPointBudget;
};

struct Source {
  std::optional<ssm::Family> family;
  double r = -1.0;
  std::string config_path;
};

struct KRange {
  int lo = 0;
  int hi = 0;
};

KRange parse_k_range(const std::string& text) {
  KRange range;
  const auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      range.lo = range.hi = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } else {
      const std::string a = text.substr(0, dots);
      const std::string b = text.substr(dots + 2);
      range.lo = std::stoi(a, &used);
      if (used != a.size()) throw std::invalid_argument(text);
      range.hi = std::stoi(b, &used);
      if (used != b.size()) throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw ssm::Error(ssm::ErrorCode::ParseError, "bad --k value '" + text + "', expected K or A..B");
  }
  if (range.lo < 1 || range.hi < range.lo) {
    throw ssm::Error(ssm::ErrorCode::ParseError, "bad --k range '" + text + "'");
  }
  return range;
}

ssm::MeasureKind parse_kind(const std::string& name) {
  if (name == "packing") return ssm::MeasureKind::Packing;
  if (name == "centered") return ssm::MeasureKind::CenteredHausdorff;
  throw ssm::Error(ssm::ErrorCode::ParseError, "unknown measure '" + name + "'");
}

ssm::IFSystem load_system(const Source& src) {
  if (src.family) {
    if (!(src.r > 0.0 && src.r < 0.5)) {
      throw ssm::Error(ssm::ErrorCode::RatioOutOfRange, "--r must lie in (0, 1/2)");
    }
    return ssm::family_system(*src.family, src.r);
  }
  return ssm::load_config(src.config_path);
}

std::string source_label(const Source& src) {
  if (!src.family) return src.config_path;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s r=%.17g", ssm::family_name(*src.family), src.r);
  return buf;
}

ssm::MeasureEstimate run_estimate(const ssm::IFSystem& system, const ssm::DerivedConstants& dc,
                                  ssm::MeasureKind kind, int k, const Globals& g) {
  if (g.oracle) {
    return kind == ssm::MeasureKind::Packing ? ssm::oracle::brute_packing(system, k)
                                             : ssm::oracle::brute_centered(system, k);
  }
  ssm::EstimateOptions opts;
  opts.threads = g.threads;
  opts.budget = g.budget;
  return kind == ssm::MeasureKind::Packing ? ssm::estimate_packing(system, dc, k, opts)
                                           : ssm::estimate_centered(system, dc, k, opts);
}

std::string bracket_text(double lo, double hi) {
  char buf[96];
  if (lo == hi) {
    std::snprintf(buf, sizeof buf, "%.12g", lo);
  } else {
    std::snprintf(buf, sizeof buf, "[%.12g,%.12g]", lo, hi);
  }
  return buf;
}

int cmd_dimension(const Source& src, const Globals& g) {
  const ssm::IFSystem system = load_system(src);
  const ssm::DerivedConstants dc = ssm::derive_constants(system);
  if (g.json_out) {
    json j = ssm::to_json(dc);
    j["system"] = source_label(src);
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  std::printf("s=%.12g c=%s R=%s r_min=%.12g r_max=%.12g\n", dc.s,
              bracket_text(dc.c_lo, dc.c_hi).c_str(), bracket_text(dc.R_lo, dc.R_hi).c_str(),
              dc.r_min, dc.r_max);
  return kOk;
}

int cmd_measure(const Source& src, const Globals& g, ssm::MeasureKind kind, const KRange& range) {
  const ssm::IFSystem system = load_system(src);
  const ssm::DerivedConstants dc = ssm::derive_constants(system);
  std::vector<ssm::MeasureEstimate> rows;
  std::vector<std::pair<int, std::string>> skipped;
  std::optional<std::string> failure;
  int status = kOk;

  if (!g.json_out) std::cout << ssm::measure_csv_header() << '\n';
  for (int k = range.lo; k <= range.hi; ++k) {
    if (kind == ssm::MeasureKind::Packing && !ssm::window_feasible(dc, k)) {
      skipped.emplace_back(k, "radius window infeasible");
      if (!g.json_out) std::cout << "# k=" << k << " skipped: radius window infeasible\n";
      continue;
    }
    try {
      rows.push_back(run_estimate(system, dc, kind, k, g));
    } catch (const ssm::Error& e) {
      if (e.code() == ssm::ErrorCode::WindowInfeasible || e.code() == ssm::ErrorCode::NoAdmissible) {
        skipped.emplace_back(k, e.what());
        if (!g.json_out) std::cout << "# k=" << k << " skipped: " << e.what() << '\n';
        continue;
      }
      if (e.code() == ssm::ErrorCode::CapacityExceeded || e.code() == ssm::ErrorCode::TooLarge) {
        failure = std::string(e.what()) + " (at k=" + std::to_string(k) + ")";
        status = kInfeasible;
        break;
      }
      throw;
    }
    if (!g.json_out) {
      std::cout << ssm::measure_csv_row(rows.back(), g.full) << '\n' << std::flush;
    }
  }

  std::vector<std::pair<int, double>> values;
  for (const auto& est : rows) values.emplace_back(est.level, est.value);
  const std::optional<int> k_stb = ssm::detect_stabilization(values);
  if (rows.empty() && status == kOk) status = kInfeasible;

  if (g.json_out) {
    json j;
    j["system"] = source_label(src);
    j["kind"] = ssm::kind_name(kind);
    j["rows"] = json::array();
    for (const auto& est : rows) j["rows"].push_back(ssm::to_json(est));
    j["skipped"] = json::array();
    for (const auto& [k, why] : skipped) j["skipped"].push_back({{"k", k}, {"reason", why}});
    j["k_stb"] = k_stb ? json(*k_stb) : json(nullptr);
    if (failure) j["error"] = *failure;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << ssm::stabilization_line(k_stb) << '\n';
  }
  if (failure) std::cerr << "ssmeasure: " << *failure << '\n';
  return status;
}

struct SweepGrid {
  double from = 0.0;
  double to = 0.0;
  int points = 1;
  std::vector<double> values;

  std::vector<double> expand() const {
    if (!values.empty()) return values;
    std::vector<double> out;
    for (int i = 0; i < points; ++i) {
      out.push_back(points == 1 ? from : from + (to - from) * i / (points - 1));
    }
    return out;
  }
};

int cmd_sweep(const Source& src, const Globals& g, ssm::MeasureKind kind, int k,
              const SweepGrid& grid, const std::string& formula) {
  if (!src.family) {
    throw ssm::Error(ssm::ErrorCode::ParseError, "sweep needs a built-in family");
  }
  const ssm::Formula f = formula.empty() ? ssm::default_formula(*src.family, kind) : [&] {
    auto parsed = ssm::parse_formula(formula);
    if (!parsed) throw ssm::Error(ssm::ErrorCode::UnknownFormula, "unknown formula '" + formula + "'");
    return *parsed;
  }();

  std::vector<ssm::SweepRow> rows;
  if (!g.json_out) std::cout << ssm::sweep_csv_header() << '\n';
  for (double r : grid.expand()) {
    ssm::SweepRow row;
    row.r = r;
    try {
      const ssm::IFSystem system = ssm::family_system(*src.family, r);
      const ssm::DerivedConstants dc = ssm::derive_constants(system);
      row.closed_form = ssm::closed_form(f, r, *src.family).value;
      row.estimate = run_estimate(system, dc, kind, k, g);
    } catch (const ssm::Error& e) {
      row.error = e.what();
    }
    if (!g.json_out) {
      std::cout << ssm::sweep_csv_row(row, g.full) << '\n' << std::flush;
      if (!row.error.empty()) std::cout << "# r=" << r << ": " << row.error << '\n';
    }
    rows.push_back(std::move(row));
  }
  if (g.json_out) {
    json j;
    j["family"] = ssm::family_name(*src.family);
    j["kind"] = ssm::kind_name(kind);
    j["k"] = k;
    j["formula"] = ssm::formula_name(f);
    j["rows"] = json::array();
    for (const auto& row : rows) {
      json jr = {{"r", row.r}};
      if (row.estimate) jr["estimate"] = ssm::to_json(*row.estimate);
      jr["closed_form"] = row.closed_form ? json(*row.closed_form) : json(nullptr);
      if (!row.error.empty()) jr["error"] = row.error;
      j["rows"].push_back(jr);
    }
    std::cout << j.dump(2) << '\n';
  }
  return kOk;
}

int cmd_test(const Source& src, const Globals& g, ssm::MeasureKind kind, const std::string& what,
             int k) {
  const ssm::IFSystem system = load_system(src);
  const ssm::DerivedConstants dc = ssm::derive_constants(system);
  double alpha = 0.0;
  std::string label = what;
  if (auto f = ssm::parse_formula(what)) {
    if (!src.family) {
      throw ssm::Error(ssm::ErrorCode::UnknownFormula, "closed forms need a built-in family");
    }
    alpha = ssm::closed_form(*f, src.r, *src.family).value;
  } else {
    std::size_t used = 0;
    try {
      alpha = std::stod(what, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != what.size()) {
      throw ssm::Error(ssm::ErrorCode::UnknownFormula, "'" + what + "' is neither g1..g5 nor a number");
    }
  }
  if (kind == ssm::MeasureKind::Packing && !ssm::window_feasible(dc, k)) {
    throw ssm::Error(ssm::ErrorCode::WindowInfeasible, "radius window infeasible at k=" + std::to_string(k));
  }
  const ssm::MeasureEstimate est = run_estimate(system, dc, kind, k, g);
  const ssm::HypothesisVerdict v = ssm::test_hypothesis(alpha, est);
  const bool rejected = v.verdict == ssm::Verdict::Rejected;
  if (g.json_out) {
    json j = ssm::to_json(v);
    j["hypothesis"] = label;
    j["estimate"] = ssm::to_json(est);
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << (rejected ? "Rejected" : "Consistent") << ' ' << label
              << " alpha=" << ssm::format_value(alpha, g.full) << " k=" << k
              << " estimate=" << ssm::format_value(est.value, g.full)
              << " interval=(" << ssm::format_lower(v.lo, g.full) << ", "
              << ssm::format_upper(v.hi, g.full) << ")"
              << " slack=" << ssm::format_sci(v.slack, g.full);
    if (v.guaranteed_bound) std::cout << " error_bound=" << ssm::format_sci(*v.guaranteed_bound, g.full);
    std::cout << '\n';
  }
  return rejected ? kRejected : kOk;
}

int exit_for(const ssm::Error& e) {
  switch (e.code()) {
    case ssm::ErrorCode::WindowInfeasible:
    case ssm::ErrorCode::CapacityExceeded:
    case ssm::ErrorCode::TooLarge:
    case ssm::ErrorCode::NoAdmissible:
      return kInfeasible;
    default:
      return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified packing and centered Hausdorff measure estimates for self-similar sets"};
  app.require_subcommand(1);

  Globals g;
  app.add_option("--threads", g.threads, "worker threads (0: all available)");
  app.add_flag("--full-precision", g.full, "print 17 significant digits");
  app.add_flag("--oracle", g.oracle, "use the brute-force reference (at most 10^4 points)");
  app.add_flag("--json", g.json_out, "structured output");
  app.add_option("--budget", g.budget, "maximum number of cloud points");

  Source src;
  std::string kind_text;
  std::string k_text;
  int k_single = 0;
  std::string what;
  std::string formula;
  SweepGrid grid;
  std::string command;

  auto add_commands = [&](CLI::App* parent) {
    parent->require_subcommand(1);
    parent->add_subcommand("dimension", "similarity dimension and geometric constants")
        ->callback([&] { command = "dimension"; });

    auto* measure = parent->add_subcommand("measure", "estimates over a range of levels");
    measure->add_option("kind", kind_text, "packing or centered")->required();
    measure->add_option("--k", k_text, "level or range A..B")->required();
    measure->callback([&] { command = "measure"; });

    auto* sweep = parent->add_subcommand("sweep", "estimates over a grid of ratios");
    sweep->add_option("kind", kind_text, "packing or centered")->required();
    sweep->add_option("--k", k_single, "level")->required();
    auto* from = sweep->add_option("--from", grid.from, "first ratio");
    auto* to = sweep->add_option("--to", grid.to, "last ratio");
    sweep->add_option("--points", grid.points, "number of equidistant ratios")->check(CLI::PositiveNumber);
    auto* values = sweep->add_option("--values", grid.values, "explicit ratios")->delimiter(',');
    from->excludes(values);
    to->excludes(values);
    sweep->add_option("--formula", formula, "closed form column (default per family)");
    sweep->callback([&] { command = "sweep"; });

    auto* test = parent->add_subcommand("test", "hypothesis test against I_k");
    test->add_option("kind", kind_text, "packing or centered")->required();
    test->add_option("hypothesis", what, "g1..g5 or a number")->required();
    test->add_option("--k", k_single, "level")->required();
    test->callback([&] { command = "test"; });

    for (auto* sub : parent->get_subcommands({})) sub->fallthrough();
  };

  for (ssm::Family fam : {ssm::Family::Cantor, ssm::Family::Sierpinski, ssm::Family::Planar}) {
    auto* sub = app.add_subcommand(ssm::family_name(fam), std::string("built-in ") +
                                                              ssm::family_name(fam) + " family");
    sub->add_option("--r", src.r, "contraction ratio in (0, 1/2)");
    sub->callback([&src, fam] { src.family = fam; });
    sub->fallthrough();
    add_commands(sub);
  }
  auto* config = app.add_subcommand("config", "system from a config file");
  config->add_option("file", src.config_path, "config path")->required();
  config->fallthrough();
  add_commands(config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (command == "dimension") return cmd_dimension(src, g);
    if (command == "measure") return cmd_measure(src, g, parse_kind(kind_text), parse_k_range(k_text));
    if (command == "sweep") {
      if (grid.values.empty() && grid.to == 0.0) grid.to = grid.from;
      return cmd_sweep(src, g, parse_kind(kind_text), k_single, grid, formula);
    }
    if (command == "test") return cmd_test(src, g, parse_kind(kind_text), what, k_single);
  } catch (const ssm::Error& e) {
    std::cerr << "ssmeasure: " << e.what() << '\n';
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "ssmeasure: " << e.what() << '\n';
    return kUsage;
  }
  std::cerr << "ssmeasure: no command given\n";
  return kUsage;
}
