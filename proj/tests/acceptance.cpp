// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssm/chausdorff.hpp"
#include "ssm/error.hpp"
#include "ssm/formulas.hpp"
#include "ssm/ifs.hpp"
#include "ssm/oracle.hpp"
#include "ssm/packing.hpp"
#include "ssm/report.hpp"

using namespace ssm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string sci6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Run {
  std::vector<MeasureEstimate> rows;
  std::vector<int> skipped;
  double seconds = 0.0;
  double r_max = 0.0;

  std::optional<int> k_stb() const {
    std::vector<std::pair<int, double>> v;
    for (const auto& e : rows) v.emplace_back(e.level, e.value);
    return detect_stabilization(v);
  }
  const MeasureEstimate* at(int k) const {
    for (const auto& e : rows)
      if (e.level == k) return &e;
    return nullptr;
  }
};

Run sweep(const IFSystem& sys, MeasureKind kind, int k_from, int k_to, unsigned threads = 0) {
  const auto t0 = std::chrono::steady_clock::now();
  const DerivedConstants dc = derive_constants(sys);
  EstimateOptions opts;
  opts.threads = threads;
  Run run;
  run.r_max = dc.r_max;
  for (int k = k_from; k <= k_to; ++k) {
    if (kind == MeasureKind::Packing) {
      if (!window_feasible(dc, k)) {
        run.skipped.push_back(k);
        continue;
      }
      run.rows.push_back(estimate_packing(sys, dc, k, opts));
    } else {
      run.rows.push_back(estimate_centered(sys, dc, k, opts));
    }
  }
  run.seconds = seconds_since(t0);
  return run;
}

std::string stb_text(std::optional<int> k) { return k ? std::to_string(*k) : "none"; }

void expect_time(Outcome& o, double seconds, double limit) {
  o.note("runtime " + fixed(seconds, 2) + "s");
  if (!(seconds < limit)) o.fail("runtime over " + fixed(limit, 0) + "s");
}

void expect_value(Outcome& o, const Run& run, int k, const std::string& want, int decimals) {
  const MeasureEstimate* e = run.at(k);
  if (!e) {
    o.fail("k=" + std::to_string(k) + " missing");
    return;
  }
  const std::string got = fixed(e->value, decimals);
  o.note("k=" + std::to_string(k) + " " + got);
  if (got != want) o.fail("expected " + want);
}

void expect_stb(Outcome& o, const Run& run, int want) {
  const auto k = run.k_stb();
  o.note("k_stb=" + stb_text(k));
  if (k != want) o.fail("expected k_stb=" + std::to_string(want));
}

// Cached runs shared between criteria.
Run& s042_trace() {
  static Run cached = sweep(sierpinski_system(0.42), MeasureKind::Packing, 5, 10);
  return cached;
}
Run& c045_trace() {
  static Run cached = sweep(cantor_system(0.45), MeasureKind::CenteredHausdorff, 5, 14);
  return cached;
}

Outcome criterion1(std::vector<std::pair<std::string, Run>>& runs) {
  Outcome o;
  Run run = sweep(cantor_system(0.25), MeasureKind::Packing, 1, 8);
  expect_value(o, run, 8, "2.449489742783", 12);
  expect_stb(o, run, 2);
  expect_time(o, run.seconds, 1.0);
  runs.emplace_back("C_1/4 packing", std::move(run));
  return o;
}

Outcome criterion2(std::vector<std::pair<std::string, Run>>& runs) {
  Outcome o;
  const IFSystem sys = sierpinski_system(1.0 / 27.0);
  Run run = sweep(sys, MeasureKind::Packing, 1, 8);
  expect_value(o, run, 8, "3.732511156817", 12);
  expect_stb(o, run, 2);
  const std::string eps = sci6(packing_error_bound(sys, 10).epsilon);
  o.note("eps_10=" + eps);
  if (eps != "1.28830e-14") o.fail("expected eps_10=1.28830e-14");
  expect_time(o, run.seconds, 30.0);
  runs.emplace_back("S_1/27 packing", std::move(run));
  return o;
}

Outcome criterion3(std::vector<std::pair<std::string, Run>>& runs) {
  struct Row {
    int k;
    const char* value;
    const char* lo;
    const char* hi;
  };
  const Row table[] = {
      {5, "3.67050829", "2.00793066", "5.33308593"}, {6, "3.65830695", "2.96002434", "4.35658956"},
      {7, "3.64297340", "3.34969470", "3.93625210"}, {8, "3.63389479", "3.51071773", "3.75707184"},
      {9, "3.63071511", "3.57898075", "3.68244948"}, {10, "3.62998849", "3.60826005", "3.65171693"},
  };
  Outcome o;
  const Run& run = s042_trace();
  int matched = 0;
  for (const Row& row : table) {
    const MeasureEstimate* e = run.at(row.k);
    if (!e) {
      o.fail("k=" + std::to_string(row.k) + " missing");
      continue;
    }
    const std::string v = fixed(e->value, 8);
    const std::string lo = format_directed(e->interval_lo, 8, false);
    const std::string hi = format_directed(e->interval_hi, 8, true);
    if (v == row.value && lo == row.lo && hi == row.hi) {
      ++matched;
    } else {
      o.fail("k=" + std::to_string(row.k) + " got " + v + " (" + lo + ", " + hi + ")");
    }
  }
  o.note(std::to_string(matched) + "/6 rows match");
  expect_time(o, run.seconds, 60.0);
  runs.emplace_back("S_0.42 packing", run);
  return o;
}

Outcome criterion4(std::vector<std::pair<std::string, Run>>& runs) {
  Outcome o;
  Run c = sweep(cantor_system(1.0 / 3.0), MeasureKind::CenteredHausdorff, 1, 8);
  expect_value(o, c, 8, "1.199023144561", 12);
  expect_stb(o, c, 3);
  Run k = sweep(planar_cantor_system(0.01), MeasureKind::CenteredHausdorff, 1, 7);
  expect_value(o, k, 7, "1.363372877653", 12);
  expect_stb(o, k, 2);
  expect_time(o, c.seconds + k.seconds, 60.0);
  runs.emplace_back("C_1/3 centered", std::move(c));
  runs.emplace_back("K_0.01 centered", std::move(k));
  return o;
}

Outcome criterion5(std::vector<std::pair<std::string, Run>>& runs) {
  struct Row {
    int k;
    const char* x;
    const char* d;
    const char* value;
    const char* lo;
    const char* hi;
  };
  const Row table[] = {
      {5, "0.55000000", "0.45887500", "1.02422358", "0.39037468", "1.65807248"},
      {6, "0.55000000", "0.43862500", "1.03859290", "0.75336089", "1.32382491"},
      {7, "0.56014905", "0.44047028", "1.03299380", "0.90463940", "1.16134821"},
      {8, "0.44626331", "0.44252661", "1.03252769", "0.97476821", "1.09028718"},
      {9, "0.55662225", "0.44356574", "1.03231740", "1.00632562", "1.05830917"},
      {10, "0.55549190", "0.44450810", "1.03191238", "1.02021608", "1.04360868"},
      {11, "0.55549190", "0.44416759", "1.03180195", "1.02653862", "1.03706529"},
      {12, "0.55567918", "0.44432082", "1.03153497", "1.02916647", "1.03390348"},
      {13, "0.55567918", "0.44432082", "1.03153497", "1.03046914", "1.03260080"},
      {14, "0.55567918", "0.44432082", "1.03153497", "1.03105535", "1.03201460"},
  };
  Outcome o;
  const Run& run = c045_trace();
  int matched = 0;
  for (const Row& row : table) {
    const MeasureEstimate* e = run.at(row.k);
    if (!e || e->witness_center.empty()) {
      o.fail("k=" + std::to_string(row.k) + " missing");
      continue;
    }
    const std::string x = fixed(e->witness_center[0], 8);
    const std::string d = fixed(e->witness_radius, 8);
    const std::string v = fixed(e->value, 8);
    const std::string lo = format_directed(e->interval_lo, 8, false);
    const std::string hi = format_directed(e->interval_hi, 8, true);
    if (x == row.x && d == row.d && v == row.value && lo == row.lo && hi == row.hi) {
      ++matched;
    } else {
      o.fail("k=" + std::to_string(row.k) + " got x=" + x + " d=" + d + " " + v + " (" + lo + ", " +
             hi + ")");
    }
  }
  o.note(std::to_string(matched) + "/10 rows match");
  expect_time(o, run.seconds, 30.0);
  runs.emplace_back("C_0.45 centered", run);
  return o;
}

std::string verdict_text(const HypothesisVerdict& v) {
  return v.verdict == Verdict::Rejected ? "Rejected" : "Consistent";
}

Outcome criterion6() {
  Outcome o;
  {
    const IFSystem sys = planar_cantor_system(0.42);
    const MeasureEstimate e = estimate_packing(sys, 8);
    const double g2 = closed_form(Formula::G2, 0.42, Family::Planar).value;
    const HypothesisVerdict v = test_hypothesis(g2, e);
    o.note("g2(0.42)=" + fixed(g2, 12) + " vs K_0.42 k=8 " + fixed(e.value, 12) + " eps=" +
           sci6(e.epsilon) + ": " + verdict_text(v));
    if (v.verdict != Verdict::Rejected) o.fail("g2(0.42) not rejected");
  }
  {
    const FormulaResult g3 = closed_form(Formula::G3, 0.3519, Family::Cantor);
    if (fixed(g3.value, 12) != "1.187893625780") o.fail("g3(0.3519)=" + fixed(g3.value, 12));
    const MeasureEstimate e = estimate_centered(cantor_system(0.3519), 12);
    const HypothesisVerdict v = test_hypothesis(g3.value, e);
    o.note("g3(0.3519) vs C k=12 " + fixed(e.value, 12) + " eps=" + sci6(e.epsilon) + ": " +
           verdict_text(v));
    if (v.verdict != Verdict::Rejected) o.fail("g3(0.3519) not rejected");
  }
  {
    const double g1 = closed_form(Formula::G1, 0.25, Family::Cantor).value;
    const Run run = sweep(cantor_system(0.25), MeasureKind::Packing, 1, 12);
    int consistent = 0;
    for (const auto& e : run.rows) {
      if (test_hypothesis(g1, e).verdict == Verdict::Consistent) {
        ++consistent;
      } else {
        o.fail("g1(0.25) rejected at k=" + std::to_string(e.level));
      }
    }
    o.note("g1(0.25) consistent at " + std::to_string(consistent) + "/" +
           std::to_string(run.rows.size()) + " feasible k");
    if (run.rows.empty()) o.fail("no feasible k");
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  int cases = 0;
  int inside = 0;
  auto check = [&](const IFSystem& sys, Family fam, double r, MeasureKind kind, Formula f, int k_max) {
    const FormulaResult g = closed_form(f, r, fam);
    if (!g.proven) return;
    const Run run = sweep(sys, kind, 1, k_max);
    for (const auto& e : run.rows) {
      ++cases;
      if (g.value >= e.value - e.epsilon && g.value <= e.value + e.epsilon) {
        ++inside;
      } else {
        o.fail(std::string(family_name(fam)) + " r=" + fixed(r, 4) + " " + kind_name(kind) +
               " k=" + std::to_string(e.level));
      }
    }
  };
  for (double r : {0.2, 0.25, 1.0 / 3.0, 0.38, 0.45}) {
    const IFSystem sys = cantor_system(r);
    check(sys, Family::Cantor, r, MeasureKind::Packing, Formula::G1, 12);
    check(sys, Family::Cantor, r, MeasureKind::CenteredHausdorff, Formula::G3, 12);
  }
  for (double r : {1.0 / 27.0, 0.2, 1.0 / 3.0}) {
    check(sierpinski_system(r), Family::Sierpinski, r, MeasureKind::Packing, Formula::G1, 8);
  }
  o.note(std::to_string(inside) + "/" + std::to_string(cases) + " cases enclose the closed form");
  if (cases == 0) o.fail("empty grid");
  return o;
}

Outcome criterion8() {
  Outcome o;
  int compared = 0;
  int equal = 0;
  auto same = [](const MeasureEstimate& a, const MeasureEstimate& b) {
    return a.value == b.value && a.epsilon == b.epsilon && a.witness_center == b.witness_center &&
           a.witness_partner == b.witness_partner && a.witness_radius == b.witness_radius &&
           a.witness_mass == b.witness_mass;
  };
  for (Family fam : {Family::Cantor, Family::Sierpinski, Family::Planar}) {
    for (double r : {0.05, 0.2, 0.25, 1.0 / 3.0, 0.42, 0.45}) {
      const IFSystem sys = family_system(fam, r);
      const DerivedConstants dc = derive_constants(sys);
      for (int k = 1; k <= 5; ++k) {
        const std::string tag = std::string(family_name(fam)) + " r=" + fixed(r, 4) + " k=" + std::to_string(k);
        ++compared;
        if (same(estimate_centered(sys, dc, k), oracle::brute_centered(sys, k))) {
          ++equal;
        } else {
          o.fail(tag + " centered");
        }
        if (!window_feasible(dc, k)) continue;
        ++compared;
        if (same(estimate_packing(sys, dc, k), oracle::brute_packing(sys, k))) {
          ++equal;
        } else {
          o.fail(tag + " packing");
        }
      }
    }
  }
  o.note(std::to_string(equal) + "/" + std::to_string(compared) + " combinations bit-equal");
  if (compared < 30) o.fail("fewer than 30 combinations");
  return o;
}

std::string csv_without_elapsed(const Run& run) {
  std::string out;
  for (const auto& e : run.rows) {
    std::string row = measure_csv_row(e, true);
    row.erase(row.rfind(','));
    out += row + '\n';
  }
  return out;
}

Outcome criterion9() {
  Outcome o;
  const unsigned max_threads = resolve_threads(0);
  std::vector<unsigned> counts{1, 2, max_threads};
  if (max_threads < 4) counts.push_back(4);  // oversubscribe on small machines
  std::string text = "threads";
  for (unsigned t : counts) text += ' ' + std::to_string(t);
  o.note(text);
  for (int which = 0; which < 2; ++which) {
    std::string first;
    for (unsigned t : counts) {
      const Run run = which == 0 ? sweep(sierpinski_system(0.42), MeasureKind::Packing, 5, 10, t)
                                 : sweep(cantor_system(0.45), MeasureKind::CenteredHausdorff, 5, 14, t);
      const std::string csv = csv_without_elapsed(run);
      if (first.empty()) {
        first = csv;
      } else if (csv != first) {
        o.fail(std::string(which == 0 ? "S_0.42" : "C_0.45") + " differs at " + std::to_string(t) +
               " threads");
      }
    }
  }
  return o;
}

Outcome criterion10(const std::vector<std::pair<std::string, Run>>& runs) {
  // Once q is fixed the bound scales by r_max per level.
  Outcome o;
  int checked = 0;
  for (const auto& [name, run] : runs) {
    const std::size_t n = run.rows.size();
    if (n < 4) {
      o.note(name + " too short");
      continue;
    }
    bool q_fixed = true;
    for (std::size_t i = n - 4; i < n; ++i) q_fixed = q_fixed && run.rows[i].q == run.rows[n - 1].q;
    if (!q_fixed) {
      o.fail(name + " q not stable over the last levels");
      continue;
    }
    double worst = 0.0;
    for (std::size_t i = n - 3; i < n; ++i) {
      const double ratio = run.rows[i].epsilon / run.rows[i - 1].epsilon;
      worst = std::max(worst, std::abs(ratio / run.r_max - 1.0));
    }
    o.note(name + " " + fixed(100.0 * worst, 2) + "%");
    if (worst > 0.05) o.fail(name + " ratio off r_max by more than 5%");
    ++checked;
  }
  if (checked == 0) o.fail("no run long enough");
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, Run>> runs;
  int failures = 0;
  auto emit = [&](int id, const char* title, const std::function<Outcome()>& body) {
    Outcome o;
    try {
      o = body();
    } catch (const Error& e) {
      o.fail(std::string("error ") + error_code_name(e.code()) + ": " + e.what());
    } catch (const std::exception& e) {
      o.fail(e.what());
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
  };
  emit(1, "packing C_1/4 exact recovery", [&] { return criterion1(runs); });
  emit(2, "packing S_1/27 exact recovery", [&] { return criterion2(runs); });
  emit(3, "packing S_0.42 trace", [&] { return criterion3(runs); });
  emit(4, "centered exact recovery", [&] { return criterion4(runs); });
  emit(5, "centered C_0.45 trace", [&] { return criterion5(runs); });
  emit(6, "hypothesis tests", [] { return criterion6(); });
  emit(7, "bound soundness grid", [] { return criterion7(); });
  emit(8, "oracle equivalence", [] { return criterion8(); });
  emit(9, "thread determinism", [] { return criterion9(); });
  emit(10, "error bound decay", [&] { return criterion10(runs); });
  return failures;
}
