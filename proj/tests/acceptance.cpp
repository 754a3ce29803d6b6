// Acceptance gate: eleven criteria, one PASS/FAIL line each, nonzero exit
// when any fail. Tolerances are pinned here on purpose; loosening them is a
// decision, not a tweak.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plate/cli.hpp"
#include "plate/exponents.hpp"
#include "plate/field.hpp"
#include "plate/geometry.hpp"
#include "plate/harnack.hpp"
#include "plate/levelset.hpp"
#include "plate/plate_operator.hpp"
#include "plate/positivity.hpp"

using namespace plate;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void line(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %2d: %s\n", ok ? "PASS" : "FAIL", id,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void run(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    line(id, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* spec, ...) {
  char buf[512];
  va_list args;
  va_start(args, spec);
  std::vsnprintf(buf, sizeof(buf), spec, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// manufactured solutions: u = (1-|x|^2)^2 on the unit disk and
// u = (x(1-x) y(1-y))^2 on the unit square, sources by symbolic expansion
double disk_u(const Point& p) {
  const double r2 = p[0] * p[0] + p[1] * p[1];
  return (1.0 - r2) * (1.0 - r2);
}

double disk_f(const Point& p, double gamma) {
  const double r2 = p[0] * p[0] + p[1] * p[1];
  return 64.0 + gamma * (8.0 - 16.0 * r2);
}

double rect_u(const Point& p) {
  const double gx = p[0] * p[0] * (1.0 - p[0]) * (1.0 - p[0]);
  const double gy = p[1] * p[1] * (1.0 - p[1]) * (1.0 - p[1]);
  return gx * gy;
}

double rect_f(const Point& p, double gamma) {
  const double x = p[0], y = p[1];
  const double gx = x * x * (1.0 - x) * (1.0 - x);
  const double gy = y * y * (1.0 - y) * (1.0 - y);
  const double gx2 = 2.0 - 12.0 * x + 12.0 * x * x;
  const double gy2 = 2.0 - 12.0 * y + 12.0 * y * y;
  return (24.0 * gy + 2.0 * gx2 * gy2 + 24.0 * gx) -
         gamma * (gx2 * gy + gx * gy2);
}

double interior_error(const DomainMask& mask, const ScalarField& u,
                      const std::function<double(const Point&)>& exact) {
  double err = 0.0;
  for (std::size_t c = 0; c < mask.interior_count(); ++c) {
    if (mask.cell_dist[c] <= 4.0 * mask.h) continue;
    err = std::max(err, std::abs(u[c] - exact(mask.node_point(mask.cells[c]))));
  }
  return err;
}

struct SolveRecord {
  std::string label;
  bool converged = false;
  EnergyReport energy;
};

std::vector<SolveRecord> solve_log;

// criterion 10 reuses the base errors measured under criterion 1
double disk_e32_gamma4 = 0.0, disk_max32_gamma4 = 0.0;
double rect_e32_gamma4 = 0.0, rect_max32_gamma4 = 0.0;

const ExponentSet& defaults2d() {
  static const ExponentSet e = derive_exponents(2, 5.0, 2.0, 3.0);
  return e;
}

// ---- criteria -------------------------------------------------------------

void criterion_1() {
  double worst_solve = 0.0;
  bool disk_ok = true, rect_ok = true;
  std::string detail;

  for (const double gamma : {0.0, 4.0}) {
    double disk_err[2] = {0.0, 0.0};
    double rect_err[2] = {0.0, 0.0};
    for (int lvl = 0; lvl < 2; ++lvl) {
      const double h = lvl == 0 ? 1.0 / 32.0 : 1.0 / 64.0;

      const DomainMask disk = make_disk(1.0, h);
      const ScalarField fd = make_field(
          disk, [gamma](const Point& p) { return disk_f(p, gamma); });
      auto t0 = std::chrono::steady_clock::now();
      const PlateSolution sd = solve_plate(disk, fd, gamma, 1e-10, false);
      worst_solve = std::max(worst_solve, seconds_since(t0));
      disk_err[lvl] = interior_error(disk, sd.u, disk_u);
      solve_log.push_back({fmt("disk h=%g gamma=%g", h, gamma),
                           sd.stats.converged,
                           energy_report(disk, sd.u, fd, gamma)});
      if (gamma == 4.0 && lvl == 0) {
        disk_e32_gamma4 = disk_err[0];
        disk_max32_gamma4 = max_value(sd.u);
      }

      const DomainMask rect = make_rectangle({1.0, 1.0, 0.0}, h);
      const ScalarField fr = make_field(
          rect, [gamma](const Point& p) { return rect_f(p, gamma); });
      t0 = std::chrono::steady_clock::now();
      const PlateSolution sr = solve_plate(rect, fr, gamma, 1e-11, false);
      worst_solve = std::max(worst_solve, seconds_since(t0));
      double err = 0.0;
      for (std::size_t c = 0; c < rect.interior_count(); ++c)
        err = std::max(err,
                       std::abs(sr.u[c] - rect_u(rect.node_point(rect.cells[c]))));
      rect_err[lvl] = err;
      solve_log.push_back({fmt("rectangle h=%g gamma=%g", h, gamma),
                           sr.stats.converged,
                           energy_report(rect, sr.u, fr, gamma)});
      if (gamma == 4.0 && lvl == 0) {
        rect_e32_gamma4 = rect_err[0];
        rect_max32_gamma4 = max_value(sr.u);
      }
    }

    const double disk_ratio = disk_err[0] / disk_err[1];
    const double rect_ratio = rect_err[0] / rect_err[1];
    disk_ok = disk_ok && disk_ratio >= 2.0;
    rect_ok = rect_ok && rect_ratio >= 3.2 && rect_ratio <= 4.8;
    detail += fmt("gamma=%g disk ratio %.4f rect ratio %.4f; ", gamma,
                  disk_ratio, rect_ratio);
  }

  const bool time_ok = worst_solve < 60.0;
  detail += fmt("max solve %.1fs", worst_solve);
  line(1, disk_ok && rect_ok && time_ok, detail);
}

void criterion_2() {
  const DomainMask disk = make_disk(1.0, 1.0 / 64.0);
  const ScalarField f = make_field(disk, [](const Point&) { return 1.0; });
  const PlateSolution sol = solve_plate(disk, f, 0.0, 1e-8, false);
  solve_log.push_back({"boggio disk h=1/64", sol.stats.converged,
                       energy_report(disk, sol.u, f, 0.0)});
  const double lo = min_value(sol.u), hi = max_value(sol.u);
  line(2, lo >= -1e-8 * hi,
       fmt("min u = %.3e, max u = %.3e, min/max = %.3e (need >= -1e-8)", lo,
           hi, lo / hi));
}

void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  int violations = 0;
  double worst_sstar = 0.0, worst_quad = 0.0;
  int points = 0;
  for (const int N : {2, 3}) {
    for (int it = 0; it < 20; ++it) {
      const double t = N + 0.5 + 9.5 * it / 19.0;
      for (int ip = 0; ip < 20; ++ip) {
        const double p = 1.1 + 2.9 * ip / 19.0;
        // q stops a sixth short of the degenerate edge q = 2p, where
        // s* diverges and the identity loses conditioning in doubles
        for (int iq = 1; iq <= 20; ++iq) {
          const double q = 2.0 + (2.0 * p - 2.0) * iq / 24.0;
          const ExponentSet e = derive_exponents(N, t, p, q);
          const ExponentResiduals r = validate_exponents(e);
          worst_sstar = std::max(worst_sstar, r.s_star_identity);
          worst_quad = std::max(worst_quad, r.quadratic);
          if (r.s_star_identity > 1e-12 || r.quadratic > 1e-12 ||
              !r.theta_above_one || !r.a_below_one)
            ++violations;
          ++points;
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  line(3, violations == 0 && elapsed < 5.0,
       fmt("%d points, 0 tolerance: worst s* residual %.2e, worst quadratic "
           "%.2e, %d violations, %.2fs",
           points, worst_sstar, worst_quad, violations, elapsed));
}

void criterion_4() {
  // two extra shapes so the identity is not only exercised on criterion 1
  {
    const DomainMask disk = make_disk(1.0, 1.0 / 32.0);
    const GaussianBump bump{{0.2, -0.1, 0.0}, 0.2, 3.0, 0.0};
    const ScalarField f = make_bump_field(disk, {&bump, 1});
    const PlateSolution sol = solve_plate(disk, f, 2.0, 1e-10, false);
    solve_log.push_back({"disk bump gamma=2", sol.stats.converged,
                         energy_report(disk, sol.u, f, 2.0)});
  }
  {
    const DomainMask box = make_rectangle({1.0, 1.0, 1.0}, 1.0 / 8.0, 3);
    const ScalarField f = make_field(box, [](const Point&) { return 1.0; });
    const PlateSolution sol = solve_plate(box, f, 1.0, 1e-10, false);
    solve_log.push_back({"box 3d gamma=1", sol.stats.converged,
                         energy_report(box, sol.u, f, 1.0)});
  }

  double worst = 0.0;
  int converged = 0;
  bool ok = true;
  for (const SolveRecord& rec : solve_log) {
    if (!rec.converged) continue;
    ++converged;
    worst = std::max(worst, rec.energy.identity_residual);
    if (!(rec.energy.identity_residual <= 1e-6)) ok = false;
  }
  line(4, ok && converged > 0,
       fmt("%d converged solves, worst |bend + g*stretch - work| / |work| = "
           "%.2e (need <= 1e-6)",
           converged, worst));
}

void criterion_5() {
  const DomainMask mask = make_rectangle({1.0, 1.0, 0.0}, 1.0 / 32.0);
  const ExponentSet& e = defaults2d();
  const Calibration cal = calibrate_degiorgi(mask, e, 50, 101);
  const SuiteOutcome holdout = validate_degiorgi(mask, e, cal.c, 50, 202);
  line(5, holdout.evaluated == 50 && holdout.violations == 0,
       fmt("c = %.6f from 50 fields; holdout: %d evaluated, %d violations "
           "(sup bound, psi bound, closed-form d)",
           cal.c, holdout.evaluated, holdout.violations));
}

void criterion_6() {
  const DomainMask mask = make_rectangle({1.0, 1.0, 0.0}, 1.0 / 32.0);
  const ExponentSet& e = defaults2d();
  const Calibration cal = calibrate_harnack(mask, e, 50, 303);
  const SuiteOutcome holdout = validate_harnack(mask, e, cal.c, 50, 404);

  // exact shift invariance on data where the shift is free of rounding
  ScalarField u = make_calibration_field(mask, suite_field_seed(303, 0));
  const double q = 1048576.0;
  for (double& v : u.values) v = std::floor(v * q) / q;
  ScalarField shifted = u;
  for (double& v : shifted.values) v += 3.25;
  const Probe pr = make_probe(mask, u, suite_field_seed(303, 0) + 1);
  const HarnackReport a = harnack_check(u, e, pr.center, pr.r, cal.c);
  const HarnackReport b = harnack_check(shifted, e, pr.center, pr.r, cal.c);
  const bool shift_exact = a.implied_constant == b.implied_constant &&
                           a.rhs_unit == b.rhs_unit;

  line(6,
       holdout.evaluated == 50 && holdout.violations == 0 && shift_exact,
       fmt("c = %.6f from 50 fields; holdout: %d evaluated, %d violations; "
           "shift invariance bitwise %s",
           cal.c, holdout.evaluated, holdout.violations,
           shift_exact ? "exact" : "BROKEN"));
}

std::vector<double> poincare_constants(double h, std::uint64_t seed, double p,
                                       int fields) {
  const DomainMask mask = make_rectangle({1.0, 1.0, 0.0}, h);
  const ScalarField zero = make_field(mask, [](const Point&) { return 0.0; });
  std::vector<double> out;
  for (int i = 0; i < fields; ++i) {
    const std::uint64_t fs = suite_field_seed(seed, i);
    const Probe pr = make_probe(mask, zero, fs);
    const ScalarField u = make_half_vanishing_field(mask, pr.center, pr.r, fs);
    out.push_back(check_poincare_half(u, pr.center, pr.r, p).implied_constant);
  }
  return out;
}

void criterion_7() {
  bool ok = true;
  std::string detail;
  for (const double p : {2.0, 4.0}) {
    const auto coarse = poincare_constants(1.0 / 32.0, 7, p, 20);
    const auto fine = poincare_constants(1.0 / 64.0, 7, p, 20);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      if (!std::isfinite(coarse[i]) || !std::isfinite(fine[i])) ok = false;
      const double rel =
          std::abs(coarse[i] - fine[i]) / std::max(coarse[i], fine[i]);
      worst = std::max(worst, rel);
      if (!(rel < 0.20)) ok = false;
    }
    detail += fmt("p=%g worst variation %.2f%%; ", p, 100.0 * worst);
  }
  line(7, ok, detail + "(need < 20% and finite)");
}

void criterion_8() {
  const DomainMask disk = make_disk(1.0, 1.0 / 32.0);
  const GaussianBump bump{{0.0, 0.0, 0.0}, 0.12, 1.0, 0.5};
  const ScalarField f = make_bump_field(disk, {&bump, 1});

  const auto omegas = make_exhaustion(disk, 3);
  const Decomposition dec = decompose_source(f, omegas);

  double recon = 0.0;
  const double scale = max_value(f);
  for (std::size_t c = 0; c < disk.interior_count(); ++c) {
    double sum = 0.0;
    for (const ScalarField& g : dec.parts) sum += g[c];
    recon = std::max(recon, std::abs(sum - f[c]));
  }
  const double recon_rel = recon / scale;

  const SuperpositionReport sup = superposition_check(disk, 1.0, dec, 1e-10);
  line(8,
       recon_rel <= 1e-12 && sup.rel_gap <= 1e-8 && sup.all_converged,
       fmt("3-level exhaustion: reconstruction %.2e (need <= 1e-12), "
           "superposition gap %.2e (need <= 1e-8)",
           recon_rel, sup.rel_gap));
}

void criterion_9() {
  const DomainMask mask = make_rectangle({4.0, 1.0, 0.0}, 1.0 / 32.0);
  const ExponentSet& e = defaults2d();
  const Calibration cal = calibrate_harnack(mask, e, 50, 11);

  const std::vector<GaussianBump> bumps = {
      {{1.0, 0.5, 0.0}, 0.15, 1.0, 0.0}, {{3.0, 0.5, 0.0}, 0.15, 1.0, 0.0}};
  const ScalarField f = make_bump_field(mask, bumps);

  const double g0 = compute_gamma0(integral(f), mask.diameter, e, cal.c,
                                   Gamma0Variant::two_eta);
  std::vector<double> gammas = {0.0};
  for (double g = 1.0; g < 2.0 * g0; g *= 2.0) gammas.push_back(g);
  gammas.push_back(2.0 * g0);

  const GammaScanResult scan = scan_gamma(mask, f, gammas, 1e-8, e, cal.c);

  bool decreasing = true;
  for (std::size_t i = 1; i < scan.energy.size(); ++i)
    decreasing = decreasing && scan.energy[i] < scan.energy[i - 1];

  const double last_min = scan.min_u.back();
  const double last_max = scan.max_u.back();
  const bool positive_at_2g0 = last_min >= -1e-8 * std::max(last_max, 0.0);
  const bool variants = scan.gamma0_two_eta > 0.0 && scan.gamma0_four_eta > 0.0;

  line(9,
       scan.all_converged && decreasing && positive_at_2g0 && variants,
       fmt("c = %.4f, gamma0 = %.2f (two-eta) / %.3e (four-eta); energy "
           "strictly decreasing over %zu gammas: %s; min u at 2*gamma0 = "
           "%.2e; min u at gamma=0 = %.2e (recorded as data)",
           cal.c, scan.gamma0_two_eta, scan.gamma0_four_eta, gammas.size(),
           decreasing ? "yes" : "NO", last_min, scan.min_u.front()));
}

void criterion_10() {
  ShapeSpec disk_spec;
  disk_spec.tag = ShapeTag::disk;
  disk_spec.dim = 2;
  disk_spec.h = 1.0 / 32.0;
  disk_spec.radius = 1.0;
  const DilationReport disk_rep = check_dilation(
      disk_spec, [](const Point& p) { return disk_f(p, 4.0); }, 4.0, 2.0);
  const double disk_allowed = 5.0 * disk_e32_gamma4 / disk_max32_gamma4;

  ShapeSpec rect_spec;
  rect_spec.tag = ShapeTag::rectangle;
  rect_spec.dim = 2;
  rect_spec.h = 1.0 / 32.0;
  rect_spec.extent = {1.0, 1.0, 0.0};
  const DilationReport rect_rep = check_dilation(
      rect_spec, [](const Point& p) { return rect_f(p, 4.0); }, 4.0, 2.0);
  const double rect_allowed = 5.0 * rect_e32_gamma4 / rect_max32_gamma4;

  const bool ok = disk_e32_gamma4 > 0.0 && rect_e32_gamma4 > 0.0 &&
                  disk_rep.rel_gap <= disk_allowed &&
                  rect_rep.rel_gap <= rect_allowed;
  line(10, ok,
       fmt("s=2: disk gap %.3e vs 5x base error %.3e; rectangle gap %.3e vs "
           "%.3e",
           disk_rep.rel_gap, disk_allowed, rect_rep.rel_gap, rect_allowed));
}

void criterion_11() {
  const nlohmann::json solve_cfg{
      {"command", "solve"},
      {"domain", {{"shape", "disk"}, {"radius", 1.0}, {"h", 0.0625}}},
      {"source",
       {{"kind", "gaussian-bumps"},
        {"bumps", nlohmann::json::array({{{"center", {0.1, -0.2}},
                                          {"width", 0.25},
                                          {"amplitude", 2.0}}})}}},
      {"gamma", 2.0}};
  const nlohmann::json suite_cfg{
      {"command", "degiorgi"},
      {"domain",
       {{"shape", "rectangle"}, {"extent", {1.0, 1.0}}, {"h", 0.0625}}},
      {"fields", 8},
      {"seed", 3}};

  int files_compared = 0;
  bool identical = true;
  for (const nlohmann::json& cfg : {solve_cfg, suite_cfg}) {
    const fs::path a = "acceptance_det_a", b = "acceptance_det_b";
    fs::remove_all(a);
    fs::remove_all(b);
    CliOptions oa, ob;
    oa.out_dir = a.string();
    ob.out_dir = b.string();
    const RunOutcome ra = run_config(cfg, oa);
    const RunOutcome rb = run_config(cfg, ob);
    if (ra.files_written != rb.files_written) identical = false;
    for (const std::string& name : ra.files_written) {
      std::ifstream fa(a / name, std::ios::binary);
      std::ifstream fb(b / name, std::ios::binary);
      std::ostringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      if (sa.str() != sb.str() || sa.str().empty()) identical = false;
      ++files_compared;
    }
    fs::remove_all(a);
    fs::remove_all(b);
  }
  line(11, identical && files_compared > 0,
       fmt("%d files byte-identical across repeated runs (solve + suite "
           "commands)",
           files_compared));
}

}  // namespace

int main() {
  std::printf("acceptance gate\n");
  run(1, criterion_1);
  run(2, criterion_2);
  run(3, criterion_3);
  run(4, criterion_4);
  run(5, criterion_5);
  run(6, criterion_6);
  run(7, criterion_7);
  run(8, criterion_8);
  run(9, criterion_9);
  run(10, criterion_10);
  run(11, criterion_11);
  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures > 0 ? 1 : 0;
}
