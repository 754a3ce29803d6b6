#include "plate/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include "plate/exponents.hpp"
#include "plate/field.hpp"
#include "plate/geometry.hpp"
#include "plate/harnack.hpp"
#include "plate/levelset.hpp"
#include "plate/par.hpp"
#include "plate/plate_operator.hpp"
#include "plate/positivity.hpp"
#include "plate/report_io.hpp"

namespace plate {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config error at " + path + ": " + what);
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_num(const json& obj, const std::string& base, const char* key,
               double fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) fail(base + "/" + key, "must be a number");
  return v->get<double>();
}

double need_num(const json& obj, const std::string& base, const char* key) {
  if (!find(obj, key)) fail(base + "/" + key, "required key is missing");
  return get_num(obj, base, key, 0.0);
}

double need_pos(const json& obj, const std::string& base, const char* key) {
  const double v = need_num(obj, base, key);
  if (!(v > 0.0)) fail(base + "/" + key, "must be positive");
  return v;
}

int get_int(const json& obj, const std::string& base, const char* key,
            int fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) fail(base + "/" + key, "must be an integer");
  return v->get<int>();
}

std::string get_str(const json& obj, const std::string& base, const char* key,
                    const std::string& fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) fail(base + "/" + key, "must be a string");
  return v->get<std::string>();
}

std::string need_str(const json& obj, const std::string& base,
                     const char* key) {
  if (!find(obj, key)) fail(base + "/" + key, "required key is missing");
  return get_str(obj, base, key, "");
}

Point point_from(const json& v, const std::string& path, int dim) {
  if (!v.is_array() || v.size() != static_cast<std::size_t>(dim)) {
    fail(path, "must be an array of " + std::to_string(dim) + " numbers");
  }
  Point p{};
  for (int i = 0; i < dim; ++i) {
    if (!v[i].is_number()) fail(path, "must contain numbers only");
    p[i] = v[i].get<double>();
  }
  return p;
}

void reject_unknown_keys(const json& obj, const std::string& base,
                         const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) fail(base + "/" + item.key(), "unknown key");
  }
}

// ---- config to objects ------------------------------------------------------

DomainMask domain_from_config(const json& cfg) {
  const json& d = *find(cfg, "domain");
  reject_unknown_keys(d, "/domain",
                      {"shape", "h", "dim", "extent", "radius", "inner_radius",
                       "outer_radius", "side", "lobe", "corridor_length",
                       "corridor_width"});
  const std::string shape = need_str(d, "/domain", "shape");
  const double h = need_pos(d, "/domain", "h");
  const int dim = get_int(d, "/domain", "dim", 2);
  if (dim != 2 && dim != 3) fail("/domain/dim", "must be 2 or 3");

  if (shape == "rectangle") {
    const json* e = find(d, "extent");
    if (!e) fail("/domain/extent", "required key is missing");
    const Point ext = point_from(*e, "/domain/extent", dim);
    for (int i = 0; i < dim; ++i) {
      if (!(ext[i] > 0.0)) fail("/domain/extent", "entries must be positive");
    }
    return make_rectangle({ext[0], ext[1], ext[2]}, h, dim);
  }
  if (shape == "disk") {
    return make_disk(need_pos(d, "/domain", "radius"), h, dim);
  }
  if (shape == "annulus") {
    const double inner = need_pos(d, "/domain", "inner_radius");
    const double outer = need_pos(d, "/domain", "outer_radius");
    if (!(outer > inner)) {
      fail("/domain/outer_radius", "must exceed inner_radius");
    }
    return make_annulus(inner, outer, h, dim);
  }
  if (shape == "l_shape") {
    return make_lshape(need_pos(d, "/domain", "side"), h, dim);
  }
  if (shape == "dumbbell") {
    return make_dumbbell(need_pos(d, "/domain", "lobe"),
                         need_pos(d, "/domain", "corridor_length"),
                         need_pos(d, "/domain", "corridor_width"), h, dim);
  }
  fail("/domain/shape",
       "must be one of rectangle|disk|annulus|l_shape|dumbbell");
}

ScalarField source_from_config(const DomainMask& mask, const json& cfg) {
  const json& s = *find(cfg, "source");
  reject_unknown_keys(s, "/source",
                      {"kind", "value", "center", "radius", "bumps"});
  const std::string kind = need_str(s, "/source", "kind");

  if (kind == "constant") {
    const double v = need_num(s, "/source", "value");
    return make_field(mask, [v](const Point&) { return v; });
  }
  if (kind == "gaussian-bumps") {
    const json* arr = find(s, "bumps");
    if (!arr || !arr->is_array() || arr->empty()) {
      fail("/source/bumps", "must be a non-empty array");
    }
    std::vector<GaussianBump> bumps;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const json& b = (*arr)[i];
      const std::string base = "/source/bumps/" + std::to_string(i);
      if (!b.is_object()) fail(base, "must be an object");
      reject_unknown_keys(b, base,
                          {"center", "width", "amplitude", "truncate_radius"});
      GaussianBump bump;
      const json* c = find(b, "center");
      if (!c) fail(base + "/center", "required key is missing");
      bump.center = point_from(*c, base + "/center", mask.dim);
      bump.width = need_pos(b, base, "width");
      bump.amplitude = need_num(b, base, "amplitude");
      bump.truncate_radius = get_num(b, base, "truncate_radius", 0.0);
      if (bump.truncate_radius < 0.0) {
        fail(base + "/truncate_radius", "must be nonnegative");
      }
      bumps.push_back(bump);
    }
    return make_bump_field(mask, bumps);
  }
  if (kind == "indicator") {
    const json* c = find(s, "center");
    if (!c) fail("/source/center", "required key is missing");
    const Point center = point_from(*c, "/source/center", mask.dim);
    const double radius = need_pos(s, "/source", "radius");
    const double value = need_num(s, "/source", "value");
    return make_field(mask, [center, radius, value](const Point& p) {
      return dist(p, center) <= radius ? value : 0.0;
    });
  }
  fail("/source/kind", "must be one of constant|gaussian-bumps|indicator");
}

ExponentSet exponents_from_config(const json& cfg, int default_N) {
  const int N = get_int(cfg, "", "N", default_N);
  const double t = get_num(cfg, "", "t", 5.0);
  const double p = get_num(cfg, "", "p", 2.0);
  const double q = get_num(cfg, "", "q", 3.0);
  try {
    return derive_exponents(N, t, p, q);
  } catch (const std::invalid_argument& e) {
    fail("/N", std::string("exponent parameters rejected: ") + e.what());
  }
}

std::vector<double> gammas_from_config(const json& cfg) {
  const json* g = find(cfg, "gammas");
  if (!g || !g->is_array() || g->empty()) {
    fail("/gammas", "must be a non-empty array of numbers");
  }
  std::vector<double> gammas;
  for (const json& v : *g) {
    if (!v.is_number()) fail("/gammas", "must contain numbers only");
    gammas.push_back(v.get<double>());
    if (gammas.back() < 0.0) fail("/gammas", "entries must be nonnegative");
  }
  return gammas;
}

// A second suite seed far from the calibration one; an LCG step keeps it
// deterministic while breaking the additive structure of the per-field
// seeds, so the two suites share no field.
std::uint64_t holdout_seed(std::uint64_t seed) {
  return seed * 6364136223846793005ULL + 1442695040888963407ULL;
}

std::string json_file(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

// ---- validation ---------------------------------------------------------------

void validate_config(const json& cfg) {
  if (!cfg.is_object()) fail("", "config must be a JSON object");
  reject_unknown_keys(
      cfg, "",
      {"command", "domain", "source", "N", "t", "p", "q", "gamma", "gammas",
       "c", "fields", "m_max", "n_tau", "levels", "p_norms", "tol_solver",
       "tol_positivity", "tol_superposition", "out", "seed", "threads"});

  static const std::set<std::string> commands = {
      "solve",    "scan",      "degiorgi",  "harnack",
      "poincare", "exponents", "decompose", "report"};
  const std::string cmd = need_str(cfg, "", "command");
  if (!commands.count(cmd)) {
    fail("/command",
         "must be one of solve|scan|degiorgi|harnack|poincare|exponents|"
         "decompose|report");
  }

  const bool needs_domain = cmd == "solve" || cmd == "scan" ||
                            cmd == "degiorgi" || cmd == "harnack" ||
                            cmd == "poincare" || cmd == "decompose";
  const bool needs_source =
      cmd == "solve" || cmd == "scan" || cmd == "decompose";

  if (needs_domain) {
    const json* d = find(cfg, "domain");
    if (!d) fail("/domain", "required key is missing");
    if (!d->is_object()) fail("/domain", "must be an object");
  }
  if (needs_source) {
    const json* s = find(cfg, "source");
    if (!s) fail("/source", "required key is missing");
    if (!s->is_object()) fail("/source", "must be an object");
  }
  if (cmd == "scan") gammas_from_config(cfg);

  if (get_num(cfg, "", "gamma", 0.0) < 0.0) fail("/gamma", "must be nonnegative");
  if (find(cfg, "c") && !(get_num(cfg, "", "c", 0.0) > 0.0)) {
    fail("/c", "must be positive");
  }
  if (get_int(cfg, "", "fields", 1) < 1) fail("/fields", "must be at least 1");
  if (get_int(cfg, "", "m_max", 1) < 1) fail("/m_max", "must be at least 1");
  if (get_int(cfg, "", "n_tau", 2) < 2) fail("/n_tau", "must be at least 2");
  if (get_int(cfg, "", "levels", 1) < 1) fail("/levels", "must be at least 1");
  if (get_int(cfg, "", "threads", 1) < 1) fail("/threads", "must be at least 1");
  if (get_int(cfg, "", "seed", 0) < 0) fail("/seed", "must be nonnegative");
  for (const char* key : {"tol_solver", "tol_positivity", "tol_superposition"}) {
    if (find(cfg, key) && !(get_num(cfg, "", key, 1.0) > 0.0)) {
      fail(std::string("/") + key, "must be positive");
    }
  }
  if (const json* pn = find(cfg, "p_norms")) {
    if (!pn->is_array() || pn->empty()) {
      fail("/p_norms", "must be a non-empty array of numbers");
    }
    for (const json& v : *pn) {
      if (!v.is_number() || !(v.get<double>() >= 1.0)) {
        fail("/p_norms", "entries must be numbers at least 1");
      }
    }
  }
}

// ---- command runners ------------------------------------------------------------

namespace {

RunOutcome run_exponents(const json& cfg, ReportWriter& writer) {
  const ExponentSet e = exponents_from_config(cfg, 2);
  RunOutcome out;
  out.summary = exponents_json(e);
  writer.add("exponents.json", json_file(out.summary));
  std::printf("%s\n", describe(e).c_str());
  return out;
}

RunOutcome run_solve(const json& cfg, ReportWriter& writer, double tol_solver) {
  const DomainMask mask = domain_from_config(cfg);
  const ScalarField f = source_from_config(mask, cfg);
  const double gamma = get_num(cfg, "", "gamma", 0.0);

  const PlateSolution sol = solve_plate(mask, f, gamma, tol_solver, false);
  const EnergyReport energy = energy_report(mask, sol.u, f, gamma);

  RunOutcome out;
  out.summary = solve_json(mask, sol.stats, sol.u, energy);
  out.summary["gamma"] = gamma;
  writer.add("solution.csv", field_csv(sol.u));
  if (mask.dim == 2) writer.add("solution.svg", field_svg(sol.u));
  writer.add("solve.json", json_file(out.summary));
  out.violations = sol.stats.converged ? 0 : 1;
  return out;
}

RunOutcome run_scan(const json& cfg, ReportWriter& writer,
                    std::uint64_t seed, double tol_pos) {
  const DomainMask mask = domain_from_config(cfg);
  const ScalarField f = source_from_config(mask, cfg);
  const std::vector<double> gammas = gammas_from_config(cfg);
  const ExponentSet e = exponents_from_config(cfg, mask.dim);

  double c;
  std::string c_source;
  if (find(cfg, "c")) {
    c = get_num(cfg, "", "c", 0.0);
    c_source = "config";
  } else {
    const int fields = get_int(cfg, "", "fields", 50);
    c = calibrate_harnack(mask, e, fields, seed).c;
    c_source = "calibrated";
  }

  const GammaScanResult scan = scan_gamma(mask, f, gammas, tol_pos, e, c);

  RunOutcome out;
  out.summary = scan_json(scan);
  out.summary["c_source"] = c_source;
  out.summary["exponents"] = exponents_json(e);
  writer.add("scan.csv", scan_csv(scan));
  writer.add("scan.json", json_file(out.summary));
  out.violations = (scan.all_converged ? 0 : 1) +
                   (scan.lemma_positive_max ? 0 : 1);

  if (find(cfg, "n_tau")) {
    const int n_tau = get_int(cfg, "", "n_tau", 9);
    const InterpolationResult interp =
        interpolation_scan(mask, f, scan.gamma0_two_eta, n_tau, tol_pos);
    writer.add("interpolation.json", json_file(interpolation_json(interp)));
    out.summary["interpolation_verdict"] = interp.verdict;
    if (!interp.all_converged) ++out.violations;
  }
  return out;
}

RunOutcome run_degiorgi(const json& cfg, ReportWriter& writer,
                        std::uint64_t seed) {
  const DomainMask mask = domain_from_config(cfg);
  const ExponentSet e = exponents_from_config(cfg, mask.dim);
  const int fields = get_int(cfg, "", "fields", 50);
  const int m_max = get_int(cfg, "", "m_max", 12);

  const Calibration cal = calibrate_degiorgi(mask, e, fields, seed, m_max);
  const SuiteOutcome holdout =
      validate_degiorgi(mask, e, cal.c, fields, holdout_seed(seed), m_max);

  RunOutcome out;
  out.summary = {{"calibration", calibration_json(cal)},
                 {"holdout", suite_json(holdout)},
                 {"holdout_seed", holdout_seed(seed)},
                 {"mask", mask_json(mask)}};
  writer.add("degiorgi.csv", reports_csv(holdout.reports));
  writer.add("degiorgi.json", json_file(out.summary));
  out.violations = holdout.violations;
  return out;
}

RunOutcome run_harnack(const json& cfg, ReportWriter& writer,
                       std::uint64_t seed) {
  const DomainMask mask = domain_from_config(cfg);
  const ExponentSet e = exponents_from_config(cfg, mask.dim);
  const int fields = get_int(cfg, "", "fields", 50);

  const Calibration cal = calibrate_harnack(mask, e, fields, seed);
  const SuiteOutcome holdout =
      validate_harnack(mask, e, cal.c, fields, holdout_seed(seed));

  RunOutcome out;
  out.summary = {{"calibration", calibration_json(cal)},
                 {"holdout", suite_json(holdout)},
                 {"holdout_seed", holdout_seed(seed)},
                 {"mask", mask_json(mask)}};
  writer.add("harnack.csv", reports_csv(holdout.reports));
  writer.add("harnack.json", json_file(out.summary));
  out.violations = holdout.violations;
  return out;
}

RunOutcome run_poincare(const json& cfg, ReportWriter& writer,
                        std::uint64_t seed) {
  const DomainMask mask = domain_from_config(cfg);
  const int fields = get_int(cfg, "", "fields", 20);
  std::vector<double> p_norms = {2.0, 4.0};
  if (const json* pn = find(cfg, "p_norms")) {
    p_norms = pn->get<std::vector<double>>();
  }

  const ScalarField zero = make_field(mask, [](const Point&) { return 0.0; });
  std::vector<CheckReport> reports;
  int violations = 0;
  for (int i = 0; i < fields; ++i) {
    const std::uint64_t fs = suite_field_seed(seed, i);
    const Probe pr = make_probe(mask, zero, fs);
    const ScalarField u = make_half_vanishing_field(mask, pr.center, pr.r, fs);
    for (const double p : p_norms) {
      CheckReport rep = check_poincare_half(u, pr.center, pr.r, p);
      if (!rep.pass || !std::isfinite(rep.implied_constant)) ++violations;
      reports.push_back(std::move(rep));
    }
  }

  RunOutcome out;
  out.violations = violations;
  out.summary = {{"evaluated", reports.size()},
                 {"violations", violations},
                 {"fields", fields},
                 {"p_norms", p_norms},
                 {"mask", mask_json(mask)}};
  writer.add("poincare.csv", reports_csv(reports));
  writer.add("poincare.json", json_file(out.summary));
  return out;
}

RunOutcome run_decompose(const json& cfg, ReportWriter& writer,
                         double tol_solver, double tol_super) {
  const DomainMask mask = domain_from_config(cfg);
  const ScalarField f = source_from_config(mask, cfg);
  const int levels = get_int(cfg, "", "levels", 3);
  const double gamma = get_num(cfg, "", "gamma", 1.0);

  const auto omegas = make_exhaustion(mask, levels);
  const Decomposition dec = decompose_source(f, omegas);

  double recon = 0.0, f_scale = 0.0;
  for (std::size_t c = 0; c < mask.interior_count(); ++c) {
    double sum = 0.0;
    for (const ScalarField& g : dec.parts) sum += g.values[c];
    recon = std::max(recon, std::abs(sum - f.values[c]));
    f_scale = std::max(f_scale, std::abs(f.values[c]));
  }
  const double recon_rel = f_scale > 0.0 ? recon / f_scale : 0.0;

  const SuperpositionReport sup =
      superposition_check(mask, gamma, dec, tol_solver);

  RunOutcome out;
  out.violations = (recon_rel <= 1e-12 ? 0 : 1) +
                   (sup.rel_gap <= tol_super ? 0 : 1) +
                   (sup.all_converged ? 0 : 1);
  out.summary = {{"levels", levels},
                 {"gamma", gamma},
                 {"reconstruction_rel", recon_rel},
                 {"superposition_rel_gap", sup.rel_gap},
                 {"partial_gaps", sup.partial_gaps},
                 {"all_converged", sup.all_converged},
                 {"violations", out.violations},
                 {"mask", mask_json(mask)}};
  writer.add("decompose.json", json_file(out.summary));
  return out;
}

RunOutcome run_report(const std::string& out_dir) {
  RunOutcome out;
  out.summary["files"] = json::array();
  try {
    const ManifestCheck check = verify_manifest(out_dir);
    out.summary["ok"] = check.ok;
    for (const auto& [name, ok] : check.files) {
      out.summary["files"].push_back({{"name", name}, {"ok", ok}});
      if (!ok) ++out.violations;
    }
    // a manifest that fails as a whole is itself a violation
    if (!check.ok && out.violations == 0) out.violations = 1;
  } catch (const std::exception& e) {
    // no readable manifest: report the reason instead of crashing, but
    // count it so --strict exits nonzero
    out.summary["ok"] = false;
    out.summary["error"] = e.what();
    out.violations = 1;
  }
  std::printf("%s\n", out.summary.dump(2).c_str());
  return out;
}

}  // namespace

// ---- dispatch ---------------------------------------------------------------------

RunOutcome run_config(const json& cfg, const CliOptions& opts) {
  int threads = opts.threads;
  if (threads <= 0) threads = get_int(cfg, "", "threads", 0);
  if (threads <= 0) {
    if (const char* env = std::getenv("PLATE_HARNACK_THREADS")) {
      threads = std::atoi(env);
    }
  }
  if (threads > 0) par::set_thread_count(threads);

  const std::uint64_t seed =
      opts.seed_set ? opts.seed
                    : static_cast<std::uint64_t>(get_int(cfg, "", "seed", 1));
  const std::string out_dir =
      !opts.out_dir.empty() ? opts.out_dir : get_str(cfg, "", "out", "out");
  const double tol_solver = get_num(cfg, "", "tol_solver", 1e-10);
  const double tol_pos = get_num(cfg, "", "tol_positivity", 1e-8);
  const double tol_super = get_num(cfg, "", "tol_superposition", 1e-8);

  const std::string cmd = cfg.at("command").get<std::string>();
  if (cmd == "report") return run_report(out_dir);

  ReportWriter writer{out_dir};
  RunOutcome out;
  if (cmd == "exponents") {
    out = run_exponents(cfg, writer);
  } else if (cmd == "solve") {
    out = run_solve(cfg, writer, tol_solver);
  } else if (cmd == "scan") {
    out = run_scan(cfg, writer, seed, tol_pos);
  } else if (cmd == "degiorgi") {
    out = run_degiorgi(cfg, writer, seed);
  } else if (cmd == "harnack") {
    out = run_harnack(cfg, writer, seed);
  } else if (cmd == "poincare") {
    out = run_poincare(cfg, writer, seed);
  } else if (cmd == "decompose") {
    out = run_decompose(cfg, writer, tol_solver, tol_super);
  }
  out.files_written = writer.finalize();
  std::printf("%s: wrote %zu file(s) to %s, violations=%d\n", cmd.c_str(),
              out.files_written.size(), out_dir.c_str(), out.violations);
  return out;
}

int run_cli(const CliOptions& opts) {
  json cfg;
  {
    std::ifstream is(opts.config_path);
    if (!is) {
      std::fprintf(stderr, "cannot open config %s\n", opts.config_path.c_str());
      return 2;
    }
    try {
      cfg = json::parse(is);
    } catch (const json::parse_error& e) {
      std::fprintf(stderr, "config parse error: %s\n", e.what());
      return 2;
    }
  }
  try {
    validate_config(cfg);
    const RunOutcome out = run_config(cfg, opts);
    return (out.violations > 0 && opts.strict) ? 1 : 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace plate
