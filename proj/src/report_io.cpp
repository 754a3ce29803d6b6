#include "plate/report_io.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plate {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---- SHA-256 ----------------------------------------------------------------

namespace {

constexpr std::uint32_t kSha256K[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
    0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
    0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
    0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
    0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) {
  return (x >> n) | (x << (32 - n));
}

void sha256_block(std::array<std::uint32_t, 8>& st, const unsigned char* p) {
  std::uint32_t w[64];
  for (int i = 0; i < 16; ++i) {
    w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
           (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
  }
  for (int i = 16; i < 64; ++i) {
    const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
    const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
    w[i] = w[i - 16] + s0 + w[i - 7] + s1;
  }
  auto [a, b, c, d, e, f, g, h] = st;
  for (int i = 0; i < 64; ++i) {
    const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
    const std::uint32_t ch = (e & f) ^ (~e & g);
    const std::uint32_t t1 = h + s1 + ch + kSha256K[i] + w[i];
    const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
    const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
    const std::uint32_t t2 = s0 + maj;
    h = g; g = f; f = e; e = d + t1;
    d = c; c = b; b = a; a = t1 + t2;
  }
  st[0] += a; st[1] += b; st[2] += c; st[3] += d;
  st[4] += e; st[5] += f; st[6] += g; st[7] += h;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::array<std::uint32_t, 8> st = {0x6a09e667, 0xbb67ae85, 0x3c6ef372,
                                     0xa54ff53a, 0x510e527f, 0x9b05688c,
                                     0x1f83d9ab, 0x5be0cd19};
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  std::size_t n = bytes.size();
  while (n >= 64) {
    sha256_block(st, p);
    p += 64;
    n -= 64;
  }
  unsigned char tail[128] = {};
  std::memcpy(tail, p, n);
  tail[n] = 0x80;
  const std::size_t blocks = (n + 9 <= 64) ? 1 : 2;
  const std::uint64_t bits = std::uint64_t(bytes.size()) * 8;
  for (int i = 0; i < 8; ++i) {
    tail[blocks * 64 - 1 - i] = static_cast<unsigned char>(bits >> (8 * i));
  }
  sha256_block(st, tail);
  if (blocks == 2) sha256_block(st, tail + 64);

  std::string hex(64, '0');
  static const char* digits = "0123456789abcdef";
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      hex[8 * i + j] = digits[(st[i] >> (28 - 4 * j)) & 0xf];
    }
  }
  return hex;
}

// ---- CSV --------------------------------------------------------------------

std::string field_csv(const ScalarField& u) {
  const DomainMask& mask = *u.mask;
  std::string out = "i,j,k,x,y,z,value\n";
  char row[200];
  for (std::size_t c = 0; c < mask.cells.size(); ++c) {
    const auto ijk = mask.node_coords(mask.cells[c]);
    const Point p = mask.node_point(mask.cells[c]);
    std::snprintf(row, sizeof(row), "%d,%d,%d,%.17g,%.17g,%.17g,%.17g\n",
                  ijk[0], ijk[1], ijk[2], p[0], p[1], p[2], u.values[c]);
    out += row;
  }
  return out;
}

std::string reports_csv(std::span<const CheckReport> reports) {
  std::string out =
      "check,center_x,center_y,center_z,r,rho,k,l,lhs,rhs_unit,"
      "implied_constant,pass\n";
  char row[360];
  for (const CheckReport& rep : reports) {
    std::snprintf(row, sizeof(row),
                  "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%d\n",
                  rep.check.c_str(), rep.center[0], rep.center[1],
                  rep.center[2], rep.r, rep.rho, rep.k, rep.l, rep.lhs,
                  rep.rhs_unit, rep.implied_constant, rep.pass ? 1 : 0);
    out += row;
  }
  return out;
}

std::string scan_csv(const GammaScanResult& scan) {
  std::string out = "gamma,min_u,max_u,energy,converged\n";
  char row[200];
  for (std::size_t i = 0; i < scan.gammas.size(); ++i) {
    std::snprintf(row, sizeof(row), "%.17g,%.17g,%.17g,%.17g,%d\n",
                  scan.gammas[i], scan.min_u[i], scan.max_u[i], scan.energy[i],
                  scan.converged[i] ? 1 : 0);
    out += row;
  }
  return out;
}

// ---- JSON -------------------------------------------------------------------

nlohmann::json mask_json(const DomainMask& mask) {
  return {{"shape", to_string(mask.shape_tag)},
          {"dim", mask.dim},
          {"h", mask.h},
          {"cells", mask.interior_count()},
          {"volume", mask.volume()},
          {"diameter", mask.diameter}};
}

nlohmann::json exponents_json(const ExponentSet& e) {
  const ExponentResiduals res = validate_exponents(e);
  return {{"inputs", {{"N", e.N}, {"t", e.t}, {"p", e.p}, {"q", e.q}}},
          {"derived",
           {{"s", e.s},
            {"s_star", e.s_star},
            {"beta", e.beta},
            {"theta", e.theta},
            {"xi", e.xi},
            {"eta", e.eta},
            {"mu", e.mu},
            {"a", e.a},
            {"b", e.b},
            {"c", e.c}}},
          {"residuals",
           {{"quadratic", res.quadratic},
            {"system_row1", res.system_row1},
            {"system_row2", res.system_row2},
            {"s_star_identity", res.s_star_identity},
            {"theta_above_one", res.theta_above_one},
            {"a_below_one", res.a_below_one}}}};
}

nlohmann::json calibration_json(const Calibration& cal) {
  return {{"c", cal.c},
          {"max_implied", cal.max_implied},
          {"fields", cal.fields},
          {"seed", cal.seed},
          {"implied", cal.implied}};
}

nlohmann::json suite_json(const SuiteOutcome& out) {
  return {{"evaluated", out.evaluated}, {"violations", out.violations}};
}

nlohmann::json scan_json(const GammaScanResult& scan) {
  return {{"domain", scan.domain},
          {"gammas", scan.gammas},
          {"min_u", scan.min_u},
          {"max_u", scan.max_u},
          {"energy", scan.energy},
          {"all_converged", scan.all_converged},
          {"lemma_positive_max", scan.lemma_positive_max},
          {"f_integral", scan.f_integral},
          {"diameter", scan.diameter},
          {"c_used", scan.c_used},
          {"gamma0_two_eta", scan.gamma0_two_eta},
          {"gamma0_four_eta", scan.gamma0_four_eta},
          {"has_gamma_star", scan.has_gamma_star},
          {"gamma_star_empirical", scan.gamma_star_empirical}};
}

nlohmann::json solve_json(const DomainMask& mask, const SolveStats& stats,
                          const ScalarField& u, const EnergyReport& energy) {
  return {{"mask", mask_json(mask)},
          {"solver",
           {{"converged", stats.converged},
            {"iterations", stats.iterations},
            {"final_residual", stats.final_residual},
            {"rhs_norm", stats.rhs_norm}}},
          {"solution",
           {{"min", min_value(u)},
            {"max", max_value(u)},
            {"integral", integral(u)}}},
          {"energy",
           {{"bend", energy.bend},
            {"stretch", energy.stretch},
            {"work", energy.work},
            {"identity_residual", energy.identity_residual}}}};
}

nlohmann::json interpolation_json(const InterpolationResult& res) {
  return {{"taus", res.taus},
          {"gamma_taus", res.gamma_taus},
          {"min_w", res.min_w},
          {"max_w", res.max_w},
          {"all_converged", res.all_converged},
          {"endpoints_positive", res.endpoints_positive},
          {"all_positive", res.all_positive},
          {"verdict", res.verdict}};
}

// ---- SVG --------------------------------------------------------------------

namespace {

// Piecewise-linear diverging map: blue (lo) through white (mid) to red (hi).
std::array<int, 3> heat_color(double v, double lo, double hi) {
  double mid = 0.0;
  if (lo >= 0.0 || hi <= 0.0) mid = 0.5 * (lo + hi);  // sequential span
  double t;
  if (v <= mid) {
    t = (mid > lo) ? (v - lo) / (mid - lo) : 1.0;
    const int c = static_cast<int>(255.0 * std::clamp(t, 0.0, 1.0));
    return {c, c, 255};
  }
  t = (hi > mid) ? (v - mid) / (hi - mid) : 0.0;
  const int c = static_cast<int>(255.0 * (1.0 - std::clamp(t, 0.0, 1.0)));
  return {255, c, c};
}

}  // namespace

std::string field_svg(const ScalarField& u) {
  const DomainMask& mask = *u.mask;
  const int nx = mask.extents[0];
  const int ny = mask.extents[1];
  const int slice = mask.dim == 3 ? mask.extents[2] / 2 : 0;

  const int px = std::max(2, 640 / std::max(nx, ny));
  const int width = nx * px;
  const int height = ny * px + 20;

  const double lo = min_value(u);
  const double hi = max_value(u);

  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                width, height, width, height);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<rect width=\"%d\" height=\"%d\" fill=\"#f8f8f8\"/>\n", width,
                height);
  svg += buf;

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!mask.is_interior(i, j, slice)) continue;
      const int cid = mask.compact_id[mask.node_id(i, j, slice)];
      const auto [r, g, b] = heat_color(u.values[cid], lo, hi);
      // y axis points up in the domain, down in SVG
      std::snprintf(buf, sizeof(buf),
                    "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" "
                    "fill=\"rgb(%d,%d,%d)\"/>\n",
                    i * px, (ny - 1 - j) * px, px, px, r, g, b);
      svg += buf;
    }
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"4\" y=\"%d\" font-family=\"monospace\" "
                "font-size=\"12\">min=%.6g max=%.6g</text>\n",
                height - 6, lo, hi);
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

// ---- output collection --------------------------------------------------------

void ReportWriter::add(const std::string& name, std::string content) {
  files_.emplace_back(name, std::move(content));
}

std::vector<std::string> ReportWriter::finalize() {
  std::filesystem::create_directories(dir_);
  std::sort(files_.begin(), files_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  nlohmann::json manifest;
  manifest["files"] = nlohmann::json::array();
  std::vector<std::string> names;
  for (const auto& [name, content] : files_) {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    manifest["files"].push_back({{"name", name},
                                 {"bytes", content.size()},
                                 {"sha256", sha256_hex(content)}});
    names.push_back(name);
  }
  std::ofstream os(dir_ / "MANIFEST.json", std::ios::binary);
  os << manifest.dump(2) << "\n";
  names.push_back("MANIFEST.json");
  return names;
}

ManifestCheck verify_manifest(const std::filesystem::path& dir) {
  ManifestCheck check;
  std::ifstream is(dir / "MANIFEST.json", std::ios::binary);
  if (!is) throw std::runtime_error("no MANIFEST.json in " + dir.string());
  nlohmann::json manifest = nlohmann::json::parse(is);

  check.ok = true;
  for (const auto& entry : manifest.at("files")) {
    const std::string name = entry.at("name").get<std::string>();
    bool ok = false;
    std::ifstream fs(dir / name, std::ios::binary);
    if (fs) {
      std::ostringstream ss;
      ss << fs.rdbuf();
      const std::string content = ss.str();
      ok = content.size() == entry.at("bytes").get<std::size_t>() &&
           sha256_hex(content) == entry.at("sha256").get<std::string>();
    }
    check.files.emplace_back(name, ok);
    check.ok = check.ok && ok;
  }
  return check;
}

}  // namespace plate
