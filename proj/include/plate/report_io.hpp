#pragma once

/// @file report_io.hpp
/// @brief Deterministic CSV/JSON/SVG serialization and hashed manifests.
///
/// Every byte written through this module is a pure function of the inputs:
/// doubles are printed with "%.17g" (lossless round-trip), JSON keys are
/// alphabetical, and no timestamps or machine identifiers appear anywhere.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "plate/exponents.hpp"
#include "plate/field.hpp"
#include "plate/harnack.hpp"
#include "plate/levelset.hpp"
#include "plate/plate_operator.hpp"
#include "plate/positivity.hpp"

namespace plate {

std::string format_g17(double v);

/// SHA-256 of the byte string, lowercase hex.
std::string sha256_hex(std::string_view bytes);

// ---- CSV ------------------------------------------------------------------

/// One row per interior cell: grid indices, coordinates, value.
std::string field_csv(const ScalarField& u);

/// One row per CheckReport with the full parameter context.
std::string reports_csv(std::span<const CheckReport> reports);

/// One row per scanned gamma.
std::string scan_csv(const GammaScanResult& scan);

// ---- JSON -----------------------------------------------------------------

nlohmann::json mask_json(const DomainMask& mask);
nlohmann::json exponents_json(const ExponentSet& e);
nlohmann::json calibration_json(const Calibration& cal);
nlohmann::json suite_json(const SuiteOutcome& out);
nlohmann::json scan_json(const GammaScanResult& scan);
nlohmann::json solve_json(const DomainMask& mask, const SolveStats& stats,
                          const ScalarField& u, const EnergyReport& energy);
nlohmann::json interpolation_json(const InterpolationResult& res);

// ---- SVG ------------------------------------------------------------------

/// Heatmap of a 2D field (the middle z-slice of a 3D one). Blue through
/// white to red, centered at zero when the field changes sign and at the
/// midrange otherwise; min and max are annotated in a footer.
std::string field_svg(const ScalarField& u);

// ---- output collection ----------------------------------------------------

/// Collects named file contents and writes them plus a MANIFEST.json that
/// lists every file with its size and SHA-256.
class ReportWriter {
 public:
  explicit ReportWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content);
  /// Writes all files and the manifest; returns the file names written.
  std::vector<std::string> finalize();

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

/// Recomputes the hashes in dir/MANIFEST.json; returns per-file matches.
/// Throws when the directory holds no readable manifest.
struct ManifestCheck {
  bool ok = false;
  std::vector<std::pair<std::string, bool>> files;
};
ManifestCheck verify_manifest(const std::filesystem::path& dir);

}  // namespace plate
