// Command-line front end: runs verification suites against the model catalog
// and writes structured JSON reports (plus PGM/CSV rasters for the amoeba).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "lagsym/errors.hpp"
#include "lagsym/suites.hpp"
#include "lagsym/version.hpp"

namespace {

int default_jobs() {
  if (const char* env = std::getenv("LAGSYM_JOBS")) {
    const int j = std::atoi(env);
    if (j > 0) return j;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(8u, hw == 0 ? 1u : hw));
}

// "lo:hi,lo:hi,..." -> two vectors
void parse_region(const std::string& text, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  std::vector<double> los, his;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      throw lagsym::ConfigError("region: expected lo:hi pairs separated by commas");
    }
    los.push_back(std::stod(part.substr(0, colon)));
    his.push_back(std::stod(part.substr(colon + 1)));
  }
  lo.resize(static_cast<int>(los.size()));
  hi.resize(static_cast<int>(his.size()));
  for (size_t i = 0; i < los.size(); ++i) {
    lo[static_cast<int>(i)] = los[i];
    hi[static_cast<int>(i)] = his[i];
    if (!(los[i] < his[i])) {
      throw lagsym::ConfigError("region: each pair must satisfy lo < hi");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification suites for explicit Lagrangian fibration models"};
  app.set_version_flag("--version", lagsym::kVersion);
  app.set_config("--config", "", "Config file (key=value), overridable by flags");

  lagsym::RunConfig cfg;
  cfg.jobs = default_jobs();
  std::string region_text;

  app.add_option("--model", cfg.model,
                 "Model name (ff_nonproper, nodal, generic_singular, positive_proper, "
                 "harvey_lawson, negative_amoeba, negative_thin, toric_reference) or 'all'")
      ->capture_default_str();
  app.add_option("--suite", cfg.suite,
                 "Suite: lagrangian | involution | census | fibercount | semiflat | "
                 "monodromy | amoeba | grading | flow | all")
      ->capture_default_str();
  app.add_option("--samples", cfg.samples, "Sample count for cloud-based checks")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--census-samples", cfg.census_samples, "Sample count for the census")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "RNG seed (64-bit)")->capture_default_str();
  app.add_option("--tol", cfg.tol_numeric, "Numeric tolerance (integrator/SVD checks)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--tol-structural", cfg.tol_structural,
                 "Structural tolerance (closed-form identities)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--region", region_text, "Sampling region override: lo:hi,lo:hi,...");
  app.add_option("--out", cfg.out_path, "Output path (JSON report, or raster for --format pgm/csv)");
  app.add_option("--format", cfg.format, "Output format: json | pgm | csv")
      ->check(CLI::IsMember({"json", "pgm", "csv"}))
      ->capture_default_str();
  app.add_option("--jobs", cfg.jobs, "Worker count (default: LAGSYM_JOBS or hardware, max 8)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--grid", cfg.amoeba_grid, "Amoeba raster resolution")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--thin-eps", cfg.params.thin_eps,
                 "Pinch cutoff radius^2 for the thin negative model (<= 0.25)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--thin-M", cfg.params.thin_M, "Outer bound of the three-leg pinch map")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bool no_stability = false;
  app.add_flag("--no-census-stability", no_stability, "Skip the census stability re-run");

  CLI11_PARSE(app, argc, argv);
  cfg.census_stability = !no_stability;
  if (!region_text.empty()) parse_region(region_text, cfg.region_lo, cfg.region_hi);

  try {
    const lagsym::VerificationReport report = lagsym::run(cfg);
    std::cout << report.table();
    std::cout << (report.all_passed() ? "ALL CHECKS PASSED" : "FAILURES PRESENT") << " ("
              << report.records.size() << " records, " << report.fail_count() << " failed)\n";
    if (!cfg.out_path.empty() && cfg.format == "json") {
      std::ofstream os(cfg.out_path);
      if (!os) {
        std::cerr << "error: cannot write " << cfg.out_path << "\n";
        return 2;
      }
      os << report.full_json() << "\n";
    }
    return report.all_passed() ? 0 : 1;
  } catch (const lagsym::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
