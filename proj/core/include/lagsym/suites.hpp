#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "lagsym/catalog.hpp"
#include "lagsym/report.hpp"

namespace lagsym {

/// Configuration of a verification run (CLI flags map onto this 1:1).
struct RunConfig {
  std::string model = "all";
  /// lagrangian | involution | census | fibercount | semiflat | monodromy |
  /// amoeba | grading | flow | all
  std::string suite = "all";
  int samples = 1000;
  int census_samples = 200000;
  std::uint64_t seed = 42;
  double tol_structural = 1e-10;
  double tol_numeric = 1e-6;
  int jobs = 1;
  std::string out_path;        // report (json) or raster (pgm/csv) destination
  std::string format = "json"; // json | pgm | csv
  bool census_stability = true;
  int amoeba_grid = 256;
  ModelParams params;
  Eigen::VectorXd region_lo, region_hi;  // optional sampling region override
};

/// Executes the selected suites and returns the structured report.
/// Deterministic given the seed; worker count never changes results.
VerificationReport run(const RunConfig& config);

// Individual suites (run() dispatches to these).
void suite_flow(VerificationReport& rep, const RunConfig& cfg);
void suite_lagrangian(VerificationReport& rep, const FibrationModel& m, const RunConfig& cfg);
void suite_involution(VerificationReport& rep, const FibrationModel& m, const RunConfig& cfg);
void suite_census(VerificationReport& rep, const FibrationModel& m, const RunConfig& cfg);
void suite_fibercount(VerificationReport& rep, const FibrationModel& m, const RunConfig& cfg);
void suite_grading(VerificationReport& rep, const FibrationModel& m, const RunConfig& cfg);
void suite_semiflat(VerificationReport& rep, const RunConfig& cfg);
void suite_monodromy(VerificationReport& rep, const RunConfig& cfg);
void suite_amoeba(VerificationReport& rep, const RunConfig& cfg);

/// True when the suite applies to the model (census needs a known component
/// count, fibercount needs proper torus fibers, grading needs a conjugation
/// model on a fully complex chart).
bool suite_applies(const std::string& suite, const FibrationModel& m);

}  // namespace lagsym
