#pragma once

#include <optional>

#include "lagsym/sampling.hpp"

namespace lagsym {

/// max over the cloud of |f(map(x)) - f(x)|.
double verify_fiber_preserving(const FibrationModel& m, const SmoothMap& map,
                               const SampleCloud& cloud, int jobs = 1);

/// max over the cloud of dist(map(map(x)), x).
double verify_involution(const FibrationModel& m, const SmoothMap& map,
                         const SampleCloud& cloud, int jobs = 1);

/// max over the cloud of dist(phi(t_inverse(x)), t(phi(x))).
double verify_commutation(const FibrationModel& m, const SmoothMap& phi, const SmoothMap& t,
                          const SmoothMap& t_inverse, const SampleCloud& cloud, int jobs = 1);

/// max pullback residual (sign = -1 anti-symplectic, +1 symplectic) over the
/// cloud, off seams.
double verify_pullback(const FibrationModel& m, const SmoothMap& map, int sign,
                       const SampleCloud& cloud, int jobs = 1);

/// max lagrangian_residual of fibers over the cloud.
double verify_lagrangian_fibers(const FibrationModel& m, const SampleCloud& cloud,
                                double rank_tol = 1e-6, int jobs = 1);

// -- fixed-locus census ------------------------------------------------------

struct CensusOptions {
  int n_samples = 200000;
  std::uint64_t seed = 42;
  /// Acceptance threshold on dist(map(x), x) after refinement.
  double eps_fix = 1e-9;
  int refine_iters = 48;
  /// Linking radius for the neighbor graph; 0 = Nyquist heuristic
  /// (4 x region diameter / n_samples^(1/n)).
  double eps_link = 0.0;
  /// Points (and segment interiors, when linking) must keep the model's
  /// domain gap above this, so excluded hypersurfaces separate components.
  double domain_gap = 0.12;
  /// Components with fewer samples are discarded as noise.
  int min_component = 20;
  int jobs = 1;
  Eigen::VectorXd region_lo, region_hi;  // empty = model default box
  /// Optional probe points: the census reports which component each probe
  /// lands in (nearest accepted fixed sample).
  std::vector<Eigen::VectorXd> probes;
};

struct ComponentInfo {
  Eigen::VectorXd representative;
  int count = 0;
  bool section_flag = false;
  /// Largest number of distinct phase clusters seen over a single fiber.
  int max_per_fiber = 0;
};

struct CensusResult {
  int component_count = 0;
  std::vector<ComponentInfo> components;
  int n_fixed = 0;  // accepted fixed-locus samples
  std::uint64_t seed = 0;
  int n_samples = 0;
  double eps_link = 0.0;
  /// Component index per probe point (-1 when no fixed sample is nearby).
  std::vector<int> probe_components;
};

/// Samples the fixed locus of `map` (midpoint-projection refinement), builds
/// an eps-neighbor graph, and counts connected components via union-find.
/// Section flags come from per-fiber injectivity of f on the samples.
CensusResult fixed_locus_census(const FibrationModel& m, const SmoothMap& map,
                                const CensusOptions& opts);

/// The model's separation gap at x: the smallest quantity whose vanishing
/// excludes x from the domain (1 for models with full domain).
double domain_gap(const FibrationModel& m, const Eigen::VectorXd& x);

// -- per-fiber fixed points ---------------------------------------------------

struct FiberFixedOptions {
  int n_seeds = 160;
  std::uint64_t seed = 7;
  double cluster_radius = 1e-4;
  double solve_tol = 1e-9;
  int max_iter = 80;
  double min_coverage = 0.05;  // converged fraction below this is an error
  int jobs = 1;
};

struct FiberFixedResult {
  int count = 0;
  std::vector<Eigen::VectorXd> points;
  double coverage = 0.0;
};

/// Counts fixed points of an involution on the fiber over b by projecting
/// random seeds onto the fixed locus, solving f = b along it, and clustering
/// the solutions.
FiberFixedResult fiber_fixed_count(const FibrationModel& m, const SmoothMap& map,
                                   const Eigen::VectorXd& b, const FiberFixedOptions& opts);

}  // namespace lagsym
