#pragma once

#include <Eigen/Dense>

#include "lagsym/smooth_map.hpp"
#include "lagsym/symplectic.hpp"

namespace lagsym {

struct FlowOptions {
  int steps_per_unit_time = 1000;  // used when a step count of 0 is passed
  double newton_tol = 1e-13;       // inner solve, relative to max(1, |x|)
  int max_newton_iter = 25;
  bool check_domain = true;
};

/// Gradient of a scalar map (dual-mode when available, else central
/// differences).
Eigen::VectorXd gradient(const SmoothMap& H, const Eigen::VectorXd& x);

/// Hamiltonian vector field of H: xdot = J^{-1} (-grad H).
/// The sign convention is fixed so that on the standard structure the flow of
/// q1 = x1 y1 + x2 y2 (first coordinate pair convention of the focus-focus
/// chart) contracts z1 and expands z2.
Eigen::VectorXd hamiltonian_vector_field(const SymplecticStructure& S, const SmoothMap& H,
                                         const Eigen::VectorXd& x);

/// Implicit-midpoint integration of the Hamiltonian flow of H for time t.
/// `steps` is the total step count; 0 picks ceil(|t| * steps_per_unit_time).
/// The inner Newton solve runs to opts.newton_tol.  Throws ConvergenceError
/// on Newton divergence and DomainError if the trajectory leaves H's domain.
Eigen::VectorXd hamiltonian_flow(const SymplecticStructure& S, const SmoothMap& H,
                                 const Eigen::VectorXd& x0, double t, int steps = 0,
                                 const FlowOptions& opts = {});

/// Moves x0 within its fiber by flowing the pullback Hamiltonian
/// H = <direction, f(.)> for time t.  Monitors the rank of Df along the way
/// (throws CriticalPointError near the critical set).  On return *drift_out,
/// when non-null, receives |f(result) - f(x0)|.
Eigen::VectorXd fiber_walk(const SymplecticStructure& S, const SmoothMap& f,
                           const Eigen::VectorXd& x0, const Eigen::VectorXd& direction,
                           double t, int steps = 0, const FlowOptions& opts = {},
                           double* drift_out = nullptr);

struct FiberSolveResult {
  Eigen::VectorXd point;
  double residual = 0.0;
  int iterations = 0;
  /// Smallest singular value of Df at the solution relative to the largest.
  double rank_margin = 0.0;
  bool near_critical = false;
};

/// Gauss-Newton solve of f(x) = b from `seed`, stepping transverse to the
/// fiber (minimum-norm update).  Terminates when |f(x) - b| <= tol.
FiberSolveResult solve_fiber_point(const SmoothMap& f, const Eigen::VectorXd& b,
                                   const Eigen::VectorXd& seed, double tol = 1e-10,
                                   int max_iter = 100);

}  // namespace lagsym
