#pragma once

#include <optional>

#include <Eigen/Dense>

#include "lagsym/model.hpp"

namespace lagsym {

struct ThetaOptions {
  int steps_per_unit = 1200;     // flow steps per unit of |xi|
  double drift_tol = 1e-8;       // |f(result) - b| check
  double newton_tol = 1e-8;      // return-distance tolerance for solves
  int max_newton_iter = 60;
};

/// The action-angle chart map at a base point: flows sigma(b) for time one
/// under the pullback Hamiltonian H = <xi, f(.)>.  For fixed b this descends
/// to the torus-translation structure on the fiber; its zero set in xi is the
/// period lattice.
Eigen::VectorXd build_theta(const FibrationModel& m, const Section& sigma,
                            const Eigen::VectorXd& b, const Eigen::VectorXd& xi,
                            const ThetaOptions& opts = {});

/// Inverts build_theta at a fiber point: finds xi with theta(b, xi) = x by
/// Gauss-Newton, preconditioned by the period matrix when available.
/// Any lattice translate of xi is an equally valid preimage.
Eigen::VectorXd theta_inverse(const FibrationModel& m, const Section& sigma,
                              const Eigen::VectorXd& b, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& xi_guess,
                              const ThetaOptions& opts = {});

/// The involution reconstructed from the chart: x -> theta(b, -theta^{-1}(x))
/// on the fiber over b = f(x).
Eigen::VectorXd reconstructed_involution(const FibrationModel& m, const Section& sigma,
                                         const Eigen::VectorXd& x,
                                         const ThetaOptions& opts = {});

struct LatticeProbeResult {
  /// Columns form a Z-basis of the period lattice at b.
  Eigen::MatrixXd periods;
  /// Return distances |theta(b, xi) - sigma(b)| after polish, per column.
  Eigen::VectorXd residuals;
  /// Set when the probe had to fall back to a coarse scan (no hint).
  bool scanned = false;
};

/// Finds n independent covectors xi with theta(b, xi) = sigma(b).  Seeds from
/// the model's period hint when present, otherwise scans coordinate
/// directions for near-returns; each candidate is polished by Gauss-Newton on
/// the return distance.
LatticeProbeResult lattice_probe(const FibrationModel& m, const Section& sigma,
                                 const Eigen::VectorXd& b, const ThetaOptions& opts = {});

/// True iff v is an integer combination of the columns of P (coefficients
/// within `tol` of integers).
bool in_lattice(const Eigen::MatrixXd& P, const Eigen::VectorXd& v, double tol = 1e-3);

/// True iff the two bases span the same lattice (both ways, within tol).
bool same_lattice(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q, double tol = 1e-3);

}  // namespace lagsym
