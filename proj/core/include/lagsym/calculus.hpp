#pragma once

#include <Eigen/Dense>

#include "lagsym/smooth_map.hpp"
#include "lagsym/symplectic.hpp"

namespace lagsym {

/// Ordered list of tangent vectors at a base point (columns of `vectors`).
struct Frame {
  Eigen::VectorXd base;
  Eigen::MatrixXd vectors;  // 2n x k, columns are tangent vectors

  int size() const { return static_cast<int>(vectors.cols()); }
  /// Smallest singular value; > tol certifies linear independence.
  double independence_margin() const;
};

struct DiffOptions {
  /// Step for central differences: h = scale * max(1, |x_j|) per coordinate.
  /// The default scale is eps^(1/3).
  double fd_step_scale = 6.055454452393343e-06;
  /// Evaluate at steps h and h/2 and extrapolate the h^2 error term away.
  bool richardson = true;
  /// Piecewise maps: |seam(x)| below this at the base point is treated as
  /// on-seam and rejected (use jacobian_one_sided instead).
  double seam_tol = 1e-9;
};

/// dim_out x dim_in derivative matrix of m at x.
///
/// Uses the forward-mode evaluator when the map provides one; otherwise
/// central differences with Richardson extrapolation.  For piecewise maps
/// the branch containing x is differentiated (its smooth extension), and a
/// point on the seam itself is an error.
Eigen::MatrixXd jacobian(const SmoothMap& m, const Eigen::VectorXd& x,
                         const DiffOptions& opts = {});

/// One-sided derivative of a piecewise map: differentiates the branch
/// selected by `side` (>= 0 is the branch valid on {seam >= 0}).
Eigen::MatrixXd jacobian_one_sided(const SmoothMap& m, const Eigen::VectorXd& x,
                                   int side, const DiffOptions& opts = {});

/// || (Dm)^T J_out (Dm) - sign * J_in ||_max.
/// sign=+1 tests symplectic, sign=-1 anti-symplectic.  `S_in`/`S_out` are the
/// structures on domain and codomain (equal for self-maps).
double pullback_residual(const SymplecticStructure& S_out, const SymplecticStructure& S_in,
                         const SmoothMap& m, const Eigen::VectorXd& x, int sign,
                         const DiffOptions& opts = {});

/// Self-map convenience overload.
double pullback_residual(const SymplecticStructure& S, const SmoothMap& m,
                         const Eigen::VectorXd& x, int sign, const DiffOptions& opts = {});

/// Orthonormal basis of ker Df(x) via SVD; throws CriticalPointError when the
/// rank of Df drops below dim_out (singular-value margin `tol`).
Frame fiber_tangent_frame(const SmoothMap& f, const Eigen::VectorXd& x, double tol = 1e-8,
                          const DiffOptions& opts = {});

/// max |omega(v_i, v_j)| over the fiber tangent frame at a regular point x.
double lagrangian_residual(const SymplecticStructure& S, const SmoothMap& f,
                           const Eigen::VectorXd& x, double tol = 1e-8,
                           const DiffOptions& opts = {});

/// Gram-Schmidt replacement: orthonormalizes the columns of a frame (QR).
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& vectors);

}  // namespace lagsym
