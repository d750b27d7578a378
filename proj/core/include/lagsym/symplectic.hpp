#pragma once

#include <Eigen/Dense>

#include "lagsym/errors.hpp"

namespace lagsym {

/// Constant-coefficient symplectic pairing on R^{2n}: omega(u,v) = u^T J v.
///
/// Coordinates are stored stacked, (q_1..q_n, p_1..p_n), and the standard
/// form is omega = sum dq_j ^ dp_j, i.e. J = [[0, I], [-I, 0]].
class SymplecticStructure {
 public:
  SymplecticStructure(int n, Eigen::MatrixXd pairing);

  /// Standard form on R^{2n}.
  static SymplecticStructure standard(int n);

  int n() const { return n_; }
  int dim() const { return 2 * n_; }
  const Eigen::MatrixXd& pairing_matrix() const { return J_; }
  const Eigen::MatrixXd& pairing_inverse() const { return Jinv_; }

  /// omega(u, v) = u^T J v.  Throws DimensionError on size mismatch.
  double pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

 private:
  int n_;
  Eigen::MatrixXd J_;
  Eigen::MatrixXd Jinv_;
};

}  // namespace lagsym
