#include "lagsym/symplectic.hpp"

#include <cmath>

namespace lagsym {

SymplecticStructure::SymplecticStructure(int n, Eigen::MatrixXd pairing)
    : n_(n), J_(std::move(pairing)) {
  if (n_ <= 0 || J_.rows() != 2 * n_ || J_.cols() != 2 * n_) {
    throw DimensionError("SymplecticStructure: pairing matrix must be 2n x 2n");
  }
  if ((J_ + J_.transpose()).cwiseAbs().maxCoeff() > 1e-14) {
    throw ConfigError("SymplecticStructure: pairing matrix must be antisymmetric");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(J_);
  if (!lu.isInvertible()) {
    throw ConfigError("SymplecticStructure: pairing matrix must be nondegenerate");
  }
  Jinv_ = lu.inverse();
}

SymplecticStructure SymplecticStructure::standard(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return {n, std::move(J)};
}

double SymplecticStructure::pairing(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  if (u.size() != dim() || v.size() != dim()) {
    throw DimensionError("symplectic pairing: vectors must have length 2n");
  }
  return u.dot(J_ * v);
}

}  // namespace lagsym
