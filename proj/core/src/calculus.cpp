#include "lagsym/calculus.hpp"

#include <cmath>

namespace lagsym {

double Frame::independence_margin() const {
  if (vectors.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(vectors);
  return svd.singularValues().minCoeff();
}

namespace {

Eigen::MatrixXd jacobian_dual(const SmoothMap& m, const Eigen::VectorXd& x) {
  const int din = m.dim_in();
  const int dout = m.dim_out();
  Eigen::MatrixXd J(dout, din);
  std::array<Dual, kMaxDim> in;
  std::array<Dual, kMaxDim> out;
  for (int j = 0; j < din; ++j) {
    for (int i = 0; i < din; ++i) in[i] = Dual(x[i], i == j ? 1.0 : 0.0);
    m.eval_dual(std::span<const Dual>(in.data(), static_cast<size_t>(din)),
                std::span<Dual>(out.data(), static_cast<size_t>(dout)));
    for (int i = 0; i < dout; ++i) J(i, j) = out[i].der;
  }
  return J;
}

Eigen::MatrixXd jacobian_central(const SmoothMap& m, const Eigen::VectorXd& x, double scale) {
  const int din = m.dim_in();
  const int dout = m.dim_out();
  Eigen::MatrixXd J(dout, din);
  Eigen::VectorXd xp = x, xm = x;
  std::array<double, kMaxDim> fp, fm;
  for (int j = 0; j < din; ++j) {
    const double h = scale * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    m.eval_raw(std::span<const double>(xp.data(), static_cast<size_t>(din)),
               std::span<double>(fp.data(), static_cast<size_t>(dout)));
    m.eval_raw(std::span<const double>(xm.data(), static_cast<size_t>(din)),
               std::span<double>(fm.data(), static_cast<size_t>(dout)));
    for (int i = 0; i < dout; ++i) J(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return J;
}

Eigen::MatrixXd jacobian_fd(const SmoothMap& m, const Eigen::VectorXd& x,
                            const DiffOptions& opts) {
  Eigen::MatrixXd Jh = jacobian_central(m, x, opts.fd_step_scale);
  if (!opts.richardson) return Jh;
  Eigen::MatrixXd Jh2 = jacobian_central(m, x, 0.5 * opts.fd_step_scale);
  return (4.0 * Jh2 - Jh) / 3.0;
}

Eigen::MatrixXd jacobian_smooth(const SmoothMap& m, const Eigen::VectorXd& x,
                                const DiffOptions& opts) {
  if (m.has_dual()) return jacobian_dual(m, x);
  return jacobian_fd(m, x, opts);
}

}  // namespace

Eigen::MatrixXd jacobian(const SmoothMap& m, const Eigen::VectorXd& x,
                         const DiffOptions& opts) {
  if (x.size() != m.dim_in()) {
    throw DimensionError("jacobian: input has wrong length");
  }
  if (m.piecewise()) {
    const double mu = m.seam_value(x);
    if (std::abs(mu) <= opts.seam_tol) {
      throw SeamError("jacobian: point lies on the seam; use jacobian_one_sided");
    }
    if (m.has_branches()) {
      return jacobian_smooth(m.branch(mu >= 0.0 ? +1 : -1), x, opts);
    }
    // No smooth extensions available: central differences are only valid if
    // the stencil stays on one side.
    const double h = opts.fd_step_scale * std::max(1.0, x.cwiseAbs().maxCoeff());
    if (std::abs(mu) < 4.0 * h) {
      throw SeamError("jacobian: finite-difference stencil straddles the seam");
    }
  }
  return jacobian_smooth(m, x, opts);
}

Eigen::MatrixXd jacobian_one_sided(const SmoothMap& m, const Eigen::VectorXd& x,
                                   int side, const DiffOptions& opts) {
  if (!m.piecewise() || !m.has_branches()) {
    return jacobian(m, x, opts);
  }
  return jacobian_smooth(m.branch(side), x, opts);
}

double pullback_residual(const SymplecticStructure& S_out, const SymplecticStructure& S_in,
                         const SmoothMap& m, const Eigen::VectorXd& x, int sign,
                         const DiffOptions& opts) {
  if (m.dim_in() != S_in.dim() || m.dim_out() != S_out.dim()) {
    throw DimensionError("pullback_residual: map and structures disagree");
  }
  const Eigen::MatrixXd D = jacobian(m, x, opts);
  const Eigen::MatrixXd R =
      D.transpose() * S_out.pairing_matrix() * D - static_cast<double>(sign) * S_in.pairing_matrix();
  return R.cwiseAbs().maxCoeff();
}

double pullback_residual(const SymplecticStructure& S, const SmoothMap& m,
                         const Eigen::VectorXd& x, int sign, const DiffOptions& opts) {
  return pullback_residual(S, S, m, x, sign, opts);
}

Frame fiber_tangent_frame(const SmoothMap& f, const Eigen::VectorXd& x, double tol,
                          const DiffOptions& opts) {
  const Eigen::MatrixXd D = jacobian(f, x, opts);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const int rank_needed = f.dim_out();
  if (sv.size() < rank_needed || sv[rank_needed - 1] <= tol) {
    throw CriticalPointError("fiber_tangent_frame: rank of Df dropped below dim_out");
  }
  const int k = f.dim_in() - rank_needed;
  Frame fr;
  fr.base = x;
  fr.vectors = svd.matrixV().rightCols(k);
  return fr;
}

double lagrangian_residual(const SymplecticStructure& S, const SmoothMap& f,
                           const Eigen::VectorXd& x, double tol, const DiffOptions& opts) {
  const Frame fr = fiber_tangent_frame(f, x, tol, opts);
  const Eigen::MatrixXd G =
      fr.vectors.transpose() * S.pairing_matrix() * fr.vectors;
  return G.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& vectors) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(vectors);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(vectors.rows(), vectors.cols());
  // Keep the orientation of the input frame: flip columns where R has a
  // negative diagonal.
  Eigen::MatrixXd R = qr.matrixQR().topRows(vectors.cols()).triangularView<Eigen::Upper>();
  for (int j = 0; j < vectors.cols(); ++j) {
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

}  // namespace lagsym
