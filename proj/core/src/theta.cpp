#include "lagsym/theta.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lagsym/catalog.hpp"
#include "lagsym/flow.hpp"

namespace lagsym {

namespace {

int steps_for(const Eigen::VectorXd& xi, const ThetaOptions& opts) {
  const double speed = std::max(1.0, xi.cwiseAbs().maxCoeff());
  return static_cast<int>(std::ceil(speed)) * opts.steps_per_unit;
}

}  // namespace

Eigen::VectorXd build_theta(const FibrationModel& m, const Section& sigma,
                            const Eigen::VectorXd& b, const Eigen::VectorXd& xi,
                            const ThetaOptions& opts) {
  const Eigen::VectorXd x0 = sigma.map(b);
  if (xi.isZero(0.0)) return x0;
  const SmoothMap H = weighted_components(m.fibration, xi);
  FlowOptions fopts;
  fopts.steps_per_unit_time = opts.steps_per_unit;
  Eigen::VectorXd x = hamiltonian_flow(m.structure, H, x0, 1.0, steps_for(xi, opts), fopts);
  // The integrated point sits within O(h^2) of the fiber; project back so the
  // chart point lies on {f = b} to solver precision (a transverse correction,
  // the within-fiber position keeps its O(h^2) accuracy).
  const Eigen::VectorXd target = m.fibration(x0);
  x = solve_fiber_point(m.fibration, target, x, 1e-11, 30).point;
  const double drift = (m.fibration(x) - target).norm();
  if (drift > opts.drift_tol) {
    std::ostringstream msg;
    msg << "build_theta: fiber drift " << drift << " exceeds tolerance";
    throw ConvergenceError(msg.str());
  }
  return x;
}

Eigen::VectorXd theta_inverse(const FibrationModel& m, const Section& sigma,
                              const Eigen::VectorXd& b, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& xi_guess, const ThetaOptions& opts) {
  const int n = m.base_dim;
  Eigen::VectorXd xi = xi_guess;
  Eigen::VectorXd r = m.wrap_to_near(build_theta(m, sigma, b, xi, opts), x) - x;
  double rn = r.norm();
  const double fd = 1e-6;
  for (int it = 0; it < opts.max_newton_iter; ++it) {
    if (rn <= opts.newton_tol) break;
    Eigen::MatrixXd J(m.ambient_dim, n);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd xp = xi, xm = xi;
      xp[j] += fd;
      xm[j] -= fd;
      const Eigen::VectorXd tp = build_theta(m, sigma, b, xp, opts);
      const Eigen::VectorXd tm = m.wrap_to_near(build_theta(m, sigma, b, xm, opts), tp);
      J.col(j) = (tp - tm) / (2.0 * fd);
    }
    const Eigen::VectorXd step = (J.transpose() * J).ldlt().solve(J.transpose() * r);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 10; ++ls) {
      const Eigen::VectorXd xin = xi - alpha * step;
      const Eigen::VectorXd rn2 =
          m.wrap_to_near(build_theta(m, sigma, b, xin, opts), x) - x;
      if (rn2.norm() < rn) {
        xi = xin;
        r = rn2;
        rn = rn2.norm();
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  if (rn > opts.newton_tol) {
    throw ConvergenceError("theta_inverse: no convergence, residual " + std::to_string(rn));
  }
  return xi;
}

Eigen::VectorXd reconstructed_involution(const FibrationModel& m, const Section& sigma,
                                         const Eigen::VectorXd& x, const ThetaOptions& opts) {
  const Eigen::VectorXd b = m.fibration(x);
  Eigen::VectorXd guess = Eigen::VectorXd::Zero(m.base_dim);
  const Eigen::VectorXd xi = theta_inverse(m, sigma, b, x, guess, opts);
  return build_theta(m, sigma, b, -xi, opts);
}

namespace {

// Gauss-Newton polish of a lattice candidate: minimizes the return distance
// |theta(b, xi) - sigma(b)| over xi.
bool polish_period(const FibrationModel& m, const Section& sigma, const Eigen::VectorXd& b,
                   Eigen::VectorXd& xi, double& residual, const ThetaOptions& opts) {
  const Eigen::VectorXd target = sigma.map(b);
  try {
    xi = theta_inverse(m, sigma, b, target, xi, opts);
  } catch (const Error&) {
    return false;
  }
  residual = m.distance(build_theta(m, sigma, b, xi, opts), target);
  return residual <= opts.newton_tol;
}

}  // namespace

LatticeProbeResult lattice_probe(const FibrationModel& m, const Section& sigma,
                                 const Eigen::VectorXd& b, const ThetaOptions& opts) {
  const int n = m.base_dim;
  LatticeProbeResult out;
  std::vector<Eigen::VectorXd> found;
  std::vector<double> residuals;

  auto consider = [&](Eigen::VectorXd xi) {
    if (static_cast<int>(found.size()) >= n) return;
    double res = 0.0;
    if (!polish_period(m, sigma, b, xi, res, opts)) return;
    if (xi.norm() < 1e-6) return;  // collapsed to the trivial solution
    // keep only if independent of what we already have
    Eigen::MatrixXd M(n, static_cast<int>(found.size()) + 1);
    for (size_t k = 0; k < found.size(); ++k) M.col(static_cast<int>(k)) = found[k];
    M.col(static_cast<int>(found.size())) = xi;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    if (svd.singularValues().minCoeff() < 1e-4 * svd.singularValues().maxCoeff()) return;
    found.push_back(xi);
    residuals.push_back(res);
  };

  if (m.period_hint) {
    const Eigen::MatrixXd hint = m.period_hint(b);
    for (int j = 0; j < n; ++j) consider(hint.col(j));
  }

  if (static_cast<int>(found.size()) < n) {
    // Coarse scan: walk each coordinate direction and polish near-returns.
    out.scanned = true;
    const Eigen::VectorXd target = sigma.map(b);
    ThetaOptions coarse = opts;
    coarse.steps_per_unit = std::max(200, opts.steps_per_unit / 6);
    for (int j = 0; j < n && static_cast<int>(found.size()) < n; ++j) {
      double best_t = 0.0, best_d = std::numeric_limits<double>::infinity();
      for (double t = 0.5; t <= 10.0; t += 0.25) {
        Eigen::VectorXd xi = Eigen::VectorXd::Zero(n);
        xi[j] = t;
        double d;
        try {
          d = m.distance(build_theta(m, sigma, b, xi, coarse), target);
        } catch (const Error&) {
          continue;
        }
        if (d < best_d) {
          best_d = d;
          best_t = t;
        }
      }
      if (best_t != 0.0) {
        Eigen::VectorXd xi = Eigen::VectorXd::Zero(n);
        xi[j] = best_t;
        consider(xi);
      }
    }
  }

  if (static_cast<int>(found.size()) < n) {
    throw ConvergenceError("lattice_probe: found only " + std::to_string(found.size()) +
                           " of " + std::to_string(n) + " independent periods");
  }
  out.periods.resize(n, n);
  out.residuals.resize(n);
  for (int j = 0; j < n; ++j) {
    out.periods.col(j) = found[static_cast<size_t>(j)];
    out.residuals[j] = residuals[static_cast<size_t>(j)];
  }
  return out;
}

bool in_lattice(const Eigen::MatrixXd& P, const Eigen::VectorXd& v, double tol) {
  const Eigen::VectorXd c = P.fullPivLu().solve(v);
  for (int i = 0; i < c.size(); ++i) {
    if (std::abs(c[i] - std::round(c[i])) > tol) return false;
  }
  return true;
}

bool same_lattice(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q, double tol) {
  for (int j = 0; j < Q.cols(); ++j) {
    if (!in_lattice(P, Q.col(j), tol)) return false;
  }
  for (int j = 0; j < P.cols(); ++j) {
    if (!in_lattice(Q, P.col(j), tol)) return false;
  }
  return true;
}

}  // namespace lagsym
