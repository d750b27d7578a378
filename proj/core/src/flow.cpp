#include "lagsym/flow.hpp"

#include <cmath>
#include <limits>

#include "lagsym/calculus.hpp"

namespace lagsym {

namespace {

Eigen::VectorXd gradient_central(const SmoothMap& H, const Eigen::VectorXd& x) {
  const int d = static_cast<int>(x.size());
  Eigen::VectorXd g(d);
  Eigen::VectorXd xt = x;
  std::array<double, 1> fp, fm;
  const double scale = 6.055454452393343e-06;  // eps^(1/3)
  for (int j = 0; j < d; ++j) {
    const double h = scale * std::max(1.0, std::abs(x[j]));
    xt[j] = x[j] + h;
    H.eval_raw(std::span<const double>(xt.data(), static_cast<size_t>(d)),
               std::span<double>(fp.data(), 1));
    xt[j] = x[j] - h;
    H.eval_raw(std::span<const double>(xt.data(), static_cast<size_t>(d)),
               std::span<double>(fm.data(), 1));
    g[j] = (fp[0] - fm[0]) / (2.0 * h);
    xt[j] = x[j];
  }
  return g;
}

Eigen::VectorXd gradient_dual(const SmoothMap& H, const Eigen::VectorXd& x) {
  const int d = static_cast<int>(x.size());
  Eigen::VectorXd g(d);
  std::array<Dual, kMaxDim> in;
  std::array<Dual, 1> out;
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) in[i] = Dual(x[i], i == j ? 1.0 : 0.0);
    H.eval_dual(std::span<const Dual>(in.data(), static_cast<size_t>(d)),
                std::span<Dual>(out.data(), 1));
    g[j] = out[0].der;
  }
  return g;
}

}  // namespace

Eigen::VectorXd gradient(const SmoothMap& H, const Eigen::VectorXd& x) {
  if (H.dim_out() != 1) {
    throw DimensionError("gradient: map is not scalar");
  }
  return H.has_dual() ? gradient_dual(H, x) : gradient_central(H, x);
}

Eigen::VectorXd hamiltonian_vector_field(const SymplecticStructure& S, const SmoothMap& H,
                                         const Eigen::VectorXd& x) {
  return S.pairing_inverse() * (-gradient(H, x));
}

Eigen::VectorXd hamiltonian_flow(const SymplecticStructure& S, const SmoothMap& H,
                                 const Eigen::VectorXd& x0, double t, int steps,
                                 const FlowOptions& opts) {
  if (x0.size() != S.dim()) {
    throw DimensionError("hamiltonian_flow: state has wrong length");
  }
  if (t == 0.0) return x0;
  if (steps <= 0) {
    steps = static_cast<int>(std::ceil(std::abs(t) * opts.steps_per_unit_time));
    steps = std::max(steps, 1);
  }
  const double h = t / steps;
  const int d = S.dim();
  const Eigen::MatrixXd& Jinv = S.pairing_inverse();

  auto field = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return Jinv * (-gradient(H, y));
  };

  Eigen::VectorXd x = x0;
  for (int k = 0; k < steps; ++k) {
    if (opts.check_domain && !H.in_domain(x)) {
      throw DomainError("hamiltonian_flow: trajectory left the domain");
    }
    // Predictor, then Newton (chord) on  g(z) = z - x - h X_H((x+z)/2).
    Eigen::VectorXd z = x + h * field(x);
    Eigen::VectorXd mid = 0.5 * (x + z);

    // dg/dz = I - (h/2) DX_H(mid); DX_H columns by central differences of the
    // field, refreshed once per step.
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(d, d);
    {
      const double dh = 1e-6 * std::max(1.0, mid.cwiseAbs().maxCoeff());
      Eigen::VectorXd yp = mid, ym = mid;
      for (int j = 0; j < d; ++j) {
        yp[j] = mid[j] + dh;
        ym[j] = mid[j] - dh;
        A.col(j) -= (0.5 * h / (2.0 * dh)) * (field(yp) - field(ym));
        yp[j] = mid[j];
        ym[j] = mid[j];
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);

    const double tol = opts.newton_tol * std::max(1.0, x.cwiseAbs().maxCoeff());
    double res = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 0; it < opts.max_newton_iter; ++it) {
      mid = 0.5 * (x + z);
      Eigen::VectorXd g = z - x - h * field(mid);
      res = g.cwiseAbs().maxCoeff();
      if (res <= tol) {
        converged = true;
        break;
      }
      z -= lu.solve(g);
    }
    if (!converged && res > 1e4 * tol) {
      throw ConvergenceError("hamiltonian_flow: inner Newton solve diverged");
    }
    x = z;
  }
  return x;
}

Eigen::VectorXd fiber_walk(const SymplecticStructure& S, const SmoothMap& f,
                           const Eigen::VectorXd& x0, const Eigen::VectorXd& direction,
                           double t, int steps, const FlowOptions& opts, double* drift_out) {
  const SmoothMap H = weighted_components(f, direction);
  const Eigen::VectorXd b0 = f(x0);

  if (t == 0.0 || direction.isZero(0.0)) {
    if (drift_out) *drift_out = 0.0;
    return x0;
  }
  if (steps <= 0) {
    const double speed = std::max(1.0, direction.cwiseAbs().maxCoeff());
    steps = static_cast<int>(std::ceil(std::abs(t) * speed * opts.steps_per_unit_time));
  }

  // Rank monitor: split the walk into legs and check the rank of Df between
  // legs (approach to the critical set shows up as a collapsing singular
  // value).
  const int legs = 8;
  Eigen::VectorXd x = x0;
  for (int leg = 0; leg < legs; ++leg) {
    Eigen::MatrixXd D = jacobian(f, x);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(D);
    const auto& sv = svd.singularValues();
    if (sv[f.dim_out() - 1] < 1e-8 * std::max(1.0, sv[0])) {
      throw CriticalPointError("fiber_walk: rank monitor tripped near the critical set");
    }
    const int leg_steps = std::max(1, steps / legs);
    x = hamiltonian_flow(S, H, x, t / legs, leg_steps, opts);
  }
  // project back onto the fiber (the integrator keeps non-quadratic
  // components of f only to O(h^2))
  try {
    x = solve_fiber_point(f, b0, x, 1e-11, 30).point;
  } catch (const ConvergenceError&) {
    // keep the unprojected point; the drift report tells the caller
  }
  if (drift_out) *drift_out = (f(x) - b0).norm();
  return x;
}

FiberSolveResult solve_fiber_point(const SmoothMap& f, const Eigen::VectorXd& b,
                                   const Eigen::VectorXd& seed, double tol, int max_iter) {
  if (b.size() != f.dim_out()) {
    throw DimensionError("solve_fiber_point: target has wrong length");
  }
  FiberSolveResult out;
  Eigen::VectorXd x = seed;
  Eigen::VectorXd r = f(x) - b;
  double rn = r.norm();
  int it = 0;
  for (; it < max_iter && rn > tol; ++it) {
    Eigen::MatrixXd J;
    try {
      J = jacobian(f, x);
    } catch (const SeamError&) {
      J = jacobian_one_sided(f, x, +1);
    }
    Eigen::MatrixXd JJt = J * J.transpose();
    Eigen::VectorXd step = J.transpose() * JJt.ldlt().solve(r);
    // Backtracking line search.
    double alpha = 1.0;
    for (int ls = 0; ls < 12; ++ls) {
      Eigen::VectorXd xn = x - alpha * step;
      if (f.in_domain(xn)) {
        Eigen::VectorXd rnw = f(xn) - b;
        if (rnw.norm() < rn) {
          x = xn;
          r = rnw;
          rn = r.norm();
          break;
        }
      }
      alpha *= 0.5;
      if (ls == 11) {
        throw ConvergenceError("solve_fiber_point: line search stalled");
      }
    }
  }
  if (rn > tol) {
    throw ConvergenceError("solve_fiber_point: no convergence after max iterations");
  }
  out.point = x;
  out.residual = rn;
  out.iterations = it;
  Eigen::MatrixXd J;
  try {
    J = jacobian(f, x);
  } catch (const SeamError&) {
    J = jacobian_one_sided(f, x, +1);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const auto& sv = svd.singularValues();
  out.rank_margin = sv[f.dim_out() - 1] / std::max(1e-300, sv[0]);
  out.near_critical = out.rank_margin < 1e-6;
  return out;
}

}  // namespace lagsym
