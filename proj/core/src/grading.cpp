#include "lagsym/grading.hpp"

#include <cmath>
#include <numbers>

#include "lagsym/catalog.hpp"
#include "lagsym/flow.hpp"
#include "lagsym/sampling.hpp"
#include "lagsym/verify.hpp"

namespace lagsym {

using std::numbers::pi;

std::complex<double> HolomorphicVolume::value(const Eigen::MatrixXd& vectors) const {
  const int n = static_cast<int>(chart.pairs.size());
  if (vectors.cols() != n || vectors.rows() != chart.ambient_dim) {
    throw DimensionError("HolomorphicVolume: frame must have n complex columns");
  }
  Eigen::MatrixXcd U(n, n);
  for (int j = 0; j < n; ++j) U.col(j) = chart.complexify(vectors.col(j));
  return scale * U.determinant();
}

std::pair<double, double> phase_of_plane(const HolomorphicVolume& volume,
                                         const SymplecticStructure& S, const Frame& frame,
                                         double tol) {
  const Eigen::MatrixXd& V = frame.vectors;
  if ((V.transpose() * V - Eigen::MatrixXd::Identity(V.cols(), V.cols()))
          .cwiseAbs()
          .maxCoeff() > tol) {
    throw ConfigError("phase_of_plane: frame is not orthonormal");
  }
  const Eigen::MatrixXd G = V.transpose() * S.pairing_matrix() * V;
  if (G.cwiseAbs().maxCoeff() > tol) {
    throw ConfigError("phase_of_plane: frame is not Lagrangian");
  }
  const std::complex<double> w = volume.value(V);
  const double psi = std::abs(w);
  if (psi < 1e-14) {
    throw ConfigError("phase_of_plane: form vanishes on the frame");
  }
  double theta = std::arg(w) / pi;  // in (-1, 1]
  if (theta < 0.0) theta += 2.0;
  return {psi, theta};
}

namespace {

Eigen::MatrixXcd unitary_representative(const Chart& chart, const Frame& plane) {
  const int n = static_cast<int>(chart.pairs.size());
  Eigen::MatrixXd V = orthonormalize(plane.vectors);
  Eigen::MatrixXcd U(n, n);
  for (int j = 0; j < n; ++j) U.col(j) = chart.complexify(V.col(j));
  return U;
}

}  // namespace

double intersection_index(const Chart& chart, const Frame& plane1, double theta1,
                          const Frame& plane2, double theta2, double guard) {
  const Eigen::MatrixXcd U1 = unitary_representative(chart, plane1);
  const Eigen::MatrixXcd U2 = unitary_representative(chart, plane2);
  const Eigen::MatrixXcd A = U2 * U2.transpose();
  const Eigen::MatrixXcd B = U1 * U1.transpose();
  const Eigen::MatrixXcd W = A * B.inverse();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(W);
  double alpha = 0.0;
  for (int k = 0; k < W.rows(); ++k) {
    const std::complex<double> lam = eig.eigenvalues()[k];
    if (std::abs(lam - std::complex<double>(1.0, 0.0)) < guard) {
      throw ConfigError("intersection_index: planes are not transverse");
    }
    double a = std::arg(lam) / (2.0 * pi);  // in (-1/2, 1/2]
    if (a <= 0.0) a += 1.0;                 // select (0, 1)
    alpha += a;
  }
  return alpha - theta2 + theta1;
}

namespace {

double mod1_dist(double x, double target) {
  double d = std::fmod(x - target, 1.0);
  if (d < 0) d += 1.0;
  return std::min(d, 1.0 - d);
}

}  // namespace

GradingCensusResult grading_census(const FibrationModel& m, const HolomorphicVolume& volume,
                                   int n_samples, std::uint64_t seed, int jobs) {
  if (!m.chart.fully_complex()) {
    throw ConfigError("grading_census: model chart is not fully complex");
  }
  GradingCensusResult res;
  const int n = m.base_dim;
  const double half_n_mod1 = std::fmod(0.5 * n, 1.0);
  const SmoothMap& inv = m.involution().map;

  // Section frames.
  {
    const auto bases = sample_base(m, n_samples, seed);
    std::vector<double> devs(bases.size(), 0.0);
    std::vector<char> used(bases.size(), 0);
    parallel_for(bases.size(), jobs, [&](std::size_t i) {
      for (const auto& sec : m.sections) {
        if (!sec.map.in_domain(bases[i])) continue;
        Frame fr;
        fr.base = sec.map(bases[i]);
        fr.vectors = orthonormalize(jacobian(sec.map, bases[i]));
        const auto [psi, theta] = phase_of_plane(volume, m.structure, fr);
        devs[i] = std::max(devs[i], mod1_dist(theta, 0.0));
        used[i] = 1;
      }
    });
    for (size_t i = 0; i < bases.size(); ++i) {
      if (used[i]) {
        res.max_section_dev = std::max(res.max_section_dev, devs[i]);
        ++res.n_section_samples;
      }
    }
  }

  // Fiber frames at involution-fixed points.
  {
    CloudOptions copts;
    copts.count = n_samples;
    copts.seed = seed + 1;
    copts.jobs = jobs;
    const SampleCloud cloud = sample_cloud(m, copts);
    std::vector<double> devs(cloud.points.size(), -1.0);
    parallel_for(cloud.points.size(), jobs, [&](std::size_t i) {
      Eigen::VectorXd x = cloud.points[i];
      for (int it = 0; it < 4; ++it) x = 0.5 * (x + m.wrap_to_near(inv(x), x));
      if (m.distance(inv(x), x) > 1e-9) return;
      if (!m.fibration.in_domain(x)) return;
      if (!is_regular(m, x, 1e-6).regular) return;
      Frame fr;
      try {
        fr = fiber_tangent_frame(m.fibration, x, 1e-6);
      } catch (const Error&) {
        return;
      }
      const auto [psi, theta] = phase_of_plane(volume, m.structure, fr);
      devs[i] = mod1_dist(theta, half_n_mod1);
    });
    for (double d : devs) {
      if (d >= 0.0) {
        res.max_fixed_fiber_dev = std::max(res.max_fixed_fiber_dev, d);
        ++res.n_fiber_samples;
      }
    }
  }

  // Phase spread along one fiber (non-constancy flags a fibration that is
  // not special Lagrangian for this volume form).
  {
    CloudOptions copts;
    copts.count = 12;
    copts.seed = seed + 2;
    copts.require_regular = true;
    copts.jobs = jobs;
    const SampleCloud cloud = sample_cloud(m, copts);
    double lo = 1e300, hi = -1e300;
    int used = 0;
    for (const auto& x0 : cloud.points) {
      try {
        Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
        dir[n - 1] = 1.0;
        for (double t : {0.0, 0.15, 0.3}) {
          const Eigen::VectorXd x =
              t == 0.0 ? x0 : fiber_walk(m.structure, m.fibration, x0, dir, t, 400);
          const Frame fr = fiber_tangent_frame(m.fibration, x, 1e-6);
          const auto [psi, theta] = phase_of_plane(volume, m.structure, fr);
          const double tm = mod1_dist(theta, 0.0);
          lo = std::min(lo, tm);
          hi = std::max(hi, tm);
          ++used;
        }
        break;  // one fiber is enough
      } catch (const Error&) {
        continue;
      }
    }
    if (used > 0) {
      res.fiber_theta_spread = hi - lo;
      res.special_lagrangian_flag = res.fiber_theta_spread <= 1e-6;
    }
  }
  return res;
}

std::complex<double> h_field(const FibrationModel& m, const HolomorphicVolume& volume,
                             const Eigen::VectorXd& x, double frame_tol, std::uint64_t seed) {
  if (!m.chart.fully_complex()) {
    throw ConfigError("h_field: model chart is not fully complex");
  }
  const SmoothMap& phi = m.involution().map;
  if (!m.fibration.in_domain(x) || !m.fibration.in_domain(phi(x))) {
    throw DomainError("h_field: point or its image outside the domain");
  }
  const Eigen::MatrixXd D = jacobian(phi, x);
  const int n = static_cast<int>(m.chart.pairs.size());
  Rng rng(seed);
  std::complex<double> first{};
  for (int trial = 0; trial < 2; ++trial) {
    Eigen::MatrixXd V(m.ambient_dim, n);
    for (int j = 0; j < n; ++j) V.col(j) = rng.gaussian(m.ambient_dim);
    const std::complex<double> denom = std::conj(volume.value(V));
    if (std::abs(denom) < 1e-10) continue;
    const std::complex<double> num = volume.value(D * V);
    const std::complex<double> h = num / denom;
    if (trial == 0) {
      first = h;
    } else if (std::abs(h - first) > frame_tol) {
      throw ConfigError("h_field: frame-dependent ratio; volume form not of pure type");
    }
  }
  return first;
}

}  // namespace lagsym
