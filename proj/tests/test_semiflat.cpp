#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lagsym/catalog.hpp"
#include "lagsym/sampling.hpp"
#include "lagsym/semiflat.hpp"
#include "lagsym/theta.hpp"

using namespace lagsym;
using std::numbers::pi;
using cd = std::complex<double>;

namespace {

const SmoothMap kPotential = make_map(2, 1, [](auto in, auto out) {
  using S = std::decay_t<decltype(in[0])>;
  out[0] = S(0.25) * in[0] * in[0] + S(0.15) * in[0] * in[1];
});

Eigen::VectorXd b2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

// Test-local action-integral oracle for the nodal periods: trapezoid
// quadrature of the transverse-cycle action plus the exact circle action,
// differentiated by central differences.  Independent reimplementation of
// the derivation used by the library hint.
Eigen::MatrixXd nodal_period_oracle(double b1, double b2v) {
  auto action = [](double bb1, double bb2) {
    const int N = 4096;
    double acc = 0.0;
    for (int k = 0; k < N; ++k) {
      const double phi = 2.0 * pi * k / N;
      const double p2 = std::exp(2 * bb2) - 2 * std::exp(bb2) * std::cos(phi) + 1.0;
      const double rho2 = bb1 + std::sqrt(bb1 * bb1 + p2);
      acc += 0.5 * (std::exp(2 * bb2) - std::exp(bb2) * std::cos(phi)) / rho2;
    }
    return acc * (2.0 * pi / N);
  };
  const double h = 1e-6;
  Eigen::MatrixXd P(2, 2);
  P.col(0) << 2.0 * pi, 0.0;
  P(0, 1) = (action(b1 + h, b2v) - action(b1 - h, b2v)) / (2 * h);
  P(1, 1) = (action(b1, b2v + h) - action(b1, b2v - h)) / (2 * h);
  return P;
}

}  // namespace

TEST_CASE("reduction to lattice coordinates") {
  const SemiflatChart chart = SemiflatChart::focus_focus(kPotential);
  const Eigen::VectorXd b = b2(0.3, 0.0);
  const Eigen::MatrixXd P = chart.period_matrix(b);

  // a lattice vector reduces to zero
  const FiberPoint p1 = reduce(chart, b, P.col(0));
  CHECK(p1.reduced().cwiseAbs().maxCoeff() <= 1e-12);

  // half the second period reduces to (0, 1/2)
  const FiberPoint p2 = reduce(chart, b, 0.5 * P.col(1));
  CHECK(std::abs(p2.reduced()[0]) <= 1e-12);
  CHECK(p2.reduced()[1] == doctest::Approx(0.5).epsilon(1e-12));

  // reduction is idempotent, bit for bit
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const FiberPoint p = reduce(chart, b, rng.gaussian(2));
    const FiberPoint q = reduce(chart, b, p.alpha);
    CHECK(p.ticks == q.ticks);
  }
}

TEST_CASE("fiberwise negation") {
  const SemiflatChart chart = SemiflatChart::torus(2);
  const Eigen::VectorXd b = b2(0.1, 0.2);

  const FiberPoint zero = reduce(chart, b, Eigen::VectorXd::Zero(2));
  CHECK(minus_id(chart, zero).ticks == zero.ticks);

  // c = (1/4, 0) negates to (3/4, 0)
  const FiberPoint quarter = reduce(chart, b, b2(0.25 * 2 * pi, 0.0));
  const FiberPoint neg = minus_id(chart, quarter);
  CHECK(neg.reduced()[0] == doctest::Approx(0.75).epsilon(1e-12));

  // fixed points per fiber: exactly the 2^n half-lattice points
  int fixed = 0;
  for (int mask = 0; mask < 4; ++mask) {
    const FiberPoint p =
        reduce(chart, b, b2((mask & 1) ? pi : 0.0, (mask & 2) ? pi : 0.0));
    fixed += minus_id(chart, p).ticks == p.ticks ? 1 : 0;
  }
  CHECK(fixed == 4);
  const FiberPoint moving = reduce(chart, b, b2(0.77, 0.0));
  CHECK(minus_id(chart, moving).ticks != moving.ticks);
}

TEST_CASE("translation algebra is exact on reduced coefficients") {
  const SemiflatChart chart = SemiflatChart::focus_focus(kPotential);
  Rng rng(7);
  for (int k = 0; k < 1000; ++k) {
    const double r = rng.uniform(0.15, 0.85), a = rng.uniform(0, 2 * pi);
    const Eigen::VectorXd b = b2(r * std::cos(a), r * std::sin(a));
    const FiberPoint p = reduce(chart, b, rng.gaussian(2));
    const OneForm eta = OneForm::constant(rng.gaussian(2));
    const OneForm eta_neg = OneForm::constant(-eta(b));

    // eta = 0 and eta = lattice vector act trivially on reduced coefficients
    if (k == 0) {
      CHECK(translate(chart, OneForm::zero(2), p).ticks == p.ticks);
      const OneForm lattice = OneForm::constant(chart.period_matrix(b).col(0));
      const Eigen::VectorXd before = p.reduced();
      const Eigen::VectorXd after = translate(chart, lattice, p).reduced();
      CHECK((after - before).cwiseAbs().maxCoeff() <= 1e-9);
    }

    const FiberPoint once = translate(chart, eta, minus_id(chart, p));
    const FiberPoint twice = translate(chart, eta, minus_id(chart, once));
    CHECK(twice.ticks == p.ticks);

    const FiberPoint rhs = minus_id(chart, translate(chart, eta_neg, p));
    CHECK(once.ticks == rhs.ticks);
  }
}

TEST_CASE("canonical involution of the potential chart") {
  const SemiflatChart chart = SemiflatChart::focus_focus(kPotential);
  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    const double r = rng.uniform(0.15, 0.85), a = rng.uniform(0, 2 * pi);
    const Eigen::VectorXd b = b2(r * std::cos(a), r * std::sin(a));
    const FiberPoint p = reduce(chart, b, rng.gaussian(2));
    CHECK(iota_h(chart, iota_h(chart, p)).ticks == p.ticks);

    // the zero section goes to the graph of dH
    const FiberPoint zero = reduce(chart, b, Eigen::VectorXd::Zero(2));
    const FiberPoint image = iota_h(chart, zero);
    const FiberPoint graph = reduce(chart, b, chart.dH(b));
    CHECK((image.reduced() - graph.reduced()).cwiseAbs().maxCoeff() <= 1e-9);

    // the half-potential section is fixed
    const FiberPoint half = reduce(chart, b, 0.5 * chart.dH(b));
    CHECK((iota_h(chart, half).reduced() - half.reduced()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("section translation in model coordinates") {
  Eigen::VectorXd sp(2);
  sp << 0.4, -0.3;
  const OneForm sigma_prime = OneForm::constant(sp);
  const cd tau = std::exp(cd{-sp[0], sp[1]});
  Rng rng(13);
  const Chart ffc = Chart::focus_focus();
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd x = rng.gaussian(4);
    const Eigen::VectorXd y = section_translation_ff(sigma_prime, x);
    // closed-form oracle: (tau z1, conj(tau)^{-1} z2)
    const cd z1 = ffc.z(x, 0), z2 = ffc.z(x, 1);
    Eigen::VectorXd expect(4);
    ffc.set_z(expect, 0, tau * z1);
    ffc.set_z(expect, 1, z2 / std::conj(tau));
    CHECK((y - expect).cwiseAbs().maxCoeff() <= 1e-13);
  }

  // on the chart side the same data is a fiber translation: zero section to
  // the graph of sigma'
  const SemiflatChart chart = SemiflatChart::focus_focus();
  const Eigen::VectorXd b = b2(0.3, 0.2);
  const FiberPoint zero = reduce(chart, b, Eigen::VectorXd::Zero(2));
  const FiberPoint moved = section_translation(chart, sigma_prime, zero);
  const FiberPoint graph = reduce(chart, b, sp);
  CHECK((moved.reduced() - graph.reduced()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("chart map construction and inversion") {
  const ModelPtr toric = model_by_name("toric_reference");
  const Section& sec = toric->sections.front();
  const Eigen::VectorXd b = b2(0.5, 0.9);

  // xi = 0 returns the section point exactly
  CHECK((build_theta(*toric, sec, b, Eigen::VectorXd::Zero(2)) - sec.map(b)).norm() == 0.0);

  // a period covector returns to the section point
  const Eigen::VectorXd lambda = toric->period_hint(b).col(0);
  const Eigen::VectorXd back = build_theta(*toric, sec, b, lambda);
  CHECK((back - sec.map(b)).norm() <= 1e-6);

  // inversion recovers the covector
  Eigen::VectorXd xi(2);
  xi << 1.3, -0.8;
  const Eigen::VectorXd x = build_theta(*toric, sec, b, xi);
  const Eigen::VectorXd rec = theta_inverse(*toric, sec, b, x, Eigen::VectorXd::Zero(2));
  CHECK((build_theta(*toric, sec, b, rec) - x).norm() <= 1e-6);
}

TEST_CASE("lattice probe against independent oracles") {
  const ModelPtr toric = model_by_name("toric_reference");
  const Eigen::VectorXd bt = b2(0.45, 0.8);
  const LatticeProbeResult ptoric = lattice_probe(*toric, toric->sections.front(), bt);
  CHECK(same_lattice(ptoric.periods, 2.0 * pi * Eigen::MatrixXd::Identity(2, 2), 1e-5));
  CHECK(ptoric.residuals.maxCoeff() <= 1e-6);

  const ModelPtr nodal = model_by_name("nodal");
  const Eigen::VectorXd bn = b2(0.3, 0.0);
  const LatticeProbeResult pn = lattice_probe(*nodal, nodal->sections.front(), bn);
  CHECK(same_lattice(pn.periods, nodal_period_oracle(0.3, 0.0), 1e-5));

  // lattice varies continuously with the base point
  const LatticeProbeResult pn2 = lattice_probe(*nodal, nodal->sections.front(), b2(0.33, 0.02));
  for (int j = 0; j < 2; ++j) {
    double best = 1e300;
    for (int s : {-1, 1}) {
      for (int k = 0; k < 2; ++k) {
        best = std::min(best, (pn2.periods.col(j) - s * pn.periods.col(k)).norm());
      }
      // allow a circle-period shift when matching continued columns
      for (int k = 0; k < 2; ++k) {
        best = std::min(best,
                        (pn2.periods.col(j) - s * pn.periods.col(k) - pn.periods.col(0)).norm());
        best = std::min(best,
                        (pn2.periods.col(j) - s * pn.periods.col(k) + pn.periods.col(0)).norm());
      }
    }
    CHECK(best <= 0.5);
  }
}

TEST_CASE("chart-reconstructed involution matches conjugation pointwise") {
  const ModelPtr nodal = model_by_name("nodal");
  const Section& sigma = nodal->sections.front();
  const Eigen::VectorXd b = b2(0.4, 0.15);
  const Eigen::MatrixXd P = nodal_period_oracle(0.4, 0.15);
  Rng rng(17);
  for (int k = 0; k < 6; ++k) {
    Eigen::VectorXd c(2);
    c << rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4);
    const Eigen::VectorXd x = build_theta(*nodal, sigma, b, P * c);
    const Eigen::VectorXd y = reconstructed_involution(*nodal, sigma, x);
    CHECK((y - involution(*nodal, x)).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("charts from declarative config") {
  // torus family, no potential
  const SemiflatChart torus = SemiflatChart::from_config("torus", 2, {});
  CHECK((torus.period_matrix(b2(0.1, 0.1)) - 2.0 * pi * Eigen::MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() <= 1e-14);

  // focus-focus family with H(b) = 0.3 b1^2 (coefficients 1, b1, b2, b1^2, ...)
  const SemiflatChart ff = SemiflatChart::from_config("focus_focus", 2, {0, 0, 0, 0.3});
  const Eigen::VectorXd b = b2(0.4, 0.1);
  const Eigen::MatrixXd P = ff.period_matrix(b);
  CHECK(P(0, 0) == doctest::Approx(-std::log(b.norm()) + 0.6 * b[0]).epsilon(1e-9));
  CHECK(P(1, 1) == doctest::Approx(2.0 * pi));

  const SemiflatChart cyl = SemiflatChart::from_config("generic_cylinder", 3, {});
  Eigen::VectorXd b3(3);
  b3 << 0.3, 0.1, 0.5;
  CHECK(cyl.period_matrix(b3)(2, 2) == doctest::Approx(1.0));

  CHECK_THROWS_AS((void)SemiflatChart::from_config("nope", 2, {}), ConfigError);
  CHECK_THROWS_AS((void)SemiflatChart::from_config("focus_focus", 3, {}), ConfigError);
}

TEST_CASE("lattice probe reports failure on a non-proper model") {
  // fibers of the unglued focus-focus model are cylinders: only the circle
  // direction returns, so a rank-2 lattice cannot be assembled
  const ModelPtr ff = model_by_name("ff_nonproper");
  const Eigen::VectorXd b = b2(0.4, 0.1);
  CHECK_THROWS_AS((void)lattice_probe(*ff, ff->sections.front(), b), ConvergenceError);
}
