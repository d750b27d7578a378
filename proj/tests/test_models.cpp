#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "lagsym/calculus.hpp"
#include "lagsym/catalog.hpp"
#include "lagsym/sampling.hpp"

using namespace lagsym;
using std::numbers::pi;
using cd = std::complex<double>;

namespace {

Eigen::VectorXd pt4(cd z1, cd z2, const Chart& chart) {
  Eigen::VectorXd x(4);
  x.setZero();
  chart.set_z(x, 0, z1);
  chart.set_z(x, 1, z2);
  return x;
}

Eigen::VectorXd pt6(cd z1, cd z2, cd z3) {
  Eigen::VectorXd x(6);
  x << z1.real(), z2.real(), z3.real(), z1.imag(), z2.imag(), z3.imag();
  return x;
}

constexpr double kSqrt2 = 1.4142135623730951;

}  // namespace

TEST_CASE("catalog contents and section contracts") {
  const auto models = catalog();
  REQUIRE(models.size() == 8);
  const char* names[] = {"ff_nonproper",  "nodal",           "generic_singular",
                         "positive_proper", "harvey_lawson", "negative_amoeba",
                         "negative_thin", "toric_reference"};
  for (size_t i = 0; i < 8; ++i) CHECK(models[i]->name == names[i]);
  CHECK(model_by_name("nodal")->ambient_dim == 4);
  CHECK(model_by_name("positive_proper")->base_dim == 3);
  CHECK_THROWS_AS((void)model_by_name("no_such_model"), ConfigError);

  // every declared section is a right inverse of f on sampled base points
  for (const auto& m : models) {
    for (const auto& sec : m->sections) {
      Rng rng(101);
      int tested = 0;
      for (int k = 0; k < 400 && tested < 100; ++k) {
        const Eigen::VectorXd b = rng.uniform_box(m->base_lo, m->base_hi);
        if (!sec.map.in_domain(b)) continue;
        const Eigen::VectorXd x = sec.map(b);
        REQUIRE(m->fibration.in_domain(x));
        CHECK((m->fibration(x) - b).cwiseAbs().maxCoeff() <= 1e-10);
        ++tested;
      }
      CHECK(tested == 100);
    }
  }
}

TEST_CASE("sections are Lagrangian") {
  for (const auto& m : catalog()) {
    for (const auto& sec : m->sections) {
      Rng rng(55);
      int tested = 0;
      for (int k = 0; k < 200 && tested < 40; ++k) {
        Eigen::VectorXd b = rng.uniform_box(m->base_lo, m->base_hi);
        if (!sec.map.in_domain(b)) continue;
        if (m->fibration.piecewise() && std::abs(b[0]) < 1e-3) continue;  // section kink
        const Eigen::MatrixXd D = jacobian(sec.map, b);
        const Eigen::MatrixXd G = D.transpose() * m->structure.pairing_matrix() * D;
        CHECK(G.cwiseAbs().maxCoeff() <= 1e-8);
        ++tested;
      }
      CHECK(tested >= 20);
    }
  }
}

TEST_CASE("fibration evaluation at quoted points") {
  const ModelPtr nodal = model_by_name("nodal");
  CHECK((eval(*nodal, pt4(0, 0, nodal->chart))).cwiseAbs().maxCoeff() <= 1e-15);

  const ModelPtr pos = model_by_name("positive_proper");
  CHECK((eval(*pos, pt6(0, 0, 0))).cwiseAbs().maxCoeff() <= 1e-15);

  // the negative model at (1, 1, 0): mu = 0, gamma = 1, and the two log
  // coordinates take the frozen values -log(2)/2 and log((sqrt2-1)/sqrt2)
  const ModelPtr neg = model_by_name("negative_amoeba");
  const Eigen::VectorXd f = eval(*neg, pt6(1, 1, 0));
  CHECK(std::abs(f[0]) <= 1e-15);
  CHECK(f[1] == doctest::Approx(-0.34657359027997264).epsilon(1e-12));
  CHECK(f[2] == doctest::Approx(-1.2279471772995154).epsilon(1e-12));

  // domain violation: the removed hypersurface of the nodal model
  CHECK_THROWS_AS((void)eval(*nodal, pt4(cd{0.0, 1.0}, cd{0.0, 1.0}, nodal->chart)),
                  DomainError);
}

TEST_CASE("involutions at quoted points") {
  const ModelPtr nodal = model_by_name("nodal");
  const Eigen::VectorXd y = involution(*nodal, pt4(cd{1, 1}, cd{2, 0}, nodal->chart));
  CHECK((y - pt4(cd{1, -1}, cd{2, 0}, nodal->chart)).cwiseAbs().maxCoeff() <= 1e-15);

  const ModelPtr hl = model_by_name("harvey_lawson");
  const Eigen::VectorXd z = involution(*hl, pt6(cd{1, 0}, cd{0, 1}, cd{1, 0}));
  CHECK((z - pt6(cd{-1, 0}, cd{0, -1}, cd{1, 0})).cwiseAbs().maxCoeff() <= 1e-15);

  // the focus-focus involution exchanges the two sections
  const ModelPtr ff = model_by_name("ff_nonproper");
  Rng rng(19);
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd b(2);
    b << rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7);
    const Eigen::VectorXd s1 = ff->section("sigma_1").map(b);
    const Eigen::VectorXd s2 = ff->section("sigma_2").map(b);
    CHECK((involution(*ff, s1) - s2).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((involution(*ff, s2) - s1).cwiseAbs().maxCoeff() <= 1e-14);
  }

  // involutions square to the identity exactly
  for (const auto& m : catalog()) {
    const Eigen::VectorXd x = Rng(23).uniform_box(m->box_lo, m->box_hi);
    CHECK((involution(*m, involution(*m, x)) - x).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("group actions") {
  const ModelPtr ff = model_by_name("ff_nonproper");
  GroupElement g;
  g.kind = GroupKind::Cstar;
  g.tau = {2.0, 0.0};
  // tau = 2 on (z1, z2) = (1, 1) -> (2, 1/2), and q is unchanged
  const Eigen::VectorXd x = pt4(1, 1, ff->chart);
  const Eigen::VectorXd y = group_action(*ff, g, x);
  CHECK((y - pt4(2.0, 0.5, ff->chart)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((eval(*ff, y) - eval(*ff, x)).cwiseAbs().maxCoeff() <= 1e-15);

  // tau = 1 is the identity
  GroupElement id;
  id.kind = GroupKind::Cstar;
  const Eigen::VectorXd same = group_action(*ff, id, x);
  CHECK((same - x).cwiseAbs().maxCoeff() == 0.0);

  // exact invariance of q under random tau
  Rng rng(29);
  for (int k = 0; k < 100; ++k) {
    GroupElement gr;
    gr.kind = GroupKind::Cstar;
    gr.tau = std::polar(std::exp(rng.uniform(-1, 1)), rng.uniform(0, 2 * pi));
    const Eigen::VectorXd p = rng.gaussian(4);
    CHECK((eval(*ff, group_action(*ff, gr, p)) - eval(*ff, p)).cwiseAbs().maxCoeff() <=
          1e-12);
  }

  // kind mismatch
  GroupElement wrong;
  wrong.kind = GroupKind::RTimesT2;
  CHECK_THROWS_AS((void)group_action(*ff, wrong, x), ConfigError);

  // Harvey-Lawson: the torus part moves the point but preserves the moments
  const ModelPtr hl = model_by_name("harvey_lawson");
  GroupElement t;
  t.kind = GroupKind::RTimesT2;
  t.t = {0.0, 0.25, 0.0};
  const Eigen::VectorXd p = pt6(1, 1, 1);
  const Eigen::VectorXd q = group_action(*hl, t, p);
  CHECK((q - p).cwiseAbs().maxCoeff() > 0.5);
  CHECK((eval(*hl, q) - eval(*hl, p)).cwiseAbs().maxCoeff() <= 1e-8);
  // the real direction flows the first moment numerically
  GroupElement tr;
  tr.kind = GroupKind::RTimesT2;
  tr.t = {0.2, 0.0, 0.0};
  const Eigen::VectorXd qr = group_action(*hl, tr, p);
  CHECK((eval(*hl, qr) - eval(*hl, p)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("focus-focus glue map") {
  // region 1 at (tau, b) = (0.5, 0.1): the image is 0.5 * Sigma_1(0.1),
  // i.e. (z1, z2) = (0.5, 0.2), and its q-value is the base point 0.1
  const Eigen::VectorXd x = glue_map(1, cd{0.5, 0.0}, cd{0.1, 0.0});
  const ModelPtr ff = model_by_name("ff_nonproper");
  CHECK((x - pt4(0.5, 0.2, ff->chart)).cwiseAbs().maxCoeff() <= 1e-15);
  const Eigen::VectorXd fb = eval(*ff, x);
  CHECK(std::abs(cd{fb[0], fb[1]} - cd{0.1, 0.0}) <= 1e-15);

  // strict region boundaries
  CHECK_THROWS_AS((void)glue_map(1, cd{1.0, 0.0}, cd{0.1, 0.0}), DomainError);
  CHECK_THROWS_AS((void)glue_map(1, cd{0.05, 0.0}, cd{0.1, 0.0}), DomainError);
  CHECK_THROWS_AS((void)glue_map(2, cd{0.9, 0.0}, cd{0.1, 0.0}), DomainError);
  CHECK_THROWS_AS((void)glue_map(3, cd{0.5, 0.0}, cd{0.1, 0.0}), ConfigError);

  // equivariance under the scaling action
  Rng rng(31);
  for (int k = 0; k < 50; ++k) {
    const cd b = std::polar(rng.uniform(0.05, 0.4), rng.uniform(0, 2 * pi));
    const cd tau = std::polar(rng.uniform(std::abs(b) + 0.1, 0.9), rng.uniform(0, 2 * pi));
    const cd scale = std::polar(rng.uniform(0.95, 1.0), rng.uniform(0, 0.2));
    if (!(std::abs(b) < std::abs(tau * scale) && std::abs(tau * scale) < 1.0)) continue;
    GroupElement g;
    g.kind = GroupKind::Cstar;
    g.tau = scale;
    const Eigen::VectorXd lhs = glue_map(1, tau * scale, b);
    const Eigen::VectorXd rhs = group_action(*ff, g, glue_map(1, tau, b));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("reduced map in the invariant coordinates") {
  // t = 0, u1 = 4, u2 = 1: sqrt(0 + 16) = 4, inner 4/2 - 1 = 1, so (0, 0)
  const Eigen::Vector2d g0 = reduced_g_t(0.0, {4.0, 0.0}, {1.0, 0.0});
  CHECK(g0.cwiseAbs().maxCoeff() <= 1e-15);

  // one-sided t-derivatives at t = 0 disagree: -1/4 from the right, +1/4
  // from the left (hand differentiation of the |t| term)
  const Eigen::Vector2d dp = reduced_g_t_dt(0.0, {4.0, 0.0}, {1.0, 0.0}, +1);
  const Eigen::Vector2d dm = reduced_g_t_dt(0.0, {4.0, 0.0}, {1.0, 0.0}, -1);
  CHECK(dp[1] == doctest::Approx(-0.25).epsilon(1e-4));
  CHECK(dm[1] == doctest::Approx(0.25).epsilon(1e-4));
  CHECK(std::abs(dp[0]) <= 1e-10);

  // conjugation invariance: the formula depends only on moduli
  Rng rng(37);
  for (int k = 0; k < 100; ++k) {
    const cd u1{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const cd u2{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const double t = rng.uniform(-1, 1);
    if (std::abs(u2) < 1e-6) continue;
    Eigen::Vector2d a, b;
    try {
      a = reduced_g_t(t, u1, u2);
      b = reduced_g_t(t, std::conj(u1), std::conj(u2));
    } catch (const DomainError&) {
      continue;
    }
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }

  // the inner expression vanishes at t = 0, u1 = 1: out of domain
  CHECK_THROWS_AS((void)reduced_g_t(0.0, {1.0, 0.0}, {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS((void)reduced_g_t(0.5, {1.0, 0.0}, {0.0, 0.0}), DomainError);
}

TEST_CASE("leg-pinching symplectomorphism") {
  const ModelParams params;  // eps = 0.25
  // outer region: identical to the affine map
  {
    const cd u1{1.2, 0.3}, u2{0.5, -0.1};
    const auto w = thin_leg_phi(u1, u2, ThinLegVariant::OneLeg, params);
    const cd e1 = (u1 - u2) / kSqrt2;
    const cd e2 = (u1 + u2 - kSqrt2) / kSqrt2;
    CHECK(std::abs(w[0] - e1) == 0.0);
    CHECK(std::abs(w[1] - e2) == 0.0);
  }
  // inner region: the integrated flow matches the rotated-and-shifted limit
  {
    const auto w = thin_leg_phi({0.1, 0.0}, {0.0, 0.0}, ThinLegVariant::OneLeg, params,
                                /*force_integrate=*/true);
    CHECK(std::abs(w[0] - cd{0.0, 0.0}) <= 1e-6);
    CHECK(std::abs(w[1] - cd{-0.9, 0.0}) <= 1e-6);
  }
  // conjugation equivariance across all regions, integrating where the
  // cutoff is active
  Rng rng(41);
  for (int k = 0; k < 100; ++k) {
    const cd u1{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const cd u2{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const auto a = thin_leg_phi(u1, u2, ThinLegVariant::OneLeg, params, true);
    const auto b = thin_leg_phi(std::conj(u1), std::conj(u2), ThinLegVariant::OneLeg,
                                params, true);
    CHECK(std::abs(std::conj(a[0]) - b[0]) <= 1e-12);
    CHECK(std::abs(std::conj(a[1]) - b[1]) <= 1e-12);
  }
  // three-leg region values
  {
    const auto inner = thin_leg_phi({0.1, 0.0}, {0.0, 0.0}, ThinLegVariant::ThreeLeg, params);
    CHECK(std::abs(inner[0] - cd{0.0, 0.0}) == 0.0);
    CHECK(std::abs(inner[1] - cd{-0.9, 0.0}) == 0.0);
    const auto second =
        thin_leg_phi({0.1, 0.0}, {kSqrt2 + 0.05, 0.0}, ThinLegVariant::ThreeLeg, params);
    CHECK(std::abs(second[0] - cd{-0.9, 0.0}) == 0.0);
    CHECK(std::abs(second[1] - cd{0.05, 0.0}) <= 1e-15);
    const auto far = thin_leg_phi({0.3, 0.0}, {3.0, 0.0}, ThinLegVariant::ThreeLeg, params);
    CHECK(std::abs(far[0] - (cd{0.3, 0} - cd{3.0, 0}) / kSqrt2) == 0.0);
  }
}

TEST_CASE("regularity reports") {
  const ModelPtr nodal = model_by_name("nodal");
  CHECK_FALSE(is_regular(*nodal, Eigen::VectorXd::Zero(4)).regular);
  CHECK(is_regular(*nodal, pt4(1, 1, nodal->chart)).regular);

  const ModelPtr hl = model_by_name("harvey_lawson");
  CHECK_FALSE(is_regular(*hl, pt6(1, 0, 0)).regular);
  CHECK(is_regular(*hl, pt6(1, cd{0, 1}, 1)).regular);

  // on-seam report carries both one-sided ranks
  const ModelPtr neg = model_by_name("negative_amoeba");
  const RegularityReport rep = is_regular(*neg, pt6(1, 1, cd{0, 1}));
  CHECK(rep.on_seam);
  CHECK(rep.regular);
}

TEST_CASE("negative model branches agree on the seam") {
  const ModelPtr neg = model_by_name("negative_amoeba");
  Rng rng(43);
  for (int k = 0; k < 100; ++k) {
    // |z1| = |z2| puts the point exactly on the seam
    const double r = rng.uniform(0.3, 1.5);
    const cd z1 = std::polar(r, rng.uniform(0, 2 * pi));
    const cd z2 = std::polar(r, rng.uniform(0, 2 * pi));
    const cd z3{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Eigen::VectorXd x = pt6(z1, z2, z3);
    if (!neg->fibration.in_domain(x)) continue;
    Eigen::VectorXd fp(3), fn(3);
    neg->fibration.branch(+1).eval_raw(std::span<const double>(x.data(), 6),
                                       std::span<double>(fp.data(), 3));
    neg->fibration.branch(-1).eval_raw(std::span<const double>(x.data(), 6),
                                       std::span<double>(fn.data(), 3));
    CHECK((fp - fn).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("chart-tagged phase points") {
  const ModelPtr nodal = model_by_name("nodal");
  const PhasePoint p = phase_point(*nodal, pt4(cd{1, 1}, cd{2, 0}, nodal->chart));
  CHECK(p.chart_id == "standard_2");
  const PhasePoint q = involution(*nodal, p);
  CHECK((q.coords - pt4(cd{1, -1}, cd{2, 0}, nodal->chart)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((eval(*nodal, q) - eval(*nodal, p)).cwiseAbs().maxCoeff() <= 1e-14);

  // chart mismatch is rejected
  const ModelPtr ff = model_by_name("ff_nonproper");
  CHECK_THROWS_AS((void)eval(*ff, p), ConfigError);
  // non-finite coordinates are rejected
  Eigen::VectorXd bad = p.coords;
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)phase_point(*nodal, bad), DomainError);
  // dimension mismatch is rejected
  CHECK_THROWS_AS((void)phase_point(*nodal, Eigen::VectorXd::Zero(6)), DimensionError);
}

TEST_CASE("group element angles are periodic") {
  const ModelPtr hl = model_by_name("harvey_lawson");
  const Eigen::VectorXd p = pt6(cd{1, 0.2}, cd{0.8, -0.1}, cd{1.1, 0.3});
  GroupElement a, b;
  a.kind = b.kind = GroupKind::RTimesT2;
  a.t = {0.0, 0.3, -0.2};
  b.t = {0.0, 1.3, 0.8};  // the same angles shifted by whole periods
  CHECK((group_action(*hl, a, p) - group_action(*hl, b, p)).cwiseAbs().maxCoeff() <= 1e-12);

  const ModelPtr gs = model_by_name("generic_singular");
  Eigen::VectorXd q(6);
  q << 0.9, 0.4, 0.5, 0.1, -0.3, 1.0;
  GroupElement s1, s2;
  s1.kind = s2.kind = GroupKind::CstarTimesS1;
  s1.tau = std::polar(1.0, 0.7);
  s2.tau = s1.tau;
  s1.s = 0.25;
  s2.s = 1.25;
  const Eigen::VectorXd r1 = gs->wrap(group_action(*gs, s1, q));
  const Eigen::VectorXd r2 = gs->wrap(group_action(*gs, s2, q));
  CHECK(gs->distance(r1, r2) <= 1e-12);
  // the radial part of tau does not preserve fibers and is rejected
  GroupElement badtau;
  badtau.kind = GroupKind::CstarTimesS1;
  badtau.tau = {1.5, 0.0};
  CHECK_THROWS_AS((void)group_action(*gs, badtau, q), ConfigError);
}
