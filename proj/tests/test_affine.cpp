#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "lagsym/affine.hpp"
#include "lagsym/catalog.hpp"

using namespace lagsym;
using std::numbers::pi;

TEST_CASE("amoeba membership: triangle characterization") {
  CHECK(amoeba_membership(0.0, 0.0));
  CHECK_FALSE(amoeba_membership(10.0, 0.0));
  // along the diagonal the tentacle starts at the point with r1 = r2 = 1/2
  const double tip = -std::log(2.0);
  CHECK(amoeba_membership(tip + 1e-9, tip + 1e-9));
  CHECK_FALSE(amoeba_membership(tip - 1e-6, tip - 1e-6));

  // membership against direct curve sampling on a coarse grid
  AmoebaSpec spec;
  spec.nx = spec.ny = 96;
  const AmoebaRaster raster = amoeba_raster(spec);
  const double dx = (spec.hi_x - spec.lo_x) / spec.nx;
  std::vector<std::uint8_t> sampled(raster.inside.size(), 0);
  const int ns = 1200;
  for (int i = 0; i < ns; ++i) {
    const double s = -6.0 + 12.0 * i / (ns - 1);
    for (int j = 0; j < ns; ++j) {
      const std::complex<double> w = std::polar(std::exp(s), 2 * pi * j / ns);
      const std::complex<double> o = -1.0 - w;
      if (std::abs(o) == 0.0) continue;
      auto mark = [&](double x, double y) {
        const int ix = static_cast<int>(std::floor((x - spec.lo_x) / dx));
        const int iy = static_cast<int>(std::floor((y - spec.lo_y) / dx));
        if (ix >= 0 && iy >= 0 && ix < spec.nx && iy < spec.ny) {
          sampled[static_cast<size_t>(iy) * spec.nx + static_cast<size_t>(ix)] = 1;
        }
      };
      mark(std::log(std::abs(o)), std::log(std::abs(w)));
      mark(std::log(std::abs(w)), std::log(std::abs(o)));
    }
  }
  // compare only cells that are decidedly inside or outside: membership must
  // be constant on a subcell grid across the whole 3x3 neighborhood (thin
  // tentacle tails are narrower than a coarse cell and stay undecided)
  int mismatches = 0;
  for (int iy = 1; iy + 1 < spec.ny; ++iy) {
    for (int ix = 1; ix + 1 < spec.nx; ++ix) {
      const double cx = spec.lo_x + (ix + 0.5) * dx;
      const double cy = spec.lo_y + (iy + 0.5) * dx;
      const bool v = raster.cell(ix, iy);
      bool decided = true;
      for (int a = -6; a <= 6 && decided; ++a) {
        for (int b = -6; b <= 6; ++b) {
          if (amoeba_membership(cx + a * dx / 4.0, cy + b * dx / 4.0) != v) {
            decided = false;
            break;
          }
        }
      }
      if (!decided) continue;
      const bool hit = sampled[static_cast<size_t>(iy) * spec.nx + static_cast<size_t>(ix)];
      mismatches += (v != hit) ? 1 : 0;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("amoeba raster shape and exports") {
  AmoebaSpec spec;
  const AmoebaRaster r = amoeba_raster(spec);
  CHECK(r.unbounded_complement_components == 3);
  CHECK(r.complement_components == 3);

  // symmetric under swapping the two axes
  for (int iy = 0; iy < spec.ny; ++iy) {
    for (int ix = 0; ix < spec.nx; ++ix) {
      CHECK(r.cell(ix, iy) == r.cell(iy, ix));
    }
  }

  // a tiny raster is degenerate but well defined
  AmoebaSpec tiny;
  tiny.nx = tiny.ny = 2;
  CHECK_NOTHROW((void)amoeba_raster(tiny));
  AmoebaSpec bad;
  bad.nx = 1;
  CHECK_THROWS_AS((void)amoeba_raster(bad), ConfigError);

  // exports
  std::ostringstream pgm;
  write_pgm(r, pgm);
  CHECK(pgm.str().substr(0, 2) == "P2");
  std::ostringstream csv;
  write_contour_csv(r, csv);
  CHECK(csv.str().substr(0, 6) == "x1,x2\n");
  CHECK(r.contour.size() > 100);
}

TEST_CASE("discriminant descriptors against rank cross-checks") {
  const ModelPtr pos = model_by_name("positive_proper");
  const DiscriminantProbe pp = discriminant_probe(*pos);
  CHECK(pp.max_descriptor_residual <= 1e-6);
  // the axis samples land on the first leg: b1 = 0, b2 = b3 >= 0
  for (const auto& fb : pp.critical_images) {
    CHECK(std::abs(fb[0]) <= 1e-9);
  }

  const ModelPtr neg = model_by_name("negative_amoeba");
  const DiscriminantProbe np = discriminant_probe(*neg);
  CHECK(np.max_descriptor_residual <= 1e-6);
  for (const auto& fb : np.critical_images) {
    CHECK(std::abs(fb[0]) <= 1e-12);
    CHECK(amoeba_membership(fb[1], fb[2]));
  }

  const ModelPtr nodal = model_by_name("nodal");
  const DiscriminantProbe dp = discriminant_probe(*nodal);
  REQUIRE(dp.critical_images.size() == 1);
  CHECK(dp.critical_images[0].cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("monodromy of the focus-focus chart") {
  const SemiflatChart chart = SemiflatChart::focus_focus();
  Loop loop;
  loop.center = Eigen::VectorXd::Zero(2);
  loop.radius = 0.3;

  // counterclockwise around the puncture: the log period gains the circle
  // period (continuation of the angle function gains a full turn)
  const MonodromyResult res = monodromy(chart, loop);
  CHECK(res.matrix(0, 0) == 1);
  CHECK(res.matrix(1, 0) == 1);
  CHECK(res.matrix(0, 1) == 0);
  CHECK(res.matrix(1, 1) == 1);
  CHECK(res.rounding_residual <= 1e-3);
  CHECK(is_unipotent(res.matrix));
  const int det = res.matrix(0, 0) * res.matrix(1, 1) - res.matrix(0, 1) * res.matrix(1, 0);
  CHECK(det == 1);

  // trivial away from the puncture; inverse under orientation flip
  Loop off = loop;
  off.center = Eigen::VectorXd(2);
  off.center << 0.6, 0.0;
  off.radius = 0.1;
  CHECK(monodromy(chart, off).matrix == Eigen::MatrixXi::Identity(2, 2));

  Loop rev = loop;
  rev.orientation = -1;
  const MonodromyResult res_rev = monodromy(chart, rev);
  CHECK((res_rev.matrix * res.matrix) == Eigen::MatrixXi::Identity(2, 2));

  // invariance under radius change
  Loop big = loop;
  big.radius = 0.5;
  CHECK(monodromy(chart, big).matrix == res.matrix);
}

TEST_CASE("monodromy of the cylinder chart fixes the third period") {
  const SemiflatChart cyl = SemiflatChart::generic_cylinder();
  Loop loop;
  loop.center = Eigen::VectorXd(3);
  loop.center << 0.0, 0.0, 0.4;
  loop.radius = 0.25;
  const MonodromyResult res = monodromy(cyl, loop);
  Eigen::MatrixXi expected = Eigen::MatrixXi::Identity(3, 3);
  expected(1, 0) = 1;
  CHECK(res.matrix == expected);
  CHECK(is_unipotent(res.matrix));
}

TEST_CASE("monodromy of the explicit nodal model by lattice continuation") {
  const ModelPtr nodal = model_by_name("nodal");
  Loop loop;
  loop.center = Eigen::VectorXd::Zero(2);
  loop.radius = 0.35;
  const MonodromyResult res = monodromy(*nodal, nodal->sections.front(), loop, 24);
  CHECK(is_unipotent(res.matrix));
  CHECK(res.matrix != Eigen::MatrixXi::Identity(2, 2));
  const Eigen::MatrixXi N = res.matrix - Eigen::MatrixXi::Identity(2, 2);
  CHECK((N * N).isZero());
  CHECK(res.rounding_residual <= 1e-3);
}

TEST_CASE("monodromy export record") {
  const SemiflatChart chart = SemiflatChart::focus_focus();
  Loop loop;
  loop.center = Eigen::VectorXd::Zero(2);
  loop.radius = 0.3;
  const std::string text = monodromy_json(monodromy(chart, loop));
  // must carry the basis labels, the loop, the integer matrix and the residual
  CHECK(text.find("\"basis\"") != std::string::npos);
  CHECK(text.find("\"matrix\"") != std::string::npos);
  CHECK(text.find("\"rounding_residual\"") != std::string::npos);
  CHECK(text.find("\"radius\":0.3") != std::string::npos);
  CHECK(text.find("[[1,0],[1,1]]") != std::string::npos);
}
