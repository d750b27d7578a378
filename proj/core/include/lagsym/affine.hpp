#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lagsym/model.hpp"
#include "lagsym/semiflat.hpp"
#include "lagsym/theta.hpp"

namespace lagsym {

// -- amoeba of v1 + v2 + 1 = 0 ----------------------------------------------

/// Membership via the triangle characterization: with r_i = e^{x_i}, the
/// point lies in the log-image of the curve iff r1, r2, 1 satisfy all three
/// triangle inequalities.
bool amoeba_membership(double x1, double x2);

struct AmoebaSpec {
  double lo_x = -4.0, hi_x = 4.0;
  double lo_y = -4.0, hi_y = 4.0;
  int nx = 256, ny = 256;
};

struct AmoebaRaster {
  AmoebaSpec spec;
  std::vector<std::uint8_t> inside;  // row-major, ny rows of nx
  int complement_components = 0;
  int unbounded_complement_components = 0;
  /// Closed-form boundary polylines (three arcs), clipped to the grid.
  std::vector<std::pair<double, double>> contour;

  bool cell(int ix, int iy) const {
    return inside[static_cast<size_t>(iy) * static_cast<size_t>(spec.nx) +
                  static_cast<size_t>(ix)] != 0;
  }
};

/// Rasterizes membership per cell center, flood-fills the complement, and
/// samples the three boundary curves.
AmoebaRaster amoeba_raster(const AmoebaSpec& spec);

/// Plain-text PGM (P2), inside = 0 (black), outside = 255.
void write_pgm(const AmoebaRaster& raster, std::ostream& os);
/// CSV of contour points, "x1,x2" per line.
void write_contour_csv(const AmoebaRaster& raster, std::ostream& os);

// -- discriminant -------------------------------------------------------------

struct DiscriminantProbe {
  /// Points of the analytic discriminant descriptor.
  std::vector<Eigen::VectorXd> analytic_points;
  /// Images under f of sampled critical points.
  std::vector<Eigen::VectorXd> critical_images;
  /// max over critical images of their distance to the descriptor set.
  double max_descriptor_residual = 0.0;
};

/// Samples the discriminant descriptor and cross-checks it against images of
/// rank-deficient points.
DiscriminantProbe discriminant_probe(const FibrationModel& m, int resolution = 64);

/// Distance from a base point to the model's discriminant descriptor set
/// (0 when the amoeba-membership descriptor holds on the right slice).
double descriptor_distance(const FibrationModel& m, const Eigen::VectorXd& b);

// -- monodromy ----------------------------------------------------------------

struct Loop {
  Eigen::VectorXd center;  // base point
  double radius = 0.3;
  int orientation = +1;  // +1 counterclockwise in the (i, j) coordinate plane
  int plane_i = 0, plane_j = 1;
};

struct MonodromyResult {
  /// Columns express the transported periods in the initial basis.
  Eigen::MatrixXi matrix;
  double rounding_residual = 0.0;
  Eigen::MatrixXd initial_periods;
  Loop loop;
  std::vector<std::string> basis_labels;
};

/// Transports the period basis of a chart around the loop by continuous
/// continuation (nearest-lattice tracking), and expresses the final basis in
/// the initial one.  Throws when the integer rounding residual exceeds
/// `round_tol`.
MonodromyResult monodromy(const SemiflatChart& chart, const Loop& loop, int steps = 720,
                          double round_tol = 1e-3);

/// Same, for a model: continues lattice_probe bases around the loop.
MonodromyResult monodromy(const FibrationModel& m, const Section& sigma, const Loop& loop,
                          int steps = 48, double round_tol = 1e-3);

/// (M - I)^n == 0 over the integers.
bool is_unipotent(const Eigen::MatrixXi& M);

/// JSON record of a monodromy result: basis labels, loop descriptor, integer
/// matrix (row-major), rounding residual.
std::string monodromy_json(const MonodromyResult& result);

}  // namespace lagsym
