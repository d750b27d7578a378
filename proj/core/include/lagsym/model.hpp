#pragma once

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagsym/chart.hpp"
#include "lagsym/smooth_map.hpp"
#include "lagsym/symplectic.hpp"

namespace lagsym {

enum class SymmetryKind { Symplectic, AntiSymplectic };

struct Symmetry {
  std::string name;
  SymmetryKind kind = SymmetryKind::Symplectic;
  SmoothMap map;
};

/// Base -> phase map with its own base-domain predicate (sections of some
/// models are only defined, or only smooth, on part of the base).
struct Section {
  std::string name;
  SmoothMap map;
};

enum class GroupKind { None, Cstar, CstarTimesS1, RTimesT2 };

struct GroupElement {
  GroupKind kind = GroupKind::None;
  std::complex<double> tau{1.0, 0.0};  // Cstar / CstarTimesS1
  double s = 0.0;                      // extra angle, reduced mod 1
  std::array<double, 3> t{0.0, 0.0, 0.0};  // RTimesT2: (real, angle, angle)
};

enum class DiscriminantKind { None, Point, Graph, Amoeba };

/// An explicit Lagrangian fibration: an evaluable map from phase space to the
/// base with domain predicate, named sections and symmetries, and sampling
/// metadata.  Instances are immutable after construction; all evaluators are
/// pure and concurrently callable.
struct FibrationModel {
  std::string name;
  int ambient_dim = 0;
  int base_dim = 0;
  Chart chart;
  SymplecticStructure structure{1, SymplecticStructure::standard(1).pairing_matrix()};
  SmoothMap fibration;
  std::vector<Section> sections;
  std::vector<Symmetry> symmetries;
  std::string primary_involution;  // name of the distinguished anti-symplectic symmetry
  GroupKind group_kind = GroupKind::None;
  DiscriminantKind discriminant = DiscriminantKind::None;
  /// True when generic fibers are compact n-tori (the 2^n fixed-point count
  /// applies fiberwise).
  bool proper_torus_fibers = false;

  // Sampling metadata.
  Eigen::VectorXd box_lo, box_hi;    // ambient sampling box
  Eigen::VectorXd base_lo, base_hi;  // base sampling box
  std::vector<double> coordinate_period;  // per-coordinate period, 0 = aperiodic
  double seam_sample_margin = 0.0;   // |seam| below this is skipped when sampling smooth points

  std::function<Eigen::VectorXd(const GroupElement&, const Eigen::VectorXd&)> group_action;
  /// Closed-form or quadrature guess for the period lattice at a base point
  /// (columns = covectors); empty when unavailable.
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> period_hint;

  // -- convenience --------------------------------------------------------
  const Symmetry& symmetry(const std::string& sym_name) const;
  const Section& section(const std::string& sec_name) const;
  const Symmetry& involution() const { return symmetry(primary_involution); }

  /// Distance that wraps periodic coordinates.
  double distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  /// Shifts periodic coordinates of y by whole periods to the representative
  /// nearest x.
  Eigen::VectorXd wrap_to_near(const Eigen::VectorXd& y, const Eigen::VectorXd& x) const;
  /// Canonical representative: periodic coordinates reduced into [0, period).
  Eigen::VectorXd wrap(const Eigen::VectorXd& x) const;
};

using ModelPtr = std::shared_ptr<const FibrationModel>;

}  // namespace lagsym
