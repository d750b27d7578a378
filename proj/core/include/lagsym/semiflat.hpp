#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagsym/smooth_map.hpp"

namespace lagsym {

/// A closed 1-form on the base, given by its covector field.
struct OneForm {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eta;
  Eigen::VectorXd operator()(const Eigen::VectorXd& b) const { return eta(b); }

  static OneForm zero(int n);
  static OneForm constant(Eigen::VectorXd c);
};

/// Base chart of a semiflat torus bundle T*B/Lambda: base domain, smooth
/// potential H, and n period covector fields spanning the lattice.
class SemiflatChart {
 public:
  SemiflatChart(std::string name, int n,
                std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> periods,
                SmoothMap potential = {},
                std::function<bool(const Eigen::VectorXd&)> base_domain = {});

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  bool in_base_domain(const Eigen::VectorXd& b) const;

  /// n x n matrix with period covectors as columns; throws on singularity.
  Eigen::MatrixXd period_matrix(const Eigen::VectorXd& b) const;

  /// dH(b); zero when no potential is attached.
  Eigen::VectorXd dH(const Eigen::VectorXd& b) const;

  /// Max |d lambda_i| component over the periods at b, by central
  /// differences: a numeric closedness check.
  double closedness_residual(const Eigen::VectorXd& b) const;

  // Built-in charts.
  /// Torus chart with constant periods 2 pi I_n.
  static SemiflatChart torus(int n);
  /// Focus-focus chart on the punctured unit disk:
  /// lambda_1 = -log|b| db1 + Arg b db2 + dH,  lambda_2 = 2 pi db2.
  static SemiflatChart focus_focus(SmoothMap potential = {});
  /// Cylinder chart over D x (0,1): the focus-focus periods in (b1, b2) plus
  /// lambda_3 = dr.
  static SemiflatChart generic_cylinder(SmoothMap potential = {});

  /// Chart from a declarative spec: name, n, polynomial potential
  /// coefficients, and a built-in period family ("torus" | "focus_focus" |
  /// "generic_cylinder").
  static SemiflatChart from_config(const std::string& period_family, int n,
                                   const std::vector<double>& h_poly_coeffs);

 private:
  std::string name_;
  int n_;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> periods_;
  SmoothMap potential_;
  std::function<bool(const Eigen::VectorXd&)> base_domain_;
};

/// A fiber point of T*B/Lambda: base point, a covector representative, and
/// the reduced coefficients in the period basis at b.
///
/// Reduced coefficients are held in fixed point (unit torus = 2^64 ticks), so
/// the translation / negation algebra below is exact: composition identities
/// hold bit-for-bit, not just to rounding.
struct FiberPoint {
  Eigen::VectorXd b;
  Eigen::VectorXd alpha;             // covector representative
  std::vector<std::uint64_t> ticks;  // reduced coefficients, c_i = ticks_i / 2^64

  Eigen::VectorXd reduced() const;  // c in [0,1)^n as doubles
};

/// Quantizes a fractional coordinate into torus ticks.
std::uint64_t to_ticks(double c);
double from_ticks(std::uint64_t t);

/// Solves alpha = P(b) c over the reals and reduces c to [0,1)^n.
/// Throws on a singular period matrix.
FiberPoint reduce(const SemiflatChart& chart, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& alpha);

/// Fiberwise negation (b, alpha) -> (b, -alpha); exact on ticks.
FiberPoint minus_id(const SemiflatChart& chart, const FiberPoint& p);

/// Translation by a 1-form: (b, alpha) -> (b, alpha + eta(b)); exact on ticks.
FiberPoint translate(const SemiflatChart& chart, const OneForm& eta, const FiberPoint& p);

/// The canonical involution (b, alpha) -> (b, dH(b) - alpha); fixes the
/// half-potential section and exchanges the zero section with the graph of dH.
FiberPoint iota_h(const SemiflatChart& chart, const FiberPoint& p);

/// Fiberwise translation taking the zero section to the graph of sigma'.
FiberPoint section_translation(const SemiflatChart& chart, const OneForm& sigma_prime,
                               const FiberPoint& p);

/// The corresponding map of the glued focus-focus model in complex
/// coordinates: (z1, z2) -> (tau(b) z1, conj(tau(b))^{-1} z2) with
/// tau(b) = e^{-s1(b) + i s2(b)} and b = q(z1, z2); extends smoothly through
/// the singular point.  Input and output are focus-focus chart coordinates.
Eigen::VectorXd section_translation_ff(const OneForm& sigma_prime, const Eigen::VectorXd& x);

}  // namespace lagsym
