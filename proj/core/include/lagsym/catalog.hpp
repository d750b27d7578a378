#pragma once

#include <complex>
#include <vector>

#include "lagsym/model.hpp"

namespace lagsym {

/// Tunable model parameters.
struct ModelParams {
  /// Cutoff radius^2 for the thin-leg pinch; the closed-form sections of the
  /// thin model require thin_eps <= 0.25.
  double thin_eps = 0.25;
  /// Outer region bound |u2|^2 >= M of the three-leg pinch map.
  double thin_M = 4.0;
  /// Integrator steps for the pinch flow.
  int thin_steps = 800;
  /// Margin for log-domain predicates (zero coordinates of transformed
  /// reduced coordinates are excluded).
  double domain_margin = 1e-12;
};

/// Builds the full model catalog:
///   ff_nonproper, nodal, generic_singular, positive_proper, harvey_lawson,
///   negative_amoeba, negative_thin, toric_reference.
std::vector<ModelPtr> catalog(const ModelParams& params = {});

/// Looks a model up by name; throws ConfigError for unknown names.
ModelPtr model_by_name(const std::string& name, const ModelParams& params = {});

/// Evaluates the fibration at a phase point (domain-checked).
Eigen::VectorXd eval(const FibrationModel& m, const Eigen::VectorXd& x);

/// Applies the model's distinguished anti-symplectic involution.
Eigen::VectorXd involution(const FibrationModel& m, const Eigen::VectorXd& x);

/// Applies a group element; throws ConfigError on kind mismatch.
Eigen::VectorXd group_action(const FibrationModel& m, const GroupElement& g,
                             const Eigen::VectorXd& x);

/// Tags coordinates with the model's chart (validates length/finiteness).
PhasePoint phase_point(const FibrationModel& m, Eigen::VectorXd coords);

// Chart-checked overloads: the point's chart_id must match the model's.
Eigen::VectorXd eval(const FibrationModel& m, const PhasePoint& x);
PhasePoint involution(const FibrationModel& m, const PhasePoint& x);
PhasePoint group_action(const FibrationModel& m, const GroupElement& g, const PhasePoint& x);

struct RegularityReport {
  bool regular = false;
  bool on_seam = false;
  /// Smallest singular value of Df (min over both one-sided branches when on
  /// the seam).
  double margin = 0.0;
  Eigen::VectorXd singular_values;
};

/// Rank test: true iff rank Df = base_dim with singular-value margin tol.
RegularityReport is_regular(const FibrationModel& m, const Eigen::VectorXd& x,
                            double tol = 1e-8);

// -- focus-focus glue ------------------------------------------------------

/// The gluing transition for the non-proper focus-focus model: takes the
/// (tau, b) parameters of a point in the semiflat region U'_j and returns the
/// corresponding phase point tau . Sigma_j(b) in the local model.  Region 1
/// requires |b| < |tau| < 1, region 2 requires 1 < |tau| < 1/|b| (strict).
Eigen::VectorXd glue_map(int region, std::complex<double> tau, std::complex<double> b);

/// The same transition as a map of the semiflat coordinates (b1, b2, a1, a2),
/// where the fiber covector is alpha = a1 db1 + a2 db2 and tau = e^{-a1+i a2};
/// used for pullback tests against the semiflat symplectic structure.
SmoothMap glue_transition_map(int region);

/// Semiflat-side symplectic structure on (b1, b2, a1, a2) used by the glue
/// transition (omega = sum db_j ^ da_j).
SymplecticStructure semiflat_structure(int n);

// -- negative-model pieces --------------------------------------------------

/// The reduced map G_t on S^1-invariant coordinates (u1, u2):
///   (log|u2|, log| u1 / sqrt(|t| + sqrt(t^2 + |u1|^2)) - 1 |).
/// Continuous in t but not differentiable at t = 0 for generic u1.
Eigen::Vector2d reduced_g_t(double t, std::complex<double> u1, std::complex<double> u2);

/// One-sided d/dt of reduced_g_t at t, from the side of `side` (+1 / -1),
/// by one-sided differences with Richardson extrapolation.
Eigen::Vector2d reduced_g_t_dt(double t, std::complex<double> u1, std::complex<double> u2,
                               int side);

/// Period covectors of the nodal model at a base point, by action integrals
/// over the two fiber cycles (circle orbit exactly, the transverse cycle by
/// quadrature + central differences).  Valid away from the degenerate ray
/// {b2 = 0, b1 <= 0}.  Columns are the covectors.
Eigen::MatrixXd nodal_period_matrix(const Eigen::VectorXd& b);

enum class ThinLegVariant { OneLeg, ThreeLeg };

/// The leg-pinching symplectomorphism Phi of the thin negative model.
/// OneLeg: Psi composed with the time-1 flow of the cutoff Hamiltonian; the
/// flow is dispatched to its closed-form limits inside/outside the cutoff
/// annulus (`force_integrate` integrates everywhere the cutoff is active, for
/// cross-checks).  ThreeLeg: the piecewise region map that pinches all three
/// legs.
std::array<std::complex<double>, 2> thin_leg_phi(std::complex<double> u1,
                                                 std::complex<double> u2,
                                                 ThinLegVariant variant,
                                                 const ModelParams& params = {},
                                                 bool force_integrate = false);

}  // namespace lagsym
