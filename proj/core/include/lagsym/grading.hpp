#pragma once

#include <complex>

#include "lagsym/calculus.hpp"
#include "lagsym/chart.hpp"
#include "lagsym/model.hpp"

namespace lagsym {

/// Constant coordinate (n,0)-form dz_1 ^ ... ^ dz_n in the chart's complex
/// coordinates, scaled by `scale`.
struct HolomorphicVolume {
  Chart chart;
  std::complex<double> scale{1.0, 0.0};

  /// Value on n tangent vectors (columns): scale * det(complexified frame).
  std::complex<double> value(const Eigen::MatrixXd& vectors) const;
};

/// Phase decomposition of a Lagrangian plane: the form's value on an
/// orthonormal frame is psi e^{i pi theta} with psi > 0; returns
/// (psi, theta in [0,2)).  Throws when the frame is not orthonormal
/// Lagrangian within tol.
std::pair<double, double> phase_of_plane(const HolomorphicVolume& volume,
                                         const SymplecticStructure& S, const Frame& frame,
                                         double tol = 1e-8);

/// Index of a transverse graded intersection: unitary plane representatives
/// U_k (columns = orthonormal frames as complex vectors),
/// W = (U2 U2^T)(U1 U1^T)^{-1}, eigenphases alpha_k in (0,1), returns
/// sum alpha_k - theta2 + theta1.  Throws when an eigenvalue sits within
/// `guard` of 1 (non-transverse pair).
double intersection_index(const Chart& chart, const Frame& plane1, double theta1,
                          const Frame& plane2, double theta2, double guard = 1e-8);

struct GradingCensusResult {
  /// max |theta mod 1| deviation from 0 over sampled section frames.
  double max_section_dev = 0.0;
  /// max |theta mod 1 - (n/2 mod 1)| over fiber frames at involution-fixed
  /// points.
  double max_fixed_fiber_dev = 0.0;
  /// spread of theta along a fiber away from fixed points (nonzero flags a
  /// fibration that is not special Lagrangian for this volume form).
  double fiber_theta_spread = 0.0;
  bool special_lagrangian_flag = false;
  int n_section_samples = 0;
  int n_fiber_samples = 0;
};

/// Samples section frames and involution-fixed fiber frames of a conjugation
/// model and reports phase statistics.
GradingCensusResult grading_census(const FibrationModel& m, const HolomorphicVolume& volume,
                                   int n_samples = 60, std::uint64_t seed = 11, int jobs = 1);

/// The scalar field h with (phi^* Omega) = h * conj(Omega): computed as a
/// ratio of frame evaluations, checked for frame independence on two random
/// frames (throws when they disagree beyond frame_tol).
std::complex<double> h_field(const FibrationModel& m, const HolomorphicVolume& volume,
                             const Eigen::VectorXd& x, double frame_tol = 1e-8,
                             std::uint64_t seed = 3);

}  // namespace lagsym
