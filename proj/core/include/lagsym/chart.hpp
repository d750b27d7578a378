#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lagsym/errors.hpp"

namespace lagsym {

/// Names a real-coordinate convention: which real pairs form which complex
/// coordinate.  `pairs[k] = (re, im)` gives z_k = x[re] + i x[im].  Charts
/// may have fewer complex pairs than n (coordinates like an angle/radius
/// pair are symplectic but not complex).
struct Chart {
  std::string id;
  int ambient_dim = 0;
  std::vector<std::pair<int, int>> pairs;

  bool fully_complex() const {
    return 2 * static_cast<int>(pairs.size()) == ambient_dim;
  }

  std::complex<double> z(const Eigen::VectorXd& x, int k) const {
    return {x[pairs[k].first], x[pairs[k].second]};
  }
  void set_z(Eigen::VectorXd& x, int k, std::complex<double> v) const {
    x[pairs[k].first] = v.real();
    x[pairs[k].second] = v.imag();
  }

  /// Complexifies a real tangent vector: component k is v[re_k] + i v[im_k].
  /// Requires a fully complex chart.
  Eigen::VectorXcd complexify(const Eigen::VectorXd& v) const;

  /// Standard chart on C^n: coords (x_1..x_n, y_1..y_n), z_j = x_j + i y_j.
  static Chart standard(int n);
  /// Focus-focus chart on R^4: coords (x_1, x_2, y_1, y_2) with
  /// z_1 = y_1 + i y_2 and z_2 = x_1 + i x_2.
  static Chart focus_focus();
};

/// A point of R^{2n} tagged with its chart convention.  All coordinates must
/// be finite.
struct PhasePoint {
  Eigen::VectorXd coords;
  std::string chart_id;

  PhasePoint() = default;
  PhasePoint(Eigen::VectorXd c, std::string chart);

  int dim() const { return static_cast<int>(coords.size()); }
};

}  // namespace lagsym
