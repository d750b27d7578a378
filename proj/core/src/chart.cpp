#include "lagsym/chart.hpp"

#include <cmath>

namespace lagsym {

Eigen::VectorXcd Chart::complexify(const Eigen::VectorXd& v) const {
  if (!fully_complex()) {
    throw ConfigError("Chart::complexify: chart is not fully complex");
  }
  if (v.size() != ambient_dim) {
    throw DimensionError("Chart::complexify: vector has wrong length");
  }
  Eigen::VectorXcd out(static_cast<int>(pairs.size()));
  for (size_t k = 0; k < pairs.size(); ++k) {
    out[static_cast<int>(k)] = std::complex<double>(v[pairs[k].first], v[pairs[k].second]);
  }
  return out;
}

Chart Chart::standard(int n) {
  Chart c;
  c.id = "standard_" + std::to_string(n);
  c.ambient_dim = 2 * n;
  for (int j = 0; j < n; ++j) c.pairs.emplace_back(j, n + j);
  return c;
}

Chart Chart::focus_focus() {
  Chart c;
  c.id = "focus_focus";
  c.ambient_dim = 4;
  // z1 lives in the (y1, y2) slot, z2 in the (x1, x2) slot.
  c.pairs.emplace_back(2, 3);
  c.pairs.emplace_back(0, 1);
  return c;
}

PhasePoint::PhasePoint(Eigen::VectorXd c, std::string chart)
    : coords(std::move(c)), chart_id(std::move(chart)) {
  if (coords.size() % 2 != 0) {
    throw DimensionError("PhasePoint: coordinate length must be even");
  }
  for (int i = 0; i < coords.size(); ++i) {
    if (!std::isfinite(coords[i])) {
      throw DomainError("PhasePoint: coordinates must be finite");
    }
  }
}

}  // namespace lagsym
