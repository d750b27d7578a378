#include "lagsym/affine.hpp"

#include <cmath>
#include <deque>

#include <json.hpp>
#include <ostream>

#include "lagsym/catalog.hpp"

namespace lagsym {

bool amoeba_membership(double x1, double x2) {
  const double r1 = std::exp(x1), r2 = std::exp(x2);
  return r1 <= r2 + 1.0 && r2 <= r1 + 1.0 && 1.0 <= r1 + r2;
}

AmoebaRaster amoeba_raster(const AmoebaSpec& spec) {
  if (spec.nx < 2 || spec.ny < 2) {
    throw ConfigError("amoeba_raster: resolution must be at least 2 per axis");
  }
  AmoebaRaster r;
  r.spec = spec;
  r.inside.assign(static_cast<size_t>(spec.nx) * static_cast<size_t>(spec.ny), 0);
  const double dx = (spec.hi_x - spec.lo_x) / spec.nx;
  const double dy = (spec.hi_y - spec.lo_y) / spec.ny;
  for (int iy = 0; iy < spec.ny; ++iy) {
    for (int ix = 0; ix < spec.nx; ++ix) {
      const double x = spec.lo_x + (ix + 0.5) * dx;
      const double y = spec.lo_y + (iy + 0.5) * dy;
      r.inside[static_cast<size_t>(iy) * static_cast<size_t>(spec.nx) +
               static_cast<size_t>(ix)] = amoeba_membership(x, y) ? 1 : 0;
    }
  }

  // Flood fill the complement (4-connectivity).
  std::vector<int> label(r.inside.size(), -1);
  int next = 0;
  std::vector<char> unbounded;
  for (int iy = 0; iy < spec.ny; ++iy) {
    for (int ix = 0; ix < spec.nx; ++ix) {
      const size_t at = static_cast<size_t>(iy) * static_cast<size_t>(spec.nx) +
                        static_cast<size_t>(ix);
      if (r.inside[at] || label[at] >= 0) continue;
      const int id = next++;
      unbounded.push_back(0);
      std::deque<std::pair<int, int>> queue{{ix, iy}};
      label[at] = id;
      while (!queue.empty()) {
        auto [cx, cy] = queue.front();
        queue.pop_front();
        if (cx == 0 || cy == 0 || cx == spec.nx - 1 || cy == spec.ny - 1) {
          unbounded[static_cast<size_t>(id)] = 1;
        }
        const int nb[4][2] = {{cx + 1, cy}, {cx - 1, cy}, {cx, cy + 1}, {cx, cy - 1}};
        for (auto& [nx2, ny2] : nb) {
          if (nx2 < 0 || ny2 < 0 || nx2 >= spec.nx || ny2 >= spec.ny) continue;
          const size_t nat = static_cast<size_t>(ny2) * static_cast<size_t>(spec.nx) +
                             static_cast<size_t>(nx2);
          if (r.inside[nat] || label[nat] >= 0) continue;
          label[nat] = id;
          queue.emplace_back(nx2, ny2);
        }
      }
    }
  }
  r.complement_components = next;
  for (char u : unbounded) r.unbounded_complement_components += u ? 1 : 0;

  // Boundary arcs: r1 = r2 + 1, r2 = r1 + 1, r1 + r2 = 1.
  const int samples = std::max(spec.nx, spec.ny) * 2;
  auto push = [&](double x, double y) {
    if (x >= spec.lo_x && x <= spec.hi_x && y >= spec.lo_y && y <= spec.hi_y) {
      r.contour.emplace_back(x, y);
    }
  };
  for (int k = 0; k <= samples; ++k) {
    const double t = spec.lo_y + (spec.hi_y - spec.lo_y) * k / samples;
    push(std::log1p(std::exp(t)), t);  // x1 = log(1 + e^{x2})
    push(t, std::log1p(std::exp(t)));  // x2 = log(1 + e^{x1})
    // e^{x1} + e^{x2} = 1, x1 < 0
    const double r1 = 1e-9 + (1.0 - 2e-9) * k / samples;
    push(std::log(r1), std::log1p(-r1));
  }
  return r;
}

void write_pgm(const AmoebaRaster& raster, std::ostream& os) {
  os << "P2\n" << raster.spec.nx << " " << raster.spec.ny << "\n255\n";
  for (int iy = raster.spec.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < raster.spec.nx; ++ix) {
      os << (raster.cell(ix, iy) ? 0 : 255);
      os << (ix + 1 == raster.spec.nx ? '\n' : ' ');
    }
  }
}

void write_contour_csv(const AmoebaRaster& raster, std::ostream& os) {
  os << "x1,x2\n";
  for (auto& [x, y] : raster.contour) {
    os << x << "," << y << "\n";
  }
}

namespace {

double dist_to_halfline(const Eigen::Vector2d& p, const Eigen::Vector2d& dir) {
  // distance from p to { t * dir : t >= 0 }, dir normalized
  const double t = std::max(0.0, p.dot(dir));
  return (p - t * dir).norm();
}

}  // namespace

double descriptor_distance(const FibrationModel& m, const Eigen::VectorXd& b) {
  if (m.discriminant == DiscriminantKind::Point) {
    return b.norm();
  }
  if (m.name == "generic_singular") {
    return b.head(2).norm();
  }
  if (m.name == "positive_proper" || m.name == "harvey_lawson") {
    // Delta = {b1=0, b2=b3>=0} u {b1=b2=0, b3<=0} u {b1=b3=0, b2<=0}
    const Eigen::Vector2d q{b[1], b[2]};
    const double leg1 = std::hypot(b[0], dist_to_halfline(q, Eigen::Vector2d{1, 1}.normalized()));
    const double leg2 = std::hypot(b[0], dist_to_halfline(q, Eigen::Vector2d{0, -1}));
    const double leg3 = std::hypot(b[0], dist_to_halfline(q, Eigen::Vector2d{-1, 0}));
    return std::min({leg1, leg2, leg3});
  }
  if (m.name == "negative_amoeba" || m.name == "negative_thin") {
    // Delta = {0} x Log(Sigma); inside the amoeba the slice distance is |b1|.
    if (amoeba_membership(b[1], b[2])) return std::abs(b[0]);
    return std::hypot(b[0], 0.05);  // outside the amoeba: definitely off Delta
  }
  if (m.name == "toric_reference") {
    return std::min(std::abs(b[0]), std::abs(b[1]));
  }
  throw ConfigError("descriptor_distance: no descriptor for model " + m.name);
}

DiscriminantProbe discriminant_probe(const FibrationModel& m, int resolution) {
  DiscriminantProbe probe;
  auto push_crit = [&](const Eigen::VectorXd& x) {
    if (!m.fibration.in_domain(x)) return;
    probe.critical_images.push_back(m.fibration(x));
  };

  if (m.name == "nodal" || m.name == "ff_nonproper") {
    probe.analytic_points.push_back(Eigen::VectorXd::Zero(2));
    push_crit(Eigen::VectorXd::Zero(4));
  } else if (m.name == "positive_proper" || m.name == "harvey_lawson") {
    for (int k = 0; k < resolution; ++k) {
      const double t = 2.0 * (k + 0.5) / resolution;
      Eigen::VectorXd p1(3), p2(3), p3(3);
      p1 << 0, t, t;
      p2 << 0, 0, -t;
      p3 << 0, -t, 0;
      probe.analytic_points.insert(probe.analytic_points.end(), {p1, p2, p3});
      // critical points: pairs of coordinates zero
      Eigen::VectorXd x(6);
      const double s = std::sqrt(t);
      x << s, 0, 0, 0, 0, 0;  // z2 = z3 = 0
      push_crit(x);
      x << 0, s, 0, 0, 0, 0;  // z1 = z3 = 0
      push_crit(x);
      x << 0, 0, s, 0, 0, 0;  // z1 = z2 = 0
      push_crit(x);
    }
  } else if (m.name == "negative_amoeba" || m.name == "negative_thin") {
    // Critical surface: z1 = z2 = 0; its image is {0} x Log(Sigma).
    for (int k = 0; k < resolution; ++k) {
      for (int j = 0; j < 8; ++j) {
        const double rr = 0.15 + 2.2 * k / resolution;
        const double th = 2.0 * std::numbers::pi * (j + 0.35) / 8;
        Eigen::VectorXd x(6);
        x << 0, 0, rr * std::cos(th), 0, 0, rr * std::sin(th);
        if (m.fibration.in_domain(x)) {
          const Eigen::VectorXd fb = m.fibration(x);
          probe.critical_images.push_back(fb);
          probe.analytic_points.push_back(fb);  // descriptor is the log-image itself
        }
      }
    }
  } else if (m.name == "toric_reference") {
    for (int k = 0; k < resolution; ++k) {
      const double t = 2.0 * (k + 0.5) / resolution;
      Eigen::VectorXd p(2), x(4);
      p << 0, t;
      probe.analytic_points.push_back(p);
      x << 0, std::sqrt(2.0 * t), 0, 0;
      push_crit(x);
    }
  } else {
    throw ConfigError("discriminant_probe: no descriptor for model " + m.name);
  }

  for (const auto& fb : probe.critical_images) {
    probe.max_descriptor_residual =
        std::max(probe.max_descriptor_residual, descriptor_distance(m, fb));
  }
  return probe;
}

namespace {

Eigen::VectorXd loop_point(const Loop& loop, double angle) {
  Eigen::VectorXd b = loop.center;
  b[loop.plane_i] += loop.radius * std::cos(angle);
  b[loop.plane_j] += loop.radius * std::sin(angle);
  return b;
}

MonodromyResult finish_monodromy(const Eigen::MatrixXd& P0, const Eigen::MatrixXd& Pfinal,
                                 const Loop& loop, double round_tol,
                                 std::vector<std::string> labels) {
  const Eigen::MatrixXd C = P0.fullPivLu().solve(Pfinal);
  MonodromyResult res;
  res.loop = loop;
  res.initial_periods = P0;
  res.basis_labels = std::move(labels);
  res.matrix.resize(C.rows(), C.cols());
  for (int i = 0; i < C.rows(); ++i) {
    for (int j = 0; j < C.cols(); ++j) {
      const double v = C(i, j);
      res.matrix(i, j) = static_cast<int>(std::llround(v));
      res.rounding_residual = std::max(res.rounding_residual, std::abs(v - std::llround(v)));
    }
  }
  if (res.rounding_residual > round_tol) {
    throw ConvergenceError("monodromy: non-integer transport, residual " +
                           std::to_string(res.rounding_residual));
  }
  return res;
}

// Continuation step: snap each transported column to the nearest lattice
// element of the basis at the new base point.
Eigen::MatrixXd continue_basis(const Eigen::MatrixXd& P_new, const Eigen::MatrixXd& prev) {
  Eigen::MatrixXd out(prev.rows(), prev.cols());
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(P_new);
  for (int j = 0; j < prev.cols(); ++j) {
    Eigen::VectorXd c = lu.solve(prev.col(j));
    for (int i = 0; i < c.size(); ++i) c[i] = std::round(c[i]);
    out.col(j) = P_new * c;
  }
  return out;
}

}  // namespace

MonodromyResult monodromy(const SemiflatChart& chart, const Loop& loop, int steps,
                          double round_tol) {
  if (loop.center.size() != chart.n()) {
    throw DimensionError("monodromy: loop center has wrong dimension");
  }
  const double orient = loop.orientation >= 0 ? 1.0 : -1.0;
  Eigen::MatrixXd P0 = chart.period_matrix(loop_point(loop, 0.0));
  Eigen::MatrixXd cur = P0;
  for (int k = 1; k <= steps; ++k) {
    const double angle = orient * 2.0 * std::numbers::pi * k / steps;
    const Eigen::MatrixXd Pk = chart.period_matrix(loop_point(loop, angle));
    cur = continue_basis(Pk, cur);
  }
  std::vector<std::string> labels;
  for (int i = 0; i < chart.n(); ++i) labels.push_back("lambda_" + std::to_string(i + 1));
  return finish_monodromy(P0, cur, loop, round_tol, std::move(labels));
}

MonodromyResult monodromy(const FibrationModel& m, const Section& sigma, const Loop& loop,
                          int steps, double round_tol) {
  ThetaOptions topts;
  auto probe_at = [&](const Eigen::VectorXd& b,
                      const Eigen::MatrixXd* hint) -> Eigen::MatrixXd {
    if (hint == nullptr) {
      return lattice_probe(m, sigma, b, topts).periods;
    }
    Eigen::MatrixXd out(hint->rows(), hint->cols());
    for (int j = 0; j < hint->cols(); ++j) {
      Eigen::VectorXd xi = hint->col(j);
      const Eigen::VectorXd target = sigma.map(b);
      xi = theta_inverse(m, sigma, b, target, xi, topts);
      out.col(j) = xi;
    }
    return out;
  };
  const Eigen::VectorXd b0 = loop_point(loop, 0.0);
  const Eigen::MatrixXd P0 = probe_at(b0, nullptr);
  Eigen::MatrixXd cur = P0;
  const double orient = loop.orientation >= 0 ? 1.0 : -1.0;
  for (int k = 1; k <= steps; ++k) {
    const double angle = orient * 2.0 * std::numbers::pi * k / steps;
    cur = probe_at(loop_point(loop, angle), &cur);
  }
  std::vector<std::string> labels;
  for (int i = 0; i < m.base_dim; ++i) labels.push_back("period_" + std::to_string(i + 1));
  return finish_monodromy(P0, cur, loop, round_tol, std::move(labels));
}

std::string monodromy_json(const MonodromyResult& result) {
  nlohmann::json doc;
  doc["basis"] = result.basis_labels;
  nlohmann::json loop;
  loop["center"] = std::vector<double>(result.loop.center.data(),
                                       result.loop.center.data() + result.loop.center.size());
  loop["radius"] = result.loop.radius;
  loop["orientation"] = result.loop.orientation;
  loop["plane"] = {result.loop.plane_i, result.loop.plane_j};
  doc["loop"] = loop;
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < result.matrix.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < result.matrix.cols(); ++j) row.push_back(result.matrix(i, j));
    rows.push_back(row);
  }
  doc["matrix"] = rows;
  doc["rounding_residual"] = result.rounding_residual;
  return doc.dump();
}

bool is_unipotent(const Eigen::MatrixXi& M) {
  const int n = static_cast<int>(M.rows());
  Eigen::MatrixXi N = M - Eigen::MatrixXi::Identity(n, n);
  Eigen::MatrixXi acc = Eigen::MatrixXi::Identity(n, n);
  for (int k = 0; k < n; ++k) acc = acc * N;
  return acc.isZero();
}

}  // namespace lagsym
