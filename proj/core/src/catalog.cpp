#include "lagsym/catalog.hpp"

#include <cmath>
#include <numbers>

#include "lagsym/calculus.hpp"
#include "lagsym/cx.hpp"
#include "lagsym/flow.hpp"

namespace lagsym {

namespace {

using std::numbers::pi;
using cd = std::complex<double>;
constexpr double kSqrt2 = 1.4142135623730951;

template <class S>
S S_half(S v) {
  return S(0.5) * v;
}

template <class S>
Cx<S> zat(std::span<const S> in, int re, int im) {
  return {in[re], in[im]};
}

// Quintic smoothstep cutoff: 1 on (0, eps], 0 on [2 eps, inf).
template <class S>
S cutoff(S t, double eps) {
  if (value_of(t) <= eps) return S(1.0);
  if (value_of(t) >= 2.0 * eps) return S(0.0);
  S s = (t - S(eps)) / S(eps);
  return S(1.0) - s * s * s * (S(10.0) + s * (S(-15.0) + s * S(6.0)));
}

// gamma(z1, z2) = z1 z2 / |z1|   on {mu >= 0}
//              = z1 z2 / |z2|   on {mu <  0},  extended by 0 at z1 = z2 = 0.
template <class S>
Cx<S> gamma_branch_pos(Cx<S> z1, Cx<S> z2) {
  S a = abs(z1);
  if (value_of(a) == 0.0) return Cx<S>(S(0.0));
  return (z1 * z2) / Cx<S>(a);
}
template <class S>
Cx<S> gamma_branch_neg(Cx<S> z1, Cx<S> z2) {
  S a = abs(z2);
  if (value_of(a) == 0.0) return Cx<S>(S(0.0));
  return (z1 * z2) / Cx<S>(a);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// ---------------------------------------------------------------------------
// toric_reference: f = (|z1|^2/2, |z2|^2/2) on C^2.
// ---------------------------------------------------------------------------
ModelPtr build_toric() {
  auto m = std::make_shared<FibrationModel>();
  m->name = "toric_reference";
  m->ambient_dim = 4;
  m->base_dim = 2;
  m->chart = Chart::standard(2);
  m->structure = SymplecticStructure::standard(2);
  m->fibration = make_map(4, 2, [](auto in, auto out) {
    auto z1 = zat(in, 0, 2), z2 = zat(in, 1, 3);
    out[0] = S_half(abs2(z1));
    out[1] = S_half(abs2(z2));
  });
  m->sections.push_back(
      {"real_positive", make_map(2, 4,
                                 [](auto in, auto out) {
                                   using S = std::decay_t<decltype(in[0])>;
                                   out[0] = sqrt(S(2.0) * in[0]);
                                   out[1] = sqrt(S(2.0) * in[1]);
                                   out[2] = S(0.0);
                                   out[3] = S(0.0);
                                 },
                                 [](std::span<const double> b) {
                                   return b[0] > 1e-6 && b[1] > 1e-6;
                                 })});
  m->symmetries.push_back({"conjugation", SymmetryKind::AntiSymplectic,
                           make_map(4, 4, [](auto in, auto out) {
                             out[0] = in[0];
                             out[1] = in[1];
                             out[2] = -in[2];
                             out[3] = -in[3];
                           })});
  m->primary_involution = "conjugation";
  m->discriminant = DiscriminantKind::Graph;
  m->proper_torus_fibers = true;
  m->box_lo = vec({-1.8, -1.8, -1.8, -1.8});
  m->box_hi = vec({1.8, 1.8, 1.8, 1.8});
  m->base_lo = vec({0.2, 0.2});
  m->base_hi = vec({1.5, 1.5});
  m->coordinate_period.assign(4, 0.0);
  m->period_hint = [](const Eigen::VectorXd&) {
    return Eigen::MatrixXd(2.0 * pi * Eigen::MatrixXd::Identity(2, 2));
  };
  return m;
}

// ---------------------------------------------------------------------------
// ff_nonproper: q(z1, z2) = z1 conj(z2) in the focus-focus chart.
// ---------------------------------------------------------------------------
ModelPtr build_ff() {
  auto m = std::make_shared<FibrationModel>();
  m->name = "ff_nonproper";
  m->ambient_dim = 4;
  m->base_dim = 2;
  m->chart = Chart::focus_focus();
  m->structure = SymplecticStructure::standard(2);
  m->fibration = make_map(4, 2, [](auto in, auto out) {
    auto z1 = zat(in, 2, 3), z2 = zat(in, 0, 1);
    auto q = z1 * conj(z2);
    out[0] = q.re;
    out[1] = q.im;
  });
  // Sigma_1(b) = (1, conj b), Sigma_2(b) = (b, 1).
  m->sections.push_back({"sigma_1", make_map(2, 4, [](auto in, auto out) {
                           using S = std::decay_t<decltype(in[0])>;
                           out[0] = in[0];   // x1 = Re conj b
                           out[1] = -in[1];  // x2 = Im conj b
                           out[2] = S(1.0);  // y1 = Re z1
                           out[3] = S(0.0);
                         })});
  m->sections.push_back({"sigma_2", make_map(2, 4, [](auto in, auto out) {
                           using S = std::decay_t<decltype(in[0])>;
                           out[0] = S(1.0);
                           out[1] = S(0.0);
                           out[2] = in[0];
                           out[3] = in[1];
                         })});
  // iota(z1, z2) = (conj z2, conj z1): exchanges Sigma_1 and Sigma_2.
  m->symmetries.push_back({"swap_conjugation", SymmetryKind::AntiSymplectic,
                           make_map(4, 4, [](auto in, auto out) {
                             out[0] = in[2];
                             out[1] = -in[3];
                             out[2] = in[0];
                             out[3] = -in[1];
                           })});
  m->primary_involution = "swap_conjugation";
  m->group_kind = GroupKind::Cstar;
  m->group_action = [](const GroupElement& g, const Eigen::VectorXd& x) {
    if (g.kind != GroupKind::Cstar) {
      throw ConfigError("ff_nonproper: group element kind mismatch");
    }
    if (std::abs(g.tau) == 0.0) {
      throw ConfigError("ff_nonproper: tau must be nonzero");
    }
    const cd z1{x[2], x[3]}, z2{x[0], x[1]};
    const cd w1 = g.tau * z1;
    const cd w2 = z2 / std::conj(g.tau);
    return vec({w2.real(), w2.imag(), w1.real(), w1.imag()});
  };
  m->discriminant = DiscriminantKind::Point;
  m->proper_torus_fibers = false;
  m->box_lo = vec({-2, -2, -2, -2});
  m->box_hi = vec({2, 2, 2, 2});
  m->base_lo = vec({-0.7, -0.7});
  m->base_hi = vec({0.7, 0.7});
  m->coordinate_period.assign(4, 0.0);
  return m;
}

// ---------------------------------------------------------------------------
// nodal: f = ((|z1|^2 - |z2|^2)/2, log|z1 z2 + 1|) on C^2 - {z1 z2 + 1 = 0}.
// ---------------------------------------------------------------------------

// Real section branch: x1 x2 = -(1 + e^{b2}) < -1, x1^2 - x2^2 = 2 b1.
template <class S>
void nodal_section_eval(std::span<const S> in, std::span<S> out, bool x1_positive) {
  S P = -(S(1.0) + exp(in[1]));
  S root = sqrt(in[0] * in[0] + P * P);
  if (x1_positive) {
    S x1 = sqrt(in[0] + root);
    out[0] = x1;
    out[1] = P / x1;
  } else {
    S x2 = sqrt(root - in[0]);
    out[0] = P / x2;
    out[1] = x2;
  }
  out[2] = S(0.0);
  out[3] = S(0.0);
}

ModelPtr build_nodal(const ModelParams& params) {
  auto m = std::make_shared<FibrationModel>();
  m->name = "nodal";
  m->ambient_dim = 4;
  m->base_dim = 2;
  m->chart = Chart::standard(2);
  m->structure = SymplecticStructure::standard(2);
  const double margin = params.domain_margin;
  m->fibration = make_map(
      4, 2,
      [](auto in, auto out) {
        auto z1 = zat(in, 0, 2), z2 = zat(in, 1, 3);
        using S = std::decay_t<decltype(in[0])>;
        auto w = z1 * z2 + Cx<S>(S(1.0));
        out[0] = S_half(abs2(z1) - abs2(z2));
        out[1] = log_abs(w);
      },
      [margin](std::span<const double> x) {
        const cd z1{x[0], x[2]}, z2{x[1], x[3]};
        return std::abs(z1 * z2 + 1.0) > margin;
      });
  m->sections.push_back({"section_pos", make_map(2, 4, [](auto in, auto out) {
                           nodal_section_eval(in, out, true);
                         })});
  m->sections.push_back({"section_neg", make_map(2, 4, [](auto in, auto out) {
                           nodal_section_eval(in, out, false);
                         })});
  m->symmetries.push_back({"conjugation", SymmetryKind::AntiSymplectic,
                           make_map(4, 4, [](auto in, auto out) {
                             out[0] = in[0];
                             out[1] = in[1];
                             out[2] = -in[2];
                             out[3] = -in[3];
                           })});
  m->primary_involution = "conjugation";
  m->discriminant = DiscriminantKind::Point;
  m->proper_torus_fibers = true;
  m->box_lo = vec({-3, -3, -3, -3});
  m->box_hi = vec({3, 3, 3, 3});
  m->base_lo = vec({-1.2, -1.0});
  m->base_hi = vec({1.2, 1.0});
  m->coordinate_period.assign(4, 0.0);
  m->period_hint = [](const Eigen::VectorXd& b) { return nodal_period_matrix(b); };
  return m;
}

// ---------------------------------------------------------------------------
// generic_singular: nodal crossed with the cylinder S^1 x (0,1); coordinates
// (x1, x2, r, y1, y2, theta), omega = dx1^dy1 + dx2^dy2 + dr^dtheta.
// ---------------------------------------------------------------------------
ModelPtr build_generic(const ModelParams& params) {
  auto m = std::make_shared<FibrationModel>();
  m->name = "generic_singular";
  m->ambient_dim = 6;
  m->base_dim = 3;
  m->chart.id = "nodal_cylinder";
  m->chart.ambient_dim = 6;
  m->chart.pairs = {{0, 3}, {1, 4}};  // z1, z2 only; (r, theta) is not complex
  m->structure = SymplecticStructure::standard(3);
  const double margin = params.domain_margin;
  m->fibration = make_map(
      6, 3,
      [](auto in, auto out) {
        auto z1 = zat(in, 0, 3), z2 = zat(in, 1, 4);
        using S = std::decay_t<decltype(in[0])>;
        auto w = z1 * z2 + Cx<S>(S(1.0));
        out[0] = S_half(abs2(z1) - abs2(z2));
        out[1] = log_abs(w);
        out[2] = in[2];
      },
      [margin](std::span<const double> x) {
        const cd z1{x[0], x[3]}, z2{x[1], x[4]};
        return std::abs(z1 * z2 + 1.0) > margin && x[2] > 0.0 && x[2] < 1.0;
      });
  m->sections.push_back({"section_pos", make_map(3, 6, [](auto in, auto out) {
                           using S = std::decay_t<decltype(in[0])>;
                           std::array<S, 4> sub;
                           nodal_section_eval(std::span<const S>(in.data(), 2),
                                              std::span<S>(sub.data(), 4), true);
                           out[0] = sub[0];
                           out[1] = sub[1];
                           out[2] = in[2];
                           out[3] = S(0.0);
                           out[4] = S(0.0);
                           out[5] = S(0.0);
                         })});
  m->symmetries.push_back({"conjugation_reflect", SymmetryKind::AntiSymplectic,
                           make_map(6, 6, [](auto in, auto out) {
                             out[0] = in[0];
                             out[1] = in[1];
                             out[2] = in[2];
                             out[3] = -in[3];
                             out[4] = -in[4];
                             out[5] = -in[5];
                           })});
  m->primary_involution = "conjugation_reflect";
  m->group_kind = GroupKind::CstarTimesS1;
  m->group_action = [](const GroupElement& g, const Eigen::VectorXd& x) {
    if (g.kind != GroupKind::CstarTimesS1) {
      throw ConfigError("generic_singular: group element kind mismatch");
    }
    if (std::abs(std::abs(g.tau) - 1.0) > 1e-12) {
      throw ConfigError("generic_singular: only the unit-circle part of tau preserves fibers");
    }
    const cd z1{x[0], x[3]}, z2{x[1], x[4]};
    const cd w1 = g.tau * z1, w2 = z2 / g.tau;
    Eigen::VectorXd out(6);
    out << w1.real(), w2.real(), x[2], w1.imag(), w2.imag(), x[5] + 2.0 * pi * g.s;
    return out;
  };
  m->discriminant = DiscriminantKind::Graph;
  m->proper_torus_fibers = true;
  m->box_lo = vec({-3, -3, 0.1, -3, -3, 0});
  m->box_hi = vec({3, 3, 0.9, 3, 3, 2.0 * pi});
  m->base_lo = vec({-1.2, -1.0, 0.15});
  m->base_hi = vec({1.2, 1.0, 0.85});
  m->coordinate_period = {0, 0, 0, 0, 0, 2.0 * pi};
  m->period_hint = [](const Eigen::VectorXd& b) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, 3);
    P.topLeftCorner(2, 2) = nodal_period_matrix(b.head(2));
    P(2, 2) = 2.0 * pi;
    return P;
  };
  return m;
}

// ---------------------------------------------------------------------------
// positive_proper: f = (log|1 + z1 z2 z3|, |z1|^2-|z2|^2, |z1|^2-|z3|^2).
// ---------------------------------------------------------------------------

// Real octant section: x1 x2 x3 = -(1 + e^{b1}), x1^2 - x2^2 = b2,
// x1^2 - x3^2 = b3, sign pattern fixed per component.
Eigen::VectorXd positive_section_point(const Eigen::VectorXd& b, int s1, int s2, int s3) {
  const double P = -(1.0 + std::exp(b[0]));
  const double smax = std::max({0.0, b[1], b[2]});
  auto Q = [&](double s) { return s * (s - b[1]) * (s - b[2]); };
  double lo = smax, hi = smax + 1.0;
  while (Q(hi) < P * P) hi = smax + 2.0 * (hi - smax);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (Q(mid) < P * P ? lo : hi) = mid;
  }
  const double s = 0.5 * (lo + hi);
  Eigen::VectorXd x(6);
  x << s1 * std::sqrt(s), s2 * std::sqrt(std::max(0.0, s - b[1])),
      s3 * std::sqrt(std::max(0.0, s - b[2])), 0.0, 0.0, 0.0;
  return x;
}

ModelPtr build_positive(const ModelParams& params) {
  auto m = std::make_shared<FibrationModel>();
  m->name = "positive_proper";
  m->ambient_dim = 6;
  m->base_dim = 3;
  m->chart = Chart::standard(3);
  m->structure = SymplecticStructure::standard(3);
  const double margin = params.domain_margin;
  m->fibration = make_map(
      6, 3,
      [](auto in, auto out) {
        auto z1 = zat(in, 0, 3), z2 = zat(in, 1, 4), z3 = zat(in, 2, 5);
        using S = std::decay_t<decltype(in[0])>;
        auto w = z1 * z2 * z3 + Cx<S>(S(1.0));
        out[0] = log_abs(w);
        out[1] = abs2(z1) - abs2(z2);
        out[2] = abs2(z1) - abs2(z3);
      },
      [margin](std::span<const double> x) {
        const cd z1{x[0], x[3]}, z2{x[1], x[4]}, z3{x[2], x[5]};
        return std::abs(z1 * z2 * z3 + 1.0) > margin;
      });
  const std::array<std::array<int, 3>, 4> patterns{{{-1, 1, 1}, {1, -1, 1}, {1, 1, -1}, {-1, -1, -1}}};
  const std::array<const char*, 4> names{"octant_mpp", "octant_pmp", "octant_ppm", "octant_mmm"};
  for (int k = 0; k < 4; ++k) {
    auto pat = patterns[static_cast<size_t>(k)];
    m->sections.push_back(
        {names[static_cast<size_t>(k)],
         make_map_fd(3, 6, [pat](std::span<const double> in, std::span<double> out) {
           Eigen::VectorXd b(3);
           b << in[0], in[1], in[2];
           Eigen::VectorXd x = positive_section_point(b, pat[0], pat[1], pat[2]);
           for (int i = 0; i < 6; ++i) out[i] = x[i];
         })});
  }
  m->symmetries.push_back({"conjugation", SymmetryKind::AntiSymplectic,
                           make_map(6, 6, [](auto in, auto out) {
                             for (int i = 0; i < 3; ++i) out[i] = in[i];
                             for (int i = 3; i < 6; ++i) out[i] = -in[i];
                           })});
  m->primary_involution = "conjugation";
  m->discriminant = DiscriminantKind::Graph;
  m->proper_torus_fibers = true;
  m->box_lo = Eigen::VectorXd::Constant(6, -2.5);
  m->box_hi = Eigen::VectorXd::Constant(6, 2.5);
  m->base_lo = vec({-1.0, -1.0, -1.0});
  m->base_hi = vec({1.0, 1.0, 1.0});
  m->coordinate_period.assign(6, 0.0);
  return m;
}

// ---------------------------------------------------------------------------
// harvey_lawson: F = (Im z1 z2 z3, |z1|^2-|z2|^2, |z1|^2-|z3|^2).
// ---------------------------------------------------------------------------
ModelPtr build_harvey_lawson() {
  auto m = std::make_shared<FibrationModel>();
  m->name = "harvey_lawson";
  m->ambient_dim = 6;
  m->base_dim = 3;
  m->chart = Chart::standard(3);
  m->structure = SymplecticStructure::standard(3);
  m->fibration = make_map(6, 3, [](auto in, auto out) {
    auto z1 = zat(in, 0, 3), z2 = zat(in, 1, 4), z3 = zat(in, 2, 5);
    out[0] = (z1 * z2 * z3).im;
    out[1] = abs2(z1) - abs2(z2);
    out[2] = abs2(z1) - abs2(z3);
  });
  // Section on {b2 < 0, b3 < 0}: z1 = i y with y x2 x3 = b1,
  // x2 = sqrt(y^2 - b2), x3 = sqrt(y^2 - b3).
  m->sections.push_back(
      {"imag_slice",
       make_map_fd(
           3, 6,
           [](std::span<const double> in, std::span<double> out) {
             const double b1 = in[0], b2 = in[1], b3 = in[2];
             auto h = [&](double y) {
               return y * std::sqrt((y * y - b2) * (y * y - b3)) - b1;
             };
             double lo = -1.0, hi = 1.0;
             while (h(lo) > 0.0) lo *= 2.0;
             while (h(hi) < 0.0) hi *= 2.0;
             for (int it = 0; it < 200; ++it) {
               const double mid = 0.5 * (lo + hi);
               (h(mid) < 0.0 ? lo : hi) = mid;
             }
             const double y = 0.5 * (lo + hi);
             out[0] = 0.0;
             out[1] = std::sqrt(y * y - b2);
             out[2] = std::sqrt(y * y - b3);
             out[3] = y;
             out[4] = 0.0;
             out[5] = 0.0;
           },
           [](std::span<const double> b) { return b[1] < -0.05 && b[2] < -0.05; })});
  m->symmetries.push_back({"negated_conjugation", SymmetryKind::AntiSymplectic,
                           make_map(6, 6, [](auto in, auto out) {
                             out[0] = -in[0];
                             out[1] = in[1];
                             out[2] = in[2];
                             out[3] = in[3];
                             out[4] = -in[4];
                             out[5] = -in[5];
                           })});
  m->primary_involution = "negated_conjugation";
  m->group_kind = GroupKind::RTimesT2;
  {
    // Hamiltonian flows of the moment components; the two torus factors are
    // closed-form rotations (flow of |z1|^2-|z2|^2 has period pi, normalized
    // to angle period 1), the R factor integrates Im z1 z2 z3.
    SymplecticStructure S = m->structure;
    SmoothMap F = m->fibration;
    m->group_action = [S, F](const GroupElement& g, const Eigen::VectorXd& x) {
      if (g.kind != GroupKind::RTimesT2) {
        throw ConfigError("harvey_lawson: group element kind mismatch");
      }
      Eigen::VectorXd cur = x;
      const cd r2 = std::polar(1.0, -2.0 * pi * g.t[1]);
      const cd r3 = std::polar(1.0, -2.0 * pi * g.t[2]);
      cd z1{cur[0], cur[3]}, z2{cur[1], cur[4]}, z3{cur[2], cur[5]};
      z1 *= r2 * r3;
      z2 /= r2;
      z3 /= r3;
      cur << z1.real(), z2.real(), z3.real(), z1.imag(), z2.imag(), z3.imag();
      if (g.t[0] != 0.0) {
        Eigen::VectorXd w(3);
        w << 1.0, 0.0, 0.0;
        cur = hamiltonian_flow(S, weighted_components(F, w), cur, g.t[0]);
      }
      return cur;
    };
  }
  m->discriminant = DiscriminantKind::Graph;
  m->proper_torus_fibers = false;
  m->box_lo = Eigen::VectorXd::Constant(6, -2.0);
  m->box_hi = Eigen::VectorXd::Constant(6, 2.0);
  m->base_lo = vec({-1.0, -2.0, -2.0});
  m->base_hi = vec({1.0, -0.3, -0.3});
  m->coordinate_period.assign(6, 0.0);
  return m;
}

// ---------------------------------------------------------------------------
// Negative models: f = (mu, Log o Phi o pi) with pi = (gamma(z1, z2), z3).
// ---------------------------------------------------------------------------

// Shared fibration evaluator; Phi is applied to u = (gamma, z3) as a
// scalar-generic callable.
template <class S, class Phi>
void negative_eval(std::span<const S> in, std::span<S> out, int branch, Phi phi) {
  auto z1 = zat(in, 0, 3), z2 = zat(in, 1, 4), z3 = zat(in, 2, 5);
  S mu = S_half(abs2(z1) - abs2(z2));
  Cx<S> g;
  if (branch > 0 || (branch == 0 && value_of(mu) >= 0.0)) {
    g = gamma_branch_pos(z1, z2);
  } else {
    g = gamma_branch_neg(z1, z2);
  }
  Cx<S> w1, w2;
  phi(g, z3, w1, w2);
  out[0] = mu;
  out[1] = log_abs(w1);
  out[2] = log_abs(w2);
}

// Affine symplectomorphism Psi(v1, v2) = ((v1-v2)/sqrt2, (v1+v2-sqrt2)/sqrt2).
template <class S>
void psi_map(Cx<S> v1, Cx<S> v2, Cx<S>& w1, Cx<S>& w2) {
  const S inv = S(1.0 / kSqrt2);
  w1 = Cx<S>(inv) * (v1 - v2);
  w2 = Cx<S>(inv) * (v1 + v2 - Cx<S>(S(kSqrt2)));
}

// Closed-form sections S3 / S4 seeded at (-1,-1,1/2) and (1,1,1/2): real
// slices with gamma = (1 + e^{b2} + e^{b3})/sqrt2.
template <class S>
void negative_section_eval(std::span<const S> in, std::span<S> out, int sign) {
  S g = (S(1.0) + exp(in[1]) + exp(in[2])) / S(kSqrt2);
  S x3 = (S(1.0) + exp(in[2]) - exp(in[1])) / S(kSqrt2);
  S x1, x2;
  if (value_of(in[0]) >= 0.0) {
    x2 = g;
    x1 = sqrt(g * g + S(2.0) * in[0]);
  } else {
    x1 = g;
    x2 = sqrt(g * g - S(2.0) * in[0]);
  }
  out[0] = S(static_cast<double>(sign)) * x1;
  out[1] = S(static_cast<double>(sign)) * x2;
  out[2] = x3;
  out[3] = S(0.0);
  out[4] = S(0.0);
  out[5] = S(0.0);
}

void add_negative_common(FibrationModel& m) {
  m.symmetries.push_back({"conjugation", SymmetryKind::AntiSymplectic,
                          make_map(6, 6, [](auto in, auto out) {
                            for (int i = 0; i < 3; ++i) out[i] = in[i];
                            for (int i = 3; i < 6; ++i) out[i] = -in[i];
                          })});
  m.primary_involution = "conjugation";
  m.sections.push_back({"S4", make_map(3, 6, [](auto in, auto out) {
                          negative_section_eval(in, out, +1);
                        })});
  m.sections.push_back({"S3", make_map(3, 6, [](auto in, auto out) {
                          negative_section_eval(in, out, -1);
                        })});
  m.discriminant = DiscriminantKind::Amoeba;
  m.proper_torus_fibers = true;
  m.box_lo = vec({-2, -2, -1.5, -2, -2, -2});
  m.box_hi = vec({2, 2, 2.5, 2, 2, 2});
  m.base_lo = vec({-0.8, -1.5, -1.5});
  m.base_hi = vec({0.8, 0.8, 0.8});
  m.coordinate_period.assign(6, 0.0);
  m.seam_sample_margin = 1e-3;
}

ModelPtr build_negative_amoeba(const ModelParams& params) {
  auto m = std::make_shared<FibrationModel>();
  m->name = "negative_amoeba";
  m->ambient_dim = 6;
  m->base_dim = 3;
  m->chart = Chart::standard(3);
  m->structure = SymplecticStructure::standard(3);
  const double margin = params.domain_margin;

  auto make_branch = [](int branch) {
    return make_map(6, 3, [branch](auto in, auto out) {
      using S = std::decay_t<decltype(in[0])>;
      negative_eval(in, out, branch, [](Cx<S> u1, Cx<S> u2, Cx<S>& w1, Cx<S>& w2) {
        psi_map(u1, u2, w1, w2);
      });
    });
  };
  auto domain = [margin](std::span<const double> x) {
    const cd z1{x[0], x[3]}, z2{x[1], x[4]}, z3{x[2], x[5]};
    const double mu = 0.5 * (std::norm(z1) - std::norm(z2));
    cd g;
    const double a1 = std::abs(z1), a2 = std::abs(z2);
    if (mu >= 0.0) {
      g = a1 == 0.0 ? cd(0.0) : z1 * z2 / a1;
    } else {
      g = a2 == 0.0 ? cd(0.0) : z1 * z2 / a2;
    }
    const cd v1 = (g - z3) / kSqrt2;
    const cd v2 = (g + z3 - kSqrt2) / kSqrt2;
    return std::abs(v1) > margin && std::abs(v2) > margin;
  };

  m->fibration = make_map(
      6, 3,
      [](auto in, auto out) {
        using S = std::decay_t<decltype(in[0])>;
        negative_eval(in, out, 0, [](Cx<S> u1, Cx<S> u2, Cx<S>& w1, Cx<S>& w2) {
          psi_map(u1, u2, w1, w2);
        });
      },
      domain);
  m->fibration.set_seam(
      [](std::span<const double> x) {
        const cd z1{x[0], x[3]}, z2{x[1], x[4]};
        return 0.5 * (std::norm(z1) - std::norm(z2));
      },
      std::make_shared<const SmoothMap>(make_branch(+1)),
      std::make_shared<const SmoothMap>(make_branch(-1)));
  add_negative_common(*m);
  return m;
}

// Time-1 pinch flow Phi_H on u-space, dispatched to its closed-form limits:
// the cutoff Hamiltonian is exactly the quarter rotation generator inside the
// cutoff ball (the squared radius is conserved by the flow) and exactly zero
// outside the double ball.
std::array<cd, 2> thin_phi_H(cd u1, cd u2, double eps, int steps, bool force) {
  const double r2 = std::norm(u1) + std::norm(u2);
  if (r2 >= 2.0 * eps) return {u1, u2};
  if (!force && r2 <= eps) {
    return {(u1 - u2) / kSqrt2, (u1 + u2) / kSqrt2};
  }
  static const SymplecticStructure S2 = SymplecticStructure::standard(2);
  const SmoothMap H = make_map(4, 1, [eps](auto in, auto out) {
    using S = std::decay_t<decltype(in[0])>;
    Cx<S> a = zat(in, 0, 2), b = zat(in, 1, 3);
    S r = abs2(a) + abs2(b);
    out[0] = cutoff(r, eps) * S(-pi / 4.0) * (a * conj(b)).im;
  });
  Eigen::VectorXd x(4);
  x << u1.real(), u2.real(), u1.imag(), u2.imag();
  x = hamiltonian_flow(S2, H, x, 1.0, steps);
  return {cd{x[0], x[2]}, cd{x[1], x[3]}};
}

ModelPtr build_negative_thin(const ModelParams& params) {
  auto m = std::make_shared<FibrationModel>();
  m->name = "negative_thin";
  m->ambient_dim = 6;
  m->base_dim = 3;
  m->chart = Chart::standard(3);
  m->structure = SymplecticStructure::standard(3);
  const double margin = params.domain_margin;
  const double eps = params.thin_eps;
  const int steps = params.thin_steps;

  auto phi_u = [eps, steps](cd u1, cd u2, cd& w1, cd& w2) {
    auto [v1, v2] = thin_phi_H(u1, u2, eps, steps, false);
    Cx<double> a{v1.real(), v1.imag()}, b{v2.real(), v2.imag()}, o1, o2;
    psi_map(a, b, o1, o2);
    w1 = cd{o1.re, o1.im};
    w2 = cd{o2.re, o2.im};
  };

  auto eval_branch = [phi_u](std::span<const double> in, std::span<double> out, int branch) {
    negative_eval<double>(in, out, branch,
                          [phi_u](Cx<double> u1, Cx<double> u2, Cx<double>& w1, Cx<double>& w2) {
                            cd a{u1.re, u1.im}, b{u2.re, u2.im}, o1, o2;
                            phi_u(a, b, o1, o2);
                            w1 = Cx<double>{o1.real(), o1.imag()};
                            w2 = Cx<double>{o2.real(), o2.imag()};
                          });
  };

  auto domain = [phi_u, margin](std::span<const double> x) {
    const cd z1{x[0], x[3]}, z2{x[1], x[4]}, z3{x[2], x[5]};
    const double mu = 0.5 * (std::norm(z1) - std::norm(z2));
    const double a1 = std::abs(z1), a2 = std::abs(z2);
    cd g;
    if (mu >= 0.0) {
      g = a1 == 0.0 ? cd(0.0) : z1 * z2 / a1;
    } else {
      g = a2 == 0.0 ? cd(0.0) : z1 * z2 / a2;
    }
    cd w1, w2;
    phi_u(g, z3, w1, w2);
    return std::abs(w1) > margin && std::abs(w2) > margin;
  };

  m->fibration = make_map_fd(
      6, 3,
      [eval_branch](std::span<const double> in, std::span<double> out) {
        eval_branch(in, out, 0);
      },
      domain);
  m->fibration.set_seam(
      [](std::span<const double> x) {
        const cd z1{x[0], x[3]}, z2{x[1], x[4]};
        return 0.5 * (std::norm(z1) - std::norm(z2));
      },
      std::make_shared<const SmoothMap>(make_map_fd(
          6, 3,
          [eval_branch](std::span<const double> in, std::span<double> out) {
            eval_branch(in, out, +1);
          })),
      std::make_shared<const SmoothMap>(make_map_fd(
          6, 3,
          [eval_branch](std::span<const double> in, std::span<double> out) {
            eval_branch(in, out, -1);
          })));
  add_negative_common(*m);
  return m;
}

}  // namespace

// Periods of the nodal model by action integrals over the two fiber cycles:
// the circle-orbit action is 2 pi b1 exactly; the second cycle action is a
// trapezoid quadrature over the cycle parameter, differentiated centrally.
// Valid away from the ray {b2 = 0, b1 <= 0}, where the chosen cycle
// parametrization degenerates.
Eigen::MatrixXd nodal_period_matrix(const Eigen::VectorXd& b) {
  if (b.size() != 2) {
    throw DimensionError("nodal_period_matrix: base point must be 2-dimensional");
  }
  if (b[0] <= 1e-6 && std::abs(b[1]) < 1e-6) {
    throw DomainError("nodal_period_matrix: too close to the degenerate ray");
  }
  auto action = [](double b1, double b2) {
    const int N = 1024;
    double acc = 0.0;
    const double e1 = std::exp(b2), e2 = std::exp(2.0 * b2);
    for (int k = 0; k < N; ++k) {
      const double phi = 2.0 * pi * k / N;
      const double p2 = e2 - 2.0 * e1 * std::cos(phi) + 1.0;
      const double rho2 = b1 + std::sqrt(b1 * b1 + p2);
      acc += 0.5 * (e2 - e1 * std::cos(phi)) / rho2;
    }
    return acc * (2.0 * pi / N);
  };
  const double h = 1e-6;
  Eigen::MatrixXd P(2, 2);
  P.col(0) << 2.0 * pi, 0.0;
  P(0, 1) = (action(b[0] + h, b[1]) - action(b[0] - h, b[1])) / (2.0 * h);
  P(1, 1) = (action(b[0], b[1] + h) - action(b[0], b[1] - h)) / (2.0 * h);
  return P;
}

const Symmetry& FibrationModel::symmetry(const std::string& sym_name) const {
  for (const auto& s : symmetries) {
    if (s.name == sym_name) return s;
  }
  throw ConfigError("model " + name + ": unknown symmetry " + sym_name);
}

const Section& FibrationModel::section(const std::string& sec_name) const {
  for (const auto& s : sections) {
    if (s.name == sec_name) return s;
  }
  throw ConfigError("model " + name + ": unknown section " + sec_name);
}

double FibrationModel::distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  return (wrap_to_near(b, a) - a).norm();
}

Eigen::VectorXd FibrationModel::wrap_to_near(const Eigen::VectorXd& y,
                                             const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = y;
  for (int i = 0; i < out.size(); ++i) {
    const double T = coordinate_period.empty() ? 0.0 : coordinate_period[static_cast<size_t>(i)];
    if (T > 0.0) {
      out[i] = y[i] - T * std::round((y[i] - x[i]) / T);
    }
  }
  return out;
}

Eigen::VectorXd FibrationModel::wrap(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = x;
  for (int i = 0; i < out.size(); ++i) {
    const double T = coordinate_period.empty() ? 0.0 : coordinate_period[static_cast<size_t>(i)];
    if (T > 0.0) {
      out[i] = x[i] - T * std::floor(x[i] / T);
    }
  }
  return out;
}

std::vector<ModelPtr> catalog(const ModelParams& params) {
  return {build_ff(),
          build_nodal(params),
          build_generic(params),
          build_positive(params),
          build_harvey_lawson(),
          build_negative_amoeba(params),
          build_negative_thin(params),
          build_toric()};
}

ModelPtr model_by_name(const std::string& name, const ModelParams& params) {
  for (auto& m : catalog(params)) {
    if (m->name == name) return m;
  }
  throw ConfigError("unknown model: " + name);
}

Eigen::VectorXd eval(const FibrationModel& m, const Eigen::VectorXd& x) {
  return m.fibration(x);
}

Eigen::VectorXd involution(const FibrationModel& m, const Eigen::VectorXd& x) {
  return m.involution().map(x);
}

Eigen::VectorXd group_action(const FibrationModel& m, const GroupElement& g,
                             const Eigen::VectorXd& x) {
  if (!m.group_action) {
    throw ConfigError("model " + m.name + " has no group action");
  }
  return m.group_action(g, x);
}

PhasePoint phase_point(const FibrationModel& m, Eigen::VectorXd coords) {
  if (coords.size() != m.ambient_dim) {
    throw DimensionError("phase_point: coordinates do not match the model's ambient dimension");
  }
  return PhasePoint(std::move(coords), m.chart.id);
}

namespace {
void check_chart(const FibrationModel& m, const PhasePoint& x) {
  if (x.chart_id != m.chart.id) {
    throw ConfigError("phase point chart '" + x.chart_id + "' does not match model chart '" +
                      m.chart.id + "'");
  }
}
}  // namespace

Eigen::VectorXd eval(const FibrationModel& m, const PhasePoint& x) {
  check_chart(m, x);
  return eval(m, x.coords);
}

PhasePoint involution(const FibrationModel& m, const PhasePoint& x) {
  check_chart(m, x);
  return PhasePoint(involution(m, x.coords), m.chart.id);
}

PhasePoint group_action(const FibrationModel& m, const GroupElement& g, const PhasePoint& x) {
  check_chart(m, x);
  return PhasePoint(group_action(m, g, x.coords), m.chart.id);
}

RegularityReport is_regular(const FibrationModel& m, const Eigen::VectorXd& x, double tol) {
  RegularityReport rep;
  const SmoothMap& f = m.fibration;
  auto svals = [&](const Eigen::MatrixXd& J) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    return Eigen::VectorXd(svd.singularValues());
  };
  if (f.piecewise() && std::abs(f.seam_value(x)) <= 1e-9) {
    rep.on_seam = true;
    Eigen::VectorXd sp = svals(jacobian_one_sided(f, x, +1));
    Eigen::VectorXd sn = svals(jacobian_one_sided(f, x, -1));
    rep.singular_values = sp;
    rep.margin = std::min(sp[m.base_dim - 1], sn[m.base_dim - 1]);
  } else {
    rep.singular_values = svals(jacobian(f, x));
    rep.margin = rep.singular_values[m.base_dim - 1];
  }
  rep.regular = rep.margin > tol;
  return rep;
}

Eigen::VectorXd glue_map(int region, cd tau, cd b) {
  if (region != 1 && region != 2) {
    throw ConfigError("glue_map: region must be 1 or 2");
  }
  const double at = std::abs(tau), ab = std::abs(b);
  if (at == 0.0) throw DomainError("glue_map: tau must be nonzero");
  if (region == 1 && !(ab < at && at < 1.0)) {
    throw DomainError("glue_map: (tau, b) outside region 1: need |b| < |tau| < 1");
  }
  if (region == 2 && !(1.0 < at && (ab == 0.0 || at < 1.0 / ab))) {
    throw DomainError("glue_map: (tau, b) outside region 2: need 1 < |tau| < 1/|b|");
  }
  // tau . Sigma_j(b) with Sigma_1(b) = (1, conj b), Sigma_2(b) = (b, 1).
  const cd z1 = region == 1 ? cd(1.0) : b;
  const cd z2 = region == 1 ? std::conj(b) : cd(1.0);
  const cd w1 = tau * z1;
  const cd w2 = z2 / std::conj(tau);
  Eigen::VectorXd x(4);
  x << w2.real(), w2.imag(), w1.real(), w1.imag();
  return x;
}

SmoothMap glue_transition_map(int region) {
  if (region != 1 && region != 2) {
    throw ConfigError("glue_transition_map: region must be 1 or 2");
  }
  return make_map(4, 4, [region](auto in, auto out) {
    using S = std::decay_t<decltype(in[0])>;
    // tau = e^{-a1 + i a2}
    S r = exp(-in[2]);
    Cx<S> tau{r * cos(in[3]), r * sin(in[3])};
    Cx<S> tau_conj_inv = Cx<S>{cos(in[3]) / r, sin(in[3]) / r};
    Cx<S> b{in[0], in[1]};
    Cx<S> z1 = region == 1 ? Cx<S>(S(1.0)) : b;
    Cx<S> z2 = region == 1 ? conj(b) : Cx<S>(S(1.0));
    Cx<S> w1 = tau * z1;
    Cx<S> w2 = tau_conj_inv * z2;
    out[0] = w2.re;
    out[1] = w2.im;
    out[2] = w1.re;
    out[3] = w1.im;
  });
}

SymplecticStructure semiflat_structure(int n) {
  // omega = sum da_j ^ db_j on coordinates (b, a); this orientation is the
  // one the focus-focus gluing transition intertwines with the model form
  // (pinned by the pullback test).
  return {n, -SymplecticStructure::standard(n).pairing_matrix()};
}

Eigen::Vector2d reduced_g_t(double t, cd u1, cd u2) {
  const double au2 = std::abs(u2);
  if (au2 == 0.0) throw DomainError("reduced_g_t: u2 must be nonzero");
  const double root = std::sqrt(std::abs(t) + std::sqrt(t * t + std::norm(u1)));
  const cd inner = u1 / root - 1.0;
  const double ai = std::abs(inner);
  if (ai == 0.0) throw DomainError("reduced_g_t: inner expression vanishes");
  return {std::log(au2), std::log(ai)};
}

Eigen::Vector2d reduced_g_t_dt(double t, cd u1, cd u2, int side) {
  if (side == 0) throw ConfigError("reduced_g_t_dt: side must be +1 or -1");
  const double s = side > 0 ? 1.0 : -1.0;
  const double h = 1e-6 * std::max(1.0, std::abs(t));
  const Eigen::Vector2d g0 = reduced_g_t(t, u1, u2);
  const Eigen::Vector2d d1 = (reduced_g_t(t + s * h, u1, u2) - g0) / (s * h);
  const Eigen::Vector2d d2 = (reduced_g_t(t + s * 0.5 * h, u1, u2) - g0) / (s * 0.5 * h);
  return 2.0 * d2 - d1;
}

std::array<cd, 2> thin_leg_phi(cd u1, cd u2, ThinLegVariant variant, const ModelParams& params,
                               bool force_integrate) {
  if (variant == ThinLegVariant::OneLeg) {
    auto [v1, v2] = thin_phi_H(u1, u2, params.thin_eps, params.thin_steps, force_integrate);
    Cx<double> a{v1.real(), v1.imag()}, b{v2.real(), v2.imag()}, w1, w2;
    psi_map(a, b, w1, w2);
    return {cd{w1.re, w1.im}, cd{w2.re, w2.im}};
  }
  // Three-leg variant: the region map that pinches all legs; the transition
  // zones between regions are schematic (region limits only).
  const double eps = params.thin_eps;
  if (std::norm(u1) + std::norm(u2) <= eps) {
    return {-u2, u1 - 1.0};
  }
  if (std::norm(u1) + std::norm(u2 - kSqrt2) <= eps) {
    return {u1 - 1.0, u2 - kSqrt2};
  }
  if (std::norm(u2) >= params.thin_M) {
    return {(u1 - u2) / kSqrt2, (u1 + u2) / kSqrt2};
  }
  Cx<double> a{u1.real(), u1.imag()}, b{u2.real(), u2.imag()}, w1, w2;
  psi_map(a, b, w1, w2);
  return {cd{w1.re, w1.im}, cd{w2.re, w2.im}};
}

}  // namespace lagsym
