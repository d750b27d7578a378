#include "lagsym/semiflat.hpp"

#include <cmath>
#include <numbers>

#include "lagsym/flow.hpp"

namespace lagsym {

using std::numbers::pi;

OneForm OneForm::zero(int n) {
  return {[n](const Eigen::VectorXd&) { return Eigen::VectorXd(Eigen::VectorXd::Zero(n)); }};
}

OneForm OneForm::constant(Eigen::VectorXd c) {
  return {[c = std::move(c)](const Eigen::VectorXd&) { return c; }};
}

SemiflatChart::SemiflatChart(std::string name, int n,
                             std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> periods,
                             SmoothMap potential,
                             std::function<bool(const Eigen::VectorXd&)> base_domain)
    : name_(std::move(name)),
      n_(n),
      periods_(std::move(periods)),
      potential_(std::move(potential)),
      base_domain_(std::move(base_domain)) {}

bool SemiflatChart::in_base_domain(const Eigen::VectorXd& b) const {
  if (b.size() != n_) return false;
  return base_domain_ ? base_domain_(b) : true;
}

Eigen::MatrixXd SemiflatChart::period_matrix(const Eigen::VectorXd& b) const {
  if (!in_base_domain(b)) {
    throw DomainError("SemiflatChart: base point outside domain");
  }
  Eigen::MatrixXd P = periods_(b);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(P);
  if (!lu.isInvertible()) {
    throw ConfigError("SemiflatChart: singular period matrix at base point");
  }
  return P;
}

Eigen::VectorXd SemiflatChart::dH(const Eigen::VectorXd& b) const {
  if (!potential_.valid()) return Eigen::VectorXd::Zero(n_);
  return gradient(potential_, b);
}

double SemiflatChart::closedness_residual(const Eigen::VectorXd& b) const {
  // d lambda = (d_j lambda_i_k - d_k lambda_i_j) over all period columns i
  // and base pairs (j, k); central differences.
  const double h = 1e-5;
  double worst = 0.0;
  for (int j = 0; j < n_; ++j) {
    for (int k = j + 1; k < n_; ++k) {
      Eigen::VectorXd bj = b, bk = b;
      bj[j] += h;
      bk[k] += h;
      Eigen::VectorXd bjm = b, bkm = b;
      bjm[j] -= h;
      bkm[k] -= h;
      Eigen::MatrixXd dPj = (periods_(bj) - periods_(bjm)) / (2.0 * h);
      Eigen::MatrixXd dPk = (periods_(bk) - periods_(bkm)) / (2.0 * h);
      for (int i = 0; i < n_; ++i) {
        worst = std::max(worst, std::abs(dPj(k, i) - dPk(j, i)));
      }
    }
  }
  return worst;
}

SemiflatChart SemiflatChart::torus(int n) {
  return SemiflatChart("torus_" + std::to_string(n), n, [n](const Eigen::VectorXd&) {
    return Eigen::MatrixXd(2.0 * pi * Eigen::MatrixXd::Identity(n, n));
  });
}

namespace {

Eigen::MatrixXd ff_periods(const Eigen::VectorXd& b, const SmoothMap& potential) {
  Eigen::MatrixXd P(2, 2);
  const double r = b.norm();
  P(0, 0) = -std::log(r);
  P(1, 0) = std::atan2(b[1], b[0]);  // principal Arg; monodromy uses continuation
  P(0, 1) = 0.0;
  P(1, 1) = 2.0 * pi;
  if (potential.valid()) {
    P.col(0) += gradient(potential, b);
  }
  return P;
}

}  // namespace

SemiflatChart SemiflatChart::focus_focus(SmoothMap potential) {
  auto pot = std::make_shared<SmoothMap>(std::move(potential));
  return SemiflatChart(
      "focus_focus", 2,
      [pot](const Eigen::VectorXd& b) { return ff_periods(b, *pot); }, *pot,
      [](const Eigen::VectorXd& b) {
        const double r = b.norm();
        return r > 1e-9 && r < 1.0;
      });
}

SemiflatChart SemiflatChart::generic_cylinder(SmoothMap potential) {
  auto pot = std::make_shared<SmoothMap>(std::move(potential));
  return SemiflatChart(
      "generic_cylinder", 3,
      [pot](const Eigen::VectorXd& b) {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, 3);
        Eigen::VectorXd b2 = b.head(2);
        Eigen::MatrixXd Pff = ff_periods(b2, SmoothMap{});
        P.topLeftCorner(2, 2) = Pff;
        P(2, 2) = 1.0;  // the dr period
        if (pot->valid()) {
          P.col(0) += gradient(*pot, b);
        }
        return P;
      },
      *pot,
      [](const Eigen::VectorXd& b) {
        const double r = b.head(2).norm();
        return r > 1e-9 && r < 1.0 && b[2] > 0.0 && b[2] < 1.0;
      });
}

SemiflatChart SemiflatChart::from_config(const std::string& period_family, int n,
                                         const std::vector<double>& h_poly_coeffs) {
  SmoothMap potential;
  if (!h_poly_coeffs.empty()) {
    // H(b) = sum_k c_k * m_k(b) over graded monomials in lexicographic order:
    // 1, b1, b2, ..., b1^2, b1 b2, ...; only total degree <= 2 is supported.
    const auto coeffs = h_poly_coeffs;
    potential = make_map(n, 1, [coeffs, n](auto in, auto out) {
      using S = std::decay_t<decltype(in[0])>;
      S acc = S(0.0);
      size_t k = 0;
      if (k < coeffs.size()) acc += S(coeffs[k++]);
      for (int i = 0; i < n && k < coeffs.size(); ++i) acc += S(coeffs[k++]) * in[i];
      for (int i = 0; i < n && k < coeffs.size(); ++i) {
        for (int j = i; j < n && k < coeffs.size(); ++j) {
          acc += S(coeffs[k++]) * in[i] * in[j];
        }
      }
      out[0] = acc;
    });
  }
  if (period_family == "torus") {
    if (potential.valid()) {
      throw ConfigError("semiflat config: torus family takes no potential");
    }
    return torus(n);
  }
  if (period_family == "focus_focus") {
    if (n != 2) throw ConfigError("semiflat config: focus_focus requires n = 2");
    return focus_focus(std::move(potential));
  }
  if (period_family == "generic_cylinder") {
    if (n != 3) throw ConfigError("semiflat config: generic_cylinder requires n = 3");
    return generic_cylinder(std::move(potential));
  }
  throw ConfigError("semiflat config: unknown period family " + period_family);
}

// -- exact torus arithmetic --------------------------------------------------

std::uint64_t to_ticks(double c) {
  // Sign-symmetric quantization: to_ticks(-c) == -to_ticks(c) mod 2^64, so
  // that negating a 1-form negates its tick increment exactly.
  const bool neg = c < 0.0;
  const double a = std::abs(c);
  double fr = a - std::floor(a);
  if (fr >= 1.0) fr = 0.0;
  const double scaled = fr * 18446744073709551616.0;  // 2^64
  std::uint64_t t =
      scaled >= 18446744073709551615.0 ? 0 : static_cast<std::uint64_t>(scaled);
  return neg ? ~t + 1 : t;
}

double from_ticks(std::uint64_t t) {
  return static_cast<double>(t) / 18446744073709551616.0;
}

Eigen::VectorXd FiberPoint::reduced() const {
  Eigen::VectorXd c(static_cast<int>(ticks.size()));
  for (size_t i = 0; i < ticks.size(); ++i) c[static_cast<int>(i)] = from_ticks(ticks[i]);
  return c;
}

FiberPoint reduce(const SemiflatChart& chart, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& alpha) {
  if (alpha.size() != chart.n()) {
    throw DimensionError("reduce: covector has wrong length");
  }
  const Eigen::MatrixXd P = chart.period_matrix(b);
  const Eigen::VectorXd c = P.fullPivLu().solve(alpha);
  FiberPoint p;
  p.b = b;
  p.alpha = alpha;
  p.ticks.resize(static_cast<size_t>(chart.n()));
  for (int i = 0; i < chart.n(); ++i) p.ticks[static_cast<size_t>(i)] = to_ticks(c[i]);
  return p;
}

FiberPoint minus_id(const SemiflatChart& chart, const FiberPoint& p) {
  (void)chart;
  FiberPoint q = p;
  q.alpha = -p.alpha;
  for (auto& t : q.ticks) t = ~t + 1;  // negation mod 2^64
  return q;
}

namespace {

FiberPoint translate_by_covector(const SemiflatChart& chart, const FiberPoint& p,
                                 const Eigen::VectorXd& delta) {
  const Eigen::MatrixXd P = chart.period_matrix(p.b);
  const Eigen::VectorXd dc = P.fullPivLu().solve(delta);
  FiberPoint q = p;
  q.alpha = p.alpha + delta;
  for (size_t i = 0; i < q.ticks.size(); ++i) {
    q.ticks[i] = p.ticks[i] + to_ticks(dc[static_cast<int>(i)]);  // wraps mod 2^64
  }
  return q;
}

}  // namespace

FiberPoint translate(const SemiflatChart& chart, const OneForm& eta, const FiberPoint& p) {
  return translate_by_covector(chart, p, eta(p.b));
}

FiberPoint iota_h(const SemiflatChart& chart, const FiberPoint& p) {
  return translate_by_covector(chart, minus_id(chart, p), chart.dH(p.b));
}

FiberPoint section_translation(const SemiflatChart& chart, const OneForm& sigma_prime,
                               const FiberPoint& p) {
  return translate(chart, sigma_prime, p);
}

Eigen::VectorXd section_translation_ff(const OneForm& sigma_prime, const Eigen::VectorXd& x) {
  if (x.size() != 4) {
    throw DimensionError("section_translation_ff: expected focus-focus coordinates");
  }
  const std::complex<double> z1{x[2], x[3]}, z2{x[0], x[1]};
  const std::complex<double> b = z1 * std::conj(z2);
  Eigen::VectorXd s(2);
  s << b.real(), b.imag();
  const Eigen::VectorXd sp = sigma_prime(s);
  const std::complex<double> tau = std::exp(std::complex<double>{-sp[0], sp[1]});
  const std::complex<double> w1 = tau * z1;
  const std::complex<double> w2 = z2 / std::conj(tau);
  Eigen::VectorXd out(4);
  out << w2.real(), w2.imag(), w1.real(), w1.imag();
  return out;
}

}  // namespace lagsym
