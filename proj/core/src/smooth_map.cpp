#include "lagsym/smooth_map.hpp"

#include <cmath>

namespace lagsym {

SmoothMap::SmoothMap(int dim_in, int dim_out, EvalD eval, EvalDual eval_dual,
                     Predicate domain)
    : dim_in_(dim_in),
      dim_out_(dim_out),
      eval_(std::move(eval)),
      eval_dual_(std::move(eval_dual)),
      domain_(std::move(domain)) {
  if (dim_in_ <= 0 || dim_out_ <= 0 || dim_in_ > kMaxDim || dim_out_ > kMaxDim) {
    throw DimensionError("SmoothMap: dimensions out of range");
  }
}

bool SmoothMap::in_domain(const Eigen::VectorXd& x) const {
  if (x.size() != dim_in_) return false;
  if (!domain_) return true;
  return domain_(std::span<const double>(x.data(), static_cast<size_t>(x.size())));
}

Eigen::VectorXd SmoothMap::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != dim_in_) {
    throw DimensionError("SmoothMap: input has wrong length");
  }
  if (!in_domain(x)) {
    throw DomainError("SmoothMap: point outside domain");
  }
  Eigen::VectorXd out(dim_out_);
  eval_(std::span<const double>(x.data(), static_cast<size_t>(x.size())),
        std::span<double>(out.data(), static_cast<size_t>(out.size())));
  for (int i = 0; i < dim_out_; ++i) {
    if (!std::isfinite(out[i])) {
      throw DomainError("SmoothMap: evaluator produced a non-finite value");
    }
  }
  return out;
}

void SmoothMap::eval_raw(std::span<const double> in, std::span<double> out) const {
  eval_(in, out);
}

void SmoothMap::eval_dual(std::span<const Dual> in, std::span<Dual> out) const {
  if (!eval_dual_) {
    throw ConfigError("SmoothMap: no dual evaluator");
  }
  eval_dual_(in, out);
}

double SmoothMap::seam_value(const Eigen::VectorXd& x) const {
  if (!seam_) {
    throw ConfigError("SmoothMap: map has no seam");
  }
  return seam_(std::span<const double>(x.data(), static_cast<size_t>(x.size())));
}

const SmoothMap& SmoothMap::branch(int side) const {
  if (!has_branches()) {
    throw ConfigError("SmoothMap: no branch extensions");
  }
  return side >= 0 ? *branch_pos_ : *branch_neg_;
}

SmoothMap& SmoothMap::set_seam(std::function<double(std::span<const double>)> seam,
                               std::shared_ptr<const SmoothMap> branch_pos,
                               std::shared_ptr<const SmoothMap> branch_neg) {
  seam_ = std::move(seam);
  branch_pos_ = std::move(branch_pos);
  branch_neg_ = std::move(branch_neg);
  return *this;
}

SmoothMap weighted_components(const SmoothMap& f, Eigen::VectorXd w) {
  if (w.size() != f.dim_out()) {
    throw DimensionError("weighted_components: weight length != dim_out");
  }
  const int din = f.dim_in();
  const int dout = f.dim_out();
  SmoothMap::EvalD ed = [f, w, dout](std::span<const double> in, std::span<double> out) {
    std::array<double, kMaxDim> buf;
    f.eval_raw(in, std::span<double>(buf.data(), static_cast<size_t>(dout)));
    double acc = 0.0;
    for (int i = 0; i < dout; ++i) acc += w[i] * buf[i];
    out[0] = acc;
  };
  SmoothMap::EvalDual edual;
  if (f.has_dual()) {
    edual = [f, w, dout](std::span<const Dual> in, std::span<Dual> out) {
      std::array<Dual, kMaxDim> buf;
      f.eval_dual(in, std::span<Dual>(buf.data(), static_cast<size_t>(dout)));
      Dual acc{0.0, 0.0};
      for (int i = 0; i < dout; ++i) acc += Dual(w[i]) * buf[i];
      out[0] = acc;
    };
  }
  return SmoothMap(din, 1, std::move(ed), std::move(edual));
}

SmoothMap identity_map(int d) {
  return make_map(d, d, [](auto in, auto out) {
    for (size_t i = 0; i < in.size(); ++i) out[i] = in[i];
  });
}

}  // namespace lagsym
