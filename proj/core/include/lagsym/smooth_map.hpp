#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <utility>

#include <Eigen/Dense>

#include "lagsym/dual.hpp"
#include "lagsym/errors.hpp"

namespace lagsym {

/// Hard cap on map dimensions; lets evaluation scratch live on the stack.
inline constexpr int kMaxDim = 32;

/// An evaluable map R^{dim_in} -> R^{dim_out} with an optional domain
/// predicate, an optional forward-mode (dual number) evaluator, and an
/// optional piecewise structure (seam function + smooth one-sided branches).
///
/// Evaluators must be pure: no shared mutable state, so any instance may be
/// called concurrently.  Evaluating outside the domain throws DomainError,
/// never returns a silent NaN.
class SmoothMap {
 public:
  using EvalD = std::function<void(std::span<const double>, std::span<double>)>;
  using EvalDual = std::function<void(std::span<const Dual>, std::span<Dual>)>;
  using Predicate = std::function<bool(std::span<const double>)>;

  SmoothMap() = default;
  SmoothMap(int dim_in, int dim_out, EvalD eval, EvalDual eval_dual = {},
            Predicate domain = {});

  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  bool valid() const { return static_cast<bool>(eval_); }
  bool has_dual() const { return static_cast<bool>(eval_dual_); }

  bool in_domain(const Eigen::VectorXd& x) const;

  /// Domain-checked evaluation.
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;

  /// Raw evaluation into caller storage (no domain check).
  void eval_raw(std::span<const double> in, std::span<double> out) const;
  void eval_dual(std::span<const Dual> in, std::span<Dual> out) const;

  // Piecewise structure.  The seam is the zero set of a scalar function; the
  // dispatching evaluator picks the branch by the sign of the seam value, and
  // each branch is a smooth one-sided extension usable on both sides.
  bool piecewise() const { return static_cast<bool>(seam_); }
  double seam_value(const Eigen::VectorXd& x) const;
  bool has_branches() const { return branch_pos_ && branch_neg_; }
  /// side >= 0 selects the branch valid on {seam >= 0}.
  const SmoothMap& branch(int side) const;

  SmoothMap& set_domain(Predicate p) {
    domain_ = std::move(p);
    return *this;
  }
  SmoothMap& set_seam(std::function<double(std::span<const double>)> seam,
                      std::shared_ptr<const SmoothMap> branch_pos,
                      std::shared_ptr<const SmoothMap> branch_neg);

 private:
  int dim_in_ = 0;
  int dim_out_ = 0;
  EvalD eval_;
  EvalDual eval_dual_;
  Predicate domain_;
  std::function<double(std::span<const double>)> seam_;
  std::shared_ptr<const SmoothMap> branch_pos_;
  std::shared_ptr<const SmoothMap> branch_neg_;
};

/// Builds a SmoothMap from a scalar-generic callable
///   f(std::span<const S> in, std::span<S> out)
/// instantiated for both double and Dual, so Jacobians use forward-mode
/// derivatives.
template <class F>
SmoothMap make_map(int dim_in, int dim_out, F f, SmoothMap::Predicate domain = {}) {
  return SmoothMap(
      dim_in, dim_out,
      [f](std::span<const double> in, std::span<double> out) { f(in, out); },
      [f](std::span<const Dual> in, std::span<Dual> out) { f(in, out); },
      std::move(domain));
}

/// Builds a SmoothMap with no dual evaluator; Jacobians fall back to central
/// differences.  Use for maps computed by iteration (flows, solves).
template <class F>
SmoothMap make_map_fd(int dim_in, int dim_out, F f, SmoothMap::Predicate domain = {}) {
  return SmoothMap(
      dim_in, dim_out,
      [f](std::span<const double> in, std::span<double> out) { f(in, out); },
      {}, std::move(domain));
}

/// Scalar-generic evaluation dispatch (double -> eval_raw, Dual -> eval_dual),
/// for composing maps inside scalar-generic callables.
template <class S>
void eval_generic(const SmoothMap& m, std::span<const S> in, std::span<S> out) {
  if constexpr (std::is_same_v<S, double>) {
    m.eval_raw(in, out);
  } else {
    m.eval_dual(in, out);
  }
}

/// x -> sum_i w_i f_i(x) as a scalar map; inherits f's dual support.
SmoothMap weighted_components(const SmoothMap& f, Eigen::VectorXd w);

/// Identity on R^d.
SmoothMap identity_map(int d);

}  // namespace lagsym
