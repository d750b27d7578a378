#pragma once

#include <cmath>

#include "lagsym/dual.hpp"

namespace lagsym {

/// Complex number over a generic real scalar (double or Dual).
///
/// std::complex is only specified for the builtin floating-point types, so
/// model formulas that must differentiate through complex arithmetic use
/// this minimal replacement instead.
template <class S>
struct Cx {
  S re{};
  S im{};

  constexpr Cx() = default;
  constexpr Cx(S r) : re(r) {}
  constexpr Cx(S r, S i) : re(r), im(i) {}
};

template <class S>
constexpr Cx<S> operator+(Cx<S> a, Cx<S> b) {
  return {a.re + b.re, a.im + b.im};
}
template <class S>
constexpr Cx<S> operator-(Cx<S> a, Cx<S> b) {
  return {a.re - b.re, a.im - b.im};
}
template <class S>
constexpr Cx<S> operator-(Cx<S> a) {
  return {-a.re, -a.im};
}
template <class S>
constexpr Cx<S> operator*(Cx<S> a, Cx<S> b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class S>
constexpr Cx<S> operator*(S s, Cx<S> a) {
  return {s * a.re, s * a.im};
}
template <class S>
constexpr Cx<S> operator/(Cx<S> a, Cx<S> b) {
  const S d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

template <class S>
constexpr Cx<S> conj(Cx<S> a) {
  return {a.re, -a.im};
}
template <class S>
constexpr S abs2(Cx<S> a) {
  return a.re * a.re + a.im * a.im;
}
template <class S>
inline S abs(Cx<S> a) {
  return sqrt(abs2(a));
}
/// log|a|, written as half the log of the squared modulus.
template <class S>
inline S log_abs(Cx<S> a) {
  return S(0.5) * log(abs2(a));
}

}  // namespace lagsym
