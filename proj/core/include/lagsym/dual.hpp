#pragma once

#include <cmath>

namespace lagsym {

/// Forward-mode dual number: value plus one directional derivative.
///
/// Jacobians are assembled one input direction at a time, which keeps the
/// type trivially copyable and avoids dynamic allocation in inner loops.
/// Branching on comparisons uses the value part only, so piecewise formulas
/// differentiate as the branch that is active at the evaluation point.
struct Dual {
  double val = 0.0;
  double der = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double v) : val(v) {}
  constexpr Dual(double v, double d) : val(v), der(d) {}
};

constexpr Dual operator+(Dual a, Dual b) { return {a.val + b.val, a.der + b.der}; }
constexpr Dual operator-(Dual a, Dual b) { return {a.val - b.val, a.der - b.der}; }
constexpr Dual operator-(Dual a) { return {-a.val, -a.der}; }
constexpr Dual operator+(Dual a) { return a; }
constexpr Dual operator*(Dual a, Dual b) {
  return {a.val * b.val, a.der * b.val + a.val * b.der};
}
constexpr Dual operator/(Dual a, Dual b) {
  const double inv = 1.0 / b.val;
  return {a.val * inv, (a.der - a.val * b.der * inv) * inv};
}

constexpr Dual& operator+=(Dual& a, Dual b) { return a = a + b; }
constexpr Dual& operator-=(Dual& a, Dual b) { return a = a - b; }
constexpr Dual& operator*=(Dual& a, Dual b) { return a = a * b; }
constexpr Dual& operator/=(Dual& a, Dual b) { return a = a / b; }

constexpr bool operator<(Dual a, Dual b) { return a.val < b.val; }
constexpr bool operator>(Dual a, Dual b) { return a.val > b.val; }
constexpr bool operator<=(Dual a, Dual b) { return a.val <= b.val; }
constexpr bool operator>=(Dual a, Dual b) { return a.val >= b.val; }
constexpr bool operator==(Dual a, Dual b) { return a.val == b.val; }

inline Dual sqrt(Dual a) {
  const double s = std::sqrt(a.val);
  return {s, a.der / (2.0 * s)};
}
inline Dual exp(Dual a) {
  const double e = std::exp(a.val);
  return {e, a.der * e};
}
inline Dual log(Dual a) { return {std::log(a.val), a.der / a.val}; }
inline Dual sin(Dual a) { return {std::sin(a.val), a.der * std::cos(a.val)}; }
inline Dual cos(Dual a) { return {std::cos(a.val), -a.der * std::sin(a.val)}; }
inline Dual atan2(Dual y, Dual x) {
  const double r2 = x.val * x.val + y.val * y.val;
  return {std::atan2(y.val, x.val), (y.der * x.val - y.val * x.der) / r2};
}
/// |a|, differentiated as sign(a); the kink at 0 takes the right branch.
inline Dual abs(Dual a) { return a.val < 0.0 ? -a : a; }

inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.val; }

// Forwarders so unqualified calls in scalar-generic code resolve for plain
// doubles too (unqualified lookup inside this namespace would otherwise only
// see the Dual overloads).
inline double sqrt(double x) { return std::sqrt(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double atan2(double y, double x) { return std::atan2(y, x); }
inline double abs(double x) { return std::abs(x); }

}  // namespace lagsym
