#pragma once

#include <cmath>

namespace ssnmc {

/// Hyper-dual number a + b ε₁ + c ε₂ + d ε₁ε₂ with ε₁² = ε₂² = 0.
///
/// Seeding x_i with ε₁ and x_j with ε₂ makes f(x) carry ∂_i f in b,
/// ∂_j f in c and ∂_i∂_j f in d, exact to rounding. This is how chart
/// fields provide analytic jets without hand-written partials.
struct HyperDual {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  constexpr HyperDual() = default;
  constexpr HyperDual(double v) : a(v) {}  // NOLINT(google-explicit-constructor)
  constexpr HyperDual(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

  HyperDual& operator+=(const HyperDual& o) {
    a += o.a; b += o.b; c += o.c; d += o.d;
    return *this;
  }
  HyperDual& operator-=(const HyperDual& o) {
    a -= o.a; b -= o.b; c -= o.c; d -= o.d;
    return *this;
  }
  HyperDual& operator*=(const HyperDual& o) { return *this = *this * o; }
  HyperDual& operator/=(const HyperDual& o) { return *this = *this / o; }

  friend constexpr HyperDual operator+(const HyperDual& x, const HyperDual& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend constexpr HyperDual operator-(const HyperDual& x, const HyperDual& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend constexpr HyperDual operator-(const HyperDual& x) { return {-x.a, -x.b, -x.c, -x.d}; }
  friend constexpr HyperDual operator*(const HyperDual& x, const HyperDual& y) {
    return {x.a * y.a, x.a * y.b + x.b * y.a, x.a * y.c + x.c * y.a,
            x.a * y.d + x.b * y.c + x.c * y.b + x.d * y.a};
  }
  friend HyperDual operator/(const HyperDual& x, const HyperDual& y) {
    const double inv = 1.0 / y.a;
    // 1/y: f = 1/a, f' = -1/a², f'' = 2/a³
    const HyperDual r{inv, -y.b * inv * inv, -y.c * inv * inv,
                      -y.d * inv * inv + 2.0 * y.b * y.c * inv * inv * inv};
    return x * r;
  }
};

namespace detail {
// Applies a scalar function with value f0, first derivative f1, second f2.
inline HyperDual chain(const HyperDual& x, double f0, double f1, double f2) {
  return {f0, f1 * x.b, f1 * x.c, f1 * x.d + f2 * x.b * x.c};
}
}  // namespace detail

inline HyperDual sin(const HyperDual& x) {
  const double s = std::sin(x.a), c = std::cos(x.a);
  return detail::chain(x, s, c, -s);
}
inline HyperDual cos(const HyperDual& x) {
  const double s = std::sin(x.a), c = std::cos(x.a);
  return detail::chain(x, c, -s, -c);
}
inline HyperDual exp(const HyperDual& x) {
  const double e = std::exp(x.a);
  return detail::chain(x, e, e, e);
}
inline HyperDual log(const HyperDual& x) { return detail::chain(x, std::log(x.a), 1.0 / x.a, -1.0 / (x.a * x.a)); }
inline HyperDual sqrt(const HyperDual& x) {
  const double s = std::sqrt(x.a);
  return detail::chain(x, s, 0.5 / s, -0.25 / (s * x.a));
}

}  // namespace ssnmc
