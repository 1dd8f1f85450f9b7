#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ssnmc/chart.hpp"
#include "ssnmc/conformal.hpp"
#include "ssnmc/error.hpp"
#include "ssnmc/polynomial.hpp"

namespace ssnmc {

enum class PhiMode { Zero, Constant, Closed, Generic };
enum class SigmaMode { Zero, Constant, Linear, Quadratic, Trig };

inline constexpr std::array<std::string_view, 4> kCatalogNames{"flat", "sphere", "hyperbolic", "random"};
inline constexpr std::array<std::string_view, 4> kPhiModeNames{"zero", "constant", "closed", "generic"};
inline constexpr std::array<std::string_view, 5> kSigmaModeNames{"zero", "constant", "linear", "quadratic", "trig"};

inline const char* to_string(PhiMode m) { return kPhiModeNames[static_cast<std::size_t>(m)].data(); }
inline const char* to_string(SigmaMode m) { return kSigmaModeNames[static_cast<std::size_t>(m)].data(); }

inline std::optional<PhiMode> parse_phi_mode(std::string_view s) {
  for (std::size_t i = 0; i < kPhiModeNames.size(); ++i)
    if (kPhiModeNames[i] == s) return static_cast<PhiMode>(i);
  return std::nullopt;
}

inline std::optional<SigmaMode> parse_sigma_mode(std::string_view s) {
  for (std::size_t i = 0; i < kSigmaModeNames.size(); ++i)
    if (kSigmaModeNames[i] == s) return static_cast<SigmaMode>(i);
  return std::nullopt;
}

struct CatalogParams {
  int dim = 2;
  double radius = 1.0;
  std::uint64_t seed = 1;
  PhiMode phi = PhiMode::Zero;
};

namespace detail {

inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

inline Field polynomial_scalar(int dim, Polynomial p) {
  return Field::generic(dim, FieldShape::Scalar, [p](auto x, auto out) { out[0] = p(x); });
}

inline Field polynomial_covector(int dim, std::vector<Polynomial> comps) {
  return Field::generic(dim, FieldShape::Covector, [comps](auto x, auto out) {
    for (std::size_t i = 0; i < comps.size(); ++i) out[i] = comps[i](x);
  });
}

inline Field one_form_for(int dim, PhiMode mode, std::uint64_t seed, bool& closed) {
  std::mt19937_64 rng = stream(seed, 0xf1);
  std::vector<Polynomial> comps;
  closed = true;
  switch (mode) {
    case PhiMode::Zero:
      for (int i = 0; i < dim; ++i) comps.push_back(Polynomial(dim));
      break;
    case PhiMode::Constant:
      for (int i = 0; i < dim; ++i) comps.push_back(Polynomial::constant(dim, uniform(rng, -1.0, 1.0)));
      break;
    case PhiMode::Closed: {
      // φ = dσ₀ for a cubic σ₀
      const Polynomial potential = Polynomial::random(dim, 3, 0.3, rng);
      for (int i = 0; i < dim; ++i) comps.push_back(potential.derivative(i));
      break;
    }
    case PhiMode::Generic:
      for (int i = 0; i < dim; ++i) comps.push_back(Polynomial::random(dim, 2, 0.3, rng));
      closed = false;
      break;
  }
  return polynomial_covector(dim, std::move(comps));
}

}  // namespace detail

/// Catalog manifolds: flat (g = I on [−1,1]^n), the round sphere of radius r
/// in hyperspherical coordinates (θ_1..θ_{n−1}, ϕ), the Poincaré half-space
/// (last coordinate is height) and a seeded polynomial perturbation of the
/// identity. φ is built per `params.phi`.
inline ChartManifold catalog_build(std::string_view name, const CatalogParams& params) {
  const int n = params.dim;
  if (n < 2) throw Error(ErrorKind::InvalidParams, "dimension must be at least 2");
  if (n > 8) throw Error(ErrorKind::InvalidParams, "dimension above 8 is not supported");

  ChartManifold m;
  m.name = std::string(name);
  m.dim = n;
  constexpr double pi = std::numbers::pi;

  if (name == "flat") {
    m.chart = Box::cube(n, -1.0, 1.0);
    m.sample_region = Box::cube(n, -0.9, 0.9);
    m.metric = Field::generic(n, FieldShape::SymmetricForm, [n](auto, auto out) {
      for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i * n + i)] = 1.0;
    });
  } else if (name == "sphere") {
    if (!(params.radius > 0.0)) throw Error(ErrorKind::InvalidParams, "sphere radius must be positive");
    const double r2 = params.radius * params.radius;
    m.chart = Box::cube(n, 0.1, pi - 0.1);
    m.chart.axes.back() = {-pi, pi};
    m.sample_region = Box::cube(n, 0.2, pi - 0.2);
    m.sample_region.axes.back() = {-pi + 0.2, pi - 0.2};
    m.metric = Field::generic(n, FieldShape::SymmetricForm, [n, r2](auto x, auto out) {
      using T = std::decay_t<decltype(x[0])>;
      T factor(r2);
      for (int a = 0; a < n; ++a) {
        out[static_cast<std::size_t>(a * n + a)] = factor;
        if (a + 1 < n) {
          using std::sin;
          const T s = sin(x[static_cast<std::size_t>(a)]);
          factor = factor * s * s;
        }
      }
    });
  } else if (name == "hyperbolic") {
    m.chart = Box::cube(n, -2.0, 2.0);
    m.chart.axes.back() = {0.25, 4.0};
    m.sample_region = Box::cube(n, -1.0, 1.0);
    m.sample_region.axes.back() = {1.0, 2.0};
    m.metric = Field::generic(n, FieldShape::SymmetricForm, [n](auto x, auto out) {
      using T = std::decay_t<decltype(x[0])>;
      const T y = x[static_cast<std::size_t>(n - 1)];
      const T inv = T(1.0) / (y * y);
      for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i * n + i)] = inv;
    });
  } else if (name == "random") {
    // g = I + 0.3·A(x), A symmetric with quadratic entries bounded by 2.5/n on
    // the chart, so by Gershgorin every eigenvalue of g is at least 0.25.
    std::mt19937_64 rng = detail::stream(params.seed, 0x9e);
    const double coef = 2.5 / (n * static_cast<double>(Polynomial::monomial_count(n, 2)));
    std::vector<Polynomial> entries;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) entries.push_back(Polynomial::random(n, 2, coef, rng));
    m.chart = Box::cube(n, -1.0, 1.0);
    m.sample_region = Box::cube(n, -0.9, 0.9);
    m.metric = Field::generic(n, FieldShape::SymmetricForm, [n, entries](auto x, auto out) {
      std::size_t e = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j, ++e) {
          auto v = 0.3 * entries[e](x);
          if (i == j) v = v + 1.0;
          out[static_cast<std::size_t>(i * n + j)] = v;
          out[static_cast<std::size_t>(j * n + i)] = v;
        }
    });
  } else {
    throw Error(ErrorKind::UnknownManifold, "no catalog manifold named '" + std::string(name) + "'");
  }

  m.one_form = detail::one_form_for(n, params.phi, params.seed, m.one_form_closed);
  return m;
}

/// Conformal factors used by the suite: zero, a constant, and three
/// non-trivial fields (linear, seeded quadratic, trigonometric).
inline ConformalFactor make_conformal_factor(int dim, SigmaMode mode, std::uint64_t seed) {
  switch (mode) {
    case SigmaMode::Zero: return {detail::polynomial_scalar(dim, Polynomial(dim))};
    case SigmaMode::Constant: return {detail::polynomial_scalar(dim, Polynomial::constant(dim, 0.37))};
    case SigmaMode::Linear: {
      Polynomial p(dim);
      std::vector<int> e(static_cast<std::size_t>(dim), 0);
      e[0] = 1;
      p.add(0.1, e);
      return {detail::polynomial_scalar(dim, p)};
    }
    case SigmaMode::Quadratic: {
      std::mt19937_64 rng = detail::stream(seed, 0x51);
      return {detail::polynomial_scalar(dim, Polynomial::random(dim, 2, 0.1, rng))};
    }
    case SigmaMode::Trig:
      return {Field::generic(dim, FieldShape::Scalar, [dim](auto x, auto out) {
        using std::cos;
        using std::sin;
        const auto last = x[static_cast<std::size_t>(dim - 1)];
        out[0] = 0.1 * sin(x[0]) * cos(x[1]) + 0.05 * last * last;
      })};
  }
  throw Error(ErrorKind::InvalidParams, "unknown sigma mode");
}

}  // namespace ssnmc
