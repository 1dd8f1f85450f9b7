#pragma once

#include <span>
#include <string>
#include <vector>

#include "ssnmc/chart.hpp"
#include "ssnmc/error.hpp"
#include "ssnmc/linalg.hpp"
#include "ssnmc/tensor.hpp"

namespace ssnmc {

enum class ConnectionKind { LeviCivita, SSNMC, Dual, ConformalSSNMC, ConformalDual };

inline const char* to_string(ConnectionKind k) {
  switch (k) {
    case ConnectionKind::LeviCivita: return "levi-civita";
    case ConnectionKind::SSNMC: return "ssnmc";
    case ConnectionKind::Dual: return "dual";
    case ConnectionKind::ConformalSSNMC: return "conformal-ssnmc";
    case ConnectionKind::ConformalDual: return "conformal-dual";
  }
  return "unknown";
}

/// Γ^k_ij at a point, slots (k, i, j) with ∇_{∂_i} ∂_j = Γ^k_ij ∂_k.
struct ConnectionCoeffs {
  ConnectionKind kind;
  Tensor gamma;
  Point at;
};

/// Coefficients together with their first partials dgamma(m, k, i, j) = ∂_m Γ^k_ij.
struct ConnectionJet {
  ConnectionCoeffs coeffs;
  Tensor dgamma;
};

/// Everything the connection and curvature formulas need at one point:
/// metric and 1-form jets plus the derived inverse metric and raised 1-form.
struct LocalGeometry {
  Point at;
  int dim = 0;
  JetMode mode = JetMode::Analytic;
  Tensor g;        // g_ij
  Tensor g_inv;    // g^ij
  Tensor dg;       // ∂_h g_ij
  Tensor d2g;      // ∂_h ∂_m g_ij
  Tensor dg_inv;   // ∂_h g^ij
  Tensor phi;      // φ_i
  Tensor dphi;     // ∂_h φ_i
  Tensor phi_up;   // φ^k
  Tensor dphi_up;  // ∂_h φ^k
};

inline constexpr double kMetricSymmetryTolerance = 1e-14;

inline LocalGeometry local_geometry(const ChartManifold& m, std::span<const double> x, JetMode mode) {
  const int n = m.dim;
  if (n < 2) throw Error(ErrorKind::InvalidParams, "chart dimension must be at least 2");
  Jet gj = eval_jet(m.metric, x, 2, mode, m.chart);
  Jet pj = eval_jet(m.one_form, x, 1, mode, m.chart);
  if (asymmetry(gj.value) > kMetricSymmetryTolerance) {
    throw Error(ErrorKind::InvalidParams, "metric of '" + m.name + "' is not symmetric");
  }

  LocalGeometry lg;
  lg.at.assign(x.begin(), x.end());
  lg.dim = n;
  lg.mode = mode;
  lg.g = std::move(gj.value);
  lg.g_inv = inverse_metric(lg.g);
  lg.dg = std::move(*gj.d1);
  lg.d2g = std::move(*gj.d2);
  lg.phi = std::move(pj.value);
  lg.dphi = std::move(*pj.d1);

  const auto N = static_cast<std::size_t>(n);
  std::vector<double> dginv(N * N * N, 0.0);
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) s -= lg.g_inv(i, a) * lg.dg(h, a, b) * lg.g_inv(b, j);
        dginv[(h * N + i) * N + j] = s;
      }
  lg.dg_inv = Tensor(n, {Slot::Lower, Slot::Upper, Slot::Upper}, std::move(dginv));
  lg.phi_up = raise(lg.phi, 0, lg.g_inv);

  std::vector<double> dpu(N * N, 0.0);
  for (int h = 0; h < n; ++h)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int l = 0; l < n; ++l) s += lg.dg_inv(h, k, l) * lg.phi(l) + lg.g_inv(k, l) * lg.dphi(h, l);
      dpu[h * N + k] = s;
    }
  lg.dphi_up = Tensor(n, {Slot::Lower, Slot::Upper}, std::move(dpu));
  return lg;
}

namespace detail {

inline Variance gamma_variance() { return {Slot::Upper, Slot::Lower, Slot::Lower}; }
inline Variance dgamma_variance() { return {Slot::Lower, Slot::Upper, Slot::Lower, Slot::Lower}; }

// Christoffel symbols {k ij} and their partials from the metric jets.
inline ConnectionJet christoffel_jet(const LocalGeometry& lg) {
  const int n = lg.dim;
  const auto N = static_cast<std::size_t>(n);
  // first-kind symbols Γ_lij and their partials
  std::vector<double> first(N * N * N), dfirst(N * N * N * N);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        first[(l * N + i) * N + j] = 0.5 * (lg.dg(i, j, l) + lg.dg(j, i, l) - lg.dg(l, i, j));
        for (int m = 0; m < n; ++m) {
          dfirst[((m * N + l) * N + i) * N + j] =
              0.5 * (lg.d2g(m, i, j, l) + lg.d2g(m, j, i, l) - lg.d2g(m, l, i, j));
        }
      }
  std::vector<double> gamma(N * N * N, 0.0), dgamma(N * N * N * N, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += lg.g_inv(k, l) * first[(l * N + i) * N + j];
        gamma[(k * N + i) * N + j] = s;
        for (int m = 0; m < n; ++m) {
          double ds = 0.0;
          for (int l = 0; l < n; ++l) {
            ds += lg.dg_inv(m, k, l) * first[(l * N + i) * N + j] + lg.g_inv(k, l) * dfirst[((m * N + l) * N + i) * N + j];
          }
          dgamma[((m * N + k) * N + i) * N + j] = ds;
        }
      }
  return {{ConnectionKind::LeviCivita, Tensor(n, gamma_variance(), std::move(gamma)), lg.at},
          Tensor(n, dgamma_variance(), std::move(dgamma))};
}

// Adds sign·(δ^k_i φ_j + g_ij φ^k) and its partials to a Levi-Civita jet.
inline ConnectionJet semi_symmetric_jet(const LocalGeometry& lg, double sign, ConnectionKind kind) {
  const ConnectionJet lc = christoffel_jet(lg);
  const int n = lg.dim;
  const auto N = static_cast<std::size_t>(n);
  std::vector<double> gamma(lc.coeffs.gamma.components().begin(), lc.coeffs.gamma.components().end());
  std::vector<double> dgamma(lc.dgamma.components().begin(), lc.dgamma.components().end());
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double delta = (k == i) ? 1.0 : 0.0;
        gamma[(k * N + i) * N + j] += sign * (delta * lg.phi(j) + lg.g(i, j) * lg.phi_up(k));
        for (int m = 0; m < n; ++m) {
          dgamma[((m * N + k) * N + i) * N + j] +=
              sign * (delta * lg.dphi(m, j) + lg.dg(m, i, j) * lg.phi_up(k) + lg.g(i, j) * lg.dphi_up(m, k));
        }
      }
  return {{kind, Tensor(n, gamma_variance(), std::move(gamma)), lg.at},
          Tensor(n, dgamma_variance(), std::move(dgamma))};
}

}  // namespace detail

/// Coefficients and partials of the Levi-Civita, semi-symmetric non-metric,
/// or dual connection at the point of `lg`.
inline ConnectionJet connection_jet(const LocalGeometry& lg, ConnectionKind kind) {
  switch (kind) {
    case ConnectionKind::LeviCivita: return detail::christoffel_jet(lg);
    case ConnectionKind::SSNMC: return detail::semi_symmetric_jet(lg, +1.0, kind);
    case ConnectionKind::Dual: return detail::semi_symmetric_jet(lg, -1.0, kind);
    default: break;
  }
  throw Error(ErrorKind::InvalidParams, "conformal connections are built by the conformal module");
}

inline ConnectionCoeffs levi_civita(const LocalGeometry& lg) { return connection_jet(lg, ConnectionKind::LeviCivita).coeffs; }
inline ConnectionCoeffs ssnmc(const LocalGeometry& lg) { return connection_jet(lg, ConnectionKind::SSNMC).coeffs; }
inline ConnectionCoeffs dual(const LocalGeometry& lg) { return connection_jet(lg, ConnectionKind::Dual).coeffs; }

inline ConnectionCoeffs levi_civita(const ChartManifold& m, std::span<const double> x, JetMode mode = JetMode::Analytic) {
  return levi_civita(local_geometry(m, x, mode));
}
inline ConnectionCoeffs ssnmc(const ChartManifold& m, std::span<const double> x, JetMode mode = JetMode::Analytic) {
  return ssnmc(local_geometry(m, x, mode));
}
inline ConnectionCoeffs dual(const ChartManifold& m, std::span<const double> x, JetMode mode = JetMode::Analytic) {
  return dual(local_geometry(m, x, mode));
}

/// T^k_ij = Γ^k_ij − Γ^k_ji.
inline Tensor torsion(const ConnectionCoeffs& c) {
  const Tensor& G = c.gamma;
  return Tensor::generate(G.dim(), G.variance(),
                          [&](std::span<const int> i) { return G(i[0], i[1], i[2]) - G(i[0], i[2], i[1]); });
}

/// The displayed torsion of the semi-symmetric family, φ_j δ^k_i − φ_i δ^k_j.
inline Tensor semi_symmetric_torsion(const LocalGeometry& lg) {
  return Tensor::generate(lg.dim, detail::gamma_variance(), [&](std::span<const int> i) {
    const int k = i[0], a = i[1], b = i[2];
    return (k == a ? lg.phi(b) : 0.0) - (k == b ? lg.phi(a) : 0.0);
  });
}

/// ∇_k g_ij = ∂_k g_ij − Γ^m_ki g_mj − Γ^m_kj g_im, slots (k, i, j).
inline Tensor nabla_g(const ConnectionCoeffs& c, const LocalGeometry& lg) {
  const int n = lg.dim;
  const Tensor& G = c.gamma;
  return Tensor::generate(n, {Slot::Lower, Slot::Lower, Slot::Lower}, [&](std::span<const int> idx) {
    const int k = idx[0], i = idx[1], j = idx[2];
    double s = lg.dg(k, i, j);
    for (int m = 0; m < n; ++m) s -= G(m, k, i) * lg.g(m, j) + G(m, k, j) * lg.g(i, m);
    return s;
  });
}

inline Tensor nabla_g(const ConnectionCoeffs& c, const ChartManifold& m, std::span<const double> x,
                      JetMode mode = JetMode::Analytic) {
  return nabla_g(c, local_geometry(m, x, mode));
}

/// Metric incompatibility −2s(φ_i g_kj + φ_j g_ki) predicted for the
/// connection Γ° + s(δφ + gφ^k); s = +1 for ∇, −1 for the dual.
inline Tensor predicted_nabla_g(const LocalGeometry& lg, double sign) {
  return Tensor::generate(lg.dim, {Slot::Lower, Slot::Lower, Slot::Lower}, [&](std::span<const int> idx) {
    const int k = idx[0], i = idx[1], j = idx[2];
    return -2.0 * sign * (lg.phi(i) * lg.g(k, j) + lg.phi(j) * lg.g(k, i));
  });
}

/// Levi-Civita covariant derivative ∇°_i φ_k = ∂_i φ_k − Γ°^m_ik φ_m, slots (i, k).
inline Tensor levi_civita_gradient(const LocalGeometry& lg, const Tensor& christoffel) {
  const int n = lg.dim;
  return Tensor::generate(n, {Slot::Lower, Slot::Lower}, [&](std::span<const int> idx) {
    double s = lg.dphi(idx[0], idx[1]);
    for (int m = 0; m < n; ++m) s -= christoffel(m, idx[0], idx[1]) * lg.phi(m);
    return s;
  });
}

}  // namespace ssnmc
