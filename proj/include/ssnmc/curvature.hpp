#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ssnmc/chart.hpp"
#include "ssnmc/connections.hpp"
#include "ssnmc/error.hpp"
#include "ssnmc/tensor.hpp"

namespace ssnmc {

/// Curvature of one connection at one point. riemann has slots (l, i, j, k)
/// for R^l_ijk, the component of R(∂_i, ∂_j)∂_k; ricci is R_jk = R^l_ljk and
/// scalar is g^{jk} R_jk.
struct CurvatureBundle {
  Tensor riemann;
  Tensor ricci;
  double scalar = 0.0;
  ConnectionKind source = ConnectionKind::LeviCivita;
  Point at;
};

/// R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik.
///
/// With this ordering the round sphere of radius r gives
/// R^l_ijk = r⁻²(δ^l_i g_jk − δ^l_j g_ik).
inline Tensor riemann_tensor(const ConnectionJet& c) {
  const Tensor& G = c.coeffs.gamma;
  const Tensor& dG = c.dgamma;
  const int n = G.dim();
  const auto N = static_cast<std::size_t>(n);
  std::vector<double> r(N * N * N * N);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = dG(i, l, j, k) - dG(j, l, i, k);
          for (int m = 0; m < n; ++m) s += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
          r[((l * N + i) * N + j) * N + k] = s;
        }
  return Tensor(n, {Slot::Upper, Slot::Lower, Slot::Lower, Slot::Lower}, std::move(r));
}

inline CurvatureBundle make_bundle(const Tensor& riemann, const Tensor& g_inv, ConnectionKind source, const Point& at) {
  CurvatureBundle b;
  b.riemann = riemann;
  b.ricci = contract(riemann, 0, 1);
  double s = 0.0;
  for (int j = 0; j < riemann.dim(); ++j)
    for (int k = 0; k < riemann.dim(); ++k) s += g_inv(j, k) * b.ricci(j, k);
  b.scalar = s;
  b.source = source;
  b.at = at;
  return b;
}

inline CurvatureBundle curvature(const LocalGeometry& lg, const ConnectionJet& c) {
  return make_bundle(riemann_tensor(c), lg.g_inv, c.coeffs.kind, lg.at);
}

inline CurvatureBundle riemann(const LocalGeometry& lg, ConnectionKind kind) {
  return curvature(lg, connection_jet(lg, kind));
}

inline CurvatureBundle riemann(const ChartManifold& m, ConnectionKind kind, std::span<const double> x,
                               JetMode mode = JetMode::Analytic) {
  return riemann(local_geometry(m, x, mode), kind);
}

/// φ_jk = φ_j φ_k + ½ g_jk φ_p φ^p.
inline Tensor phi_aux(const LocalGeometry& lg) {
  double sq = 0.0;
  for (int p = 0; p < lg.dim; ++p) sq += lg.phi(p) * lg.phi_up(p);
  return Tensor::generate(lg.dim, {Slot::Lower, Slot::Lower}, [&](std::span<const int> i) {
    return lg.phi(i[0]) * lg.phi(i[1]) + 0.5 * lg.g(i[0], i[1]) * sq;
  });
}

namespace detail {

inline void require_dim3(int n, const char* what) {
  if (n < 3) throw Error(ErrorKind::DimensionTooSmall, std::string(what) + " requires n >= 3");
}

// cd·(δ^l_i S_jk − δ^l_j S_ik) + cg·(g_jk S_i^l − g_ik S_j^l) with S_i^l = g^{lm} S_im.
inline Tensor delta_metric_form(const Tensor& g, const Tensor& g_inv, const Tensor& s, double cd, double cg) {
  const int n = g.dim();
  const Tensor s_mixed = raise(s, 1, g_inv);  // (i, l)
  return Tensor::generate(n, {Slot::Upper, Slot::Lower, Slot::Lower, Slot::Lower}, [&](std::span<const int> x) {
    const int l = x[0], i = x[1], j = x[2], k = x[3];
    const double d = (l == i ? s(j, k) : 0.0) - (l == j ? s(i, k) : 0.0);
    const double m = g(j, k) * s_mixed(i, l) - g(i, k) * s_mixed(j, l);
    return cd * d + cg * m;
  });
}

// δ^l_i g_jk − δ^l_j g_ik
inline Tensor constant_curvature_form(const Tensor& g) {
  return Tensor::generate(g.dim(), {Slot::Upper, Slot::Lower, Slot::Lower, Slot::Lower}, [&](std::span<const int> x) {
    const int l = x[0], i = x[1], j = x[2], k = x[3];
    return (l == i ? g(j, k) : 0.0) - (l == j ? g(i, k) : 0.0);
  });
}

}  // namespace detail

/// Constant-curvature tensor k(δ^l_i g_jk − δ^l_j g_ik).
inline Tensor constant_curvature_tensor(const Tensor& g, double k) { return k * detail::constant_curvature_form(g); }

/// Weyl-pattern tensor of a curvature-like (riemann, ricci, scalar) triple:
/// C = U + (δ^l_j U_ik − δ^l_i U_jk + g_ik U_j^l − g_jk U_i^l)/(n−2)
///       + U/((n−1)(n−2)) (δ^l_i g_jk − δ^l_j g_ik),
/// with the second Ricci slot raised, U_j^l = g^{lm} U_jm.
inline Tensor weyl(const Tensor& riemann, const Tensor& ricci, double scalar, const Tensor& g, const Tensor& g_inv) {
  const int n = g.dim();
  detail::require_dim3(n, "weyl");
  const Tensor ric_mixed = raise(ricci, 1, g_inv);
  const double a = 1.0 / (n - 2.0);
  const double b = scalar / ((n - 1.0) * (n - 2.0));
  return Tensor::generate(n, riemann.variance(), [&](std::span<const int> x) {
    const int l = x[0], i = x[1], j = x[2], k = x[3];
    const double dl_i = l == i ? 1.0 : 0.0;
    const double dl_j = l == j ? 1.0 : 0.0;
    const double trace = dl_j * ricci(i, k) - dl_i * ricci(j, k) + g(i, k) * ric_mixed(j, l) - g(j, k) * ric_mixed(i, l);
    return riemann(l, i, j, k) + a * trace + b * (dl_i * g(j, k) - dl_j * g(i, k));
  });
}

inline Tensor weyl(const CurvatureBundle& b, const Tensor& g, const Tensor& g_inv) {
  return weyl(b.riemann, b.ricci, b.scalar, g, g_inv);
}

/// Curvatures of ∇°, ∇ and ∇* at one point.
struct CurvatureTriple {
  CurvatureBundle levi_civita;
  CurvatureBundle ssnmc;
  CurvatureBundle dual;
  Tensor christoffel;
};

inline CurvatureTriple curvature_triple(const LocalGeometry& lg) {
  const ConnectionJet lc = connection_jet(lg, ConnectionKind::LeviCivita);
  return {curvature(lg, lc), riemann(lg, ConnectionKind::SSNMC), riemann(lg, ConnectionKind::Dual), lc.coeffs.gamma};
}

/// Residuals of the curvature decompositions of ∇ and ∇*. Each side is
/// computed on its own: left sides from the connection coefficients,
/// right sides from K, ∇°φ and φ as displayed.
struct DecompositionResiduals {
  double ssnmc_form = 0.0;
  double dual_form = 0.0;
  double difference = 0.0;
  double curvature_sum = 0.0;
  double ricci_sum = 0.0;
  double trace = 0.0;
  std::optional<double> phi_recovery;
  // Which computed curvature each display matched, e.g. "ssnmc".
  std::string ssnmc_form_matches;
  std::string dual_form_matches;
  std::string difference_lhs;
};

inline DecompositionResiduals decomposition_residuals(const LocalGeometry& lg, const CurvatureTriple& t) {
  const int n = lg.dim;
  const Tensor& g = lg.g;
  const Tensor& K = t.levi_civita.riemann;
  const Tensor& R = t.ssnmc.riemann;
  const Tensor& Rs = t.dual.riemann;
  const Tensor grad = levi_civita_gradient(lg, t.christoffel);  // ∇°_i φ_k
  const Tensor grad_up = raise(grad, 1, lg.g_inv);               // ∇°_i φ^l
  double sq = 0.0;
  for (int p = 0; p < n; ++p) sq += lg.phi(p) * lg.phi_up(p);
  const Variance v4{Slot::Upper, Slot::Lower, Slot::Lower, Slot::Lower};

  // Displayed forms of R (sign +1) and R* (sign −1) from K, ∇°φ and φ.
  auto display_9_10 = [&](double sign) {
    return Tensor::generate(n, v4, [&](std::span<const int> x) {
      const int l = x[0], i = x[1], j = x[2], k = x[3];
      const double dli = l == i ? 1.0 : 0.0, dlj = l == j ? 1.0 : 0.0;
      const double linear = dlj * grad(i, k) - dli * grad(j, k) + g(j, k) * grad_up(i, l) - g(i, k) * grad_up(j, l);
      const double quad = -dlj * lg.phi(i) * lg.phi(k) + dli * lg.phi(j) * lg.phi(k) + g(j, k) * lg.phi(i) * lg.phi_up(l) -
                          g(i, k) * lg.phi(j) * lg.phi_up(l) + dli * g(j, k) * sq - dlj * g(i, k) * sq;
      return K(l, i, j, k) + sign * linear + quad;
    });
  };
  DecompositionResiduals out;
  const Tensor d9 = display_9_10(+1.0);
  const Tensor d10 = display_9_10(-1.0);
  const double direct = max_abs_diff(R, d9) + max_abs_diff(Rs, d10);
  const double swapped = max_abs_diff(Rs, d9) + max_abs_diff(R, d10);
  if (direct <= swapped) {
    out.ssnmc_form = max_abs_diff(R, d9);
    out.dual_form = max_abs_diff(Rs, d10);
    out.ssnmc_form_matches = "ssnmc";
    out.dual_form_matches = "dual";
  } else {
    out.ssnmc_form = max_abs_diff(Rs, d9);
    out.dual_form = max_abs_diff(R, d10);
    out.ssnmc_form_matches = "dual";
    out.dual_form_matches = "ssnmc";
  }

  // Difference: X = Y + 2(δ^l_i ∇_j φ_k − δ^l_j ∇_i φ_k + g_ik ∇_j φ^l − g_jk ∇_i φ^l).
  const Tensor bracket = Tensor::generate(n, v4, [&](std::span<const int> x) {
    const int l = x[0], i = x[1], j = x[2], k = x[3];
    const double dli = l == i ? 1.0 : 0.0, dlj = l == j ? 1.0 : 0.0;
    return 2.0 * (dli * grad(j, k) - dlj * grad(i, k) + g(i, k) * grad_up(j, l) - g(j, k) * grad_up(i, l));
  });
  const double lhs_dual = max_abs_diff(Rs, R + bracket);
  const double lhs_ssnmc = max_abs_diff(R, Rs + bracket);
  out.difference = std::min(lhs_dual, lhs_ssnmc);
  out.difference_lhs = lhs_dual <= lhs_ssnmc ? "dual" : "ssnmc";

  // Sum: R + R* = 2(K + δ^l_i φ_jk − δ^l_j φ_ik + g_jk φ_i^l − g_ik φ_j^l).
  const Tensor phijk = phi_aux(lg);
  const Tensor kn = detail::delta_metric_form(g, lg.g_inv, phijk, 1.0, 1.0);
  out.curvature_sum = max_abs_diff(R + Rs, 2.0 * (K + kn));

  // Ricci sum: R_jk + R*_jk = 2(K_jk + (n−2)φ_jk + g_jk φ_i^i).
  double phi_trace = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) phi_trace += lg.g_inv(a, b) * phijk(a, b);
  const Tensor ric14 = 2.0 * (t.levi_civita.ricci + (n - 2.0) * phijk + phi_trace * g);
  out.ricci_sum = max_abs_diff(t.ssnmc.ricci + t.dual.ricci, ric14);

  // Trace identity: φ_i^i = (R + R* − 2K)/(4(n−1)), K the Levi-Civita scalar.
  const double scalar_sum = t.ssnmc.scalar + t.dual.scalar - 2.0 * t.levi_civita.scalar;
  out.trace = std::abs(phi_trace - scalar_sum / (4.0 * (n - 1.0)));

  // Recovery: φ_jk = [R_jk + R*_jk − 2K_jk − g_jk (R + R* − 2K)/(2(n−1))] / (2(n−2)).
  if (n >= 3) {
    const Tensor rhs = (1.0 / (2.0 * (n - 2.0))) *
                       (t.ssnmc.ricci + t.dual.ricci - 2.0 * t.levi_civita.ricci - (scalar_sum / (2.0 * (n - 1.0))) * g);
    out.phi_recovery = max_abs_diff(phijk, rhs);
  }
  return out;
}

inline DecompositionResiduals decomposition_residuals(const LocalGeometry& lg) {
  return decomposition_residuals(lg, curvature_triple(lg));
}

/// max |C + C* − 2C°| with each Weyl tensor built from its own curvature.
inline double lemma1_residual(const LocalGeometry& lg, const CurvatureTriple& t) {
  detail::require_dim3(lg.dim, "lemma1_residual");
  const Tensor c = weyl(t.ssnmc, lg.g, lg.g_inv);
  const Tensor cs = weyl(t.dual, lg.g, lg.g_inv);
  const Tensor c0 = weyl(t.levi_civita, lg.g, lg.g_inv);
  return max_abs_diff(c + cs, 2.0 * c0);
}

inline double lemma1_residual(const LocalGeometry& lg) { return lemma1_residual(lg, curvature_triple(lg)); }

/// max |R − R*|; zero exactly when ∇ is conjugate symmetric.
inline double conjugate_symmetry_residual(const CurvatureTriple& t) {
  return max_abs_diff(t.ssnmc.riemann, t.dual.riemann);
}

/// Duality of the curvatures: g(R(X,Y)Z, W) = −g(Z, R*(X,Y)W), i.e.
/// R_ijkl = −R*_ijlk with the upper slot lowered into the last position.
inline double dual_curvature_residual(const LocalGeometry& lg, const CurvatureTriple& t) {
  const Tensor r = permute(lower(t.ssnmc.riemann, 0, lg.g), {1, 2, 3, 0});    // R_ijkl
  const Tensor rs = permute(lower(t.dual.riemann, 0, lg.g), {1, 2, 0, 3});   // R*_ijlk at (i,j,k,l)
  return max_abs_diff(r, -rs);
}

/// Residuals of the torsion-corrected second Bianchi identity.
struct BianchiResidual {
  double identity = 0.0;                  // cyclic(∇_h R^l_ijk + T^m_hi R^l_mjk)
  std::optional<double> reduced_form;     // against 2(φ_h R^l_ijk + φ_i R^l_jhk + φ_j R^l_hik)
  double scale = 1.0;                     // max(1, |R|, |∂R|) at the point
};

inline constexpr double kCurvatureDerivativeStep = 1e-3;

namespace detail {

// Five-point central difference of a tensor-valued field along axis h with
// step 1e-3·(1 + |x_h|): (8(f₊₁ − f₋₁) − (f₊₂ − f₋₂)) / 12h.
template <class Fn>
Tensor central_derivative(std::span<const double> x, int h, Fn&& field) {
  const auto H = static_cast<std::size_t>(h);
  const double step = kCurvatureDerivativeStep * (1.0 + std::abs(x[H]));
  Point probe(x.begin(), x.end());
  auto at = [&](double offset) {
    probe[H] = x[H] + offset;
    return field(probe);
  };
  const Tensor p1 = at(step), m1 = at(-step), p2 = at(2.0 * step), m2 = at(-2.0 * step);
  return (1.0 / (12.0 * step)) * (8.0 * (p1 - m1) - (p2 - m2));
}

}  // namespace detail

/// ∇R is formed from five-point central differences of the curvature field
/// with step 1e-3·(1 + |x_h|); the connection's own torsion enters the
/// identity. FD error grows with the size of R, so callers compare the
/// residuals against tol·scale.
inline BianchiResidual bianchi_residual(const ChartManifold& m, ConnectionKind kind, std::span<const double> x,
                                        JetMode mode = JetMode::Analytic) {
  const int n = m.dim;
  const auto N = static_cast<std::size_t>(n);
  const LocalGeometry lg = local_geometry(m, x, mode);
  const ConnectionJet cj = connection_jet(lg, kind);
  const Tensor& G = cj.coeffs.gamma;
  const Tensor R = riemann_tensor(cj);
  const Tensor T = torsion(cj.coeffs);

  // dR(h, l, i, j, k) = ∂_h R^l_ijk
  const std::size_t r4 = N * N * N * N;
  std::vector<double> dR(N * r4);
  for (int h = 0; h < n; ++h) {
    const Tensor d = detail::central_derivative(x, h, [&](const Point& y) { return riemann(m, kind, y, mode).riemann; });
    std::copy(d.components().begin(), d.components().end(), dR.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(h) * r4));
  }
  auto idx4 = [N](int l, int i, int j, int k) {
    return ((static_cast<std::size_t>(l) * N + static_cast<std::size_t>(i)) * N + static_cast<std::size_t>(j)) * N +
           static_cast<std::size_t>(k);
  };
  // (∇_h R)^l_ijk
  auto nablaR = [&](int h, int l, int i, int j, int k) {
    double s = dR[static_cast<std::size_t>(h) * r4 + idx4(l, i, j, k)];
    for (int m2 = 0; m2 < n; ++m2) {
      s += G(l, h, m2) * R(m2, i, j, k) - G(m2, h, i) * R(l, m2, j, k) - G(m2, h, j) * R(l, i, m2, k) -
           G(m2, h, k) * R(l, i, j, m2);
    }
    return s;
  };
  auto torsion_term = [&](int h, int i, int j, int l, int k) {
    double s = 0.0;
    for (int m2 = 0; m2 < n; ++m2) s += T(m2, h, i) * R(l, m2, j, k);
    return s;
  };

  // The reduced form holds for the semi-symmetric family with φ → sign·φ.
  std::optional<double> sign;
  if (kind == ConnectionKind::SSNMC) sign = 1.0;
  if (kind == ConnectionKind::Dual) sign = -1.0;
  if (kind == ConnectionKind::LeviCivita) sign = 0.0;

  BianchiResidual out;
  out.scale = std::max(1.0, max_abs(R));
  for (double v : dR) out.scale = std::max(out.scale, std::abs(v));
  double reduced = 0.0;
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          for (int k = 0; k < n; ++k) {
            const double cyc_nabla = nablaR(h, l, i, j, k) + nablaR(i, l, j, h, k) + nablaR(j, l, h, i, k);
            const double cyc_torsion = torsion_term(h, i, j, l, k) + torsion_term(i, j, h, l, k) + torsion_term(j, h, i, l, k);
            out.identity = std::max(out.identity, std::abs(cyc_nabla + cyc_torsion));
            if (sign) {
              const double rhs = 2.0 * *sign *
                                 (lg.phi(h) * R(l, i, j, k) + lg.phi(i) * R(l, j, h, k) + lg.phi(j) * R(l, h, i, k));
              reduced = std::max(reduced, std::abs(cyc_nabla - rhs));
            }
          }
  if (sign) out.reduced_form = reduced;
  return out;
}

/// Two tangent vectors spanning a plane at a point.
struct PlaneSpec {
  std::vector<double> u;
  std::vector<double> v;
};

inline constexpr double kDegeneratePlaneGram = 1e-10;

/// k = g(R(u,v)v, u) / (g(u,u) g(v,v) − g(u,v)²).
inline double sectional(const CurvatureBundle& b, const Tensor& g, const PlaneSpec& plane) {
  const int n = g.dim();
  if (static_cast<int>(plane.u.size()) != n || static_cast<int>(plane.v.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "plane vectors have the wrong dimension");
  }
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += g(i, j) * a[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)];
    return s;
  };
  const double uu = dot(plane.u, plane.u), vv = dot(plane.v, plane.v), uv = dot(plane.u, plane.v);
  const double gram = uu * vv - uv * uv;
  if (!(gram > kDegeneratePlaneGram)) throw Error(ErrorKind::DegeneratePlane, "plane vectors are (nearly) parallel");
  double num = 0.0;
  const Tensor& R = b.riemann;
  for (int l = 0; l < n; ++l) {
    double gu = 0.0;  // g_lm u^m
    for (int m2 = 0; m2 < n; ++m2) gu += g(l, m2) * plane.u[static_cast<std::size_t>(m2)];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          num += R(l, i, j, k) * plane.u[static_cast<std::size_t>(i)] * plane.v[static_cast<std::size_t>(j)] *
                 plane.v[static_cast<std::size_t>(k)] * gu;
  }
  return num / gram;
}

/// P_ij = R^m_ijm.
inline Tensor volume_curvature(const CurvatureBundle& b) { return contract(b.riemann, 0, 3); }

inline Tensor volume_curvature(const ChartManifold& m, ConnectionKind kind, std::span<const double> x,
                               JetMode mode = JetMode::Analytic) {
  return volume_curvature(riemann(m, kind, x, mode));
}

/// Cyclic-sum, Ricci-symmetry and volume-curvature properties of the pair (∇, ∇*).
struct Lemma2Residuals {
  double cyclic_pair = 0.0;     // |R_(ijk) + R*_(ijk)|
  double ricci_pair = 0.0;      // |(R_jk + R*_jk) − (R_kj + R*_kj)|
  double cyclic_formula = 0.0;  // cyclic sums against their explicit ∇°φ form
  double cyclic_max = 0.0;      // max |R_(ijk)|
  double volume_max = 0.0;      // max |P_ij|
  struct Closed {
    double cyclic = 0.0;
    double cyclic_dual = 0.0;
    double ricci = 0.0;
    double ricci_dual = 0.0;
    double volume = 0.0;
    double volume_dual = 0.0;
    double max() const { return std::max({cyclic, cyclic_dual, ricci, ricci_dual, volume, volume_dual}); }
  };
  std::optional<Closed> closed;  // only when φ is flagged closed
};

inline Lemma2Residuals lemma2_residuals(const LocalGeometry& lg, const CurvatureTriple& t, bool phi_closed) {
  const int n = lg.dim;
  const std::array<int, 3> ijk{1, 2, 3};
  const Tensor cyc = cyclic_sum(t.ssnmc.riemann, ijk);
  const Tensor cyc_dual = cyclic_sum(t.dual.riemann, ijk);
  const Tensor ric_sum = t.ssnmc.ricci + t.dual.ricci;
  const Tensor grad = levi_civita_gradient(lg, t.christoffel);

  // δ^l_i(∇_k φ_j − ∇_j φ_k) + δ^l_j(∇_i φ_k − ∇_k φ_i) + δ^l_k(∇_j φ_i − ∇_i φ_j)
  const Tensor formula = Tensor::generate(n, t.ssnmc.riemann.variance(), [&](std::span<const int> x) {
    const int l = x[0], i = x[1], j = x[2], k = x[3];
    return (l == i ? grad(k, j) - grad(j, k) : 0.0) + (l == j ? grad(i, k) - grad(k, i) : 0.0) +
           (l == k ? grad(j, i) - grad(i, j) : 0.0);
  });

  Lemma2Residuals out;
  out.cyclic_pair = max_abs(cyc + cyc_dual);
  out.ricci_pair = max_abs_diff(ric_sum, permute(ric_sum, {1, 0}));
  out.cyclic_formula = std::max(max_abs_diff(cyc, formula), max_abs_diff(cyc_dual, -formula));
  out.cyclic_max = max_abs(cyc);
  const Tensor p = volume_curvature(t.ssnmc);
  const Tensor ps = volume_curvature(t.dual);
  out.volume_max = max_abs(p);
  if (phi_closed) {
    Lemma2Residuals::Closed c;
    c.cyclic = max_abs(cyc);
    c.cyclic_dual = max_abs(cyc_dual);
    c.ricci = max_abs_diff(t.ssnmc.ricci, permute(t.ssnmc.ricci, {1, 0}));
    c.ricci_dual = max_abs_diff(t.dual.ricci, permute(t.dual.ricci, {1, 0}));
    c.volume = max_abs(p);
    c.volume_dual = max_abs(ps);
    out.closed = c;
  }
  return out;
}

inline Lemma2Residuals lemma2_residuals(const LocalGeometry& lg, bool phi_closed) {
  return lemma2_residuals(lg, curvature_triple(lg), phi_closed);
}

enum class CheckStatus { Passed, Failed, HypothesisViolated, Skipped };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Passed: return "pass";
    case CheckStatus::Failed: return "fail";
    case CheckStatus::HypothesisViolated: return "hypothesis-violated";
    case CheckStatus::Skipped: return "skipped";
  }
  return "unknown";
}

/// Outcome of the constant-curvature characterisation for one point.
struct ConstantCurvatureReport {
  double k = 0.0;  // R / (n(n−1)) of ∇
  // forward direction
  CheckStatus forward = CheckStatus::Skipped;
  double constant_form = 0.0;       // |R − k(δg − δg)|
  double conjugate_symmetry = 0.0;  // |R − R*|
  double einstein = 0.0;            // |R_jk − (R/n) g_jk|
  double weyl = 0.0;                // max(|C|, |C*|)
  // converse direction
  CheckStatus converse = CheckStatus::Skipped;
  std::vector<std::string> violated;  // failed converse premises
  double reconstruction = 0.0;        // |R_rec − k(δg − δg)|
  double reconstruction_consistency = 0.0;  // |R − R_rec|
};

/// Forward: constant-curvature R implies conjugate symmetry, Einstein Ricci
/// and vanishing Weyl tensors. Converse: those three premises rebuild R as
/// (δ^l_i R_jk − δ^l_j R_ik + g_jk R_i^l − g_ik R_j^l)/(n−2)
///   + R/((n−1)(n−2)) (δ^l_j g_ik − δ^l_i g_jk),
/// which must equal the constant-curvature tensor with k = R/(n(n−1)).
inline ConstantCurvatureReport constant_curvature_checks(const CurvatureBundle& r, const CurvatureBundle& r_dual,
                                                         const Tensor& g, const Tensor& g_inv, double tol) {
  const int n = g.dim();
  detail::require_dim3(n, "constant_curvature_checks");
  ConstantCurvatureReport rep;
  rep.k = r.scalar / (n * (n - 1.0));
  rep.constant_form = max_abs_diff(r.riemann, constant_curvature_tensor(g, rep.k));
  rep.conjugate_symmetry = max_abs_diff(r.riemann, r_dual.riemann);
  rep.einstein = max_abs_diff(r.ricci, (r.scalar / n) * g);
  rep.weyl = std::max(max_abs(weyl(r, g, g_inv)), max_abs(weyl(r_dual, g, g_inv)));

  if (rep.constant_form <= tol) {
    const bool ok = rep.conjugate_symmetry <= tol && rep.einstein <= tol && rep.weyl <= tol;
    rep.forward = ok ? CheckStatus::Passed : CheckStatus::Failed;
  } else {
    rep.forward = CheckStatus::HypothesisViolated;
  }

  if (rep.conjugate_symmetry > tol) rep.violated.push_back("conjugate-symmetry");
  if (rep.weyl > tol) rep.violated.push_back("conformal-flatness");
  if (rep.einstein > tol) rep.violated.push_back("einstein");
  const Tensor rebuilt = (1.0 / (n - 2.0)) * detail::delta_metric_form(g, g_inv, r.ricci, 1.0, 1.0) +
                         (r.scalar / ((n - 1.0) * (n - 2.0))) * (-1.0 * detail::constant_curvature_form(g));
  rep.reconstruction = max_abs_diff(rebuilt, constant_curvature_tensor(g, rep.k));
  rep.reconstruction_consistency = max_abs_diff(rebuilt, r.riemann);
  if (!rep.violated.empty()) {
    rep.converse = CheckStatus::HypothesisViolated;
  } else {
    rep.converse = (rep.reconstruction <= tol && rep.reconstruction_consistency <= tol) ? CheckStatus::Passed
                                                                                        : CheckStatus::Failed;
  }
  return rep;
}

/// Tolerances of the three Schur stages.
struct SchurTolerances {
  double plane = 1e-8;   // stddev of k over planes at one point
  double point = 1e-6;   // max |k(p) − k(q)|
  double chain = 1e-4;   // contraction chain built from FD gradients of k
};

struct SchurReport {
  CheckStatus status = CheckStatus::Skipped;
  std::string reason;
  double plane_spread = 0.0;
  double point_spread = 0.0;
  double mean_curvature = 0.0;
  double chain_residual = 0.0;     // max |(n−2)(δ^l_i ∂_h k − δ^l_h ∂_i k)|, |(n−1)(n−2)∂_h k|
  double chain_consistency = 0.0;  // contractions of the cyclic ∂k expression vs their closed forms
  std::size_t points = 0;
  std::size_t planes_per_point = 0;
};

namespace detail {

inline PlaneSpec random_plane(int n, const Tensor& g, std::mt19937_64& rng) {
  for (;;) {
    PlaneSpec p{std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
    for (int a = 0; a < n; ++a) {
      p.u[static_cast<std::size_t>(a)] = uniform(rng, -1.0, 1.0);
      p.v[static_cast<std::size_t>(a)] = uniform(rng, -1.0, 1.0);
    }
    double uu = 0, vv = 0, uv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        uu += g(i, j) * p.u[static_cast<std::size_t>(i)] * p.u[static_cast<std::size_t>(j)];
        vv += g(i, j) * p.v[static_cast<std::size_t>(i)] * p.v[static_cast<std::size_t>(j)];
        uv += g(i, j) * p.u[static_cast<std::size_t>(i)] * p.v[static_cast<std::size_t>(j)];
      }
    if (uu * vv - uv * uv > 1e-3 * uu * vv) return p;
  }
}

// Contraction chain at one point given the gradient of k.
inline std::pair<double, double> schur_chain(const LocalGeometry& lg, const std::vector<double>& dk) {
  const int n = lg.dim;
  const Tensor& g = lg.g;
  auto dl = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  // E^l_hijk = ∂_h k(δ^l_i g_jk − δ^l_j g_ik) + ∂_i k(δ^l_j g_hk − δ^l_h g_jk) + ∂_j k(δ^l_h g_ik − δ^l_i g_hk)
  const Tensor E = Tensor::generate(n, {Slot::Upper, Slot::Lower, Slot::Lower, Slot::Lower, Slot::Lower},
                                    [&](std::span<const int> x) {
                                      const int l = x[0], h = x[1], i = x[2], j = x[3], k = x[4];
                                      const auto H = static_cast<std::size_t>(h), I = static_cast<std::size_t>(i),
                                                 J = static_cast<std::size_t>(j);
                                      return dk[H] * (dl(l, i) * g(j, k) - dl(l, j) * g(i, k)) +
                                             dk[I] * (dl(l, j) * g(h, k) - dl(l, h) * g(j, k)) +
                                             dk[J] * (dl(l, h) * g(i, k) - dl(l, i) * g(h, k));
                                    });
  const Tensor F = contract(raise(E, 3, lg.g_inv), 3, 4);  // (l, h, i)
  const Tensor Gv = contract(F, 0, 2);                       // (h)
  double magnitude = 0.0, consistency = 0.0;
  for (int l = 0; l < n; ++l)
    for (int h = 0; h < n; ++h)
      for (int i = 0; i < n; ++i) {
        const double closed = (n - 2.0) * (dl(l, i) * dk[static_cast<std::size_t>(h)] - dl(l, h) * dk[static_cast<std::size_t>(i)]);
        consistency = std::max(consistency, std::abs(F(l, h, i) - closed));
        magnitude = std::max(magnitude, std::abs(F(l, h, i)));
      }
  for (int h = 0; h < n; ++h) {
    const double closed = (n - 1.0) * (n - 2.0) * dk[static_cast<std::size_t>(h)];
    consistency = std::max(consistency, std::abs(Gv(h) - closed));
    magnitude = std::max(magnitude, std::abs(Gv(h)));
  }
  return {magnitude, consistency};
}

}  // namespace detail

/// Schur's theorem at sample scale: (a) sectional curvature independent of
/// the plane at every point, (b) then independent of the point, (c) the
/// contraction chain from the gradient of k vanishes.
inline SchurReport schur_check(const ChartManifold& m, ConnectionKind kind, const SamplePlan& plan,
                               JetMode mode = JetMode::Analytic, SchurTolerances tol = {},
                               std::size_t planes_per_point = 20) {
  SchurReport rep;
  rep.points = plan.points.size();
  rep.planes_per_point = planes_per_point;
  if (m.dim < 3) {
    rep.status = CheckStatus::Skipped;
    rep.reason = "requires n ≥ 3";
    return rep;
  }
  if (plan.points.empty()) throw Error(ErrorKind::InvalidParams, "schur_check needs at least one sample point");
  if (planes_per_point < 2) throw Error(ErrorKind::InvalidParams, "schur_check needs at least two planes per point");
  std::mt19937_64 rng(plan.seed ^ 0x5c4u);
  std::vector<double> k_at;
  for (const Point& x : plan.points) {
    const LocalGeometry lg = local_geometry(m, x, mode);
    const CurvatureBundle b = riemann(lg, kind);
    std::vector<double> ks(planes_per_point);
    for (double& k : ks) k = sectional(b, lg.g, detail::random_plane(m.dim, lg.g, rng));
    double mean = 0.0;
    for (double k : ks) mean += k;
    mean /= static_cast<double>(ks.size());
    double var = 0.0;
    for (double k : ks) var += (k - mean) * (k - mean);
    var /= static_cast<double>(ks.size());
    rep.plane_spread = std::max(rep.plane_spread, std::sqrt(var));
    k_at.push_back(mean);

    std::vector<double> dk(static_cast<std::size_t>(m.dim));
    auto k_of = [&](const Point& y) {
      const CurvatureBundle by = riemann(m, kind, y, mode);
      return Tensor::scalar(by.scalar / (m.dim * (m.dim - 1.0)), m.dim);
    };
    for (int h = 0; h < m.dim; ++h) dk[static_cast<std::size_t>(h)] = detail::central_derivative(x, h, k_of).value();
    const auto [magnitude, consistency] = detail::schur_chain(lg, dk);
    rep.chain_residual = std::max(rep.chain_residual, magnitude);
    rep.chain_consistency = std::max(rep.chain_consistency, consistency);
  }
  const auto [lo, hi] = std::minmax_element(k_at.begin(), k_at.end());
  rep.point_spread = *hi - *lo;
  double total = 0.0;
  for (double k : k_at) total += k;
  rep.mean_curvature = total / static_cast<double>(k_at.size());

  if (rep.plane_spread > tol.plane) {
    rep.status = CheckStatus::HypothesisViolated;
    rep.reason = "sectional curvature depends on the plane";
    return rep;
  }
  const bool ok = rep.point_spread <= tol.point && rep.chain_residual <= tol.chain && rep.chain_consistency <= tol.chain;
  rep.status = ok ? CheckStatus::Passed : CheckStatus::Failed;
  if (!ok) rep.reason = "sectional curvature varies between points";
  return rep;
}

}  // namespace ssnmc
