#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "ssnmc/chart.hpp"
#include "ssnmc/connections.hpp"
#include "ssnmc/curvature.hpp"
#include "ssnmc/tensor.hpp"

namespace ssnmc {

/// Scalar field σ of the rescaling g → e^{2σ} g.
struct ConformalFactor {
  Field sigma;
};

/// Manifold with metric e^{2σ} g; φ is carried over unchanged. Analytic
/// jets are kept when both g and σ have them.
inline ChartManifold conformal_metric(const ChartManifold& m, const ConformalFactor& f) {
  ChartManifold out = m;
  out.name = m.name + "/conformal";
  const Field g = m.metric;
  const Field s = f.sigma;
  FieldFn<double> value = [g, s](std::span<const double> x, std::span<double> o) {
    g.value_fn()(x, o);
    double sv = 0.0;
    s.value_fn()(x, std::span<double>(&sv, 1));
    const double e = std::exp(2.0 * sv);
    for (double& v : o) v *= e;
  };
  FieldFn<HyperDual> analytic;
  if (g.has_analytic() && s.has_analytic()) {
    analytic = [g, s](std::span<const HyperDual> x, std::span<HyperDual> o) {
      g.analytic_fn()(x, o);
      HyperDual sv;
      s.analytic_fn()(x, std::span<HyperDual>(&sv, 1));
      const HyperDual e = exp(2.0 * sv);
      for (HyperDual& v : o) v = v * e;
    };
  }
  out.metric = Field(m.dim, FieldShape::SymmetricForm, std::move(value), std::move(analytic));
  return out;
}

/// σ jets at one point with the gradient raised by the untransformed metric.
struct ConformalLocal {
  Jet sigma;         // value, σ_i, σ_ij
  Tensor sigma_up;   // σ^k = g^{kl} σ_l
  Tensor dsigma_up;  // ∂_m σ^k
};

inline ConformalLocal conformal_local(const ChartManifold& m, const ConformalFactor& f, const LocalGeometry& lg) {
  ConformalLocal cl{eval_jet(f.sigma, lg.at, 2, lg.mode, m.chart), Tensor(), Tensor()};
  const int n = lg.dim;
  const Tensor& ds = *cl.sigma.d1;
  const Tensor& d2s = *cl.sigma.d2;
  cl.sigma_up = raise(ds, 0, lg.g_inv);
  cl.dsigma_up = Tensor::generate(n, {Slot::Lower, Slot::Upper}, [&](std::span<const int> x) {
    const int m2 = x[0], k = x[1];
    double s = 0.0;
    for (int l = 0; l < n; ++l) s += lg.dg_inv(m2, k, l) * ds(l) + lg.g_inv(k, l) * d2s(m2, l);
    return s;
  });
  return cl;
}

/// Γ̄^k_ij = Γ^k_ij + σ_i δ^k_j + σ_j δ^k_i − g_ij σ^k applied to a connection
/// jet, with σ^k raised by the untransformed g.
inline ConnectionJet conformally_shift(const ConnectionJet& base, const LocalGeometry& lg, const ConformalLocal& cl,
                                       ConnectionKind kind) {
  const int n = lg.dim;
  const auto N = static_cast<std::size_t>(n);
  const Tensor& ds = *cl.sigma.d1;
  const Tensor& d2s = *cl.sigma.d2;
  std::vector<double> gamma(base.coeffs.gamma.components().begin(), base.coeffs.gamma.components().end());
  std::vector<double> dgamma(base.dgamma.components().begin(), base.dgamma.components().end());
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double dkj = k == j ? 1.0 : 0.0, dki = k == i ? 1.0 : 0.0;
        gamma[(k * N + i) * N + j] += ds(i) * dkj + ds(j) * dki - lg.g(i, j) * cl.sigma_up(k);
        for (int m2 = 0; m2 < n; ++m2) {
          dgamma[((m2 * N + k) * N + i) * N + j] += d2s(m2, i) * dkj + d2s(m2, j) * dki -
                                                    lg.dg(m2, i, j) * cl.sigma_up(k) - lg.g(i, j) * cl.dsigma_up(m2, k);
        }
      }
  return {{kind, Tensor(n, base.coeffs.gamma.variance(), std::move(gamma)), lg.at},
          Tensor(n, base.dgamma.variance(), std::move(dgamma))};
}

/// Transformed ∇ and ∇* jets at the point of `lg`.
inline std::pair<ConnectionJet, ConnectionJet> transformed_connection_jets(const LocalGeometry& lg,
                                                                          const ConformalLocal& cl) {
  return {conformally_shift(connection_jet(lg, ConnectionKind::SSNMC), lg, cl, ConnectionKind::ConformalSSNMC),
          conformally_shift(connection_jet(lg, ConnectionKind::Dual), lg, cl, ConnectionKind::ConformalDual)};
}

inline std::pair<ConnectionCoeffs, ConnectionCoeffs> transformed_connections(const ChartManifold& m,
                                                                            const ConformalFactor& f,
                                                                            std::span<const double> x,
                                                                            JetMode mode = JetMode::Analytic) {
  const LocalGeometry lg = local_geometry(m, x, mode);
  auto [a, b] = transformed_connection_jets(lg, conformal_local(m, f, lg));
  return {std::move(a.coeffs), std::move(b.coeffs)};
}

/// σ_ik = 2(∇°_i σ_k − σ_i σ_k + ½ g_ik σ_p σ^p).
inline Tensor sigma_aux(const LocalGeometry& lg, const ConformalLocal& cl, const Tensor& christoffel) {
  const int n = lg.dim;
  const Tensor& ds = *cl.sigma.d1;
  const Tensor& d2s = *cl.sigma.d2;
  double sq = 0.0;
  for (int p = 0; p < n; ++p) sq += ds(p) * cl.sigma_up(p);
  return Tensor::generate(n, {Slot::Lower, Slot::Lower}, [&](std::span<const int> x) {
    const int i = x[0], k = x[1];
    double hess = d2s(i, k);
    for (int m2 = 0; m2 < n; ++m2) hess -= christoffel(m2, i, k) * ds(m2);
    return 2.0 * (hess - ds(i) * ds(k) + 0.5 * lg.g(i, k) * sq);
  });
}

inline Tensor sigma_aux(const ChartManifold& m, const ConformalFactor& f, std::span<const double> x,
                        JetMode mode = JetMode::Analytic) {
  const LocalGeometry lg = local_geometry(m, x, mode);
  return sigma_aux(lg, conformal_local(m, f, lg), levi_civita(lg).gamma);
}

/// Curvatures before and after the rescaling at one point.
struct ConformalPointData {
  LocalGeometry lg;
  CurvatureTriple before;
  CurvatureBundle ssnmc_after;
  CurvatureBundle dual_after;
  Tensor g_after;
  Tensor g_after_inv;
  Tensor sigma_ik;
};

inline ConformalPointData conformal_point(const ChartManifold& m, const ConformalFactor& f, std::span<const double> x,
                                          JetMode mode) {
  LocalGeometry lg = local_geometry(m, x, mode);
  const ConformalLocal cl = conformal_local(m, f, lg);
  CurvatureTriple before = curvature_triple(lg);
  const auto [a, b] = transformed_connection_jets(lg, cl);
  const double e = std::exp(2.0 * cl.sigma.value.value());
  Tensor g_after = e * lg.g;
  Tensor g_after_inv = (1.0 / e) * lg.g_inv;
  Tensor s = sigma_aux(lg, cl, before.christoffel);
  CurvatureBundle ra = make_bundle(riemann_tensor(a), g_after_inv, a.coeffs.kind, lg.at);
  CurvatureBundle rb = make_bundle(riemann_tensor(b), g_after_inv, b.coeffs.kind, lg.at);
  return {std::move(lg), std::move(before), std::move(ra), std::move(rb), std::move(g_after), std::move(g_after_inv),
          std::move(s)};
}

/// U = R + R* as a bundle (Ricci contraction and scalar with the given inverse metric).
inline CurvatureBundle u_bundle(const CurvatureBundle& r, const CurvatureBundle& r_dual, const Tensor& g_inv) {
  return make_bundle(r.riemann + r_dual.riemann, g_inv, r.source, r.at);
}

/// max |Ū − (U + δ^l_j σ_ik − δ^l_i σ_jk + g_ik σ_j^l − g_jk σ_i^l)| with Ū
/// taken from the curvatures of the transformed connections.
inline double u_transform_residual(const ConformalPointData& d) {
  const Tensor u = d.before.ssnmc.riemann + d.before.dual.riemann;
  const Tensor u_bar = d.ssnmc_after.riemann + d.dual_after.riemann;
  const Tensor rhs = u + detail::delta_metric_form(d.lg.g, d.lg.g_inv, d.sigma_ik, -1.0, -1.0);
  return max_abs_diff(u_bar, rhs);
}

inline double u_transform_residual(const ChartManifold& m, const ConformalFactor& f, std::span<const double> x,
                                   JetMode mode = JetMode::Analytic) {
  return u_transform_residual(conformal_point(m, f, x, mode));
}

/// max |C(Ū) − C(U)|, each Weyl tensor formed with its own metric.
inline double weyl_u_residual(const ConformalPointData& d) {
  const CurvatureBundle u = u_bundle(d.before.ssnmc, d.before.dual, d.lg.g_inv);
  const CurvatureBundle u_bar = u_bundle(d.ssnmc_after, d.dual_after, d.g_after_inv);
  return max_abs_diff(weyl(u_bar, d.g_after, d.g_after_inv), weyl(u, d.lg.g, d.lg.g_inv));
}

struct WeylInvarianceReport {
  CheckStatus status = CheckStatus::Skipped;
  std::string reason;
  double residual = 0.0;                  // max |C(Ū) − C(U)|
  std::optional<double> curvature_form;   // max |C(R̄) − C(R)| when R = R* before and after
  std::string curvature_form_reason;
  std::size_t points = 0;
};

/// Weyl tensor of U = R + R* is unchanged by the rescaling. When the pair is
/// conjugate symmetric at every sample, both before and after, the Weyl
/// tensor of R itself is compared as well.
inline WeylInvarianceReport weyl_u_invariance(const ChartManifold& m, const ConformalFactor& f, const SamplePlan& plan,
                                              JetMode mode, double tol) {
  WeylInvarianceReport rep;
  rep.points = plan.points.size();
  if (m.dim < 3) {
    rep.reason = "requires n ≥ 3";
    return rep;
  }
  bool conjugate_symmetric = true;
  double curvature_form = 0.0;
  for (const Point& x : plan.points) {
    const ConformalPointData d = conformal_point(m, f, x, mode);
    rep.residual = std::max(rep.residual, weyl_u_residual(d));
    const double before = max_abs_diff(d.before.ssnmc.riemann, d.before.dual.riemann);
    const double after = max_abs_diff(d.ssnmc_after.riemann, d.dual_after.riemann);
    if (before > tol || after > tol) conjugate_symmetric = false;
    curvature_form = std::max(curvature_form, max_abs_diff(weyl(d.ssnmc_after, d.g_after, d.g_after_inv),
                                                           weyl(d.before.ssnmc, d.lg.g, d.lg.g_inv)));
  }
  if (conjugate_symmetric) {
    rep.curvature_form = curvature_form;
  } else {
    rep.curvature_form_reason = "R ≠ R* before or after the rescaling";
  }
  const bool ok = rep.residual <= tol && (!rep.curvature_form || *rep.curvature_form <= tol);
  rep.status = ok ? CheckStatus::Passed : CheckStatus::Failed;
  return rep;
}

}  // namespace ssnmc
