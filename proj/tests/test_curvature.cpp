#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "ssnmc/catalog.hpp"
#include "ssnmc/conformal.hpp"
#include "ssnmc/curvature.hpp"
#include "support.hpp"

using namespace ssnmc;
using Catch::Approx;

namespace {

const Variance kRiemann{Slot::Upper, Slot::Lower, Slot::Lower, Slot::Lower};

// R^l_ijk summed term by term from Γ and ∂Γ
Tensor riemann_loops(const ConnectionJet& c) {
  const Tensor& G = c.coeffs.gamma;
  const Tensor& dG = c.dgamma;
  const int n = G.dim();
  return Tensor::generate(n, kRiemann, [&](std::span<const int> x) {
    const int l = x[0], i = x[1], j = x[2], k = x[3];
    double s = dG(i, l, j, k) - dG(j, l, i, k);
    for (int m = 0; m < n; ++m) s += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
    return s;
  });
}

// SSNMC coefficients from metric and 1-form values only, with hand-rolled
// central differences for ∂g and a direct matrix inverse.
Tensor ssnmc_from_values(const ChartManifold& m, const Point& x) {
  const int n = m.dim;
  const double h = 1e-5;
  auto metric = [&](const Point& y) { return Tensor(n, {Slot::Lower, Slot::Lower}, m.metric.evaluate(y)); };
  std::vector<Tensor> dg;
  for (int a = 0; a < n; ++a) {
    Point p = x, q = x;
    p[static_cast<std::size_t>(a)] += h;
    q[static_cast<std::size_t>(a)] -= h;
    dg.push_back((1.0 / (2 * h)) * (metric(p) - metric(q)));
  }
  const Tensor g = metric(x);
  const Tensor gi = inverse_metric(g);
  const std::vector<double> phi = m.one_form.evaluate(x);
  std::vector<double> phi_up(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) phi_up[static_cast<std::size_t>(k)] += gi(k, l) * phi[static_cast<std::size_t>(l)];
  return Tensor::generate(n, {Slot::Upper, Slot::Lower, Slot::Lower}, [&](std::span<const int> idx) {
    const int k = idx[0], i = idx[1], j = idx[2];
    double s = 0.0;
    for (int l = 0; l < n; ++l) s += 0.5 * gi(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
    s += (k == i ? phi[static_cast<std::size_t>(j)] : 0.0) + g(i, j) * phi_up[static_cast<std::size_t>(k)];
    return s;
  });
}

Tensor riemann_from_values(const ChartManifold& m, const Point& x) {
  const int n = m.dim;
  const double h = 1e-4;
  std::vector<Tensor> dG;
  for (int a = 0; a < n; ++a) {
    Point p = x, q = x;
    p[static_cast<std::size_t>(a)] += h;
    q[static_cast<std::size_t>(a)] -= h;
    dG.push_back((1.0 / (2 * h)) * (ssnmc_from_values(m, p) - ssnmc_from_values(m, q)));
  }
  const Tensor G = ssnmc_from_values(m, x);
  return Tensor::generate(n, kRiemann, [&](std::span<const int> idx) {
    const int l = idx[0], i = idx[1], j = idx[2], k = idx[3];
    double s = dG[i](l, j, k) - dG[j](l, i, k);
    for (int p = 0; p < n; ++p) s += G(l, i, p) * G(p, j, k) - G(l, j, p) * G(p, i, k);
    return s;
  });
}

Tensor metric_at(const ChartManifold& m, const Point& x) {
  return Tensor(m.dim, {Slot::Lower, Slot::Lower}, m.metric.evaluate(x));
}

}  // namespace

TEST_CASE("round sphere curvature") {
  for (int n : {2, 3, 4}) {
    for (double r : {1.0, 2.0}) {
      const ChartManifold m = catalog_build("sphere", {.dim = n, .radius = r});
      for (const Point& x : make_sample_plan(m, 6, 1).points) {
        const LocalGeometry lg = local_geometry(m, x, JetMode::Analytic);
        const CurvatureBundle b = riemann(lg, ConnectionKind::LeviCivita);
        CHECK(max_abs_diff(b.riemann, constant_curvature_tensor(lg.g, 1.0 / (r * r))) <= 1e-10);
        CHECK(max_abs_diff(b.ricci, ((n - 1) / (r * r)) * lg.g) <= 1e-10);
        CHECK(b.scalar == Approx(n * (n - 1) / (r * r)).margin(1e-10));
      }
    }
  }
}

TEST_CASE("Riemann tensor matches explicit loops") {
  const ChartManifold m = catalog_build("random", {.dim = 4, .seed = 2, .phi = PhiMode::Generic});
  for (const Point& x : make_sample_plan(m, 6, 3).points) {
    const LocalGeometry lg = local_geometry(m, x, JetMode::Analytic);
    for (ConnectionKind kind : {ConnectionKind::LeviCivita, ConnectionKind::SSNMC, ConnectionKind::Dual}) {
      const ConnectionJet c = connection_jet(lg, kind);
      CHECK(max_abs_diff(riemann_tensor(c), riemann_loops(c)) <= 1e-13);
    }
  }
}

TEST_CASE("Riemann tensor matches a difference-only construction") {
  for (auto name : {"random", "hyperbolic"}) {
    const ChartManifold m = catalog_build(name, {.dim = 3, .seed = 8, .phi = PhiMode::Generic});
    for (const Point& x : make_sample_plan(m, 5, 4).points) {
      const CurvatureBundle b = riemann(m, ConnectionKind::SSNMC, x);
      const Tensor oracle = riemann_from_values(m, x);
      CHECK(max_abs_diff(b.riemann, oracle) <= 1e-5 * std::max(1.0, max_abs(oracle)));
    }
  }
}

TEST_CASE("Ricci and scalar contractions") {
  const ChartManifold m = catalog_build("random", {.dim = 3, .seed = 3, .phi = PhiMode::Generic});
  const Point x{0.1, 0.2, 0.3};
  const LocalGeometry lg = local_geometry(m, x, JetMode::Analytic);
  const CurvatureBundle b = riemann(lg, ConnectionKind::SSNMC);
  double scalar = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      double ric = 0.0;
      for (int l = 0; l < 3; ++l) ric += b.riemann(l, l, j, k);
      CHECK(b.ricci(j, k) == Approx(ric).margin(1e-14));
      scalar += lg.g_inv(j, k) * ric;
    }
  CHECK(b.scalar == Approx(scalar).margin(1e-13));
}

TEST_CASE("phi_aux") {
  const ChartManifold m = support::flat(2, {1.0, 0.0});
  const LocalGeometry lg = local_geometry(m, Point{0.0, 0.0}, JetMode::Analytic);
  const Tensor p = phi_aux(lg);
  CHECK(p(0, 0) == 1.5);
  CHECK(p(0, 1) == 0.0);
  CHECK(p(1, 1) == 0.5);
  CHECK(contract(raise(p, 0, lg.g_inv), 0, 1).value() == 2.0);
}

TEST_CASE("curvature decompositions") {
  for (auto name : kCatalogNames) {
    for (int n : {2, 3, 4}) {
      for (PhiMode phi : {PhiMode::Constant, PhiMode::Closed, PhiMode::Generic}) {
        const ChartManifold m = catalog_build(name, {.dim = n, .radius = 2.0, .seed = 5, .phi = phi});
        for (const Point& x : make_sample_plan(m, 4, 6).points) {
          const DecompositionResiduals d = decomposition_residuals(local_geometry(m, x, JetMode::Analytic));
          const double tol = 1e-9;
          CHECK(d.ssnmc_form <= tol);
          CHECK(d.dual_form <= tol);
          CHECK(d.ssnmc_form_matches == "ssnmc");
          CHECK(d.dual_form_matches == "dual");
          CHECK(d.difference <= tol);
          CHECK(d.curvature_sum <= tol);
          CHECK(d.ricci_sum <= tol);
          CHECK(d.trace <= tol);
          CHECK(d.phi_recovery.has_value() == (n >= 3));
          if (d.phi_recovery) CHECK(*d.phi_recovery <= tol);
        }
      }
    }
  }
}

TEST_CASE("Weyl tensors") {
  SECTION("sum of the pair equals twice the Levi-Civita Weyl tensor") {
    for (int n : {3, 4}) {
      const ChartManifold m = catalog_build("random", {.dim = n, .seed = 4, .phi = PhiMode::Generic});
      for (const Point& x : make_sample_plan(m, 6, 2).points)
        CHECK(lemma1_residual(local_geometry(m, x, JetMode::Analytic)) <= 1e-10);
    }
    const ChartManifold m2 = catalog_build("flat", {.dim = 2, .phi = PhiMode::Generic});
    CHECK_THROWS_MATCHES(lemma1_residual(local_geometry(m2, Point{0.0, 0.0}, JetMode::Analytic)), Error,
                         support::kind_is(ErrorKind::DimensionTooSmall));
  }

  SECTION("Levi-Civita Weyl tensor vanishes in dimension 3") {
    const ChartManifold m = catalog_build("random", {.dim = 3, .seed = 11});
    for (const Point& x : make_sample_plan(m, 6, 2).points) {
      const LocalGeometry lg = local_geometry(m, x, JetMode::Analytic);
      CHECK(max_abs(weyl(riemann(lg, ConnectionKind::LeviCivita), lg.g, lg.g_inv)) <= 1e-12);
    }
  }

  SECTION("conformally flat metric in dimension 4") {
    const ChartManifold flat = catalog_build("flat", {.dim = 4});
    const ConformalFactor f{Field::generic(4, FieldShape::Scalar, [](auto x, auto out) {
      using std::sin;
      out[0] = 0.2 * sin(x[0]) + 0.1 * x[1] * x[2] - 0.05 * x[3] * x[3];
    })};
    const ChartManifold m = conformal_metric(flat, f);
    for (const Point& x : make_sample_plan(m, 6, 2).points) {
      for (JetMode mode : {JetMode::Analytic, JetMode::FiniteDifference}) {
        const LocalGeometry lg = local_geometry(m, x, mode);
        const CurvatureBundle b = riemann(lg, ConnectionKind::LeviCivita);
        CHECK(max_abs(b.riemann) > 1e-3);
        CHECK(max_abs(weyl(b, lg.g, lg.g_inv)) <= 1e-5);
      }
    }
  }

  SECTION("conjugate symmetric pair shares the Levi-Civita Weyl tensor") {
    // constant φ on flat space: R = R*
    const ChartManifold m = support::flat(3, {0.4, -0.2, 0.7});
    const LocalGeometry lg = local_geometry(m, Point{0.1, 0.0, -0.3}, JetMode::Analytic);
    const CurvatureTriple t = curvature_triple(lg);
    CHECK(conjugate_symmetry_residual(t) <= 1e-14);
    CHECK(max_abs_diff(weyl(t.ssnmc, lg.g, lg.g_inv), weyl(t.levi_civita, lg.g, lg.g_inv)) <= 1e-14);
  }
}

TEST_CASE("dual curvature relation") {
  for (auto name : kCatalogNames) {
    const ChartManifold m = catalog_build(name, {.dim = 3, .radius = 2.0, .seed = 3, .phi = PhiMode::Generic});
    for (const Point& x : make_sample_plan(m, 5, 1).points) {
      const LocalGeometry lg = local_geometry(m, x, JetMode::Analytic);
      CHECK(dual_curvature_residual(lg, curvature_triple(lg)) <= 1e-10);
    }
  }
}

TEST_CASE("second Bianchi identity with torsion") {
  SECTION("Levi-Civita on the sphere") {
    const ChartManifold m = catalog_build("sphere", {.dim = 3, .radius = 1.0});
    for (const Point& x : make_sample_plan(m, 4, 1).points) {
      const BianchiResidual b = bianchi_residual(m, ConnectionKind::LeviCivita, x);
      CHECK(b.identity <= 1e-8 * b.scale);
      REQUIRE(b.reduced_form.has_value());
      CHECK(*b.reduced_form <= 1e-8 * b.scale);
    }
  }

  SECTION("semi-symmetric pair on a random metric") {
    const ChartManifold m = catalog_build("random", {.dim = 3, .seed = 6, .phi = PhiMode::Generic});
    for (const Point& x : make_sample_plan(m, 4, 1).points) {
      for (ConnectionKind kind : {ConnectionKind::SSNMC, ConnectionKind::Dual}) {
        const BianchiResidual b = bianchi_residual(m, kind, x);
        CHECK(b.scale >= 1.0);
        CHECK(b.identity <= 1e-6 * b.scale);
      }
    }
  }

  SECTION("linear phi on flat space") {
    // flat metric, φ = (y, 0, 0): the torsion term is needed to close the identity
    const ChartManifold m = support::manifold(3, support::identity_metric(3), [](auto x, auto out) {
      out[0] = x[1];
      out[1] = 0.0 * x[0];
      out[2] = 0.0 * x[0];
    });
    const BianchiResidual b = bianchi_residual(m, ConnectionKind::SSNMC, Point{0.2, 0.3, -0.1});
    CHECK(b.identity <= 1e-8 * b.scale);
  }
}

TEST_CASE("sectional curvature") {
  std::mt19937_64 rng(21);
  auto random_plane = [&](int n) {
    PlaneSpec p{std::vector<double>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
    for (int a = 0; a < n; ++a) {
      p.u[static_cast<std::size_t>(a)] = uniform(rng, -1.0, 1.0);
      p.v[static_cast<std::size_t>(a)] = uniform(rng, -1.0, 1.0);
    }
    return p;
  };
  struct Case {
    const char* name;
    double k;
  };
  for (Case c : {Case{"sphere", 1.0}, Case{"flat", 0.0}, Case{"hyperbolic", -1.0}}) {
    const ChartManifold m = catalog_build(c.name, {.dim = 3, .radius = 1.0});
    for (const Point& x : make_sample_plan(m, 4, 3).points) {
      const CurvatureBundle b = riemann(m, ConnectionKind::LeviCivita, x);
      const Tensor g = metric_at(m, x);
      for (int p = 0; p < 5; ++p) {
        const PlaneSpec plane = random_plane(3);
        CHECK(sectional(b, g, plane) == Approx(c.k).margin(1e-9));
      }
    }
  }

  SECTION("independent of the basis of the plane") {
    const ChartManifold m = catalog_build("random", {.dim = 4, .seed = 2});
    const Point x{0.1, -0.2, 0.3, 0.0};
    const CurvatureBundle b = riemann(m, ConnectionKind::LeviCivita, x);
    const Tensor g = metric_at(m, x);
    const PlaneSpec p = random_plane(4);
    PlaneSpec q = p;
    for (std::size_t a = 0; a < 4; ++a) {
      q.u[a] = 2.0 * p.u[a] + p.v[a];
      q.v[a] = -p.u[a] + 0.5 * p.v[a];
    }
    CHECK(sectional(b, g, q) == Approx(sectional(b, g, p)).epsilon(1e-10));
  }

  SECTION("degenerate planes") {
    const ChartManifold m = catalog_build("flat", {.dim = 3});
    const CurvatureBundle b = riemann(m, ConnectionKind::LeviCivita, Point{0, 0, 0});
    const Tensor g = metric_at(m, Point{0, 0, 0});
    CHECK_THROWS_MATCHES(sectional(b, g, PlaneSpec{{1, 2, 3}, {2, 4, 6}}), Error,
                         support::kind_is(ErrorKind::DegeneratePlane));
    CHECK_THROWS_MATCHES(sectional(b, g, PlaneSpec{{1, 2}, {0, 1}}), Error,
                         support::kind_is(ErrorKind::DimensionMismatch));
  }
}

TEST_CASE("volume curvature") {
  SECTION("rotational phi") {
    const ChartManifold m = support::manifold(2, support::identity_metric(2), [](auto x, auto out) {
      out[0] = -0.5 * x[1];
      out[1] = 0.5 * x[0];
    });
    const Tensor p = volume_curvature(m, ConnectionKind::SSNMC, Point{0.3, -0.4});
    CHECK(p(0, 1) == Approx(2.0).margin(1e-12));
    CHECK(p(1, 0) == Approx(-2.0).margin(1e-12));
  }

  SECTION("closed phi") {
    const ChartManifold m = support::manifold(
        2, support::identity_metric(2),
        [](auto x, auto out) {
          out[0] = x[0] * x[0];
          out[1] = 0.0 * x[0];
        },
        true);
    CHECK(max_abs(volume_curvature(m, ConnectionKind::SSNMC, Point{0.3, -0.4})) <= 1e-12);
    CHECK(max_abs(volume_curvature(m, ConnectionKind::Dual, Point{0.3, -0.4})) <= 1e-12);
  }
}

TEST_CASE("cyclic sums and Ricci symmetry of the pair") {
  for (auto name : kCatalogNames) {
    for (int n : {2, 3, 4}) {
      const ChartManifold generic = catalog_build(name, {.dim = n, .radius = 2.0, .seed = 9, .phi = PhiMode::Generic});
      const ChartManifold closed = catalog_build(name, {.dim = n, .radius = 2.0, .seed = 9, .phi = PhiMode::Closed});
      for (const Point& x : make_sample_plan(generic, 4, 2).points) {
        const Lemma2Residuals a = lemma2_residuals(local_geometry(generic, x, JetMode::Analytic), generic.one_form_closed);
        CHECK(a.cyclic_pair <= 1e-10);
        CHECK(a.ricci_pair <= 1e-10);
        CHECK(a.cyclic_formula <= 1e-10);
        CHECK_FALSE(a.closed.has_value());
        // a vector-valued 3-form, identically zero in dimension 2
        if (n >= 3) CHECK(a.cyclic_max > 1e-6);
        CHECK(a.volume_max > 1e-6);

        const Lemma2Residuals b = lemma2_residuals(local_geometry(closed, x, JetMode::Analytic), closed.one_form_closed);
        REQUIRE(b.closed.has_value());
        CHECK(b.closed->max() <= 1e-10);
      }
    }
  }
}

TEST_CASE("constant curvature characterisation") {
  SECTION("sphere") {
    const ChartManifold m = catalog_build("sphere", {.dim = 3, .radius = 2.0});
    const LocalGeometry lg = local_geometry(m, Point{1.0, 1.2, 0.4}, JetMode::Analytic);
    const CurvatureTriple t = curvature_triple(lg);
    const ConstantCurvatureReport r = constant_curvature_checks(t.ssnmc, t.dual, lg.g, lg.g_inv, 1e-9);
    CHECK(r.k == Approx(0.25).margin(1e-12));
    CHECK(r.forward == CheckStatus::Passed);
    CHECK(r.converse == CheckStatus::Passed);
    CHECK(r.violated.empty());
  }

  SECTION("flat") {
    const ChartManifold m = catalog_build("flat", {.dim = 4});
    const LocalGeometry lg = local_geometry(m, Point{0.1, 0.2, 0.3, 0.4}, JetMode::Analytic);
    const CurvatureTriple t = curvature_triple(lg);
    const ConstantCurvatureReport r = constant_curvature_checks(t.ssnmc, t.dual, lg.g, lg.g_inv, 1e-9);
    CHECK(r.k == 0.0);
    CHECK(r.forward == CheckStatus::Passed);
    CHECK(r.converse == CheckStatus::Passed);
  }

  SECTION("non-Einstein metric") {
    const ChartManifold m = catalog_build("random", {.dim = 3, .seed = 1});
    const LocalGeometry lg = local_geometry(m, Point{0.1, 0.2, 0.3}, JetMode::Analytic);
    const CurvatureTriple t = curvature_triple(lg);
    const ConstantCurvatureReport r = constant_curvature_checks(t.ssnmc, t.dual, lg.g, lg.g_inv, 1e-9);
    CHECK(r.forward == CheckStatus::HypothesisViolated);
    CHECK(r.converse == CheckStatus::HypothesisViolated);
    CHECK(std::find(r.violated.begin(), r.violated.end(), "einstein") != r.violated.end());
  }

  SECTION("dimension 2 is rejected") {
    const ChartManifold m = catalog_build("flat", {.dim = 2});
    const LocalGeometry lg = local_geometry(m, Point{0.0, 0.0}, JetMode::Analytic);
    const CurvatureTriple t = curvature_triple(lg);
    CHECK_THROWS_MATCHES(constant_curvature_checks(t.ssnmc, t.dual, lg.g, lg.g_inv, 1e-9), Error,
                         support::kind_is(ErrorKind::DimensionTooSmall));
  }
}

TEST_CASE("Schur check") {
  SECTION("round spheres") {
    for (int n : {3, 4}) {
      const ChartManifold m = catalog_build("sphere", {.dim = n, .radius = 2.0});
      const SchurReport r = schur_check(m, ConnectionKind::SSNMC, make_sample_plan(m, 10, 1));
      CHECK(r.status == CheckStatus::Passed);
      CHECK(r.plane_spread <= 1e-8);
      CHECK(r.point_spread <= 1e-6);
      CHECK(r.mean_curvature == Approx(0.25).margin(1e-6));
      CHECK(r.chain_residual <= 1e-4);
    }
  }

  SECTION("dimension 2 is skipped") {
    const ChartManifold m = catalog_build("sphere", {.dim = 2});
    const SchurReport r = schur_check(m, ConnectionKind::SSNMC, make_sample_plan(m, 3, 1));
    CHECK(r.status == CheckStatus::Skipped);
    CHECK(r.reason == "requires n ≥ 3");
  }

  SECTION("anisotropic metric violates the hypothesis") {
    const ChartManifold m = catalog_build("random", {.dim = 3, .seed = 4});
    const SchurReport r = schur_check(m, ConnectionKind::SSNMC, make_sample_plan(m, 5, 1));
    CHECK(r.status == CheckStatus::HypothesisViolated);
    CHECK(r.plane_spread > 1e-8);
  }

  SECTION("argument validation") {
    const ChartManifold m = catalog_build("sphere", {.dim = 3});
    CHECK_THROWS_MATCHES(schur_check(m, ConnectionKind::SSNMC, SamplePlan{}), Error,
                         support::kind_is(ErrorKind::InvalidParams));
    CHECK_THROWS_MATCHES(schur_check(m, ConnectionKind::SSNMC, make_sample_plan(m, 2, 1), JetMode::Analytic, {}, 1),
                         Error, support::kind_is(ErrorKind::InvalidParams));
  }
}
