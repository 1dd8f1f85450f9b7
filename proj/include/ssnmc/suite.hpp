#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ssnmc/catalog.hpp"
#include "ssnmc/chart.hpp"
#include "ssnmc/conformal.hpp"
#include "ssnmc/connections.hpp"
#include "ssnmc/curvature.hpp"
#include "ssnmc/error.hpp"

namespace ssnmc {

enum class CheckId {
  LeviCivitaMetricity,
  SsnmcMetricity,
  SsnmcTorsion,
  DualMetricity,
  DualTorsion,
  DualNegatedPhi,
  CurvatureSsnmc,
  CurvatureDual,
  CurvatureDifference,
  CurvatureSum,
  RicciSum,
  ScalarTrace,
  PhiAuxRecovery,
  Lemma1,
  Corollary2,
  Lemma2Pair,
  Lemma2Formula,
  Lemma2Closed,
  VolumeControl,
  DualCurvature,
  Bianchi,
  Schur,
  Theorem3Forward,
  Theorem3Converse,
  ConformalConnection,
  ConformalU,
  WeylUInvariance,
  Corollary1,
  WeylDim3,
  JetCrossCheck,
};

struct CheckSpec {
  CheckId id;
  std::string_view name;
  std::string_view anchor;
  std::string_view summary;
};

inline constexpr std::array<CheckSpec, 30> kChecks{{
    {CheckId::LeviCivitaMetricity, "levi_civita_metricity", "Eq. (6)", "∇°g = 0"},
    {CheckId::SsnmcMetricity, "ssnmc_metricity", "Eq. (5)", "∇_k g_ij = −2φ_i g_kj − 2φ_j g_ki"},
    {CheckId::SsnmcTorsion, "ssnmc_torsion", "Eq. (5)", "T^k_ij = φ_j δ^k_i − φ_i δ^k_j"},
    {CheckId::DualMetricity, "dual_metricity", "Eq. (7)", "∇*_k g_ij = 2φ_i g_kj + 2φ_j g_ki"},
    {CheckId::DualTorsion, "dual_torsion", "Eq. (7)", "T*^k_ij = φ_j δ^k_i − φ_i δ^k_j as displayed"},
    {CheckId::DualNegatedPhi, "dual_negated_phi", "Eqs. (6), (8)", "∇* built from φ equals ∇ built from −φ"},
    {CheckId::CurvatureSsnmc, "curvature_ssnmc", "Eq. (9)", "R = K + ∇°φ terms + φφ terms"},
    {CheckId::CurvatureDual, "curvature_dual", "Eq. (10)", "R* = K − ∇°φ terms + φφ terms"},
    {CheckId::CurvatureDifference, "curvature_difference", "Eq. (11)", "difference of the two curvatures"},
    {CheckId::CurvatureSum, "curvature_sum", "Eq. (13)", "R + R* = 2(K + φ_jk terms)"},
    {CheckId::RicciSum, "ricci_sum", "Eq. (14)", "R_jk + R*_jk = 2(K_jk + (n−2)φ_jk + g_jk φ_i^i)"},
    {CheckId::ScalarTrace, "scalar_trace", "Eq. (*)", "φ_i^i = (R + R* − 2K)/(4(n−1))"},
    {CheckId::PhiAuxRecovery, "phi_aux_recovery", "Eq. (15)", "φ_jk recovered from Ricci tensors"},
    {CheckId::Lemma1, "lemma1", "Eq. (12)", "C + C* = 2C°"},
    {CheckId::Corollary2, "corollary2", "Corollary 2", "R = R* implies C = C°"},
    {CheckId::Lemma2Pair, "lemma2_pair", "Lemma 2 (1), (2)", "R_(ijk) + R*_(ijk) = 0 and symmetric Ricci sum"},
    {CheckId::Lemma2Formula, "lemma2_formula", "Lemma 2", "cyclic sums against their ∇°φ form"},
    {CheckId::Lemma2Closed, "lemma2_closed", "Lemma 2 (3)", "closed φ: zero cyclic sums, symmetric Ricci, P = 0"},
    {CheckId::VolumeControl, "volume_curvature_control", "Lemma 2 (3)", "non-closed φ: P ≠ 0"},
    {CheckId::DualCurvature, "dual_curvature", "Theorem 3", "R_ijkl = −R*_ijlk"},
    {CheckId::Bianchi, "bianchi", "Theorem 1", "second Bianchi identity with torsion"},
    {CheckId::Schur, "schur", "Theorem 1", "isotropic sectional curvature is constant"},
    {CheckId::Theorem3Forward, "theorem3_forward", "Theorem 3", "constant curvature implies conjugate symmetric, Einstein, C = 0"},
    {CheckId::Theorem3Converse, "theorem3_converse", "Theorem 3", "conjugate symmetric, Einstein, C = 0 implies constant curvature"},
    {CheckId::ConformalConnection, "conformal_connection", "Eq. (16)", "transformed ∇ is the SSNMC of e^{2σ}g"},
    {CheckId::ConformalU, "conformal_u", "Eq. (18)", "Ū = U + σ_ik terms"},
    {CheckId::WeylUInvariance, "weyl_u_invariance", "Theorem 4", "C(Ū) = C(U)"},
    {CheckId::Corollary1, "corollary1", "Corollary 1", "R = R* before and after implies C(R̄) = C(R)"},
    {CheckId::WeylDim3, "weyl_dim3", "Weyl, n = 3", "Levi-Civita Weyl tensor vanishes in dimension 3"},
    {CheckId::JetCrossCheck, "jet_cross_check", "FD oracle", "analytic and FD curvature agree"},
}};

inline std::optional<CheckId> parse_check(std::string_view name) {
  for (const CheckSpec& c : kChecks)
    if (c.name == name) return c.id;
  return std::nullopt;
}

inline const CheckSpec& check_spec(CheckId id) { return kChecks[static_cast<std::size_t>(id)]; }

inline constexpr double kBianchiTolerance = 1e-4;
inline constexpr double kCrossCheckTolerance = 1e-4;

struct SuiteConfig {
  std::string manifold = "flat";
  CatalogParams params;
  std::optional<SigmaMode> sigma;  // unset: linear, quadratic and trig
  std::size_t points = 25;
  double tol_analytic = 1e-9;
  double tol_fd = 1e-5;
  std::vector<CheckId> checks;  // empty: all
  std::vector<JetMode> modes{JetMode::Analytic, JetMode::FiniteDifference};
  unsigned threads = 0;  // 0: hardware concurrency
};

inline void validate(const SuiteConfig& cfg) {
  if (std::find(kCatalogNames.begin(), kCatalogNames.end(), cfg.manifold) == kCatalogNames.end())
    throw Error(ErrorKind::ConfigError, "unknown manifold '" + cfg.manifold + "'");
  if (cfg.points < 1) throw Error(ErrorKind::ConfigError, "points must be at least 1");
  if (!(cfg.tol_analytic > 0.0) || !(cfg.tol_fd > 0.0)) throw Error(ErrorKind::ConfigError, "tolerances must be positive");
  if (cfg.params.dim < 2 || cfg.params.dim > 8) throw Error(ErrorKind::ConfigError, "dim must be in [2, 8]");
  if (!(cfg.params.radius > 0.0)) throw Error(ErrorKind::ConfigError, "radius must be positive");
  if (cfg.modes.empty()) throw Error(ErrorKind::ConfigError, "no jet mode selected");
}

struct CheckResult {
  CheckId id{};
  CheckStatus status = CheckStatus::Skipped;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::size_t samples = 0;
  std::string reason;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  bool failed() const { return status == CheckStatus::Failed; }
};

struct SuiteRun {
  std::string manifold;
  int dim = 0;
  double radius = 1.0;
  PhiMode phi = PhiMode::Zero;
  std::vector<SigmaMode> sigmas;
  std::uint64_t seed = 0;
  std::size_t points = 0;
  JetMode mode = JetMode::Analytic;
  double tolerance = 0.0;
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.failed(); });
  }
};

struct VerificationReport {
  std::vector<SuiteRun> runs;
  std::string generated_at;

  bool passed() const {
    return std::all_of(runs.begin(), runs.end(), [](const SuiteRun& r) { return r.passed(); });
  }
};

namespace detail {

struct PointOutcome {
  enum class State { Evaluated, NotApplicable, PremiseFailed, Error };
  State state = State::NotApplicable;
  double residual = 0.0;
  std::string note;
};

inline PointOutcome evaluated(double r) { return {PointOutcome::State::Evaluated, r, {}}; }
inline PointOutcome not_applicable(std::string why) { return {PointOutcome::State::NotApplicable, 0.0, std::move(why)}; }
inline PointOutcome premise_failed(std::string why) { return {PointOutcome::State::PremiseFailed, 0.0, std::move(why)}; }

inline constexpr std::string_view kNeedsDim3 = "requires n ≥ 3";

struct RunContext {
  const ChartManifold& m;
  const ChartManifold& m_negated;
  const std::vector<ConformalFactor>& sigmas;
  const std::vector<ChartManifold>& rescaled;
  JetMode mode;
  double tol;
};

inline std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ", ";
    out += p;
  }
  return out;
}

inline double jet_difference(const ConnectionJet& a, const ConnectionJet& b) {
  return std::max(max_abs_diff(a.coeffs.gamma, b.coeffs.gamma), max_abs_diff(a.dgamma, b.dgamma));
}

inline std::vector<PointOutcome> evaluate_point(const RunContext& ctx, const Point& x) {
  constexpr std::size_t count = kChecks.size();
  std::vector<PointOutcome> out(count);
  auto set = [&](CheckId id, PointOutcome o) { out[static_cast<std::size_t>(id)] = std::move(o); };
  auto guarded = [&](CheckId id, auto&& fn) {
    try {
      set(id, fn());
    } catch (const std::exception& e) {
      set(id, {PointOutcome::State::Error, 0.0, e.what()});
    }
  };

  const ChartManifold& m = ctx.m;
  const int n = m.dim;
  const double tol = ctx.tol;
  std::optional<LocalGeometry> lg_opt;
  try {
    lg_opt = local_geometry(m, x, ctx.mode);
  } catch (const std::exception& e) {
    for (auto& o : out) o = {PointOutcome::State::Error, 0.0, e.what()};
    return out;
  }
  const LocalGeometry& lg = *lg_opt;
  const CurvatureTriple t = curvature_triple(lg);

  guarded(CheckId::LeviCivitaMetricity, [&] { return evaluated(max_abs(nabla_g(levi_civita(lg), lg))); });
  guarded(CheckId::SsnmcMetricity,
          [&] { return evaluated(max_abs_diff(nabla_g(ssnmc(lg), lg), predicted_nabla_g(lg, 1.0))); });
  guarded(CheckId::SsnmcTorsion,
          [&] { return evaluated(max_abs_diff(torsion(ssnmc(lg)), semi_symmetric_torsion(lg))); });
  guarded(CheckId::DualMetricity,
          [&] { return evaluated(max_abs_diff(nabla_g(dual(lg), lg), predicted_nabla_g(lg, -1.0))); });
  guarded(CheckId::DualTorsion,
          [&] { return evaluated(max_abs_diff(torsion(dual(lg)), semi_symmetric_torsion(lg))); });
  guarded(CheckId::DualNegatedPhi, [&] {
    const LocalGeometry neg = local_geometry(ctx.m_negated, x, ctx.mode);
    return evaluated(jet_difference(connection_jet(lg, ConnectionKind::Dual), connection_jet(neg, ConnectionKind::SSNMC)));
  });

  std::optional<DecompositionResiduals> dec;
  try {
    dec = decomposition_residuals(lg, t);
  } catch (const std::exception& e) {
    for (CheckId id : {CheckId::CurvatureSsnmc, CheckId::CurvatureDual, CheckId::CurvatureDifference, CheckId::CurvatureSum,
                       CheckId::RicciSum, CheckId::ScalarTrace, CheckId::PhiAuxRecovery})
      set(id, {PointOutcome::State::Error, 0.0, e.what()});
  }
  if (dec) {
    set(CheckId::CurvatureSsnmc, evaluated(dec->ssnmc_form));
    set(CheckId::CurvatureDual, evaluated(dec->dual_form));
    set(CheckId::CurvatureDifference, evaluated(dec->difference));
    set(CheckId::CurvatureSum, evaluated(dec->curvature_sum));
    set(CheckId::RicciSum, evaluated(dec->ricci_sum));
    set(CheckId::ScalarTrace, evaluated(dec->trace));
    set(CheckId::PhiAuxRecovery, dec->phi_recovery ? evaluated(*dec->phi_recovery) : not_applicable(std::string(kNeedsDim3)));
  }

  guarded(CheckId::Lemma1, [&] {
    if (n < 3) return not_applicable(std::string(kNeedsDim3));
    return evaluated(lemma1_residual(lg, t));
  });
  guarded(CheckId::Corollary2, [&] {
    if (n < 3) return not_applicable(std::string(kNeedsDim3));
    if (conjugate_symmetry_residual(t) > tol) return premise_failed("R ≠ R*");
    return evaluated(max_abs_diff(weyl(t.ssnmc, lg.g, lg.g_inv), weyl(t.levi_civita, lg.g, lg.g_inv)));
  });

  std::optional<Lemma2Residuals> l2;
  try {
    l2 = lemma2_residuals(lg, t, m.one_form_closed);
  } catch (const std::exception& e) {
    for (CheckId id : {CheckId::Lemma2Pair, CheckId::Lemma2Formula, CheckId::Lemma2Closed, CheckId::VolumeControl})
      set(id, {PointOutcome::State::Error, 0.0, e.what()});
  }
  if (l2) {
    set(CheckId::Lemma2Pair, evaluated(std::max(l2->cyclic_pair, l2->ricci_pair)));
    set(CheckId::Lemma2Formula, evaluated(l2->cyclic_formula));
    set(CheckId::Lemma2Closed, l2->closed ? evaluated(l2->closed->max()) : not_applicable("requires closed φ"));
    set(CheckId::VolumeControl, m.one_form_closed ? not_applicable("requires non-closed φ") : evaluated(l2->volume_max));
  }

  guarded(CheckId::DualCurvature, [&] { return evaluated(dual_curvature_residual(lg, t)); });
  guarded(CheckId::Bianchi, [&] {
    double worst = 0.0;
    for (ConnectionKind kind : {ConnectionKind::LeviCivita, ConnectionKind::SSNMC, ConnectionKind::Dual}) {
      const BianchiResidual b = bianchi_residual(m, kind, x, ctx.mode);
      worst = std::max(worst, b.identity / b.scale);
      if (b.reduced_form) worst = std::max(worst, *b.reduced_form / b.scale);
    }
    return evaluated(worst);
  });

  guarded(CheckId::Theorem3Forward, [&] {
    if (n < 3) return not_applicable(std::string(kNeedsDim3));
    const ConstantCurvatureReport r = constant_curvature_checks(t.ssnmc, t.dual, lg.g, lg.g_inv, tol);
    if (r.forward == CheckStatus::HypothesisViolated) return premise_failed("curvature is not of constant-curvature form");
    return evaluated(std::max({r.conjugate_symmetry, r.einstein, r.weyl}));
  });
  guarded(CheckId::Theorem3Converse, [&] {
    if (n < 3) return not_applicable(std::string(kNeedsDim3));
    const ConstantCurvatureReport r = constant_curvature_checks(t.ssnmc, t.dual, lg.g, lg.g_inv, tol);
    if (r.converse == CheckStatus::HypothesisViolated) return premise_failed("violated: " + join(r.violated));
    return evaluated(std::max(r.reconstruction, r.reconstruction_consistency));
  });

  guarded(CheckId::ConformalConnection, [&] {
    double worst = 0.0;
    for (std::size_t s = 0; s < ctx.sigmas.size(); ++s) {
      const ConformalLocal cl = conformal_local(m, ctx.sigmas[s], lg);
      const auto [a, b] = transformed_connection_jets(lg, cl);
      const LocalGeometry bar = local_geometry(ctx.rescaled[s], x, ctx.mode);
      worst = std::max(worst, jet_difference(a, connection_jet(bar, ConnectionKind::SSNMC)));
      worst = std::max(worst, jet_difference(b, connection_jet(bar, ConnectionKind::Dual)));
    }
    return evaluated(worst);
  });

  // Conformal checks share one ConformalPointData per σ.
  std::vector<ConformalPointData> cps;
  std::string conformal_error;
  try {
    for (const ConformalFactor& f : ctx.sigmas) cps.push_back(conformal_point(m, f, x, ctx.mode));
  } catch (const std::exception& e) {
    conformal_error = e.what();
  }
  auto conformal = [&](CheckId id, auto&& fn) {
    if (!conformal_error.empty()) {
      set(id, {PointOutcome::State::Error, 0.0, conformal_error});
      return;
    }
    guarded(id, fn);
  };
  conformal(CheckId::ConformalU, [&] {
    double worst = 0.0;
    for (const auto& d : cps) worst = std::max(worst, u_transform_residual(d));
    return evaluated(worst);
  });
  conformal(CheckId::WeylUInvariance, [&] {
    if (n < 3) return not_applicable(std::string(kNeedsDim3));
    double worst = 0.0;
    for (const auto& d : cps) worst = std::max(worst, weyl_u_residual(d));
    return evaluated(worst);
  });
  conformal(CheckId::Corollary1, [&] {
    if (n < 3) return not_applicable(std::string(kNeedsDim3));
    double worst = 0.0;
    bool any = false;
    for (const auto& d : cps) {
      const double before = max_abs_diff(d.before.ssnmc.riemann, d.before.dual.riemann);
      const double after = max_abs_diff(d.ssnmc_after.riemann, d.dual_after.riemann);
      if (before > tol || after > tol) continue;
      any = true;
      worst = std::max(worst, max_abs_diff(weyl(d.ssnmc_after, d.g_after, d.g_after_inv),
                                           weyl(d.before.ssnmc, d.lg.g, d.lg.g_inv)));
    }
    if (!any) return premise_failed("R ≠ R* before or after the rescaling");
    return evaluated(worst);
  });

  guarded(CheckId::WeylDim3, [&] {
    if (n != 3) return not_applicable("requires n = 3");
    return evaluated(max_abs(weyl(t.levi_civita, lg.g, lg.g_inv)));
  });
  guarded(CheckId::JetCrossCheck, [&] {
    if (ctx.mode != JetMode::Analytic) return not_applicable("reported with analytic jets");
    if (!m.metric.has_analytic() || !m.one_form.has_analytic()) return not_applicable("fields have no analytic jets");
    const CurvatureTriple fd = curvature_triple(local_geometry(m, x, JetMode::FiniteDifference));
    return evaluated(std::max({max_abs_diff(t.levi_civita.riemann, fd.levi_civita.riemann),
                               max_abs_diff(t.ssnmc.riemann, fd.ssnmc.riemann),
                               max_abs_diff(t.dual.riemann, fd.dual.riemann)}));
  });
  return out;
}

inline double tolerance_for(CheckId id, double tol) {
  switch (id) {
    case CheckId::Bianchi: return kBianchiTolerance;
    case CheckId::JetCrossCheck: return kCrossCheckTolerance;
    case CheckId::VolumeControl: return 10.0 * tol;
    default: return tol;
  }
}

inline CheckResult reduce(CheckId id, const std::vector<std::vector<PointOutcome>>& per_point, double tol) {
  using State = PointOutcome::State;
  CheckResult r;
  r.id = id;
  r.tolerance = tolerance_for(id, tol);
  const auto idx = static_cast<std::size_t>(id);
  std::size_t premise_failures = 0;
  std::string first_na, first_premise, first_error;
  double min_residual = 0.0;
  for (const auto& point : per_point) {
    const PointOutcome& o = point[idx];
    switch (o.state) {
      case State::Evaluated:
        min_residual = r.samples == 0 ? o.residual : std::min(min_residual, o.residual);
        r.max_residual = std::max(r.max_residual, o.residual);
        ++r.samples;
        break;
      case State::NotApplicable:
        if (first_na.empty()) first_na = o.note;
        break;
      case State::PremiseFailed:
        ++premise_failures;
        if (first_premise.empty()) first_premise = o.note;
        break;
      case State::Error:
        if (first_error.empty()) first_error = o.note;
        break;
    }
  }
  if (!first_error.empty()) {
    r.status = CheckStatus::Failed;
    r.reason = "error: " + first_error;
    return r;
  }
  if (r.samples == 0) {
    r.status = premise_failures > 0 ? CheckStatus::HypothesisViolated : CheckStatus::Skipped;
    r.reason = premise_failures > 0 ? first_premise : first_na;
    return r;
  }
  if (premise_failures > 0) {
    r.details["premise_failed_points"] = premise_failures;
    r.details["premise"] = first_premise;
  }
  if (id == CheckId::VolumeControl) {
    // Negative control: the largest |P_ij| must stand clear of the tolerance.
    r.status = r.max_residual > r.tolerance ? CheckStatus::Passed : CheckStatus::Failed;
    if (r.failed()) r.reason = "volume curvature vanishes for a non-closed φ";
    return r;
  }
  r.status = r.max_residual <= r.tolerance ? CheckStatus::Passed : CheckStatus::Failed;
  if (r.failed()) r.reason = "residual above tolerance";
  if (id == CheckId::DualTorsion && r.failed()) r.reason = "residual above tolerance; torsion of ∇* is the negative of the displayed form";
  return r;
}

inline CheckResult run_schur(const ChartManifold& m, const SamplePlan& plan, JetMode mode, double tol) {
  CheckResult r;
  r.id = CheckId::Schur;
  SchurTolerances st;
  if (mode == JetMode::FiniteDifference) st = {tol, tol, st.chain};
  r.tolerance = st.point;
  try {
    const SchurReport s = schur_check(m, ConnectionKind::SSNMC, plan, mode, st);
    r.status = s.status;
    r.reason = s.reason;
    r.max_residual = s.point_spread;
    r.samples = s.points;
    if (s.status != CheckStatus::Skipped) {
      r.details["mean_curvature"] = s.mean_curvature;
      r.details["plane_spread"] = s.plane_spread;
      r.details["plane_tolerance"] = st.plane;
      r.details["point_spread"] = s.point_spread;
      r.details["chain_residual"] = s.chain_residual;
      r.details["chain_consistency"] = s.chain_consistency;
      r.details["chain_tolerance"] = st.chain;
      r.details["planes_per_point"] = s.planes_per_point;
    }
  } catch (const std::exception& e) {
    r.status = CheckStatus::Failed;
    r.reason = std::string("error: ") + e.what();
  }
  return r;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
// written by exactly one worker, so the caller's reduction order is fixed.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

inline std::vector<SigmaMode> sigma_modes(const SuiteConfig& cfg) {
  if (cfg.sigma) return {*cfg.sigma};
  return {SigmaMode::Linear, SigmaMode::Quadratic, SigmaMode::Trig};
}

/// Runs the selected checks for one catalog manifold in every configured
/// jet mode. Deterministic for a fixed config.
inline VerificationReport run_suite(const SuiteConfig& cfg) {
  validate(cfg);
  ChartManifold m;
  try {
    m = catalog_build(cfg.manifold, cfg.params);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  const ChartManifold m_negated = negate_one_form(m);
  const SamplePlan plan = make_sample_plan(m, cfg.points, cfg.params.seed);
  const std::vector<SigmaMode> modes = sigma_modes(cfg);
  std::vector<ConformalFactor> sigmas;
  std::vector<ChartManifold> rescaled;
  for (SigmaMode s : modes) {
    sigmas.push_back(make_conformal_factor(m.dim, s, cfg.params.seed));
    rescaled.push_back(conformal_metric(m, sigmas.back()));
  }

  std::vector<CheckId> selected = cfg.checks;
  if (selected.empty())
    for (const CheckSpec& c : kChecks) selected.push_back(c.id);

  VerificationReport report;
  report.generated_at = detail::utc_timestamp();
  for (JetMode mode : cfg.modes) {
    const double tol = mode == JetMode::Analytic ? cfg.tol_analytic : cfg.tol_fd;
    SuiteRun run{cfg.manifold, m.dim, cfg.params.radius, cfg.params.phi, modes, cfg.params.seed, cfg.points, mode, tol, {}};

    const bool needs_points = std::any_of(selected.begin(), selected.end(), [](CheckId id) { return id != CheckId::Schur; });
    std::vector<std::vector<detail::PointOutcome>> per_point(needs_points ? plan.points.size() : 0);
    const detail::RunContext ctx{m, m_negated, sigmas, rescaled, mode, tol};
    std::optional<CheckResult> schur;
    const bool wants_schur = std::find(selected.begin(), selected.end(), CheckId::Schur) != selected.end();
    // Index count is the Schur task; the rest are sample points.
    detail::parallel_for(per_point.size() + (wants_schur ? 1 : 0), cfg.threads, [&](std::size_t i) {
      if (i == per_point.size()) {
        schur = detail::run_schur(m, plan, mode, tol);
      } else {
        per_point[i] = detail::evaluate_point(ctx, plan.points[i]);
      }
    });
    for (CheckId id : selected) {
      if (id == CheckId::Schur) {
        run.checks.push_back(*schur);
      } else {
        run.checks.push_back(detail::reduce(id, per_point, tol));
      }
    }
    report.runs.push_back(std::move(run));
  }
  return report;
}

/// Default suite: every catalog manifold, dims {2, 3, 4} and each φ mode,
/// 25 points per configuration.
inline std::vector<SuiteConfig> default_suite(const SuiteConfig& base = {}) {
  std::vector<SuiteConfig> out;
  for (std::string_view name : kCatalogNames)
    for (int dim : {2, 3, 4})
      for (std::string_view phi : kPhiModeNames) {
        SuiteConfig c = base;
        c.manifold = std::string(name);
        c.params.dim = dim;
        c.params.phi = *parse_phi_mode(phi);
        out.push_back(std::move(c));
      }
  return out;
}

inline VerificationReport run_suites(const std::vector<SuiteConfig>& cfgs) {
  VerificationReport all;
  for (const SuiteConfig& c : cfgs) {
    VerificationReport r = run_suite(c);
    if (all.generated_at.empty()) all.generated_at = r.generated_at;
    for (auto& run : r.runs) all.runs.push_back(std::move(run));
  }
  if (all.generated_at.empty()) all.generated_at = detail::utc_timestamp();
  return all;
}

inline nlohmann::ordered_json to_json(const CheckResult& c) {
  const CheckSpec& spec = check_spec(c.id);
  nlohmann::ordered_json j;
  j["name"] = spec.name;
  j["anchor"] = spec.anchor;
  j["status"] = to_string(c.status);
  j["pass"] = !c.failed();
  j["max_residual"] = c.max_residual;
  j["tolerance"] = c.tolerance;
  j["samples"] = c.samples;
  if (!c.reason.empty()) j["reason"] = c.reason;
  if (!c.details.empty()) j["details"] = c.details;
  return j;
}

inline nlohmann::ordered_json to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "ssnmc-report/1";
  j["generated_at"] = r.generated_at;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  std::size_t failed = 0;
  for (const SuiteRun& run : r.runs) {
    nlohmann::ordered_json jr;
    jr["manifold"] = run.manifold;
    jr["dim"] = run.dim;
    if (run.manifold == "sphere") jr["radius"] = run.radius;
    jr["phi_mode"] = to_string(run.phi);
    nlohmann::ordered_json sig = nlohmann::ordered_json::array();
    for (SigmaMode s : run.sigmas) sig.push_back(to_string(s));
    jr["sigma_modes"] = sig;
    jr["environment"] = {{"seed", run.seed}, {"jet_mode", to_string(run.mode)}, {"points", run.points}};
    jr["tolerance"] = run.tolerance;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const CheckResult& c : run.checks) {
      checks.push_back(to_json(c));
      if (c.failed()) ++failed;
    }
    jr["checks"] = checks;
    jr["pass"] = run.passed();
    runs.push_back(jr);
  }
  j["runs"] = runs;
  j["overall"] = {{"pass", r.passed()}, {"runs", r.runs.size()}, {"failed_checks", failed}};
  return j;
}

inline std::string to_text(const VerificationReport& r) {
  std::string out;
  char buf[512];
  for (const SuiteRun& run : r.runs) {
    std::snprintf(buf, sizeof buf, "%s n=%d phi=%s jets=%s seed=%llu points=%zu\n", run.manifold.c_str(), run.dim,
                  to_string(run.phi), to_string(run.mode), static_cast<unsigned long long>(run.seed), run.points);
    out += buf;
    for (const CheckResult& c : run.checks) {
      const CheckSpec& spec = check_spec(c.id);
      const char* tag = c.status == CheckStatus::Passed   ? "PASS"
                        : c.status == CheckStatus::Failed ? "FAIL"
                        : c.status == CheckStatus::Skipped ? "SKIP"
                                                            : "HYPO";
      if (c.status == CheckStatus::Skipped || (c.status == CheckStatus::HypothesisViolated && c.samples == 0)) {
        std::snprintf(buf, sizeof buf, "  %s %-26s %-18s %s\n", tag, std::string(spec.name).c_str(),
                      std::string(spec.anchor).c_str(), c.reason.c_str());
      } else {
        std::snprintf(buf, sizeof buf, "  %s %-26s %-18s max %.3e tol %.1e (%zu)%s%s\n", tag,
                      std::string(spec.name).c_str(), std::string(spec.anchor).c_str(), c.max_residual, c.tolerance,
                      c.samples, c.reason.empty() ? "" : "  ", c.reason.c_str());
      }
      out += buf;
    }
  }
  std::size_t failed = 0;
  for (const SuiteRun& run : r.runs)
    for (const CheckResult& c : run.checks) failed += c.failed() ? 1 : 0;
  std::snprintf(buf, sizeof buf, "overall: %s (%zu failed checks in %zu runs)\n", r.passed() ? "PASS" : "FAIL", failed,
                r.runs.size());
  out += buf;
  return out;
}

}  // namespace ssnmc
