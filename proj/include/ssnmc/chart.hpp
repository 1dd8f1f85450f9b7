#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ssnmc/error.hpp"
#include "ssnmc/hyperdual.hpp"
#include "ssnmc/linalg.hpp"
#include "ssnmc/polynomial.hpp"
#include "ssnmc/tensor.hpp"

namespace ssnmc {

using Point = std::vector<double>;

/// Axis-aligned coordinate box.
struct Box {
  struct Interval {
    double lo;
    double hi;
  };
  std::vector<Interval> axes;

  static Box cube(int dim, double lo, double hi) { return Box{std::vector<Interval>(static_cast<std::size_t>(dim), {lo, hi})}; }

  int dim() const noexcept { return static_cast<int>(axes.size()); }

  bool contains(std::span<const double> x) const {
    if (x.size() != axes.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(x[i] >= axes[i].lo && x[i] <= axes[i].hi)) return false;
    return true;
  }

  /// True when `inner` sits inside this box with at least `margin` clearance.
  bool encloses(const Box& inner, double margin) const {
    if (inner.dim() != dim()) return false;
    for (std::size_t i = 0; i < axes.size(); ++i)
      if (inner.axes[i].lo < axes[i].lo + margin || inner.axes[i].hi > axes[i].hi - margin) return false;
    return true;
  }
};

enum class FieldShape { Scalar, Covector, SymmetricForm };

enum class JetMode { Analytic, FiniteDifference };

inline const char* to_string(JetMode m) { return m == JetMode::Analytic ? "analytic" : "fd"; }

template <class T>
using FieldFn = std::function<void(std::span<const T>, std::span<T>)>;

/// A scalar, covector or symmetric (0,2) field on a chart. The double
/// evaluator is mandatory; the hyper-dual evaluator, when present, supplies
/// exact first and second partials.
class Field {
 public:
  Field() = default;
  Field(int dim, FieldShape shape, FieldFn<double> value, FieldFn<HyperDual> analytic = {})
      : dim_(dim), shape_(shape), value_(std::move(value)), analytic_(std::move(analytic)) {}

  /// Wraps a generic callable `f(std::span<const T> x, std::span<T> out)`
  /// usable with both double and HyperDual.
  template <class F>
  static Field generic(int dim, FieldShape shape, F f) {
    return Field(dim, shape, FieldFn<double>(f), FieldFn<HyperDual>(f));
  }

  /// Same callable, but the field deliberately carries no analytic partials.
  template <class F>
  static Field sampled(int dim, FieldShape shape, F f) {
    return Field(dim, shape, FieldFn<double>(f));
  }

  int dim() const noexcept { return dim_; }
  FieldShape shape() const noexcept { return shape_; }
  bool has_analytic() const noexcept { return static_cast<bool>(analytic_); }
  const FieldFn<double>& value_fn() const noexcept { return value_; }
  const FieldFn<HyperDual>& analytic_fn() const noexcept { return analytic_; }

  int value_rank() const noexcept {
    switch (shape_) {
      case FieldShape::Scalar: return 0;
      case FieldShape::Covector: return 1;
      case FieldShape::SymmetricForm: return 2;
    }
    return 0;
  }
  std::size_t width() const noexcept { return Tensor::expected_size(dim_, value_rank()); }
  Variance value_variance() const { return Variance(static_cast<std::size_t>(value_rank()), Slot::Lower); }

  std::vector<double> evaluate(std::span<const double> x) const {
    std::vector<double> out(width(), 0.0);
    value_(x, out);
    return out;
  }

  std::vector<HyperDual> evaluate(std::span<const HyperDual> x) const {
    std::vector<HyperDual> out(width());
    analytic_(x, out);
    return out;
  }

 private:
  int dim_ = 0;
  FieldShape shape_ = FieldShape::Scalar;
  FieldFn<double> value_;
  FieldFn<HyperDual> analytic_;
};

/// Field value with first and second partials. The derivative slots come
/// first: d1(h, ...) = ∂_h value, d2(h, m, ...) = ∂_h ∂_m value.
struct Jet {
  Tensor value;
  std::optional<Tensor> d1;
  std::optional<Tensor> d2;
};

/// Relative FD base steps; the step on axis a is base·(1 + |x_a|).
inline constexpr double kFirstPartialStep = 1e-5;
inline constexpr double kSecondPartialStep = 1e-4;

/// Central-difference partials of `field` at x: order 1 uses the two-point
/// stencil, order 2 the three-point diagonal and four-point mixed stencils.
/// `step` is the relative base step (see kFirstPartialStep).
inline Tensor fd_partials(const Field& field, std::span<const double> x, int order, double step,
                          const std::optional<Box>& bounds = std::nullopt) {
  if (order != 1 && order != 2) throw Error(ErrorKind::OrderUnsupported, "fd_partials supports order 1 or 2");
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidParams, "finite-difference step must be positive");
  const int n = field.dim();
  const std::size_t w = field.width();
  std::vector<double> h(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) h[static_cast<std::size_t>(a)] = step * (1.0 + std::abs(x[static_cast<std::size_t>(a)]));

  Point probe(x.begin(), x.end());
  auto eval_at = [&](std::initializer_list<std::pair<int, double>> shifts) {
    for (auto [axis, s] : shifts) probe[static_cast<std::size_t>(axis)] += s;
    if (bounds && !bounds->contains(probe)) {
      throw Error(ErrorKind::StencilOutOfChart, "finite-difference stencil leaves the chart");
    }
    std::vector<double> v = field.evaluate(probe);
    for (auto [axis, s] : shifts) probe[static_cast<std::size_t>(axis)] = x[static_cast<std::size_t>(axis)];
    return v;
  };

  Variance var = field.value_variance();
  var.insert(var.begin(), static_cast<std::size_t>(order), Slot::Lower);

  if (order == 1) {
    std::vector<double> out(static_cast<std::size_t>(n) * w);
    for (int a = 0; a < n; ++a) {
      const double ha = h[static_cast<std::size_t>(a)];
      const auto fp = eval_at({{a, ha}});
      const auto fm = eval_at({{a, -ha}});
      for (std::size_t c = 0; c < w; ++c) out[static_cast<std::size_t>(a) * w + c] = (fp[c] - fm[c]) / (2.0 * ha);
    }
    return Tensor(n, std::move(var), std::move(out));
  }

  const std::vector<double> f0 = field.evaluate(x);
  std::vector<double> out(static_cast<std::size_t>(n * n) * w);
  auto put = [&](int a, int b, std::size_t c, double v) {
    out[(static_cast<std::size_t>(a * n + b)) * w + c] = v;
    out[(static_cast<std::size_t>(b * n + a)) * w + c] = v;
  };
  for (int a = 0; a < n; ++a) {
    const double ha = h[static_cast<std::size_t>(a)];
    const auto fp = eval_at({{a, ha}});
    const auto fm = eval_at({{a, -ha}});
    for (std::size_t c = 0; c < w; ++c) put(a, a, c, (fp[c] - 2.0 * f0[c] + fm[c]) / (ha * ha));
    for (int b = a + 1; b < n; ++b) {
      const double hb = h[static_cast<std::size_t>(b)];
      const auto fpp = eval_at({{a, ha}, {b, hb}});
      const auto fpm = eval_at({{a, ha}, {b, -hb}});
      const auto fmp = eval_at({{a, -ha}, {b, hb}});
      const auto fmm = eval_at({{a, -ha}, {b, -hb}});
      for (std::size_t c = 0; c < w; ++c) put(a, b, c, (fpp[c] - fpm[c] - fmp[c] + fmm[c]) / (4.0 * ha * hb));
    }
  }
  return Tensor(n, std::move(var), std::move(out));
}

namespace detail {

inline Jet analytic_jet(const Field& field, std::span<const double> x, int order) {
  const int n = field.dim();
  const std::size_t w = field.width();
  std::vector<HyperDual> hx(x.begin(), x.end());
  Jet jet{Tensor(n, field.value_variance(), field.evaluate(x)), std::nullopt, std::nullopt};
  if (order == 0) return jet;

  Variance v1 = field.value_variance();
  v1.insert(v1.begin(), Slot::Lower);
  if (order == 1) {
    std::vector<double> d1(static_cast<std::size_t>(n) * w);
    for (int a = 0; a < n; ++a) {
      hx[static_cast<std::size_t>(a)].b = 1.0;
      const auto out = field.evaluate(std::span<const HyperDual>(hx));
      hx[static_cast<std::size_t>(a)].b = 0.0;
      for (std::size_t c = 0; c < w; ++c) d1[static_cast<std::size_t>(a) * w + c] = out[c].b;
    }
    jet.d1 = Tensor(n, std::move(v1), std::move(d1));
    return jet;
  }

  std::vector<double> d1(static_cast<std::size_t>(n) * w);
  std::vector<double> d2(static_cast<std::size_t>(n * n) * w);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      hx[static_cast<std::size_t>(a)].b = 1.0;
      hx[static_cast<std::size_t>(b)].c = 1.0;
      const auto out = field.evaluate(std::span<const HyperDual>(hx));
      hx[static_cast<std::size_t>(a)].b = 0.0;
      hx[static_cast<std::size_t>(b)].c = 0.0;
      for (std::size_t c = 0; c < w; ++c) {
        if (b == a) d1[static_cast<std::size_t>(a) * w + c] = out[c].b;
        d2[static_cast<std::size_t>(a * n + b) * w + c] = out[c].d;
        d2[static_cast<std::size_t>(b * n + a) * w + c] = out[c].d;
      }
    }
  }
  Variance v2 = v1;
  v2.insert(v2.begin(), Slot::Lower);
  jet.d1 = Tensor(n, std::move(v1), std::move(d1));
  jet.d2 = Tensor(n, std::move(v2), std::move(d2));
  return jet;
}

}  // namespace detail

/// Value and partials up to `order` at x. Analytic mode uses the field's
/// hyper-dual evaluator when it has one and falls back to finite differences
/// otherwise; FiniteDifference mode always differences the value.
inline Jet eval_jet(const Field& field, std::span<const double> x, int order, JetMode mode,
                    const std::optional<Box>& bounds = std::nullopt) {
  if (order < 0 || order > 2) throw Error(ErrorKind::OrderUnsupported, "jets are available up to order 2");
  if (static_cast<int>(x.size()) != field.dim()) throw Error(ErrorKind::DimensionMismatch, "point has wrong dimension");
  if (bounds && !bounds->contains(x)) throw Error(ErrorKind::OutOfChart, "point lies outside the chart");
  if (mode == JetMode::Analytic && field.has_analytic()) return detail::analytic_jet(field, x, order);

  Jet jet{Tensor(field.dim(), field.value_variance(), field.evaluate(x)), std::nullopt, std::nullopt};
  if (order >= 1) jet.d1 = fd_partials(field, x, 1, kFirstPartialStep, bounds);
  if (order >= 2) jet.d2 = fd_partials(field, x, 2, kSecondPartialStep, bounds);
  return jet;
}

/// Coordinate chart carrying the metric g_ij and the 1-form φ_i.
struct ChartManifold {
  std::string name;
  int dim = 0;
  Box chart;          // coordinate domain of the fields
  Box sample_region;  // where checks sample, clear of chart degeneracies
  Field metric;
  Field one_form;
  bool one_form_closed = false;
};

/// Copy of m with φ replaced by -φ. The dual connection of m is the
/// semi-symmetric non-metric connection of this manifold.
inline ChartManifold negate_one_form(const ChartManifold& m) {
  ChartManifold out = m;
  const Field phi = m.one_form;
  FieldFn<double> value = [phi](std::span<const double> x, std::span<double> o) {
    phi.value_fn()(x, o);
    for (double& v : o) v = -v;
  };
  FieldFn<HyperDual> analytic;
  if (phi.has_analytic()) {
    analytic = [phi](std::span<const HyperDual> x, std::span<HyperDual> o) {
      phi.analytic_fn()(x, o);
      for (HyperDual& v : o) v = -v;
    };
  }
  out.one_form = Field(phi.dim(), FieldShape::Covector, std::move(value), std::move(analytic));
  return out;
}

/// Deterministic set of sample points drawn uniformly inside `bounds`.
struct SamplePlan {
  std::vector<Point> points;
  std::uint64_t seed = 0;
  Box bounds;
};

inline SamplePlan make_sample_plan(const ChartManifold& m, std::size_t count, std::uint64_t seed) {
  // Bianchi and Schur checks difference already-differenced fields, so
  // samples need clearance for two nested stencils.
  constexpr double kMargin = 0.02;
  if (!m.chart.encloses(m.sample_region, kMargin)) {
    throw Error(ErrorKind::InvalidParams, "sample region of '" + m.name + "' is not inside its chart");
  }
  SamplePlan plan{{}, seed, m.sample_region};
  std::mt19937_64 rng(seed);
  plan.points.reserve(count);
  for (std::size_t p = 0; p < count; ++p) {
    Point x(static_cast<std::size_t>(m.dim));
    for (int a = 0; a < m.dim; ++a) {
      const auto& ax = m.sample_region.axes[static_cast<std::size_t>(a)];
      x[static_cast<std::size_t>(a)] = uniform(rng, ax.lo, ax.hi);
    }
    plan.points.push_back(std::move(x));
  }
  return plan;
}

}  // namespace ssnmc
