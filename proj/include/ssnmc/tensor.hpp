#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ssnmc/error.hpp"

namespace ssnmc {

enum class Slot : unsigned char { Upper, Lower };

using Variance = std::vector<Slot>;

inline Slot flip(Slot s) { return s == Slot::Upper ? Slot::Lower : Slot::Upper; }

/// Dense component array over an n-dimensional chart with per-slot variance.
///
/// Components are stored row-major with index order equal to slot order, so
/// the last slot is contiguous. A Tensor is immutable once constructed and
/// rejects non-finite components.
class Tensor {
 public:
  Tensor() : dim_(1), data_(1, 0.0) {}

  Tensor(int dim, Variance variance, std::vector<double> components)
      : dim_(dim), variance_(std::move(variance)), data_(std::move(components)) {
    if (dim_ < 1) throw Error(ErrorKind::DimensionMismatch, "tensor dimension must be positive");
    if (data_.size() != expected_size(dim_, rank())) {
      throw Error(ErrorKind::DimensionMismatch,
                  "component count " + std::to_string(data_.size()) + " does not match n^rank = " +
                      std::to_string(expected_size(dim_, rank())));
    }
    for (double v : data_) {
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteComponent, "tensor component is not finite");
    }
  }

  static Tensor scalar(double v, int dim = 1) { return Tensor(dim, {}, {v}); }

  static Tensor zeros(int dim, Variance variance) {
    const std::size_t size = expected_size(dim, static_cast<int>(variance.size()));
    return Tensor(dim, std::move(variance), std::vector<double>(size, 0.0));
  }

  /// Builds a tensor from `fn(std::span<const int> index)`.
  template <class Fn>
  static Tensor generate(int dim, Variance variance, Fn&& fn) {
    const int r = static_cast<int>(variance.size());
    std::vector<double> data(expected_size(dim, r));
    std::vector<int> idx(static_cast<std::size_t>(r), 0);
    for (std::size_t flat = 0; flat < data.size(); ++flat) {
      data[flat] = fn(std::span<const int>(idx));
      for (int s = r - 1; s >= 0; --s) {
        if (++idx[static_cast<std::size_t>(s)] < dim) break;
        idx[static_cast<std::size_t>(s)] = 0;
      }
    }
    return Tensor(dim, std::move(variance), std::move(data));
  }

  int dim() const noexcept { return dim_; }
  int rank() const noexcept { return static_cast<int>(variance_.size()); }
  const Variance& variance() const noexcept { return variance_; }
  Slot slot(int s) const {
    check_slot(s);
    return variance_[static_cast<std::size_t>(s)];
  }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<const double> components() const noexcept { return data_; }

  /// Distance in the flat array between consecutive values of slot `s`.
  std::size_t stride(int s) const {
    check_slot(s);
    std::size_t st = 1;
    for (int k = rank() - 1; k > s; --k) st *= static_cast<std::size_t>(dim_);
    return st;
  }

  double operator[](std::size_t flat) const { return data_[flat]; }

  template <class... I>
  double operator()(I... index) const {
    static_assert(sizeof...(I) > 0);
    std::size_t flat = 0;
    ((flat = flat * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(index)), ...);
    return data_[flat];
  }

  double at(std::span<const int> index) const {
    if (static_cast<int>(index.size()) != rank()) {
      throw Error(ErrorKind::SlotOutOfRange, "index arity does not match tensor rank");
    }
    std::size_t flat = 0;
    for (int i : index) {
      if (i < 0 || i >= dim_) throw Error(ErrorKind::SlotOutOfRange, "component index out of range");
      flat = flat * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    }
    return data_[flat];
  }

  double value() const {
    if (rank() != 0) throw Error(ErrorKind::SlotOutOfRange, "value() requires a rank-0 tensor");
    return data_[0];
  }

  static std::size_t expected_size(int dim, int rank) {
    std::size_t s = 1;
    for (int k = 0; k < rank; ++k) s *= static_cast<std::size_t>(dim);
    return s;
  }

 private:
  void check_slot(int s) const {
    if (s < 0 || s >= rank()) throw Error(ErrorKind::SlotOutOfRange, "slot " + std::to_string(s) + " out of range");
  }

  int dim_;
  Variance variance_;
  std::vector<double> data_;
};

namespace detail {

inline void require_same_shape(const Tensor& a, const Tensor& b) {
  if (a.dim() != b.dim() || a.rank() != b.rank()) {
    throw Error(ErrorKind::DimensionMismatch, "tensor shapes differ");
  }
  if (a.variance() != b.variance()) throw Error(ErrorKind::SlotKindMismatch, "tensor variances differ");
}

template <class Op>
Tensor zip(const Tensor& a, const Tensor& b, Op op) {
  require_same_shape(a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
  return Tensor(a.dim(), a.variance(), std::move(out));
}

// Decodes a flat index of a rank-r tensor into its multi-index.
inline void unflatten(std::size_t flat, int dim, std::span<int> idx) {
  for (std::size_t s = idx.size(); s-- > 0;) {
    idx[s] = static_cast<int>(flat % static_cast<std::size_t>(dim));
    flat /= static_cast<std::size_t>(dim);
  }
}

}  // namespace detail

inline Tensor operator+(const Tensor& a, const Tensor& b) {
  return detail::zip(a, b, [](double x, double y) { return x + y; });
}
inline Tensor operator-(const Tensor& a, const Tensor& b) {
  return detail::zip(a, b, [](double x, double y) { return x - y; });
}
inline Tensor operator*(double s, const Tensor& t) {
  std::vector<double> out(t.components().begin(), t.components().end());
  for (double& v : out) v *= s;
  return Tensor(t.dim(), t.variance(), std::move(out));
}
inline Tensor operator*(const Tensor& t, double s) { return s * t; }
inline Tensor operator-(const Tensor& t) { return -1.0 * t; }

inline double max_abs(const Tensor& t) {
  double m = 0.0;
  for (double v : t.components()) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Kronecker delta δ^i_j as a (1,1) tensor.
inline Tensor kronecker(int dim) {
  return Tensor::generate(dim, {Slot::Upper, Slot::Lower},
                          [](std::span<const int> i) { return i[0] == i[1] ? 1.0 : 0.0; });
}

inline Tensor outer(const Tensor& a, const Tensor& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "outer product of tensors of different dimension");
  Variance v = a.variance();
  v.insert(v.end(), b.variance().begin(), b.variance().end());
  std::vector<double> out;
  out.reserve(a.size() * b.size());
  for (double x : a.components())
    for (double y : b.components()) out.push_back(x * y);
  return Tensor(a.dim(), std::move(v), std::move(out));
}

/// Sums over the paired slots (one upper, one lower); the remaining slots keep their order.
inline Tensor contract(const Tensor& t, int slot_a, int slot_b) {
  const Slot ka = t.slot(slot_a);
  const Slot kb = t.slot(slot_b);
  if (slot_a == slot_b) throw Error(ErrorKind::DuplicateSlots, "cannot contract a slot with itself");
  if (ka == kb) throw Error(ErrorKind::SlotKindMismatch, "contraction needs one upper and one lower slot");

  const int n = t.dim();
  Variance v;
  std::vector<std::size_t> kept_strides;
  for (int s = 0; s < t.rank(); ++s) {
    if (s == slot_a || s == slot_b) continue;
    v.push_back(t.variance()[static_cast<std::size_t>(s)]);
    kept_strides.push_back(t.stride(s));
  }
  const std::size_t diag = t.stride(slot_a) + t.stride(slot_b);
  const int r = static_cast<int>(v.size());
  std::vector<double> out(Tensor::expected_size(n, r), 0.0);
  std::vector<int> idx(static_cast<std::size_t>(r));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    detail::unflatten(flat, n, idx);
    std::size_t base = 0;
    for (int s = 0; s < r; ++s) base += static_cast<std::size_t>(idx[static_cast<std::size_t>(s)]) * kept_strides[static_cast<std::size_t>(s)];
    double sum = 0.0;
    for (int m = 0; m < n; ++m) sum += t[base + static_cast<std::size_t>(m) * diag];
    out[flat] = sum;
  }
  return Tensor(n, std::move(v), std::move(out));
}

namespace detail {

// Contracts `matrix` (rank 2) into slot `s` of t: out(.., a, ..) = Σ_m M(a, m) t(.., m, ..).
inline Tensor apply_on_slot(const Tensor& t, int s, const Tensor& matrix, Slot new_kind) {
  const int n = t.dim();
  const std::size_t st = t.stride(s);
  std::vector<double> out(t.size(), 0.0);
  std::vector<int> idx(static_cast<std::size_t>(t.rank()));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    unflatten(flat, n, idx);
    const int a = idx[static_cast<std::size_t>(s)];
    const std::size_t base = flat - static_cast<std::size_t>(a) * st;
    double sum = 0.0;
    for (int m = 0; m < n; ++m) sum += matrix(a, m) * t[base + static_cast<std::size_t>(m) * st];
    out[flat] = sum;
  }
  Variance v = t.variance();
  v[static_cast<std::size_t>(s)] = new_kind;
  return Tensor(n, std::move(v), std::move(out));
}

inline void require_metric(const Tensor& t, const Tensor& m, Slot kind) {
  if (m.rank() != 2 || m.slot(0) != kind || m.slot(1) != kind) {
    throw Error(ErrorKind::SlotKindMismatch, "metric argument has the wrong variance");
  }
  if (m.dim() != t.dim()) throw Error(ErrorKind::DimensionMismatch, "metric dimension differs from tensor dimension");
}

}  // namespace detail

/// Raises a lower slot with the inverse metric g^{ij}.
inline Tensor raise(const Tensor& t, int slot, const Tensor& g_inv) {
  if (t.slot(slot) != Slot::Lower) throw Error(ErrorKind::SlotKindMismatch, "raise needs a lower slot");
  detail::require_metric(t, g_inv, Slot::Upper);
  return detail::apply_on_slot(t, slot, g_inv, Slot::Upper);
}

/// Lowers an upper slot with the metric g_ij.
inline Tensor lower(const Tensor& t, int slot, const Tensor& g) {
  if (t.slot(slot) != Slot::Upper) throw Error(ErrorKind::SlotKindMismatch, "lower needs an upper slot");
  detail::require_metric(t, g, Slot::Lower);
  return detail::apply_on_slot(t, slot, g, Slot::Lower);
}

/// Reorders slots: slot s of the result is slot perm[s] of t.
inline Tensor permute(const Tensor& t, std::span<const int> perm) {
  const int r = t.rank();
  if (static_cast<int>(perm.size()) != r) throw Error(ErrorKind::SlotOutOfRange, "permutation arity mismatch");
  std::vector<bool> seen(static_cast<std::size_t>(r), false);
  for (int p : perm) {
    if (p < 0 || p >= r) throw Error(ErrorKind::SlotOutOfRange, "permutation entry out of range");
    if (seen[static_cast<std::size_t>(p)]) throw Error(ErrorKind::DuplicateSlots, "permutation repeats a slot");
    seen[static_cast<std::size_t>(p)] = true;
  }
  Variance v(static_cast<std::size_t>(r));
  std::vector<std::size_t> src_stride(static_cast<std::size_t>(r));
  for (int s = 0; s < r; ++s) {
    v[static_cast<std::size_t>(s)] = t.variance()[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])];
    src_stride[static_cast<std::size_t>(s)] = t.stride(perm[static_cast<std::size_t>(s)]);
  }
  std::vector<double> out(t.size());
  std::vector<int> idx(static_cast<std::size_t>(r));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    detail::unflatten(flat, t.dim(), idx);
    std::size_t src = 0;
    for (int s = 0; s < r; ++s) src += static_cast<std::size_t>(idx[static_cast<std::size_t>(s)]) * src_stride[static_cast<std::size_t>(s)];
    out[flat] = t[src];
  }
  return Tensor(t.dim(), std::move(v), std::move(out));
}

inline Tensor permute(const Tensor& t, std::initializer_list<int> perm) {
  return permute(t, std::span<const int>(perm.begin(), perm.size()));
}

/// t(a,b,c) + t(b,c,a) + t(c,a,b) over the three named slots, others fixed.
inline Tensor cyclic_sum(const Tensor& t, std::array<int, 3> slots) {
  const auto [a, b, c] = slots;
  if (a == b || b == c || a == c) throw Error(ErrorKind::DuplicateSlots, "cyclic_sum slots must be distinct");
  if (t.slot(a) != t.slot(b) || t.slot(b) != t.slot(c)) {
    throw Error(ErrorKind::SlotKindMismatch, "cyclic_sum slots must share a variance kind");
  }
  const std::size_t sa = t.stride(a), sb = t.stride(b), sc = t.stride(c);
  std::vector<double> out(t.size());
  std::vector<int> idx(static_cast<std::size_t>(t.rank()));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    detail::unflatten(flat, t.dim(), idx);
    const auto x = static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
    const auto y = static_cast<std::size_t>(idx[static_cast<std::size_t>(b)]);
    const auto z = static_cast<std::size_t>(idx[static_cast<std::size_t>(c)]);
    const std::size_t base = flat - x * sa - y * sb - z * sc;
    out[flat] = t[base + x * sa + y * sb + z * sc] + t[base + y * sa + z * sb + x * sc] +
                t[base + z * sa + x * sb + y * sc];
  }
  return Tensor(t.dim(), t.variance(), std::move(out));
}

}  // namespace ssnmc
