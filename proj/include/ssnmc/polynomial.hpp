#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ssnmc {

/// Uniform double in [lo, hi) drawn from the raw 64-bit engine output, so the
/// sequence is identical across standard library implementations.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

/// Sparse multivariate polynomial Σ c·x^e, evaluable on any ring type.
class Polynomial {
 public:
  struct Term {
    double coef;
    std::vector<int> exps;
  };

  Polynomial() = default;
  explicit Polynomial(int dim) : dim_(dim) {}

  int dim() const noexcept { return dim_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  Polynomial& add(double coef, std::vector<int> exps) {
    if (coef != 0.0) terms_.push_back({coef, std::move(exps)});
    return *this;
  }

  static Polynomial constant(int dim, double c) {
    Polynomial p(dim);
    p.add(c, std::vector<int>(static_cast<std::size_t>(dim), 0));
    return p;
  }

  /// Random polynomial of total degree ≤ max_degree with coefficients in
  /// [-scale, scale]; every monomial is present.
  static Polynomial random(int dim, int max_degree, double scale, std::mt19937_64& rng) {
    Polynomial p(dim);
    std::vector<int> e(static_cast<std::size_t>(dim), 0);
    enumerate(dim, max_degree, 0, e, [&](const std::vector<int>& exps) { p.add(uniform(rng, -scale, scale), exps); });
    return p;
  }

  static std::size_t monomial_count(int dim, int max_degree) {
    std::size_t count = 0;
    std::vector<int> e(static_cast<std::size_t>(dim), 0);
    enumerate(dim, max_degree, 0, e, [&](const std::vector<int>&) { ++count; });
    return count;
  }

  Polynomial derivative(int axis) const {
    Polynomial p(dim_);
    for (const Term& t : terms_) {
      const int e = t.exps[static_cast<std::size_t>(axis)];
      if (e == 0) continue;
      std::vector<int> exps = t.exps;
      exps[static_cast<std::size_t>(axis)] = e - 1;
      p.add(t.coef * e, std::move(exps));
    }
    return p;
  }

  template <class T>
  T operator()(std::span<const T> x) const {
    T sum(0.0);
    for (const Term& t : terms_) {
      T prod(t.coef);
      for (std::size_t i = 0; i < t.exps.size(); ++i)
        for (int k = 0; k < t.exps[i]; ++k) prod = prod * x[i];
      sum = sum + prod;
    }
    return sum;
  }

 private:
  template <class Fn>
  static void enumerate(int dim, int budget, int axis, std::vector<int>& e, Fn&& fn) {
    if (axis == dim) {
      fn(e);
      return;
    }
    for (int k = 0; k <= budget; ++k) {
      e[static_cast<std::size_t>(axis)] = k;
      enumerate(dim, budget - k, axis + 1, e, fn);
    }
    e[static_cast<std::size_t>(axis)] = 0;
  }

  int dim_ = 0;
  std::vector<Term> terms_;
};

}  // namespace ssnmc
