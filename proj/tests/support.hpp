#pragma once

#include <random>
#include <string>
#include <vector>

#include <catch_amalgamated.hpp>

#include "ssnmc/ssnmc.hpp"

namespace support {

inline auto kind_is(ssnmc::ErrorKind k) {
  return Catch::Matchers::Predicate<ssnmc::Error>([k](const ssnmc::Error& e) { return e.kind() == k; },
                                                  "error kind " + std::string(ssnmc::to_string(k)));
}

// Chart manifold on the cube [lo, hi]^n from generic callables
// g(x, out) and phi(x, out) usable with double and HyperDual.
template <class G, class P>
ssnmc::ChartManifold manifold(int n, G g, P phi, bool closed = false, double lo = -2.0, double hi = 2.0) {
  ssnmc::ChartManifold m;
  m.name = "test";
  m.dim = n;
  m.chart = ssnmc::Box::cube(n, lo, hi);
  m.sample_region = ssnmc::Box::cube(n, 0.5 * lo, 0.5 * hi);
  m.metric = ssnmc::Field::generic(n, ssnmc::FieldShape::SymmetricForm, g);
  m.one_form = ssnmc::Field::generic(n, ssnmc::FieldShape::Covector, phi);
  m.one_form_closed = closed;
  return m;
}

inline auto identity_metric(int n) {
  return [n](auto, auto out) {
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i * n + i)] = 1.0;
  };
}

inline auto constant_form(std::vector<double> c) {
  return [c](auto, auto out) {
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i];
  };
}

inline ssnmc::ChartManifold flat(int n, std::vector<double> phi) {
  return manifold(n, identity_metric(n), constant_form(std::move(phi)), true);
}

inline ssnmc::Tensor random_tensor(int n, ssnmc::Variance v, std::mt19937_64& rng) {
  return ssnmc::Tensor::generate(n, std::move(v), [&](std::span<const int>) { return ssnmc::uniform(rng, -1.0, 1.0); });
}

}  // namespace support
