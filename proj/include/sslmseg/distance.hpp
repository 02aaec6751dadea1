#pragma once

#include <cmath>
#include <span>

namespace sslmseg {

enum class Metric { euclidean, cosine };

/// Euclidean: ||u - v||. Cosine: 1 - u.v / (||u|| ||v||), defined as 0 when
/// either vector is zero (the NaN cleanup of the recurrence stage).
template <typename T>
double distance(std::span<const T> u, std::span<const T> v, Metric metric) {
  const std::size_t n = u.size() < v.size() ? u.size() : v.size();
  if (metric == Metric::euclidean) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = static_cast<double>(u[k]) - static_cast<double>(v[k]);
      acc += d * d;
    }
    return std::sqrt(acc);
  }
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = u[k];
    const double b = v[k];
    dot += a * b;
    nu += a * a;
    nv += b * b;
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double d = 1.0 - dot / (std::sqrt(nu) * std::sqrt(nv));
  // Rounding can push identical directions a hair below zero.
  return d < 0.0 ? 0.0 : d;
}

}  // namespace sslmseg
