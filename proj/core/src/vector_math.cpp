#include "mhrag/vector_math.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace mhrag {

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += a[i] * b[i];
  }
  return sum;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double cosine_distance(double uv, double uu, double vv) {
  // sqrt(uu * uu) == uu exactly, so identical vectors are at distance 0.
  return std::clamp(1.0 - uv / std::sqrt(uu * vv), 0.0, 2.0);
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  return cosine_distance(dot(u, v), dot(u, u), dot(v, v));
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace mhrag
