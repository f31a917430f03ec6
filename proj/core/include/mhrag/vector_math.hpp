#pragma once

#include <span>
#include <vector>

namespace mhrag {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

/// Cosine distance from a dot product and the two squared norms.
double cosine_distance(double uv, double uu, double vv);

/// 1 - cos(u, v), clamped to [0, 2]. Both inputs must have nonzero norm.
double cosine_distance(std::span<const double> u, std::span<const double> v);

bool all_finite(std::span<const double> v);

}  // namespace mhrag
