#pragma once

#include "anisonorm/core.hpp"

namespace anisonorm {

// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  ArrayX x;
  ArrayX w;
};

inline constexpr int kMaxGaussPoints = 64;

// Cached rule with n points, 1 <= n <= kMaxGaussPoints (Golub-Welsch).
const GaussRule& gauss_legendre(int n);

// Number of Gauss points for an integrand analytic in a neighbourhood of its interval whose
// nearest singularity lies `ratio` interval widths away, so that the error is below tol.
int gauss_points_for(double ratio, double tol);

}  // namespace anisonorm
