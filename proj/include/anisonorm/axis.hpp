#pragma once

#include "anisonorm/core.hpp"

#include <string>
#include <vector>

namespace anisonorm {

// n points from a to b inclusive.
ArrayX uniform_axis(double a, double b, Index n);

// n + 1 points from a to b clustered toward a: a + (b - a) (k/n)^exponent.
ArrayX graded_axis(double a, double b, Index n, double exponent = 2.0);

// Points on [-R, R] clustered toward 0 from both sides, including 0.
ArrayX symmetric_graded_axis(double radius, Index n_half, double exponent = 2.0);

// Geometric points inner * 10^(k / per_decade) up to outer, with step capped at max_step.
// Symmetric axes mirror the positive half and exclude 0.
struct GeometricAxis {
  double inner = 1e-12;
  double outer = 1.0;
  double per_decade = 10.0;
  double max_step = kInf;
  bool symmetric = true;
};
ArrayX geometric_axis(const GeometricAxis& spec);

// Inserts each jump point t as the node pair (t, t(1 + 1e-12)) so that a support boundary at
// |x| = |t| costs only a ramp of relative width 1e-12. Points outside the axis are skipped.
ArrayX with_jumps(const ArrayX& axis, const std::vector<double>& jumps);

// Composite trapezoid weights for the piecewise-linear interpolant on the axis.
ArrayX trapezoid_weights(const ArrayX& axis);

bool strictly_increasing(const ArrayX& axis);

}  // namespace anisonorm
