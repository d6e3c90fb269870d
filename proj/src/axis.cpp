#include "anisonorm/axis.hpp"

#include <algorithm>
#include <cmath>

namespace anisonorm {

ArrayX uniform_axis(double a, double b, Index n) {
  if (n < 2 || !(b > a)) throw Error(ErrorKind::InvalidArgument, "uniform axis needs n >= 2 and b > a");
  ArrayX x(n);
  for (Index k = 0; k < n; ++k) x[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  x[n - 1] = b;
  return x;
}

ArrayX graded_axis(double a, double b, Index n, double exponent) {
  if (n < 1 || !(b > a) || !(exponent >= 1))
    throw Error(ErrorKind::InvalidArgument, "graded axis needs n >= 1, b > a, exponent >= 1");
  ArrayX x(n + 1);
  for (Index k = 0; k <= n; ++k)
    x[k] = a + (b - a) * std::pow(static_cast<double>(k) / static_cast<double>(n), exponent);
  x[n] = b;
  return x;
}

ArrayX symmetric_graded_axis(double radius, Index n_half, double exponent) {
  const ArrayX half = graded_axis(0.0, radius, n_half, exponent);
  ArrayX x(2 * n_half + 1);
  for (Index k = 0; k <= n_half; ++k) {
    x[n_half + k] = half[k];
    x[n_half - k] = -half[k];
  }
  return x;
}

ArrayX geometric_axis(const GeometricAxis& s) {
  if (!(s.inner > 0) || !(s.outer > s.inner) || !(s.per_decade > 0) || !(s.max_step > 0))
    throw Error(ErrorKind::InvalidArgument, "geometric axis needs 0 < inner < outer, per_decade > 0");
  std::vector<double> pos;
  double x = s.inner;
  Index k = 0;
  while (x < s.outer * (1 - 1e-12)) {
    pos.push_back(x);
    double next = std::pow(10.0, std::log10(s.inner) + static_cast<double>(++k) / s.per_decade);
    if (next - x > s.max_step) {
      // Uniform stepping from here on, restarting the geometric counter is unnecessary.
      next = x + s.max_step;
      while (next < s.outer * (1 - 1e-12)) {
        pos.push_back(next);
        next += s.max_step;
      }
      x = s.outer;
      break;
    }
    x = next;
  }
  pos.push_back(s.outer);
  if (!s.symmetric) return Eigen::Map<ArrayX>(pos.data(), static_cast<Index>(pos.size()));
  const Index n = static_cast<Index>(pos.size());
  ArrayX out(2 * n);
  for (Index i = 0; i < n; ++i) {
    out[n + i] = pos[i];
    out[n - 1 - i] = -pos[i];
  }
  return out;
}

ArrayX with_jumps(const ArrayX& axis, const std::vector<double>& jumps) {
  std::vector<double> pts(axis.begin(), axis.end());
  for (double t : jumps) {
    // The outer node of the pair carries the zero side of a support boundary at |x| = |t|.
    const double t2 = t * (1.0 + 1e-12);
    for (double v : {t, t2})
      if (v >= axis[0] && v <= axis[axis.size() - 1]) pts.push_back(v);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return Eigen::Map<ArrayX>(pts.data(), static_cast<Index>(pts.size()));
}

ArrayX trapezoid_weights(const ArrayX& x) {
  const Index n = x.size();
  ArrayX w = ArrayX::Zero(n);
  if (n < 2) return w;
  for (Index i = 0; i + 1 < n; ++i) {
    const double h = 0.5 * (x[i + 1] - x[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

bool strictly_increasing(const ArrayX& x) {
  for (Index i = 0; i + 1 < x.size(); ++i)
    if (!(x[i + 1] > x[i])) return false;
  return x.allFinite();
}

}  // namespace anisonorm
