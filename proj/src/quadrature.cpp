#include "anisonorm/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

namespace anisonorm {

namespace {

GaussRule golub_welsch(int n) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussRule r;
  r.x = (es.eigenvalues().array() + 1.0) * 0.5;
  r.w = es.eigenvectors().row(0).transpose().array().square();
  // Symmetrize to remove the eigen-solver's last-bit asymmetry.
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (r.x[i] + (1.0 - r.x[n - 1 - i]));
    const double w = 0.5 * (r.w[i] + r.w[n - 1 - i]);
    r.x[i] = x;
    r.x[n - 1 - i] = 1.0 - x;
    r.w[i] = r.w[n - 1 - i] = w;
  }
  if (n % 2) r.x[n / 2] = 0.5;
  r.w /= r.w.sum();
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static const std::vector<GaussRule> rules = [] {
    std::vector<GaussRule> v(kMaxGaussPoints + 1);
    for (int k = 1; k <= kMaxGaussPoints; ++k) v[k] = golub_welsch(k);
    return v;
  }();
  if (n < 1 || n > kMaxGaussPoints) throw Error(ErrorKind::InvalidArgument, "Gauss rule size out of range");
  return rules[n];
}

int gauss_points_for(double ratio, double tol) {
  if (!(ratio < 1e300)) return 1;
  // Bernstein ellipse through the singularity: rho = a + sqrt(a^2 - 1), a = 1 + 2 ratio.
  const double a = 1.0 + 2.0 * ratio;
  const double rho = a + std::sqrt(a * a - 1.0);
  const int n = static_cast<int>(std::ceil(std::log(1.0 / tol) / (2.0 * std::log(rho))));
  return std::clamp(n, 1, 24);
}

}  // namespace anisonorm
