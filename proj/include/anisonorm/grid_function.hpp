#pragma once

#include "anisonorm/axis.hpp"
#include "anisonorm/core.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

namespace anisonorm {

// Power-law decay exponents beyond the axis ends: |f(x)| ~ |f(end)| (|x|/|end|)^(-exponent).
// NaN means the function is taken to vanish outside the axis.
struct AxisTail {
  double lower = std::numeric_limits<double>::quiet_NaN();
  double upper = std::numeric_limits<double>::quiet_NaN();

  bool has_lower() const { return !std::isnan(lower); }
  bool has_upper() const { return !std::isnan(upper); }
};

// Samples of a function on a tensor grid. Values are stored flat with axis 0 varying fastest.
template <typename T>
class GridFunction {
 public:
  using Scalar = T;
  using Values = Eigen::Array<T, Eigen::Dynamic, 1>;

  GridFunction() = default;

  GridFunction(std::vector<ArrayX> axes, Values values, std::vector<double> radii = {},
               std::vector<AxisTail> tails = {})
      : axes_(std::move(axes)), values_(std::move(values)), radii_(std::move(radii)), tails_(std::move(tails)) {
    if (axes_.empty()) throw Error(ErrorKind::InvalidArgument, "grid function needs at least one axis");
    Index total = 1;
    for (const auto& a : axes_) {
      if (a.size() < 1 || !strictly_increasing(a))
        throw Error(ErrorKind::InvalidArgument, "axes must be non-empty and strictly increasing");
      total *= a.size();
    }
    if (values_.size() != total)
      throw Error(ErrorKind::InvalidArgument, "values size does not match axis lengths");
    if (!values_.allFinite()) throw Error(ErrorKind::InvalidArgument, "samples must be finite");
    if (radii_.empty())
      for (const auto& a : axes_) radii_.push_back(std::max(std::abs(a[0]), std::abs(a[a.size() - 1])));
    if (tails_.empty()) tails_.resize(axes_.size());
    if (radii_.size() != axes_.size() || tails_.size() != axes_.size())
      throw Error(ErrorKind::InvalidArgument, "radii and tails must have one entry per axis");
  }

  Index rank() const { return static_cast<Index>(axes_.size()); }
  Index size(Index j) const { return axes_[j].size(); }
  Index total() const { return values_.size(); }
  const std::vector<ArrayX>& axes() const { return axes_; }
  const ArrayX& axis(Index j) const { return axes_[j]; }
  const Values& values() const { return values_; }
  const std::vector<double>& truncation_radii() const { return radii_; }
  const std::vector<AxisTail>& tails() const { return tails_; }

  Index stride(Index j) const {
    Index s = 1;
    for (Index i = 0; i < j; ++i) s *= axes_[i].size();
    return s;
  }

  T at(const std::vector<Index>& idx) const {
    Index flat = 0;
    for (Index j = rank() - 1; j >= 0; --j) flat = flat * axes_[j].size() + idx[j];
    return values_[flat];
  }

  GridFunction scaled(T c) const { return GridFunction(axes_, values_ * c, radii_, tails_); }

  GridFunction with_tails(std::vector<AxisTail> tails) const {
    return GridFunction(axes_, values_, radii_, std::move(tails));
  }

 private:
  std::vector<ArrayX> axes_;
  Values values_;
  std::vector<double> radii_;
  std::vector<AxisTail> tails_;
};

using RealGrid = GridFunction<double>;
using ComplexGrid = GridFunction<Complex>;
using AnyGrid = std::variant<RealGrid, ComplexGrid>;

// Samples fn(x) on one axis.
template <typename F>
auto sample_line(const ArrayX& axis, F fn) {
  using T = decltype(fn(0.0));
  typename GridFunction<T>::Values v(axis.size());
  for (Index i = 0; i < axis.size(); ++i) v[i] = fn(axis[i]);
  return GridFunction<T>({axis}, std::move(v));
}

// Samples fn(point) on the tensor grid, point being an ArrayX of coordinates.
template <typename F>
auto sample_grid(const std::vector<ArrayX>& axes, F fn) {
  using T = decltype(fn(ArrayX()));
  Index total = 1;
  for (const auto& a : axes) total *= a.size();
  typename GridFunction<T>::Values v(total);
  std::vector<Index> idx(axes.size(), 0);
  ArrayX x(static_cast<Index>(axes.size()));
  for (Index flat = 0; flat < total; ++flat) {
    for (std::size_t j = 0; j < axes.size(); ++j) x[static_cast<Index>(j)] = axes[j][idx[j]];
    v[flat] = fn(x);
    for (std::size_t j = 0; j < axes.size(); ++j) {
      if (++idx[j] < axes[j].size()) break;
      idx[j] = 0;
    }
  }
  return GridFunction<T>(axes, std::move(v));
}

// Outer product of one-dimensional factors; factor j becomes axis j.
template <typename T>
GridFunction<T> tensor_product(const std::vector<GridFunction<T>>& factors) {
  if (factors.empty()) throw Error(ErrorKind::InvalidArgument, "tensor product needs factors");
  std::vector<ArrayX> axes;
  std::vector<double> radii;
  std::vector<AxisTail> tails;
  typename GridFunction<T>::Values v = GridFunction<T>::Values::Ones(1);
  for (const auto& f : factors) {
    if (f.rank() != 1) throw Error(ErrorKind::InvalidArgument, "tensor factors must be one-dimensional");
    axes.push_back(f.axis(0));
    radii.push_back(f.truncation_radii()[0]);
    tails.push_back(f.tails()[0]);
    const Index inner = v.size(), n = f.size(0);
    typename GridFunction<T>::Values next(inner * n);
    for (Index k = 0; k < n; ++k) next.segment(k * inner, inner) = v * f.values()[k];
    v = std::move(next);
  }
  return GridFunction<T>(std::move(axes), std::move(v), std::move(radii), std::move(tails));
}

// T_lambda f (x) = f(lambda_1 x_1, ..., lambda_l x_l), by rescaling axes.
template <typename T>
GridFunction<T> dilate(const GridFunction<T>& f, const ArrayX& lambda) {
  if (lambda.size() != f.rank() || !(lambda > 0).all())
    throw Error(ErrorKind::InvalidArgument, "dilation needs one positive factor per axis");
  std::vector<ArrayX> axes;
  std::vector<double> radii;
  for (Index j = 0; j < f.rank(); ++j) {
    axes.push_back(f.axis(j) / lambda[j]);
    radii.push_back(f.truncation_radii()[static_cast<std::size_t>(j)] / lambda[j]);
  }
  return GridFunction<T>(std::move(axes), f.values(), std::move(radii), f.tails());
}

inline ComplexGrid to_complex(const RealGrid& f) {
  return ComplexGrid(f.axes(), f.values().template cast<Complex>(), f.truncation_radii(), f.tails());
}

}  // namespace anisonorm
