#pragma once

#include "anisonorm/grid_function.hpp"

#include <functional>
#include <vector>

namespace anisonorm {

// Iterated norm |f|_p, innermost axis 0 first, composite trapezoid weights per axis,
// power-law tails added analytically (+inf when a tail is not p-integrable), p_j = inf taken
// as the grid max along axis j.
template <typename T>
double mixed_norm(const GridFunction<T>& f, const ArrayX& p);
double mixed_norm(const AnyGrid& f, const ArrayX& p);

// Joint single-exponent norm over the whole grid with product weights (tails ignored).
template <typename T>
double flat_norm(const GridFunction<T>& f, double p);

// Open box lo < p < hi (hi may be inf).
struct Box {
  ArrayX lo;
  ArrayX hi;
  bool contains(const ArrayX& p) const;
};

class PGrid {
 public:
  // Per axis: points inside (lo, hi) log-spaced toward both ends, the closest at distance
  // min_offset, plus the midpoint. hi = inf is handled in 1/p coordinates.
  struct Axis {
    double lo = 1.0;
    double hi = 2.0;
    int levels = 4;
    double min_offset = 1e-3;
  };

  PGrid() = default;
  // Tensor grid from explicit sorted per-axis points.
  explicit PGrid(std::vector<ArrayX> axis_points);
  static PGrid log_spaced(const std::vector<Axis>& axes);

  // Doubles the level count; the refined grid contains every point of this grid.
  PGrid refined() const;

  Index rank() const { return static_cast<Index>(pts_.size()); }
  Index size() const;
  ArrayX point(Index k) const;
  std::vector<ArrayX> points() const;
  const std::vector<ArrayX>& axis_points() const { return pts_; }

 private:
  std::vector<ArrayX> pts_;
  std::vector<Axis> spec_;
};

class PsiFunction {
 public:
  enum class Kind { Continuous, Spike, Natural };
  using Evaluator = std::function<double(const ArrayX&)>;

  static PsiFunction continuous(Box support, Evaluator fn);
  static PsiFunction constant(Box support, double value = 1.0);
  static PsiFunction spike(ArrayX r);
  static PsiFunction natural(PGrid nodes, ArrayX table);

  Kind kind() const { return kind_; }
  const Box& support() const { return support_; }
  const ArrayX& spike_point() const { return spike_; }

  // +inf outside the support.
  double operator()(const ArrayX& p) const;

  // Smallest value over the grid; positive for a valid psi.
  double infimum_on(const PGrid& grid) const;

 private:
  Kind kind_ = Kind::Continuous;
  Box support_;
  Evaluator fn_;
  ArrayX spike_;
};

template <typename T>
double gls_norm(const GridFunction<T>& f, const PsiFunction& psi, const PGrid& grid);
double gls_norm(const AnyGrid& f, const PsiFunction& psi, const PGrid& grid);

template <typename T>
PsiFunction natural_psi(const std::vector<GridFunction<T>>& family, const PGrid& grid);

}  // namespace anisonorm
