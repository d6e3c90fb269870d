#include "anisonorm/norms.hpp"

#include <algorithm>
#include <cmath>

namespace anisonorm {

namespace {

struct AxisData {
  ArrayX log_w;
  double lo = 0.0, hi = 0.0;  // axis end coordinates
  AxisTail tail;
};

AxisData axis_data(const ArrayX& axis, const AxisTail& tail) {
  AxisData d;
  const Index n = axis.size();
  d.log_w = n > 1 ? ArrayX(trapezoid_weights(axis).log()) : ArrayX::Zero(1);
  d.lo = axis[0];
  d.hi = axis[n - 1];
  d.tail = tail;
  return d;
}

// log of the power-law tail integral of (v_end (|x|/|end|)^-tau)^p beyond |end|, relative to vmax.
double tail_log_term(double v_end, double vmax, double end, double tau, double p) {
  if (v_end == 0.0) return -kInf;
  if (!(tau * p > 1.0)) return kInf;
  return p * std::log(v_end / vmax) + std::log(std::abs(end)) - std::log(tau * p - 1.0);
}

// Norm of one contiguous line of magnitudes.
double line_norm(const double* v, Index n, const AxisData& ax, double p, std::vector<double>& buf) {
  double vmax = 0.0;
  for (Index i = 0; i < n; ++i) vmax = std::max(vmax, v[i]);
  if (vmax == 0.0) return 0.0;
  if (p == kInf) return vmax;
  buf.resize(static_cast<std::size_t>(n) + 2);
  std::size_t k = 0;
  double tmax = -kInf;
  if (n == 1) {
    buf[k++] = 0.0;
    tmax = 0.0;
  } else {
    for (Index i = 0; i < n; ++i) {
      if (v[i] == 0.0) continue;
      const double t = ax.log_w[i] + p * std::log(v[i] / vmax);
      buf[k++] = t;
      tmax = std::max(tmax, t);
    }
  }
  if (ax.tail.has_upper() && ax.hi > 0) {
    const double t = tail_log_term(v[n - 1], vmax, ax.hi, ax.tail.upper, p);
    if (t == kInf) return kInf;
    buf[k++] = t;
    tmax = std::max(tmax, t);
  }
  if (ax.tail.has_lower() && ax.lo < 0) {
    const double t = tail_log_term(v[0], vmax, ax.lo, ax.tail.lower, p);
    if (t == kInf) return kInf;
    buf[k++] = t;
    tmax = std::max(tmax, t);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += std::exp(buf[i] - tmax);
  return vmax * std::exp((tmax + std::log(s)) / p);
}

void check_p(const ArrayX& p, Index rank) {
  if (p.size() != rank) throw Error(ErrorKind::InvalidArgument, "exponent vector has wrong length");
  for (Index j = 0; j < rank; ++j)
    if (!(p[j] >= 1.0)) throw Error(ErrorKind::InvalidArgument, "norm exponents must be >= 1");
}

}  // namespace

template <typename T>
double mixed_norm(const GridFunction<T>& f, const ArrayX& p) {
  check_p(p, f.rank());
  ArrayX cur = f.values().abs();
  std::vector<double> buf;
  for (Index j = 0; j < f.rank(); ++j) {
    const AxisData ax = axis_data(f.axis(j), f.tails()[static_cast<std::size_t>(j)]);
    const Index n = f.size(j);
    const Index lines = cur.size() / n;
    ArrayX next(lines);
    for (Index l = 0; l < lines; ++l) next[l] = line_norm(cur.data() + l * n, n, ax, p[j], buf);
    cur = std::move(next);
  }
  const double r = cur[0];
  if (std::isnan(r)) throw Error(ErrorKind::NonFiniteResult, "mixed norm is NaN");
  return r;
}

double mixed_norm(const AnyGrid& f, const ArrayX& p) {
  return std::visit([&](const auto& g) { return mixed_norm(g, p); }, f);
}

template <typename T>
double flat_norm(const GridFunction<T>& f, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "norm exponent must be >= 1");
  const ArrayX mag = f.values().abs();
  const double vmax = mag.maxCoeff();
  if (vmax == 0.0) return 0.0;
  if (p == kInf) return vmax;
  std::vector<ArrayX> logw;
  for (Index j = 0; j < f.rank(); ++j)
    logw.push_back(f.size(j) > 1 ? ArrayX(trapezoid_weights(f.axis(j)).log()) : ArrayX::Zero(1));
  std::vector<Index> idx(static_cast<std::size_t>(f.rank()), 0);
  ArrayX terms(mag.size());
  for (Index flat = 0; flat < mag.size(); ++flat) {
    double lw = 0.0;
    for (Index j = 0; j < f.rank(); ++j) lw += logw[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
    terms[flat] = mag[flat] == 0.0 ? -kInf : lw + p * std::log(mag[flat] / vmax);
    for (Index j = 0; j < f.rank(); ++j) {
      auto& i = idx[static_cast<std::size_t>(j)];
      if (++i < f.size(j)) break;
      i = 0;
    }
  }
  const double tmax = terms.maxCoeff();
  const double r = vmax * std::exp((tmax + std::log((terms - tmax).exp().sum())) / p);
  if (!std::isfinite(r)) throw Error(ErrorKind::NonFiniteResult, "flat norm is not finite");
  return r;
}

bool Box::contains(const ArrayX& p) const {
  if (p.size() != lo.size()) return false;
  for (Index j = 0; j < p.size(); ++j)
    if (!(p[j] > lo[j] && p[j] < hi[j])) return false;
  return true;
}

PGrid::PGrid(std::vector<ArrayX> axis_points) : pts_(std::move(axis_points)) {
  for (auto& a : pts_) std::sort(a.begin(), a.end());
}

PGrid PGrid::log_spaced(const std::vector<Axis>& axes) {
  std::vector<ArrayX> pts;
  for (const Axis& a : axes) {
    if (!(a.hi > a.lo) || a.levels < 0 || !(a.min_offset > 0))
      throw Error(ErrorKind::InvalidArgument, "p-grid axis needs lo < hi, levels >= 0, offset > 0");
    // Build in p for finite ranges, in 1/p when the range is unbounded.
    const bool recip_coords = a.hi == kInf;
    const double lo = recip_coords ? 0.0 : a.lo;
    const double hi = recip_coords ? 1.0 / a.lo : a.hi;
    const double half = 0.5 * (hi - lo);
    if (!(a.min_offset < half))
      throw Error(ErrorKind::InvalidArgument, "p-grid offset must be below half the range");
    // exponent k/levels so that doubling levels reproduces every node bit for bit
    const double ratio = a.min_offset / half;
    std::vector<double> v{lo + half};
    for (int k = 1; k <= a.levels; ++k) {
      const double d = half * std::pow(ratio, static_cast<double>(k) / a.levels);
      v.push_back(lo + d);
      v.push_back(hi - d);
    }
    ArrayX out(static_cast<Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Index>(i)] = recip_coords ? 1.0 / v[i] : v[i];
    pts.push_back(out);
  }
  PGrid g(std::move(pts));
  g.spec_ = axes;
  return g;
}

PGrid PGrid::refined() const {
  if (spec_.empty()) throw Error(ErrorKind::InvalidArgument, "only log-spaced grids can be refined");
  std::vector<Axis> axes = spec_;
  for (auto& a : axes) a.levels = std::max(1, 2 * a.levels);
  return log_spaced(axes);
}

Index PGrid::size() const {
  if (pts_.empty()) return 0;
  Index n = 1;
  for (const auto& a : pts_) n *= a.size();
  return n;
}

ArrayX PGrid::point(Index k) const {
  ArrayX p(rank());
  for (Index j = 0; j < rank(); ++j) {
    const ArrayX& a = pts_[static_cast<std::size_t>(j)];
    p[j] = a[k % a.size()];
    k /= a.size();
  }
  return p;
}

std::vector<ArrayX> PGrid::points() const {
  std::vector<ArrayX> out;
  for (Index k = 0; k < size(); ++k) out.push_back(point(k));
  return out;
}

PsiFunction PsiFunction::continuous(Box support, Evaluator fn) {
  PsiFunction psi;
  psi.kind_ = Kind::Continuous;
  psi.support_ = std::move(support);
  psi.fn_ = std::move(fn);
  return psi;
}

PsiFunction PsiFunction::constant(Box support, double value) {
  if (!(value > 0)) throw Error(ErrorKind::InvalidArgument, "psi must be positive");
  return continuous(std::move(support), [value](const ArrayX&) { return value; });
}

PsiFunction PsiFunction::spike(ArrayX r) {
  PsiFunction psi;
  psi.kind_ = Kind::Spike;
  psi.support_ = {r, r};
  psi.spike_ = std::move(r);
  return psi;
}

PsiFunction PsiFunction::natural(PGrid nodes, ArrayX table) {
  if (table.size() != nodes.size() || nodes.size() == 0)
    throw Error(ErrorKind::InvalidArgument, "natural psi table does not match its grid");
  PsiFunction psi;
  psi.kind_ = Kind::Natural;
  const Index l = nodes.rank();
  psi.support_.lo.resize(l);
  psi.support_.hi.resize(l);
  for (Index j = 0; j < l; ++j) {
    const ArrayX& a = nodes.axis_points()[static_cast<std::size_t>(j)];
    psi.support_.lo[j] = a[0];
    psi.support_.hi[j] = a[a.size() - 1];
  }
  const ArrayX log_table = table.log();
  psi.fn_ = [nodes = std::move(nodes), table = std::move(table), log_table](const ArrayX& p) {
    // Multilinear interpolation of log psi; exact table value at grid nodes.
    const Index l = nodes.rank();
    std::vector<Index> base(static_cast<std::size_t>(l));
    std::vector<double> frac(static_cast<std::size_t>(l));
    for (Index j = 0; j < l; ++j) {
      const ArrayX& a = nodes.axis_points()[static_cast<std::size_t>(j)];
      const Index n = a.size();
      const double tol = 1e-12 * std::abs(p[j]);
      if (p[j] < a[0] - tol || p[j] > a[n - 1] + tol) return kInf;
      Index i = 0;
      while (i + 1 < n && a[i + 1] <= p[j] + tol) ++i;
      base[static_cast<std::size_t>(j)] = i;
      frac[static_cast<std::size_t>(j)] =
          (i + 1 < n && std::abs(p[j] - a[i]) > tol) ? (p[j] - a[i]) / (a[i + 1] - a[i]) : 0.0;
    }
    double acc = 0.0;
    bool exact = true;
    for (double t : frac) exact = exact && t == 0.0;
    const Index corners = Index(1) << l;
    for (Index c = 0; c < corners; ++c) {
      double w = 1.0;
      Index flat = 0, stride = 1;
      for (Index j = 0; j < l; ++j) {
        const bool up = (c >> j) & 1;
        const double t = frac[static_cast<std::size_t>(j)];
        w *= up ? t : 1.0 - t;
        flat += (base[static_cast<std::size_t>(j)] + (up ? 1 : 0)) * stride;
        stride *= nodes.axis_points()[static_cast<std::size_t>(j)].size();
      }
      if (w == 0.0) continue;
      if (exact) return table[flat];
      acc += w * log_table[flat];
    }
    return std::exp(acc);
  };
  return psi;
}

double PsiFunction::operator()(const ArrayX& p) const {
  switch (kind_) {
    case Kind::Spike:
      return (p.size() == spike_.size() && (p == spike_).all()) ? 1.0 : kInf;
    case Kind::Natural:
      return fn_(p);
    case Kind::Continuous:
      return support_.contains(p) ? fn_(p) : kInf;
  }
  return kInf;
}

double PsiFunction::infimum_on(const PGrid& grid) const {
  double inf = kInf;
  for (Index k = 0; k < grid.size(); ++k) inf = std::min(inf, (*this)(grid.point(k)));
  return inf;
}

template <typename T>
double gls_norm(const GridFunction<T>& f, const PsiFunction& psi, const PGrid& grid) {
  if (psi.kind() == PsiFunction::Kind::Spike) return mixed_norm(f, psi.spike_point());
  if (grid.size() == 0) throw Error(ErrorKind::EmptyGrid, "p-grid has no points");
  double best = 0.0;
  for (Index k = 0; k < grid.size(); ++k) {
    const ArrayX p = grid.point(k);
    const double w = psi(p);
    if (w == kInf) continue;
    best = std::max(best, mixed_norm(f, p) / w);
  }
  return best;
}

double gls_norm(const AnyGrid& f, const PsiFunction& psi, const PGrid& grid) {
  return std::visit([&](const auto& g) { return gls_norm(g, psi, grid); }, f);
}

template <typename T>
PsiFunction natural_psi(const std::vector<GridFunction<T>>& family, const PGrid& grid) {
  if (family.empty()) throw Error(ErrorKind::InvalidArgument, "natural psi needs a non-empty family");
  if (grid.size() == 0) throw Error(ErrorKind::EmptyGrid, "p-grid has no points");
  ArrayX table(grid.size());
  for (Index k = 0; k < grid.size(); ++k) {
    const ArrayX p = grid.point(k);
    double best = 0.0;
    for (const auto& f : family) {
      try {
        best = std::max(best, mixed_norm(f, p));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::NonFiniteResult)
          throw Error(ErrorKind::UnboundedFamily, "family norm is not finite on the grid");
        throw;
      }
    }
    if (!(best > 0)) throw Error(ErrorKind::UnboundedFamily, "family vanishes at a grid point");
    table[k] = best;
  }
  return PsiFunction::natural(grid, std::move(table));
}

template double mixed_norm(const RealGrid&, const ArrayX&);
template double mixed_norm(const ComplexGrid&, const ArrayX&);
template double flat_norm(const RealGrid&, double);
template double flat_norm(const ComplexGrid&, double);
template double gls_norm(const RealGrid&, const PsiFunction&, const PGrid&);
template double gls_norm(const ComplexGrid&, const PsiFunction&, const PGrid&);
template PsiFunction natural_psi(const std::vector<RealGrid>&, const PGrid&);
template PsiFunction natural_psi(const std::vector<ComplexGrid>&, const PGrid&);

}  // namespace anisonorm
