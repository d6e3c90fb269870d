#include "anisonorm/operators.hpp"

#include "anisonorm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace anisonorm {

namespace {

// Integrand factor |y - at|^-power near `at`; power <= 0 marks a point where the kernel is
// only non-smooth (a kink), which still needs splitting.
struct Singular {
  double at;
  double power;
};

// Product integration of a kernel against the two hat functions of one cell [yl, yr],
// restricted to a sub-range. Pieces are split at singular points; a piece whose endpoint is
// singular is integrated after the substitution y = e + L t^sigma, sigma = 2 / (1 - power),
// and pieces closer to an outside singular point than their width are split geometrically.
template <typename Kernel>
class CellIntegrator {
 public:
  CellIntegrator(const Kernel& k, double x, std::vector<Singular> sings, double tol)
      : k_(k), x_(x), sings_(std::move(sings)), tol_(tol) {
    n_sub_ = tol < 1e-9 ? 20 : 12;
  }

  void integrate(double yl, double yr, double a, double b, double& wl, double& wr) {
    yl_ = yl;
    yr_ = yr;
    h_ = yr - yl;
    wl_ = wr_ = 0.0;
    splits_.clear();
    splits_.push_back(a);
    for (const Singular& s : sings_)
      if (s.at > a && s.at < b) splits_.push_back(s.at);
    splits_.push_back(b);
    std::sort(splits_.begin(), splits_.end());
    for (std::size_t i = 0; i + 1 < splits_.size(); ++i)
      if (splits_[i + 1] > splits_[i]) piece(splits_[i], splits_[i + 1]);
    wl = wl_;
    wr = wr_;
  }

 private:
  void accumulate(double y, double weight_times_kernel) {
    const double fr = (y - yl_) / h_;
    wl_ += weight_times_kernel * (1.0 - fr);
    wr_ += weight_times_kernel * fr;
  }

  void piece(double u0, double v0) {
    stack_.clear();
    stack_.push_back({u0, v0});
    while (!stack_.empty()) {
      const auto [u, v] = stack_.back();
      stack_.pop_back();
      double mu_u = 0.0, mu_v = 0.0, dl = kInf, dr = kInf;
      bool sing_u = false, sing_v = false;
      for (const Singular& s : sings_) {
        if (s.at == u) {
          sing_u = true;
          mu_u += std::max(0.0, s.power);
        } else if (s.at == v) {
          sing_v = true;
          mu_v += std::max(0.0, s.power);
        } else if (s.at < u) {
          dl = std::min(dl, u - s.at);
        } else if (s.at > v) {
          dr = std::min(dr, s.at - v);
        }
      }
      const double width = v - u;
      if (sing_u && sing_v) {
        const double m = u + 0.5 * width;
        if (!(m > u && m < v)) continue;
        stack_.push_back({u, m});
        stack_.push_back({m, v});
        continue;
      }
      const double d = std::min(dl, dr);
      if (d < width) {
        const double c = dl <= dr ? u + dl : v - dr;
        if (c > u && c < v) {
          stack_.push_back({u, c});
          stack_.push_back({c, v});
          continue;
        }
      }
      if (sing_u) {
        substituted(u, width, +1.0, mu_u);
      } else if (sing_v) {
        substituted(v, width, -1.0, mu_v);
      } else {
        gauss(u, v, gauss_points_for(d / width, tol_));
      }
    }
  }

  void gauss(double u, double v, int n) {
    const GaussRule& g = gauss_legendre(n);
    const double len = v - u, ux = u - x_;
    for (int i = 0; i < n; ++i) {
      const double off = len * g.x[i];
      const double y = u + off;
      accumulate(y, g.w[i] * len * k_(y, ux + off));
    }
  }

  void substituted(double e, double len, double dir, double mu) {
    const double sigma = 2.0 / (1.0 - mu);
    const GaussRule& g = gauss_legendre(n_sub_);
    const double ex = e - x_;
    for (int i = 0; i < n_sub_; ++i) {
      const double t = g.x[i];
      const double ts = std::pow(t, sigma - 1.0);
      const double off = dir * len * ts * t;
      const double y = e + off;
      accumulate(y, g.w[i] * len * sigma * ts * k_(y, ex + off));
    }
  }

  const Kernel& k_;
  double x_;
  std::vector<Singular> sings_;
  double tol_;
  int n_sub_;
  double yl_ = 0, yr_ = 0, h_ = 1, wl_ = 0, wr_ = 0;
  std::vector<double> splits_;
  std::vector<std::pair<double, double>> stack_;
};

struct RieszKernel {
  double alpha, gamma;
  double operator()(double y, double ymx) const {
    double r = 1.0;
    if (alpha != 0.0) r *= std::pow(std::abs(y), -alpha);
    if (gamma != 0.0) r *= std::pow(std::abs(ymx), -gamma);
    return r;
  }
};

struct LogRieszKernel {
  double alpha, delta;
  const SlowlyVarying* s;
  double operator()(double, double ymx) const {
    const double t = std::abs(ymx);
    const double lg = std::abs(std::log(t));
    if (lg == 0.0) return 0.0;
    return std::pow(t, alpha - 1.0) * std::pow(lg, delta) * s->fn(lg);
  }
};

struct WeightKernel {
  double beta;
  double operator()(double y, double) const { return beta != 0.0 ? std::pow(std::abs(y), -beta) : 1.0; }
};

// Integration sub-ranges of the cell [yl, yr] inside the domain.
template <typename F>
void for_domain_ranges(Domain dom, double r, double yl, double yr, F&& fn) {
  switch (dom) {
    case Domain::Full:
      fn(yl, yr);
      break;
    case Domain::Interior: {
      const double a = std::max(yl, -r), b = std::min(yr, r);
      if (b > a) fn(a, b);
      break;
    }
    case Domain::Exterior: {
      const double b1 = std::min(yr, -r);
      if (b1 > yl) fn(yl, b1);
      const double a2 = std::max(yl, r);
      if (yr > a2) fn(a2, yr);
      break;
    }
  }
}

template <typename Kernel>
void hat_row(const Kernel& k, double x, std::vector<Singular> sings, const BlockOperatorSpec& spec,
             const ArrayX& axis, double* row) {
  const Index n = axis.size();
  std::fill(row, row + n, 0.0);
  CellIntegrator<Kernel> ci(k, x, std::move(sings), spec.tolerance);
  for (Index c = 0; c + 1 < n; ++c) {
    for_domain_ranges(spec.domain, spec.radius, axis[c], axis[c + 1], [&](double a, double b) {
      double wl = 0.0, wr = 0.0;
      ci.integrate(axis[c], axis[c + 1], a, b, wl, wr);
      row[c] += wl;
      row[c + 1] += wr;
    });
  }
}

void check_block(const BlockOperatorSpec& spec) {
  if (spec.params.m != 1) throw Error(ErrorKind::BlockDimension, "numeric blocks need m = 1");
  if (!(spec.tolerance > 0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  if (spec.domain != Domain::Full && !(spec.radius > 0))
    throw Error(ErrorKind::InvalidArgument, "domain radius must be positive");
}

void riesz_row(const BlockOperatorSpec& spec, const ArrayX& axis, double x, double* row) {
  check_block(spec);
  const BlockParams& b = spec.params;
  if (!b.gamma) throw Error(ErrorKind::InvalidArgument, "Riesz block needs gamma");
  const double g = *b.gamma;
  if (!(b.alpha >= 0 && b.beta >= 0 && g >= 0 && b.alpha + g < 1))
    throw Error(ErrorKind::InvalidArgument, "Riesz block needs alpha, beta, gamma >= 0 and alpha + gamma < 1");
  if (x == 0.0 && b.beta > 0) throw Error(ErrorKind::SingularOutputPoint, "x = 0 with beta > 0");
  std::vector<Singular> s;
  if (x == 0.0) {
    if (b.alpha + g > 0) s.push_back({0.0, b.alpha + g});
  } else {
    if (b.alpha > 0) s.push_back({0.0, b.alpha});
    if (g > 0) s.push_back({x, g});
  }
  hat_row(RieszKernel{b.alpha, g}, x, std::move(s), spec, axis, row);
  if (b.beta > 0) {
    const double w = std::pow(std::abs(x), -b.beta);
    for (Index i = 0; i < axis.size(); ++i) row[i] *= w;
  }
}

void log_riesz_row(const BlockOperatorSpec& spec, const ArrayX& axis, double x, double* row) {
  check_block(spec);
  const BlockParams& b = spec.params;
  if (!(b.alpha > 0 && b.alpha < 1) || !b.delta || !(*b.delta > 0))
    throw Error(ErrorKind::InvalidArgument, "log-Riesz block needs 0 < alpha < 1 and delta > 0");
  const std::string id = b.slow_vary_id.value_or("one");
  const SlowlyVarying* s = find_slowly_varying(id);
  if (!s) throw Error(ErrorKind::InvalidArgument, "unknown slowly varying function '" + id + "'");
  std::vector<Singular> sing{{x, 1.0 - b.alpha}, {x - 1.0, 0.0}, {x + 1.0, 0.0}};
  hat_row(LogRieszKernel{b.alpha, *b.delta, s}, x, std::move(sing), spec, axis, row);
}

ArrayX fourier_moments(const BlockOperatorSpec& spec, const ArrayX& axis) {
  check_block(spec);
  const double beta = spec.params.beta;
  if (!(beta >= 0 && beta < 1) || !(spec.params.alpha >= 0))
    throw Error(ErrorKind::InvalidArgument, "Fourier block needs alpha >= 0 and 0 <= beta < 1");
  ArrayX m(axis.size());
  std::vector<Singular> s;
  if (beta > 0) s.push_back({0.0, beta});
  BlockOperatorSpec full = spec;
  full.domain = Domain::Full;
  hat_row(WeightKernel{beta}, 0.0, std::move(s), full, axis, m.data());
  return m;
}

// Largest cell width among cells touching the support of the samples.
double support_step(const ArrayX& axis, const Eigen::Array<bool, Eigen::Dynamic, 1>& nonzero) {
  double h = 0.0;
  for (Index c = 0; c + 1 < axis.size(); ++c)
    if (nonzero[c] || nonzero[c + 1]) h = std::max(h, axis[c + 1] - axis[c]);
  return h;
}

void check_band(const ArrayX& out_axis, const ArrayX& src_axis, const Eigen::Array<bool, Eigen::Dynamic, 1>& nz) {
  const double h = support_step(src_axis, nz);
  const double xmax = out_axis.abs().maxCoeff();
  if (xmax * h > std::numbers::pi * (1.0 + 1e-12))
    throw Error(ErrorKind::FrequencyOutOfBand,
                "frequency " + std::to_string(xmax) + " exceeds the band pi/h = " + std::to_string(std::numbers::pi / h));
}

void fourier_row(const BlockOperatorSpec& spec, const ArrayX& axis, const ArrayX& moments, double x,
                 Complex* row) {
  const double alpha = spec.params.alpha;
  if (x == 0.0 && alpha > 0) throw Error(ErrorKind::SingularOutputPoint, "x = 0 with alpha > 0");
  const double c = (alpha > 0 ? std::pow(std::abs(x), -alpha) : 1.0) / std::sqrt(2.0 * std::numbers::pi);
  for (Index k = 0; k < axis.size(); ++k) {
    const double ph = x * axis[k];
    row[k] = c * moments[k] * Complex(std::cos(ph), std::sin(ph));
  }
}

void validate_line(const ArrayX& axis, const ArrayX& f) {
  if (axis.size() != f.size()) throw Error(ErrorKind::InvalidArgument, "samples do not match axis");
  if (!strictly_increasing(axis)) throw Error(ErrorKind::InvalidArgument, "axis must be strictly increasing");
}

template <typename T, typename M>
auto mode_product(const Eigen::Array<T, Eigen::Dynamic, 1>& data, const std::vector<Index>& dims, std::size_t j,
                  const M& w) {
  using W = typename M::Scalar;
  using R = std::conditional_t<std::is_same_v<T, Complex> || std::is_same_v<W, Complex>, Complex, double>;
  Index inner = 1, outer = 1;
  for (std::size_t i = 0; i < j; ++i) inner *= dims[i];
  for (std::size_t i = j + 1; i < dims.size(); ++i) outer *= dims[i];
  const Index n = dims[j], nout = w.rows();
  Eigen::Array<R, Eigen::Dynamic, 1> out(inner * nout * outer);
  auto run = [&](const auto& wmat) {
    for (Index o = 0; o < outer; ++o) {
      Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>> in(data.data() + o * inner * n, inner, n);
      Eigen::Map<Eigen::Matrix<R, Eigen::Dynamic, Eigen::Dynamic>> res(out.data() + o * inner * nout, inner, nout);
      if (inner == 1) {
        // A single line: matrix-vector product against the block matrix as stored.
        if constexpr (std::is_same_v<T, R>) res.transpose().noalias() = wmat * in.transpose();
        else res.transpose().noalias() = wmat * in.transpose().template cast<R>();
      } else if constexpr (std::is_same_v<T, R>) {
        res.noalias() = in * wmat.transpose();
      } else {
        res.noalias() = in.template cast<R>() * wmat.transpose();
      }
    }
  };
  if constexpr (std::is_same_v<W, R>) run(w);
  else run(Eigen::Matrix<R, Eigen::Dynamic, Eigen::Dynamic>(w.template cast<R>()));
  return out;
}

}  // namespace

double apply_riesz_block(const BlockOperatorSpec& spec, const ArrayX& axis, const ArrayX& f, double x) {
  validate_line(axis, f);
  ArrayX row(axis.size());
  riesz_row(spec, axis, x, row.data());
  return (row * f).sum();
}

double apply_log_riesz_block(const BlockParams& params, const ArrayX& axis, const ArrayX& f, double x,
                             double tolerance) {
  validate_line(axis, f);
  BlockOperatorSpec spec;
  spec.kind = BlockKind::LogRiesz;
  spec.params = params;
  spec.tolerance = tolerance;
  ArrayX row(axis.size());
  log_riesz_row(spec, axis, x, row.data());
  return (row * f).sum();
}

Complex apply_fourier_block(const BlockOperatorSpec& spec, const ArrayX& axis, const ArrayX& f, double x) {
  validate_line(axis, f);
  const ArrayX m = fourier_moments(spec, axis);
  check_band(ArrayX::Constant(1, x), axis, f != 0.0);
  Eigen::ArrayXcd row(axis.size());
  fourier_row(spec, axis, m, x, row.data());
  return (row * f.cast<Complex>()).sum();
}

BlockOperatorSpec block_spec(const OperatorFamily& fam, int j, double tolerance) {
  BlockOperatorSpec s;
  s.params = fam.blocks[static_cast<std::size_t>(j)];
  s.tolerance = tolerance;
  s.radius = fam.domain_radius;
  switch (fam.block_kind(j)) {
    case BlockKind::Riesz: s.kind = BlockKind::Riesz; break;
    case BlockKind::RieszInterior: s.kind = BlockKind::Riesz; s.domain = Domain::Interior; break;
    case BlockKind::RieszExterior: s.kind = BlockKind::Riesz; s.domain = Domain::Exterior; break;
    case BlockKind::LogRiesz: s.kind = BlockKind::LogRiesz; break;
    case BlockKind::Fourier: s.kind = BlockKind::Fourier; break;
    case BlockKind::FourierSlowVary:
      throw Error(ErrorKind::UnsupportedFamily, "slowly varying Fourier numerics are not supported");
    case BlockKind::Mixture:
      throw Error(ErrorKind::UnsupportedFamily, "mixture operator numerics are not supported");
  }
  return s;
}

ArrayX default_output_axis(const BlockOperatorSpec& spec, const ArrayX& src) {
  const bool singular_at_zero =
      (spec.kind == BlockKind::Riesz && spec.params.beta > 0) || (spec.kind == BlockKind::Fourier && spec.params.alpha > 0);
  std::vector<double> keep;
  for (double x : src) {
    if (singular_at_zero && x == 0.0) continue;
    if (spec.kind == BlockKind::Riesz && spec.domain == Domain::Interior && !(std::abs(x) < spec.radius)) continue;
    if (spec.kind == BlockKind::Riesz && spec.domain == Domain::Exterior && !(std::abs(x) > spec.radius)) continue;
    keep.push_back(x);
  }
  if (keep.empty()) throw Error(ErrorKind::InvalidArgument, "default output axis is empty");
  return Eigen::Map<ArrayX>(keep.data(), static_cast<Index>(keep.size()));
}

BlockMatrix assemble_block(const BlockOperatorSpec& spec, const ArrayX& src) {
  if (!strictly_increasing(src)) throw Error(ErrorKind::InvalidArgument, "source axis must be strictly increasing");
  BlockMatrix bm;
  bm.kind = spec.kind;
  bm.source_axis = src;
  bm.output_axis = spec.output_axis.size() ? spec.output_axis : default_output_axis(spec, src);
  if (!strictly_increasing(bm.output_axis))
    throw Error(ErrorKind::InvalidArgument, "output axis must be strictly increasing");
  const Index nout = bm.output_axis.size(), n = src.size();
  if (spec.kind == BlockKind::Fourier) {
    const ArrayX m = fourier_moments(spec, src);
    bm.complex.resize(nout, n);
    Eigen::ArrayXcd row(n);
    for (Index i = 0; i < nout; ++i) {
      fourier_row(spec, src, m, bm.output_axis[i], row.data());
      bm.complex.row(i) = row.matrix().transpose();
    }
    return bm;
  }
  // Row-major scratch keeps each row contiguous while it is filled.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(nout, n);
  for (Index i = 0; i < nout; ++i) {
    if (spec.kind == BlockKind::LogRiesz) log_riesz_row(spec, src, bm.output_axis[i], w.row(i).data());
    else riesz_row(spec, src, bm.output_axis[i], w.row(i).data());
  }
  bm.real = w;
  // Outside the source support a Riesz output decays like |x|^-(beta + gamma).
  if (spec.kind == BlockKind::Riesz && spec.domain != Domain::Interior) {
    const double tau = spec.params.beta + spec.params.gamma.value_or(0.0);
    const double lo = bm.output_axis[0], hi = bm.output_axis[nout - 1];
    if (tau > 0 && lo < 0 && lo <= src[0]) bm.tail.lower = tau;
    if (tau > 0 && hi > 0 && hi >= src[n - 1]) bm.tail.upper = tau;
  }
  return bm;
}

TensorOperator::TensorOperator(const OperatorFamily& fam, const std::vector<ArrayX>& source_axes,
                               const ApplyOptions& opt) {
  validate_structure(fam);
  if (static_cast<int>(source_axes.size()) != fam.rank())
    throw Error(ErrorKind::InvalidArgument, "one source axis per block is required");
  if (fam.kind == FamilyKind::Mixture || fam.kind == FamilyKind::FourierSlowVary)
    throw Error(ErrorKind::UnsupportedFamily, std::string(to_string(fam.kind)) + " numerics are not supported");
  for (const auto& b : fam.blocks)
    if (b.m != 1) throw Error(ErrorKind::BlockDimension, "numeric evaluation needs m_j = 1 for every block");
  if (!opt.output_axes.empty() && static_cast<int>(opt.output_axes.size()) != fam.rank())
    throw Error(ErrorKind::InvalidArgument, "output axes must be given for every block or none");
  for (int j = 0; j < fam.rank(); ++j) {
    BlockOperatorSpec s = block_spec(fam, j, opt.tolerance);
    if (!opt.output_axes.empty()) s.output_axis = opt.output_axes[static_cast<std::size_t>(j)];
    blocks_.push_back(assemble_block(s, source_axes[static_cast<std::size_t>(j)]));
  }
}

std::vector<ArrayX> TensorOperator::output_axes() const {
  std::vector<ArrayX> out;
  for (const auto& b : blocks_) out.push_back(b.output_axis);
  return out;
}

template <typename T>
AnyGrid TensorOperator::apply_impl(const GridFunction<T>& f, std::vector<std::string>* warnings) const {
  if (f.rank() != static_cast<Index>(blocks_.size()))
    throw Error(ErrorKind::InvalidArgument, "input rank does not match the operator");
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const ArrayX& a = f.axis(static_cast<Index>(j));
    if (a.size() != blocks_[j].source_axis.size() || !(a == blocks_[j].source_axis).all())
      throw Error(ErrorKind::InvalidArgument, "input axes differ from the prepared source axes");
  }
  if (warnings) {
    const double vmax = f.values().abs().maxCoeff();
    for (Index j = 0; j < f.rank(); ++j) {
      // Largest sample on the first and last hyperplanes of axis j.
      const Index n = f.size(j), s = f.stride(j);
      double edge = 0.0;
      for (Index flat = 0; flat < f.total(); ++flat) {
        const Index i = (flat / s) % n;
        if (i == 0 || i == n - 1) edge = std::max(edge, std::abs(f.values()[flat]));
      }
      if (vmax > 0 && edge > 1e-6 * vmax)
        warnings->push_back("TruncationWarning: axis " + std::to_string(j + 1) +
                            " input does not vanish at the truncation radius");
    }
  }
  std::vector<Index> dims;
  for (Index j = 0; j < f.rank(); ++j) dims.push_back(f.size(j));

  Eigen::ArrayXd real_data;
  Eigen::ArrayXcd complex_data;
  bool is_complex = std::is_same_v<T, Complex>;
  if constexpr (std::is_same_v<T, Complex>) complex_data = f.values();
  else real_data = f.values();

  for (std::size_t jj = blocks_.size(); jj-- > 0;) {
    const BlockMatrix& b = blocks_[jj];
    if (b.is_complex()) {
      // Support of the current data along this axis, for the band check.
      Eigen::Array<bool, Eigen::Dynamic, 1> nz = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(dims[jj], false);
      Index s = 1;
      for (std::size_t i = 0; i < jj; ++i) s *= dims[i];
      const Index total = is_complex ? complex_data.size() : real_data.size();
      for (Index flat = 0; flat < total; ++flat) {
        const bool nonzero = is_complex ? complex_data[flat] != Complex(0.0) : real_data[flat] != 0.0;
        if (nonzero) nz[(flat / s) % dims[jj]] = true;
      }
      check_band(b.output_axis, b.source_axis, nz);
      complex_data = is_complex ? mode_product(complex_data, dims, jj, b.complex)
                                : mode_product(real_data, dims, jj, b.complex);
      is_complex = true;
    } else if (is_complex) {
      complex_data = mode_product(complex_data, dims, jj, b.real);
    } else {
      real_data = mode_product(real_data, dims, jj, b.real);
    }
    dims[jj] = b.output_axis.size();
  }

  std::vector<ArrayX> axes;
  std::vector<AxisTail> tails;
  for (const auto& b : blocks_) {
    axes.push_back(b.output_axis);
    tails.push_back(b.tail);
  }
  auto finite = [](const auto& v) {
    if (!v.allFinite()) throw Error(ErrorKind::NonFiniteResult, "operator output is not finite");
  };
  if (is_complex) {
    finite(complex_data);
    return ComplexGrid(std::move(axes), std::move(complex_data), {}, std::move(tails));
  }
  finite(real_data);
  return RealGrid(std::move(axes), std::move(real_data), {}, std::move(tails));
}

AnyGrid TensorOperator::apply(const RealGrid& f, std::vector<std::string>* warnings) const {
  return apply_impl(f, warnings);
}

AnyGrid TensorOperator::apply(const ComplexGrid& f, std::vector<std::string>* warnings) const {
  return apply_impl(f, warnings);
}

AnyGrid apply_tensor_operator(const OperatorFamily& fam, const RealGrid& f, const ApplyOptions& opt,
                              std::vector<std::string>* warnings) {
  return TensorOperator(fam, f.axes(), opt).apply(f, warnings);
}

AnyGrid apply_tensor_operator(const OperatorFamily& fam, const ComplexGrid& f, const ApplyOptions& opt,
                              std::vector<std::string>* warnings) {
  return TensorOperator(fam, f.axes(), opt).apply(f, warnings);
}

}  // namespace anisonorm
