#include "anisonorm/estimator.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace anisonorm {

namespace {

double power_cutoff(double x, double a, double c) {
  const double ax = std::abs(x);
  if (ax > c) return 0.0;
  if (ax == 0.0) {
    if (a < 0) throw Error(ErrorKind::InvalidArgument, "power profile with a < 0 sampled at x = 0");
    return a == 0.0 ? 1.0 : 0.0;
  }
  return std::pow(ax, a);
}

double bump(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

// Weight exponent of the operator integrand at y = 0 for block j, or nullopt when the
// integration domain stays away from the origin.
std::optional<double> origin_weight(const OperatorFamily& fam, int j) {
  const BlockParams& b = fam.blocks[static_cast<std::size_t>(j)];
  switch (fam.block_kind(j)) {
    case BlockKind::Riesz:
    case BlockKind::RieszInterior: return b.alpha;
    case BlockKind::RieszExterior: return std::nullopt;
    case BlockKind::Fourier:
    case BlockKind::FourierSlowVary: return b.beta;
    case BlockKind::LogRiesz: return 0.0;
    case BlockKind::Mixture: return b.beta;
  }
  return std::nullopt;
}

bool lex_less(const ArrayX& a, const ArrayX& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

double expected_kappa(const OperatorFamily& fam, int j) { return endpoints(fam)[static_cast<std::size_t>(j)].kappa; }

}  // namespace

const char* to_string(TestKind kind) {
  switch (kind) {
    case TestKind::FactorizedBump: return "FactorizedBump";
    case TestKind::PowerCutoff: return "PowerCutoff";
    case TestKind::DilatedGaussian: return "DilatedGaussian";
  }
  return "";
}

std::optional<TestKind> parse_test_kind(const std::string& name) {
  for (TestKind k : {TestKind::FactorizedBump, TestKind::PowerCutoff, TestKind::DilatedGaussian})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

std::vector<std::string> TestFamily::param_names() const {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const std::string s = "_" + std::to_string(j + 1);
    if (kind == TestKind::PowerCutoff) {
      names.push_back("exponent" + s);
    } else {
      names.push_back("scale" + s);
      names.push_back("shift" + s);
    }
  }
  return names;
}

std::vector<Range> TestFamily::search_box(const ArrayX& p) const {
  if (p.size() != static_cast<Index>(blocks.size()))
    throw Error(ErrorKind::InvalidArgument, "test family has wrong number of blocks");
  std::vector<Range> box;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const TestBlockSpec& b = blocks[j];
    if (kind == TestKind::PowerCutoff) {
      const double lo = std::max(b.exponent.lo, -recip(p[static_cast<Index>(j)]) + b.exponent_margin);
      if (!(b.exponent.hi >= lo)) throw Error(ErrorKind::InvalidArgument, "empty exponent range");
      box.push_back({lo, b.exponent.hi});
    } else {
      box.push_back(b.scale);
      box.push_back(b.shift);
    }
  }
  return box;
}

RealGrid TestFamily::generate(const std::vector<ArrayX>& axes, const ArrayX& params) const {
  if (axes.size() != blocks.size() || params.size() != param_count())
    throw Error(ErrorKind::InvalidArgument, "test family parameters do not match the axes");
  std::vector<RealGrid> factors;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const TestBlockSpec& b = blocks[j];
    const Index k = static_cast<Index>(j) * params_per_block();
    switch (kind) {
      case TestKind::PowerCutoff: {
        const double a = params[k];
        factors.push_back(sample_line(axes[j], [&](double x) { return power_cutoff(x, a, b.cutoff); }));
        break;
      }
      case TestKind::DilatedGaussian: {
        const double lam = params[k], s = params[k + 1];
        factors.push_back(sample_line(axes[j], [&](double x) {
          const double u = lam * (x - s);
          return std::exp(-u * u);
        }));
        break;
      }
      case TestKind::FactorizedBump: {
        const double lam = params[k], s = params[k + 1];
        factors.push_back(sample_line(axes[j], [&](double x) { return bump(lam * (x - s)); }));
        break;
      }
    }
  }
  return tensor_product(factors);
}

std::optional<ArrayX> TestFamily::divergent_member(const OperatorFamily& fam, const ArrayX& p) const {
  if (kind != TestKind::PowerCutoff) return std::nullopt;
  const std::vector<Range> box = search_box(p);
  ArrayX x(param_count());
  bool diverges = false;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    x[static_cast<Index>(j)] = 0.5 * (box[j].lo + box[j].hi);
    const auto w = origin_weight(fam, static_cast<int>(j));
    if (w && box[j].lo - *w <= -1.0) {
      x[static_cast<Index>(j)] = box[j].lo;
      diverges = true;
    }
  }
  if (diverges) return x;
  return std::nullopt;
}

RatioEvaluator::RatioEvaluator(const OperatorFamily& family, std::vector<ArrayX> source_axes,
                               const ApplyOptions& options)
    : family_(family),
      source_axes_(std::move(source_axes)),
      tolerance_(options.tolerance),
      op_(family_, source_axes_, options) {}

double RatioEvaluator::ratio(const RealGrid& f, const ArrayX& p) const { return ratio(f, p, q_of_p(family_, p)); }

double RatioEvaluator::ratio(const RealGrid& f, const ArrayX& p, const ArrayX& q) const {
  const double den = mixed_norm(f, p);
  if (!(den > 0)) throw Error(ErrorKind::ZeroDenominator, "input norm is zero");
  return mixed_norm(op_.apply(f), q) / den;
}

double operator_ratio(const OperatorFamily& family, const RealGrid& f, const ArrayX& p, const ApplyOptions& options) {
  const ArrayX q = q_of_p(family, p);
  const double den = mixed_norm(f, p);
  if (!(den > 0)) throw Error(ErrorKind::ZeroDenominator, "input norm is zero");
  return mixed_norm(apply_tensor_operator(family, f, options), q) / den;
}

KEstimate search_lower_bound(const RatioEvaluator& eval, const ArrayX& p, const TestFamily& tests,
                             const SearchOptions& opt) {
  KEstimate est;
  est.p = p;
  est.q = q_of_p(eval.family(), p);
  est.quadrature_tolerance = eval.tolerance();
  if (auto member = tests.divergent_member(eval.family(), p)) {
    est.lower_bound = kInf;
    est.witness = *member;
    est.divergent = true;
    return est;
  }
  const std::vector<Range> box = tests.search_box(p);
  ArrayX x(static_cast<Index>(box.size()));
  for (std::size_t i = 0; i < box.size(); ++i) x[static_cast<Index>(i)] = 0.5 * (box[i].lo + box[i].hi);

  double best = -kInf, worst = kInf;
  ArrayX best_x = x;
  auto objective = [&](const ArrayX& params) {
    const double r = eval.ratio(tests.generate(eval.source_axes(), params), p);
    ++est.evaluations;
    worst = std::min(worst, r);
    if (r > best) {
      best = r;
      best_x = params;
    }
    return r;
  };
  objective(x);

  std::vector<std::size_t> tunable;
  for (std::size_t i = 0; i < box.size(); ++i)
    if (box[i].hi > box[i].lo) tunable.push_back(i);
  // A single tunable parameter makes further sweeps repeat the same line search.
  const int sweeps = tunable.size() <= 1 ? 1 : opt.sweeps;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t i : tunable) {
      const Index ii = static_cast<Index>(i);
      ArrayX trial = best_x;
      auto line = [&](double t) {
        trial[ii] = t;
        return objective(trial);
      };
      double a = box[i].lo, b = box[i].hi;
      double c = b - phi * (b - a), d = a + phi * (b - a);
      double fc = line(c), fd = line(d);
      for (int n = 2; n < opt.evaluations; ++n) {
        if (fc >= fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - phi * (b - a);
          fc = line(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + phi * (b - a);
          fd = line(d);
        }
      }
    }
  }
  est.lower_bound = best;
  est.witness = best_x;
  est.degenerate = best - worst <= 1e-12 * std::abs(best);
  return est;
}

std::vector<KEstimate> scan_k_curve(const RatioEvaluator& eval, const std::vector<ArrayX>& points,
                                    const TestFamily& tests, const SearchOptions& opt, int threads) {
  std::vector<ArrayX> pts = points;
  std::stable_sort(pts.begin(), pts.end(), lex_less);
  std::vector<KEstimate> out(pts.size());
  std::vector<std::exception_ptr> errors(pts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < pts.size();) {
      try {
        out[k] = search_lower_bound(eval, pts[k], tests, opt);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(1, pts.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

BlowupFit fit_power_law(std::vector<std::pair<double, double>> samples) {
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [e, v] : samples)
    if (!(e > 0) || !(v > 0) || !std::isfinite(v))
      throw Error(ErrorKind::NonFiniteResult, "blow-up samples must be positive and finite");
  if (samples.size() < 5) throw Error(ErrorKind::InsufficientSamples, "need at least 5 samples");
  const Index n = static_cast<Index>(samples.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = std::log(samples[static_cast<std::size_t>(i)].first);
    y[i] = std::log(samples[static_cast<std::size_t>(i)].second);
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(y);
  BlowupFit fit;
  fit.samples = std::move(samples);
  fit.intercept = c[0];
  fit.fitted_slope = c[1];
  fit.residual = (a * c - y).cwiseAbs().maxCoeff();
  return fit;
}

BlowupFit fit_blowup(const std::vector<KEstimate>& curve, const OperatorFamily& family, int block,
                     EndpointSide side) {
  if (block < 0 || block >= family.rank()) throw Error(ErrorKind::InvalidArgument, "block index out of range");
  const BlockRange r = endpoints(family)[static_cast<std::size_t>(block)];
  const double endpoint = side == EndpointSide::Upper ? r.p_plus : r.p_minus;
  if (!std::isfinite(endpoint)) throw Error(ErrorKind::InvalidArgument, "endpoint is infinite");
  std::vector<std::pair<double, double>> samples;
  for (const KEstimate& k : curve) samples.push_back({std::abs(k.p[block] - endpoint), k.lower_bound});
  BlowupFit fit = fit_power_law(std::move(samples));
  fit.block = block;
  fit.side = side;
  fit.endpoint = endpoint;
  fit.expected_kappa = expected_kappa(family, block);
  return fit;
}

double calibrate_envelope(const std::vector<KEstimate>& curve, const OperatorFamily& family) {
  double c = 0.0;
  for (const KEstimate& k : curve) c = std::max(c, k.lower_bound / envelope(family, k.p).upper_shape);
  return c;
}

PsiFunction rescaled_psi(const OperatorFamily& family, const PsiFunction& psi, double c_hat) {
  const int l = family.rank();
  Box support{ArrayX::Constant(l, 1.0), ArrayX::Constant(l, kInf)};
  return PsiFunction::continuous(support, [family, psi, c_hat](const ArrayX& q) {
    const ArrayX p = p_of_q(family, q);
    if (p.isNaN().any()) return kInf;
    // The bisected p(q) matches a spike point only to rounding.
    const bool at_spike = psi.kind() == PsiFunction::Kind::Spike &&
                          ((p - psi.spike_point()).abs() <= 1e-10 * psi.spike_point().abs()).all();
    const double w = at_spike ? 1.0 : psi(p);
    if (w == kInf) return kInf;
    try {
      return w * c_hat * envelope(family, p).upper_shape;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InadmissibleP) return kInf;
      throw;
    }
  });
}

std::vector<ArrayX> endpoint_ladder(const OperatorFamily& family, int block, EndpointSide side, const ArrayX& base,
                                    int steps, double fraction) {
  if (block < 0 || block >= family.rank() || base.size() != family.rank())
    throw Error(ErrorKind::InvalidArgument, "ladder block or base point does not match the family");
  if (steps < 1 || !(fraction > 0 && fraction < 1))
    throw Error(ErrorKind::InvalidArgument, "ladder needs steps >= 1 and fraction in (0, 1)");
  const BlockRange r = endpoints(family)[static_cast<std::size_t>(block)];
  const bool upper = side == EndpointSide::Upper;
  const double end = upper ? r.p_plus : r.p_minus;
  if (!std::isfinite(end)) throw Error(ErrorKind::InvalidArgument, "cannot approach an infinite endpoint");
  const double other = upper ? r.p_minus : (std::isfinite(r.p_plus) ? r.p_plus : r.p_minus + 1.0);
  const double gap = std::abs(end - other);
  std::vector<ArrayX> pts;
  for (int k = 0; k < steps; ++k) {
    const double eps = fraction * gap * std::ldexp(1.0, -k);
    ArrayX p = base;
    p[block] = upper ? end - eps : end + eps;
    pts.push_back(p);
  }
  return pts;
}

TransferCheck verify_transfer(const RatioEvaluator& eval, const PsiFunction& psi,
                              const std::vector<RealGrid>& calibration_set, const std::vector<RealGrid>& holdout_set,
                              const PGrid& pgrid) {
  if (calibration_set.empty()) throw Error(ErrorKind::InvalidArgument, "calibration set is empty");
  if (pgrid.size() == 0) throw Error(ErrorKind::EmptyGrid, "p-grid has no points");
  const OperatorFamily& fam = eval.family();
  TransferCheck tc;
  tc.psi = psi;

  for (const ArrayX& p : pgrid.points()) {
    KEstimate k;
    k.p = p;
    k.q = q_of_p(fam, p);
    k.quadrature_tolerance = eval.tolerance();
    k.lower_bound = 0.0;
    for (std::size_t i = 0; i < calibration_set.size(); ++i) {
      const double r = eval.ratio(calibration_set[i], p, k.q);
      if (r > k.lower_bound) {
        k.lower_bound = r;
        k.witness = ArrayX::Constant(1, static_cast<double>(i));
      }
    }
    tc.calibration_curve.push_back(k);
  }
  tc.c_hat = calibrate_envelope(tc.calibration_curve, fam);
  tc.nu = rescaled_psi(fam, psi, tc.c_hat);

  std::vector<ArrayX> q_axes;
  for (int j = 0; j < fam.rank(); ++j) {
    const BlockRelation rel = block_relation(fam, j);
    const ArrayX& pa = pgrid.axis_points()[static_cast<std::size_t>(j)];
    ArrayX qa(pa.size());
    for (Index i = 0; i < pa.size(); ++i) qa[i] = from_recip(rel.offset + rel.sign * recip(pa[i]));
    std::sort(qa.begin(), qa.end());
    q_axes.push_back(qa);
  }
  tc.q_grid = PGrid(std::move(q_axes));

  for (const RealGrid& h : holdout_set) {
    for (const RealGrid& c : calibration_set) {
      bool same = c.rank() == h.rank() && c.total() == h.total() && (c.values() == h.values()).all();
      for (Index j = 0; same && j < c.rank(); ++j) same = (c.axis(j) == h.axis(j)).all();
      if (same) ++tc.overlapping;
    }
    const double den = gls_norm(h, psi, pgrid);
    if (!(den > 0)) throw Error(ErrorKind::ZeroDenominator, "holdout has zero Grand Lebesgue norm");
    tc.margins.push_back(gls_norm(eval.apply(h), tc.nu, tc.q_grid) / den);
  }
  return tc;
}

}  // namespace anisonorm
