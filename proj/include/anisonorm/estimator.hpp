#pragma once

#include "anisonorm/norms.hpp"
#include "anisonorm/operators.hpp"

#include <optional>
#include <string>
#include <vector>

namespace anisonorm {

enum class TestKind { FactorizedBump, PowerCutoff, DilatedGaussian };

const char* to_string(TestKind kind);
std::optional<TestKind> parse_test_kind(const std::string& name);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Shape parameters of one block of a factorized test function.
//   PowerCutoff:     |x|^a 1_(0, cutoff](|x|), tunable a in `exponent`, further limited to
//                    a > -1/p + exponent_margin so that the L_p norm is finite.
//   DilatedGaussian: exp(-(lambda (x - s))^2), tunable lambda in `scale`, s in `shift`.
//   FactorizedBump:  exp(1 - 1/(1 - u^2)) for |u| < 1, u = lambda (x - s).
struct TestBlockSpec {
  double cutoff = 1.0;
  Range exponent{-1.0, 2.0};
  double exponent_margin = 1e-3;
  Range scale{1.0, 1.0};
  Range shift{0.0, 0.0};
};

struct TestFamily {
  TestKind kind = TestKind::PowerCutoff;
  std::vector<TestBlockSpec> blocks;

  int params_per_block() const { return kind == TestKind::PowerCutoff ? 1 : 2; }
  Index param_count() const { return static_cast<Index>(blocks.size()) * params_per_block(); }
  std::vector<std::string> param_names() const;
  // Parameter box at exponent vector p.
  std::vector<Range> search_box(const ArrayX& p) const;
  RealGrid generate(const std::vector<ArrayX>& axes, const ArrayX& params) const;
  // A member of the box at p whose operator integral diverges at the origin, if any.
  std::optional<ArrayX> divergent_member(const OperatorFamily& family, const ArrayX& p) const;
};

// Operator prepared on fixed source and output axes; evaluates norm ratios.
class RatioEvaluator {
 public:
  RatioEvaluator(const OperatorFamily& family, std::vector<ArrayX> source_axes, const ApplyOptions& options = {});

  double ratio(const RealGrid& f, const ArrayX& p) const;
  // Ratio with an explicitly chosen output exponent q (no admissibility check on q).
  double ratio(const RealGrid& f, const ArrayX& p, const ArrayX& q) const;
  AnyGrid apply(const RealGrid& f) const { return op_.apply(f); }

  const OperatorFamily& family() const { return family_; }
  const std::vector<ArrayX>& source_axes() const { return source_axes_; }
  double tolerance() const { return tolerance_; }

 private:
  OperatorFamily family_;
  std::vector<ArrayX> source_axes_;
  double tolerance_;
  TensorOperator op_;
};

// mixed_norm(T f, q_of_p(p)) / mixed_norm(f, p) with default output axes.
double operator_ratio(const OperatorFamily& family, const RealGrid& f, const ArrayX& p,
                      const ApplyOptions& options = {});

struct KEstimate {
  ArrayX p;
  ArrayX q;
  double lower_bound = 0.0;
  ArrayX witness;
  double quadrature_tolerance = 0.0;
  bool degenerate = false;  // flat objective over the search box
  bool divergent = false;   // the box holds a member with a divergent operator integral
  int evaluations = 0;
};

struct SearchOptions {
  int sweeps = 3;
  int evaluations = 24;  // per golden-section line search
};

KEstimate search_lower_bound(const RatioEvaluator& eval, const ArrayX& p, const TestFamily& tests,
                             const SearchOptions& options = {});

// Independent searches at each point, run on `threads` workers; sorted by p.
std::vector<KEstimate> scan_k_curve(const RatioEvaluator& eval, const std::vector<ArrayX>& points,
                                    const TestFamily& tests, const SearchOptions& options = {}, int threads = 1);

enum class EndpointSide { Lower, Upper };

struct BlowupFit {
  int block = 0;
  EndpointSide side = EndpointSide::Upper;
  double endpoint = 0.0;
  std::vector<std::pair<double, double>> samples;  // (epsilon, lower bound), epsilon decreasing
  double fitted_slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max absolute log residual
  double expected_kappa = 0.0;
};

// Points approaching an endpoint of `block`: p_block = endpoint -/+ eps_k with
// eps_k = fraction * gap * 2^-k, gap the distance to the other endpoint (or to endpoint + 1
// when that one is infinite). Other coordinates are taken from `base`.
std::vector<ArrayX> endpoint_ladder(const OperatorFamily& family, int block, EndpointSide side, const ArrayX& base,
                                    int steps = 6, double fraction = 0.2);

// Least-squares slope of log(value) against log(eps); needs at least five samples.
BlowupFit fit_power_law(std::vector<std::pair<double, double>> samples);
BlowupFit fit_blowup(const std::vector<KEstimate>& curve, const OperatorFamily& family, int block,
                     EndpointSide side);

double calibrate_envelope(const std::vector<KEstimate>& curve, const OperatorFamily& family);

struct TransferCheck {
  PsiFunction psi;
  PsiFunction nu;
  double c_hat = 0.0;
  PGrid q_grid;
  std::vector<KEstimate> calibration_curve;
  std::vector<double> margins;
  int overlapping = 0;  // holdout members equal to a calibration member
};

// nu(q) = psi(p(q)) * c_hat * upper_shape(p(q)), with p(q) by bisection.
PsiFunction rescaled_psi(const OperatorFamily& family, const PsiFunction& psi, double c_hat);

TransferCheck verify_transfer(const RatioEvaluator& eval, const PsiFunction& psi,
                              const std::vector<RealGrid>& calibration_set, const std::vector<RealGrid>& holdout_set,
                              const PGrid& pgrid);

}  // namespace anisonorm
