#pragma once

#include "anisonorm/exponents.hpp"
#include "anisonorm/grid_function.hpp"

#include <string>
#include <vector>

namespace anisonorm {

enum class Domain { Full, Interior, Exterior };

inline constexpr double kQuadratureTolerance = 1e-7;

// One coordinate block of an operator on a one-dimensional axis.
// Truncated Riesz kernels are kind Riesz with a domain other than Full.
struct BlockOperatorSpec {
  BlockKind kind = BlockKind::Riesz;
  BlockParams params;
  Domain domain = Domain::Full;
  double radius = 1.0;
  ArrayX output_axis;
  double tolerance = kQuadratureTolerance;
};

// Point evaluations against the piecewise-linear interpolant of f_line on `axis`.
// Riesz: |x|^-beta int_D f(y) |y|^-alpha |x - y|^-gamma dy.
double apply_riesz_block(const BlockOperatorSpec& spec, const ArrayX& axis, const ArrayX& f_line, double x);
// Log-weighted Riesz: int f(y) |x - y|^(alpha - 1) |log|x - y||^delta S(|log|x - y||) dy.
double apply_log_riesz_block(const BlockParams& params, const ArrayX& axis, const ArrayX& f_line, double x,
                             double tolerance = kQuadratureTolerance);
// Weighted Fourier transform (2 pi)^-1/2 |x|^-alpha int |y|^-beta f(y) e^{ixy} dy, summed
// directly over the source nodes with weights from the product integration of |y|^-beta.
Complex apply_fourier_block(const BlockOperatorSpec& spec, const ArrayX& axis, const ArrayX& f_line, double x);

// Dense matrix of a block operator: output samples = matrix * source samples.
struct BlockMatrix {
  BlockKind kind = BlockKind::Riesz;
  ArrayX source_axis;
  ArrayX output_axis;
  AxisTail tail;  // power-law decay of the output beyond the output axis ends
  Eigen::MatrixXd real;
  Eigen::MatrixXcd complex;

  bool is_complex() const { return kind == BlockKind::Fourier; }
};

BlockMatrix assemble_block(const BlockOperatorSpec& spec, const ArrayX& source_axis);

// Default output axis: the source axis restricted to the family's output domain, with x = 0
// removed when the output weight is singular there.
ArrayX default_output_axis(const BlockOperatorSpec& spec, const ArrayX& source_axis);

struct ApplyOptions {
  // One entry per axis; an empty array selects the default output axis.
  std::vector<ArrayX> output_axes;
  double tolerance = kQuadratureTolerance;
};

// Spec of block j of a family, without output axis.
BlockOperatorSpec block_spec(const OperatorFamily& family, int j, double tolerance = kQuadratureTolerance);

// Tensor operator prepared for fixed source axes; reusable across input functions.
class TensorOperator {
 public:
  TensorOperator(const OperatorFamily& family, const std::vector<ArrayX>& source_axes,
                 const ApplyOptions& options = {});

  // Applies block passes from the last axis to the first. Warnings, if requested, report
  // inputs that do not vanish at the truncation boundary.
  AnyGrid apply(const RealGrid& f, std::vector<std::string>* warnings = nullptr) const;
  AnyGrid apply(const ComplexGrid& f, std::vector<std::string>* warnings = nullptr) const;

  const std::vector<BlockMatrix>& blocks() const { return blocks_; }
  std::vector<ArrayX> output_axes() const;

 private:
  template <typename T>
  AnyGrid apply_impl(const GridFunction<T>& f, std::vector<std::string>* warnings) const;

  std::vector<BlockMatrix> blocks_;
};

AnyGrid apply_tensor_operator(const OperatorFamily& family, const RealGrid& f, const ApplyOptions& options = {},
                              std::vector<std::string>* warnings = nullptr);
AnyGrid apply_tensor_operator(const OperatorFamily& family, const ComplexGrid& f,
                              const ApplyOptions& options = {}, std::vector<std::string>* warnings = nullptr);

}  // namespace anisonorm
