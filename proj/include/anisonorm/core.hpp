#pragma once

#include <Eigen/Core>

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace anisonorm {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ArrayX = Eigen::ArrayXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ErrorKind {
  InvalidArgument,
  Config,
  Format,
  InadmissibleP,
  NonFiniteResult,
  EmptyGrid,
  UnboundedFamily,
  SingularOutputPoint,
  FrequencyOutOfBand,
  UnsupportedFamily,
  BlockDimension,
  ZeroDenominator,
  InsufficientSamples,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit code for an error class: 1 configuration, 2 admissibility, 3 numeric.
int exit_code(ErrorKind kind);

// 1/p with 1/inf = 0.
inline double recip(double p) { return p == kInf ? 0.0 : 1.0 / p; }
// p from 1/p with 1/0 = inf.
inline double from_recip(double r) { return r == 0.0 ? kInf : 1.0 / r; }

}  // namespace anisonorm
