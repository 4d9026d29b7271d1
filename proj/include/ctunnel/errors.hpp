#pragma once

#include <stdexcept>
#include <string>

namespace ctunnel {

/// Precondition of a library call was not met by the caller.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid run configuration or a potential that fails validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to deliver a trustworthy result.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrand left its domain (e.g. sqrt of a negative potential value).
class NumericDomainError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

/// A Riesz contour passes too close to a computed eigenvalue.
class ContourPlacementError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

/// Resolvent requested at a point that is numerically in the spectrum.
class NearSpectrumError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

/// Global phase of an eigenvector could not be fixed against its WKB profile.
class NormalizationError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

/// Phase samples are too sparse in 1/h to be unwrapped unambiguously.
class AliasingError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ContractViolation(what);
}

}  // namespace ctunnel
