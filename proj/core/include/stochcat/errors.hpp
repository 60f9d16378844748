#pragma once

#include <stdexcept>
#include <string>

namespace stochcat {

/// Arrow, kernel or dataset dimensions do not line up.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A covariance matrix failed the PSD / PD requirement of the operation.
class CovarianceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The pushforward has no density with respect to Lebesgue measure.
class NoDensityError : public CovarianceError {
 public:
  using CovarianceError::CovarianceError;
};

/// Likelihood composition requested on a backend pair that has no
/// supported numeric path.
class UnsupportedComposition : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Training or gradient evaluation produced non-finite values.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model, arrow or dataset description.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stochcat
