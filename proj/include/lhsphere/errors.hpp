#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace lhsphere {

/// Argument outside the mathematical domain of an operation (e.g. εμ = 0,
/// a pole of y_n, an even argument to a double factorial).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A special-function value left the representable floating range.
class SaturationError : public std::overflow_error {
public:
  SaturationError(const std::string& what, int order, std::complex<double> arg)
      : std::overflow_error(what), order_(order), arg_(arg) {}
  int order() const noexcept { return order_; }
  std::complex<double> argument() const noexcept { return arg_; }

private:
  int order_;
  std::complex<double> arg_;
};

/// The normalization chain of a recurrence underflowed; the value is not
/// trustworthy to the advertised relative accuracy.
class AccuracyLossError : public std::underflow_error {
public:
  AccuracyLossError(const std::string& what, int order, std::complex<double> arg)
      : std::underflow_error(what), order_(order), arg_(arg) {}
  int order() const noexcept { return order_; }
  std::complex<double> argument() const noexcept { return arg_; }

private:
  int order_;
  std::complex<double> arg_;
};

}  // namespace lhsphere
