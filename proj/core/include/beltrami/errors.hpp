#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace beltrami {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// exit codes, so new failure modes should derive from the closest match.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
      : Error(what), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(std::size_t offset, std::string name)
      : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
        offset_(offset),
        name_(std::move(name)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::size_t offset_;
  std::string name_;
};

/// Domain fault while evaluating an expression (division by zero, log 0, ...).
class EvalError : public Error {
 public:
  using Error::Error;
};

class EllipticityViolation : public Error {
 public:
  EllipticityViolation(std::complex<double> z, std::complex<double> w, double sum)
      : Error("ellipticity violated: |mu|+|nu| = " + std::to_string(sum) + " at z = (" +
              std::to_string(z.real()) + "," + std::to_string(z.imag()) + "), w = (" +
              std::to_string(w.real()) + "," + std::to_string(w.imag()) + ")"),
        z_(z),
        w_(w),
        sum_(sum) {}

  std::complex<double> z() const noexcept { return z_; }
  std::complex<double> w() const noexcept { return w_; }
  double sum() const noexcept { return sum_; }

 private:
  std::complex<double> z_, w_;
  double sum_;
};

class UnknownCatalogEntry : public Error {
 public:
  using Error::Error;
};

class ParamOutOfRange : public Error {
 public:
  using Error::Error;
};

class DegenerateBase : public Error {
 public:
  using Error::Error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

class SupportTooLarge : public Error {
 public:
  using Error::Error;
};

class NotContractive : public Error {
 public:
  using Error::Error;
};

class MaxIterations : public Error {
 public:
  using Error::Error;
};

class DegenerateNormalization : public Error {
 public:
  using Error::Error;
};

class OuterDivergence : public Error {
 public:
  using Error::Error;
};

class EmptyCompact : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class NotInvertible : public Error {
 public:
  using Error::Error;
};

class OutOfImage : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace beltrami
