#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mvpac {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent arguments (dimension mismatch, bad ranges).
class InputError : public Error {
 public:
  using Error::Error;
};

/// API misuse: unknown names, double augmentation, wrong kernel.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the data geometry was violated (e.g. unscaled inputs).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Factorization failed even after ridge rescue.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double smallest_pivot)
      : Error(what), smallest_pivot_(smallest_pivot) {}
  double smallest_pivot() const noexcept { return smallest_pivot_; }

 private:
  double smallest_pivot_;
};

/// Iterative solver ran out of iterations; carries the best iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd best, double residual,
                   std::size_t iterations)
      : Error(what), best_(std::move(best)), residual_(residual), iterations_(iterations) {}
  const Eigen::VectorXd& best_iterate() const noexcept { return best_; }
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  Eigen::VectorXd best_;
  double residual_;
  std::size_t iterations_;
};

/// Text input could not be parsed; line numbers are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line), message_(what) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& bare_message() const noexcept { return message_; }

 private:
  std::size_t line_;
  std::string message_;
};

}  // namespace mvpac
