#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace ssqda {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class InsufficientSamplesError : public Error {
 public:
  using Error::Error;
};

/// Iterative scheme ran out of iterations; carries the last iterate and its
/// stopping residual so callers can inspect or resume.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate,
                   double residual)
      : Error(what),
        last_iterate(std::move(last_iterate)),
        residual(residual) {}

  Eigen::VectorXd last_iterate;
  double residual;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class DegenerateModelError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ssqda
