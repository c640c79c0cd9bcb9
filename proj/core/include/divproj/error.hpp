#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace divproj {

enum class ErrorCode {
  AllZero,
  NegativeWeight,
  InvalidArgument,
  DomainError,
  UnknownLabel,
  EmptySample,
  DomainViolation,
  NormalizerNotFound,
  NoConvergence,
  Infeasible,
  EmptyFeasibleGrid,
  NoAdmissibleTheta,
  InputError,
};

const char* to_string(ErrorCode code);

/// True for codes caused by bad user input rather than numerical failure.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A parameter puts some bracket of a power-law family at or below zero.
class DomainViolation : public Error {
 public:
  DomainViolation(const std::string& what, std::vector<std::size_t> symbols)
      : Error(ErrorCode::DomainViolation, what), symbols_(std::move(symbols)) {}

  const std::vector<std::size_t>& symbols() const noexcept { return symbols_; }

 private:
  std::vector<std::size_t> symbols_;
};

class NormalizerNotFound : public Error {
 public:
  NormalizerNotFound(const std::string& what, double lo, double hi)
      : Error(ErrorCode::NormalizerNotFound, what), lo_(lo), hi_(hi) {}

  /// Bracketing interval (in Z) that was attempted.
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, Eigen::VectorXd best, double residual)
      : Error(ErrorCode::NoConvergence, what),
        best_(std::move(best)),
        residual_(residual) {}

  const Eigen::VectorXd& best_iterate() const noexcept { return best_; }
  double residual() const noexcept { return residual_; }

 private:
  Eigen::VectorXd best_;
  double residual_;
};

}  // namespace divproj
