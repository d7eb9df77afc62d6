#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace facetflow {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data or configuration violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A linear or nonlinear solve did not reach its tolerance.
class SolveError : public Error {
 public:
  SolveError(const std::string& what, double residual, std::vector<double> history = {})
      : Error(what), residual_(residual), history_(std::move(history)) {}

  double residual() const noexcept { return residual_; }
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  double residual_;
  std::vector<double> history_;
};

/// The slope solver produced a nonpositive value.
class PositivityError : public Error {
 public:
  PositivityError(const std::string& what, std::size_t level) : Error(what), level_(level) {}
  std::size_t level() const noexcept { return level_; }

 private:
  std::size_t level_;
};

}  // namespace facetflow
