#pragma once

#include <stdexcept>
#include <string>

namespace bayesrat {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: mismatched spaces, bad weights, unknown labels.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Conditioning on a cell of zero probability.
class ZeroProbabilityCell : public Error {
 public:
  using Error::Error;
};

/// A belief charges an outcome the prior treats as impossible.
class AbsoluteContinuityViolation : public Error {
 public:
  AbsoluteContinuityViolation(std::string outcome, std::size_t posterior)
      : Error("belief #" + std::to_string(posterior) +
              " charges prior-null outcome '" + outcome + "'"),
        outcome_(std::move(outcome)),
        posterior_(posterior) {}

  const std::string& outcome() const { return outcome_; }
  std::size_t posterior_index() const { return posterior_; }

 private:
  std::string outcome_;
  std::size_t posterior_;
};

class InvalidMixError : public Error {
 public:
  using Error::Error;
};

/// Input lies outside the hypothesis of the known-state-space characterization.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NotRationalizableError : public Error {
 public:
  using Error::Error;
};

class ResourceBoundError : public Error {
 public:
  using Error::Error;
};

/// An objectively reachable signal has zero subjective probability.
class UndefinedUpdateError : public Error {
 public:
  using Error::Error;
};

}  // namespace bayesrat
