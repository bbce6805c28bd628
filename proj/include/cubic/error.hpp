#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cubic {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatch, bad JSON, non-unimodular matrix, ...
class InputError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed its term budget. Never truncated silently.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, long double required, long double allowed)
      : Error(what + ": requires " + std::to_string(static_cast<double>(required)) +
              " terms, budget " + std::to_string(static_cast<double>(allowed))),
        required_(required),
        allowed_(allowed) {}

  long double required() const { return required_; }
  long double allowed() const { return allowed_; }

 private:
  long double required_;
  long double allowed_;
};

/// Substituting a slicing constant killed the cubic part.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// A randomized or bounded search ran out of trials.
class SearchFailure : public Error {
 public:
  SearchFailure(const std::string& what, std::vector<std::string> trace = {})
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  std::vector<std::string> trace_;
};

/// Sampled primes gave mutually inconsistent answers.
class AmbiguityError : public Error {
 public:
  AmbiguityError(const std::string& what, std::vector<std::pair<std::int64_t, int>> values)
      : Error(what), values_(std::move(values)) {}
  const std::vector<std::pair<std::int64_t, int>>& values() const { return values_; }

 private:
  std::vector<std::pair<std::int64_t, int>> values_;
};

inline constexpr long double kDefaultBudget = 1e9L;

inline void check_budget(const std::string& what, long double required,
                         long double allowed = kDefaultBudget) {
  if (required > allowed) throw BudgetError(what, required, allowed);
}

}  // namespace cubic
