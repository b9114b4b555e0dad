#ifndef CQC_ERRORS_HPP
#define CQC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cqc {

// Shape/axis mismatches in tensor operations.
struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid value in the mathematical domain of an operation (e.g. dilating A=0).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical procedure failed beyond recovery (rank-deficient completion, bad SVD).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested computation exceeds a configured size budget.
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// An iterative solver hit its sweep limit; carries the best value reached.
struct ConvergenceError : std::runtime_error {
  double best_value;
  ConvergenceError(const std::string& msg, double best)
      : std::runtime_error(msg), best_value(best) {}
};

// Malformed input file or config.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cqc

#endif
