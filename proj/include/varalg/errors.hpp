#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace varalg {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- linear algebra ---
struct DimensionMismatch : Error {
  using Error::Error;
};
struct NotSymmetric : Error {
  using Error::Error;
};
struct NotPositiveDefinite : Error {
  NotPositiveDefinite(const std::string& msg, double lambda_min)
      : Error(msg), lambda_min(lambda_min) {}
  double lambda_min;
};

// --- nonlinearities ---
struct QuadratureBudgetExceeded : Error {
  using Error::Error;
};
struct UnknownCatalogName : Error {
  using Error::Error;
};
struct BadParams : Error {
  using Error::Error;
};

// --- expression parsing ---
struct SyntaxError : Error {
  SyntaxError(const std::string& msg, std::size_t position, std::string expected)
      : Error(msg), position(position), expected(std::move(expected)) {}
  std::size_t position;  // byte offset into the source string
  std::string expected;
};
struct UnknownFunction : Error {
  UnknownFunction(const std::string& msg, std::size_t position)
      : Error(msg), position(position) {}
  std::size_t position;
};
struct UnknownVariable : Error {
  UnknownVariable(const std::string& msg, std::size_t position)
      : Error(msg), position(position) {}
  std::size_t position;
};

// --- thresholds ---
// sup_t sum_k F_k(t) <= 0 on the probed grid: lambda_star is undefined.
struct NonpositiveSup : Error {
  using Error::Error;
};
// The computed interval (lambda1_star, lambda2_star) came out empty; reported
// loudly instead of emitting a nonsensical report.
struct InfeasibleInterval : Error {
  using Error::Error;
};

// --- solver ---
struct NoDescentProgress : Error {
  using Error::Error;
};
struct GeometryViolated : Error {
  using Error::Error;
};
struct MaxDeformationIterations : Error {
  using Error::Error;
};
struct Diverged : Error {
  using Error::Error;
};
struct StalledAtNonCritical : Error {
  using Error::Error;
};
struct OnlyTrivialFound : Error {
  using Error::Error;
};
struct DistinctnessFailed : Error {
  using Error::Error;
};

// --- nets ---
struct EmptyNet : Error {
  using Error::Error;
};
struct Disconnected : Error {
  using Error::Error;
};

// --- oracle ---
struct BudgetExceeded : Error {
  using Error::Error;
};

}  // namespace varalg
