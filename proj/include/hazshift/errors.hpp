#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hazshift {

// Base for all library errors. `kind` is a stable machine-readable tag the
// CLI echoes in its error object.
struct Error : std::runtime_error {
  Error(std::string kind_, const std::string& what)
      : std::runtime_error(what), kind(std::move(kind_)) {}
  std::string kind;
};

struct MissingColumnError : Error {
  explicit MissingColumnError(const std::string& column)
      : Error("MissingColumn", "missing column: " + column) {}
};

struct NoEventsError : Error {
  NoEventsError() : Error("NoEvents", "dataset has no events (all delta = 0)") {}
};

struct DegenerateDesignError : Error {
  explicit DegenerateDesignError(const std::string& what)
      : Error("DegenerateDesign", what) {}
};

struct DimensionMismatchError : Error {
  explicit DimensionMismatchError(const std::string& what)
      : Error("DimensionMismatch", what) {}
};

struct NotConvergedError : Error {
  NotConvergedError() : Error("NotConverged", "Cox fit did not converge") {}
};

struct NonPositiveThetaError : Error {
  explicit NonPositiveThetaError(const std::string& what)
      : Error("NonPositiveTheta", what) {}
};

struct InvalidWeightError : Error {
  explicit InvalidWeightError(const std::string& what)
      : Error("InvalidWeight", what) {}
};

struct TooFewReplicatesError : Error {
  explicit TooFewReplicatesError(const std::string& what)
      : Error("TooFewReplicates", what) {}
};

struct QuadratureError : Error {
  explicit QuadratureError(const std::string& what)
      : Error("QuadratureNonConvergence", what) {}
};

struct NegativeGridTimeError : Error {
  NegativeGridTimeError() : Error("NegativeGridTime", "time grid contains a negative entry") {}
};

}  // namespace hazshift
