#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hazshift/errors.hpp"

namespace hazshift {

// One observation: outcome measured at the horizon tau, the (possibly
// censored) time to treatment initialization, the event indicator, and the
// baseline covariate vector.
//
// The only censoring mechanism is administrative censoring at tau:
//   delta = 1  =>  treatment started before the horizon, t_obs < tau
//   delta = 0  =>  never treated within the study, t_obs == tau exactly
struct SubjectRecord {
  double y = 0.0;
  double t_obs = 0.0;
  int delta = 0;
  std::vector<double> covariates;
};

// Immutable after construction; safe to share read-only across workers.
struct Dataset {
  std::vector<SubjectRecord> records;
  double tau = 0.0;
  std::vector<std::string> covariate_names;

  std::size_t size() const { return records.size(); }
  std::size_t dim() const { return covariate_names.size(); }
};

enum class ViolationKind {
  NonFinite,
  NegativeTime,
  TimeExceedsHorizon,
  DeltaTimeMismatch,
  InvalidDelta,
  CovariateDimMismatch,
  MalformedRow,
  EmptyDataset,
};

const char* violation_kind_name(ViolationKind kind);

// One violated invariant. For validate() the index is the 0-based record
// index; for load_csv diagnostics it is the 1-based data-row number (the
// header is row 0). Dataset-level problems use npos.
struct Violation {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t index = npos;
  ViolationKind kind = ViolationKind::NonFinite;
  std::string message;
};

// Scans every type invariant. Empty result means the dataset is valid.
std::vector<Violation> validate(const Dataset& ds);

// Thrown by load_csv; carries all row-indexed diagnostics found in one pass.
struct CsvError : Error {
  CsvError(const std::string& what, std::vector<Violation> v)
      : Error("CsvError", what), violations(std::move(v)) {}
  std::vector<Violation> violations;
};

// Column-name mapping for ingestion. An empty `covariates` list selects every
// column other than y/time/delta, in header order.
struct CsvSchema {
  std::string y = "y";
  std::string time = "time";
  std::string delta = "delta";
  std::vector<std::string> covariates;
};

// Parses a UTF-8, comma-separated file with one header row. Missing values
// are not permitted; covariates must be numeric (categoricals pre-encoded).
// Censored rows with |t_obs - tau| <= 1e-9 are snapped to tau; anything
// further off is rejected. Throws MissingColumnError or CsvError.
Dataset load_csv(const std::string& path, double tau, const CsvSchema& schema = {});

// Emits `y,time,delta,<covariates...>` with 17-significant-digit numbers so a
// write/load round trip reproduces every value exactly.
std::string to_csv_string(const Dataset& ds);
void write_csv(const Dataset& ds, const std::string& path);

}  // namespace hazshift
