#include "hazshift/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "hazshift/json_writer.hpp"

namespace hazshift {

namespace {

constexpr double kTauSnapTolerance = 1e-9;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (const char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Strict numeric parse; the whole token must be consumed.
bool parse_double(const std::string& token, double& out) {
  const std::string t = trim(token);
  if (t.empty()) return false;
  const char* begin = t.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + t.size();
}

}  // namespace

const char* violation_kind_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::NonFinite: return "NonFinite";
    case ViolationKind::NegativeTime: return "NegativeTime";
    case ViolationKind::TimeExceedsHorizon: return "TimeExceedsHorizon";
    case ViolationKind::DeltaTimeMismatch: return "DeltaTimeMismatch";
    case ViolationKind::InvalidDelta: return "InvalidDelta";
    case ViolationKind::CovariateDimMismatch: return "CovariateDimMismatch";
    case ViolationKind::MalformedRow: return "MalformedRow";
    case ViolationKind::EmptyDataset: return "EmptyDataset";
  }
  return "Unknown";
}

std::vector<Violation> validate(const Dataset& ds) {
  std::vector<Violation> out;
  auto add = [&out](std::size_t idx, ViolationKind kind, std::string msg) {
    out.push_back({idx, kind, std::move(msg)});
  };

  if (ds.records.empty()) {
    add(Violation::npos, ViolationKind::EmptyDataset, "dataset has no records");
    return out;
  }
  if (!std::isfinite(ds.tau) || ds.tau <= 0.0) {
    add(Violation::npos, ViolationKind::NonFinite, "tau must be a positive finite real");
    return out;
  }

  const std::size_t d = ds.dim();
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const SubjectRecord& r = ds.records[i];
    if (!std::isfinite(r.y)) {
      add(i, ViolationKind::NonFinite, "record " + std::to_string(i) + ": outcome is not finite");
    }
    if (r.delta != 0 && r.delta != 1) {
      add(i, ViolationKind::InvalidDelta, "record " + std::to_string(i) + ": delta must be 0 or 1");
    }
    if (r.covariates.size() != d) {
      add(i, ViolationKind::CovariateDimMismatch,
          "record " + std::to_string(i) + ": expected " + std::to_string(d) + " covariates, got " +
              std::to_string(r.covariates.size()));
    } else {
      for (std::size_t j = 0; j < d; ++j) {
        if (!std::isfinite(r.covariates[j])) {
          add(i, ViolationKind::NonFinite,
              "record " + std::to_string(i) + ": covariate " + ds.covariate_names[j] + " is not finite");
          break;
        }
      }
    }
    if (!std::isfinite(r.t_obs)) {
      add(i, ViolationKind::NonFinite, "record " + std::to_string(i) + ": time is not finite");
      continue;
    }
    if (r.t_obs < 0.0) {
      add(i, ViolationKind::NegativeTime, "record " + std::to_string(i) + ": time is negative");
      continue;
    }
    if (r.t_obs > ds.tau) {
      add(i, ViolationKind::TimeExceedsHorizon,
          "record " + std::to_string(i) + ": time exceeds the horizon tau");
      continue;
    }
    if (r.delta == 0 && r.t_obs != ds.tau) {
      add(i, ViolationKind::DeltaTimeMismatch,
          "record " + std::to_string(i) + ": censored record must have time == tau");
    } else if (r.delta == 1 && r.t_obs >= ds.tau) {
      add(i, ViolationKind::DeltaTimeMismatch,
          "record " + std::to_string(i) + ": event record must have time < tau");
    }
  }
  return out;
}

Dataset load_csv(const std::string& path, double tau, const CsvSchema& schema) {
  if (!std::isfinite(tau) || tau <= 0.0) throw Error("InvalidTau", "tau must be a positive finite real");

  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw CsvError("empty file: " + path, {});
  const std::vector<std::string> header_raw = split_csv_line(line);
  std::vector<std::string> header;
  header.reserve(header_raw.size());
  for (const auto& h : header_raw) header.push_back(trim(h));

  auto find_column = [&header](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw MissingColumnError(name);
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t col_y = find_column(schema.y);
  const std::size_t col_time = find_column(schema.time);
  const std::size_t col_delta = find_column(schema.delta);

  std::vector<std::size_t> col_cov;
  std::vector<std::string> cov_names;
  if (schema.covariates.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j == col_y || j == col_time || j == col_delta) continue;
      col_cov.push_back(j);
      cov_names.push_back(header[j]);
    }
  } else {
    for (const auto& name : schema.covariates) {
      col_cov.push_back(find_column(name));
      cov_names.push_back(name);
    }
  }

  Dataset ds;
  ds.tau = tau;
  ds.covariate_names = cov_names;

  std::vector<Violation> problems;
  auto reject = [&problems](std::size_t row, ViolationKind kind, std::string msg) {
    problems.push_back({row, kind, "row " + std::to_string(row) + ": " + std::move(msg)});
  };

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      reject(row, ViolationKind::MalformedRow,
             "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
      continue;
    }

    SubjectRecord rec;
    bool ok = true;
    double delta_val = 0.0;
    if (!parse_double(fields[col_y], rec.y) || !std::isfinite(rec.y)) {
      reject(row, ViolationKind::NonFinite, "outcome '" + fields[col_y] + "' is not a finite number");
      ok = false;
    }
    if (!parse_double(fields[col_time], rec.t_obs) || !std::isfinite(rec.t_obs)) {
      reject(row, ViolationKind::NonFinite, "time '" + fields[col_time] + "' is not a finite number");
      ok = false;
    }
    if (!parse_double(fields[col_delta], delta_val) || (delta_val != 0.0 && delta_val != 1.0)) {
      reject(row, ViolationKind::InvalidDelta, "delta '" + fields[col_delta] + "' must be 0 or 1");
      ok = false;
    }
    rec.delta = delta_val == 1.0 ? 1 : 0;
    rec.covariates.resize(col_cov.size());
    for (std::size_t j = 0; j < col_cov.size(); ++j) {
      if (!parse_double(fields[col_cov[j]], rec.covariates[j]) || !std::isfinite(rec.covariates[j])) {
        reject(row, ViolationKind::NonFinite,
               "covariate " + cov_names[j] + " '" + fields[col_cov[j]] + "' is not a finite number");
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    if (rec.t_obs < 0.0) {
      reject(row, ViolationKind::NegativeTime, "time is negative");
      continue;
    }
    if (rec.delta == 0) {
      if (std::fabs(rec.t_obs - tau) <= kTauSnapTolerance) {
        rec.t_obs = tau;  // snap; protects the weight integral's upper limit
      } else {
        reject(row, ViolationKind::DeltaTimeMismatch, "delta = 0 requires time == tau");
        continue;
      }
    } else if (rec.t_obs >= tau) {
      reject(row, ViolationKind::DeltaTimeMismatch, "delta = 1 requires time < tau");
      continue;
    }
    ds.records.push_back(std::move(rec));
  }

  if (!problems.empty()) {
    throw CsvError(path + ": " + std::to_string(problems.size()) + " invalid row(s)", std::move(problems));
  }
  if (ds.records.empty()) throw CsvError(path + ": no data rows", {});
  return ds;
}

std::string to_csv_string(const Dataset& ds) {
  std::string out = "y,time,delta";
  for (const auto& name : ds.covariate_names) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (const SubjectRecord& r : ds.records) {
    out += JsonWriter::format_double(r.y);
    out += ',';
    out += JsonWriter::format_double(r.t_obs);
    out += ',';
    out += std::to_string(r.delta);
    for (const double v : r.covariates) {
      out += ',';
      out += JsonWriter::format_double(v);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& ds, const std::string& path) {
  atomic_write_file(path, to_csv_string(ds));
}

}  // namespace hazshift
