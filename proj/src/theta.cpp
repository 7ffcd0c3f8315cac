#include "hazshift/theta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

#include "hazshift/json_writer.hpp"

namespace hazshift {

namespace {

std::string format_trim(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

ThetaSpec ThetaSpec::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw NonPositiveThetaError("constant theta must be a positive finite real");
  }
  ThetaSpec s(Kind::Constant);
  s.c_ = c;
  s.label_ = format_trim(c);
  return s;
}

ThetaSpec ThetaSpec::loglinear(std::vector<double> coef) {
  if (coef.empty()) throw NonPositiveThetaError("loglinear theta needs at least one coefficient");
  for (const double c : coef) {
    if (!std::isfinite(c)) throw NonPositiveThetaError("loglinear coefficients must be finite");
  }
  ThetaSpec s(Kind::LogLinear);
  s.coef_ = std::move(coef);
  std::string label = "loglinear:";
  for (std::size_t i = 0; i < s.coef_.size(); ++i) {
    if (i) label += ',';
    label += format_trim(s.coef_[i]);
  }
  s.label_ = std::move(label);
  return s;
}

ThetaSpec ThetaSpec::piecewise_time(std::vector<double> breaks, std::vector<double> levels) {
  if (levels.size() != breaks.size() + 1) {
    throw NonPositiveThetaError("piecewise theta needs one more level than breakpoints");
  }
  for (const double v : levels) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw NonPositiveThetaError("piecewise theta levels must be positive finite reals");
    }
  }
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    if (!std::isfinite(breaks[k]) || breaks[k] <= 0.0 || (k > 0 && breaks[k] <= breaks[k - 1])) {
      throw NonPositiveThetaError("piecewise breakpoints must be positive and strictly increasing");
    }
  }
  ThetaSpec s(Kind::PiecewiseTime);
  s.breaks_ = std::move(breaks);
  s.levels_ = std::move(levels);
  std::string label = "piecewise:";
  for (std::size_t i = 0; i < s.levels_.size(); ++i) {
    if (i) label += ',';
    label += format_trim(s.levels_[i]);
  }
  s.label_ = std::move(label);
  return s;
}

double ThetaSpec::operator()(double t, std::span<const double> l) const {
  switch (kind_) {
    case Kind::Constant:
      return c_;
    case Kind::LogLinear: {
      if (l.size() != coef_.size()) {
        throw DimensionMismatchError("loglinear theta: covariate vector length mismatch");
      }
      return std::exp(dot(coef_, l));
    }
    case Kind::PiecewiseTime: {
      const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
      return levels_[static_cast<std::size_t>(it - breaks_.begin())];
    }
  }
  return 1.0;
}

double ThetaSpec::time_integral(double t, std::span<const double> l) const {
  if (t <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::Constant:
      return c_ * t;
    case Kind::LogLinear:
      return (*this)(0.0, l) * t;
    case Kind::PiecewiseTime: {
      double acc = 0.0;
      double left = 0.0;
      for (std::size_t k = 0; k < breaks_.size(); ++k) {
        if (t <= breaks_[k]) return acc + levels_[k] * (t - left);
        acc += levels_[k] * (breaks_[k] - left);
        left = breaks_[k];
      }
      return acc + levels_.back() * (t - left);
    }
  }
  return t;
}

double ThetaSpec::invert_time_integral(double target, std::span<const double> l) const {
  if (target <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::Constant:
      return target / c_;
    case Kind::LogLinear:
      return target / (*this)(0.0, l);
    case Kind::PiecewiseTime: {
      double acc = 0.0;
      double left = 0.0;
      for (std::size_t k = 0; k < breaks_.size(); ++k) {
        const double seg = levels_[k] * (breaks_[k] - left);
        if (target <= acc + seg) return left + (target - acc) / levels_[k];
        acc += seg;
        left = breaks_[k];
      }
      return left + (target - acc) / levels_.back();
    }
  }
  return target;
}

std::string ThetaSpec::to_json() const {
  JsonWriter w;
  w.begin_object();
  switch (kind_) {
    case Kind::Constant:
      w.key("constant").value(c_);
      break;
    case Kind::LogLinear: {
      w.key("loglinear").begin_array();
      for (const double c : coef_) w.value(c);
      w.end_array();
      break;
    }
    case Kind::PiecewiseTime: {
      w.key("piecewise").begin_object();
      w.key("breaks").begin_array();
      for (const double b : breaks_) w.value(b);
      w.end_array();
      w.key("levels").begin_array();
      for (const double v : levels_) w.value(v);
      w.end_array();
      w.end_object();
      break;
    }
  }
  w.end_object();
  return w.str();
}

ThetaSpec ThetaSpec::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.contains("constant")) return constant(j.at("constant").get<double>());
  if (j.contains("loglinear")) return loglinear(j.at("loglinear").get<std::vector<double>>());
  if (j.contains("piecewise")) {
    const auto& p = j.at("piecewise");
    return piecewise_time(p.at("breaks").get<std::vector<double>>(),
                          p.at("levels").get<std::vector<double>>());
  }
  throw NonPositiveThetaError("unrecognized theta JSON: " + text);
}

ThetaSpec ThetaSpec::parse_token(const std::string& token) {
  auto parse_real = [](const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw NonPositiveThetaError("cannot parse theta token: " + s);
    return v;
  };

  if (token.rfind("loglinear:", 0) == 0) {
    std::vector<double> coef;
    std::stringstream ss(token.substr(10));
    std::string piece;
    while (std::getline(ss, piece, ',')) coef.push_back(parse_real(piece));
    ThetaSpec s = loglinear(std::move(coef));
    s.set_label(token);
    return s;
  }
  const std::size_t slash = token.find('/');
  double v = 0.0;
  if (slash != std::string::npos) {
    const double num = parse_real(token.substr(0, slash));
    const double den = parse_real(token.substr(slash + 1));
    v = num / den;
  } else {
    v = parse_real(token);
  }
  ThetaSpec s = constant(v);
  s.set_label(token);
  return s;
}

}  // namespace hazshift
