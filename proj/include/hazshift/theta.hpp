#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hazshift/errors.hpp"

namespace hazshift {

// Multiplicative hazard intervention theta(t, l) > 0.
//
// Variants:
//   Constant(c)              theta = c
//   LogLinear(coef)          theta = exp(coef'l), constant in t
//   PiecewiseTime(breaks,    theta = levels[k] on [breaks[k-1], breaks[k]),
//                 levels)    right-continuous, uniform in l
class ThetaSpec {
 public:
  enum class Kind { Constant, LogLinear, PiecewiseTime };

  ThetaSpec() : ThetaSpec(constant(1.0)) {}

  static ThetaSpec constant(double c);
  static ThetaSpec loglinear(std::vector<double> coef);
  static ThetaSpec piecewise_time(std::vector<double> breaks, std::vector<double> levels);

  Kind kind() const { return kind_; }
  bool depends_on_time() const { return kind_ == Kind::PiecewiseTime; }
  // Dimension the covariate vector must have; 0 when theta ignores l.
  std::size_t covariate_dim() const { return kind_ == Kind::LogLinear ? coef_.size() : 0; }

  double operator()(double t, std::span<const double> l) const;

  // integral_0^t theta(s, l) ds; exact (theta is piecewise constant in t).
  double time_integral(double t, std::span<const double> l) const;
  // Inverse of the above in t, for samplers: the t with time_integral == target.
  double invert_time_integral(double target, std::span<const double> l) const;

  // Display token; defaults to a canonical form, parse_token keeps the input.
  const std::string& label() const { return label_; }
  ThetaSpec& set_label(std::string label) {
    label_ = std::move(label);
    return *this;
  }

  double constant_value() const { return c_; }
  const std::vector<double>& coefficients() const { return coef_; }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& levels() const { return levels_; }

  // {"constant": c} | {"loglinear": [...]} | {"piecewise": {"breaks": [...], "levels": [...]}}
  std::string to_json() const;
  static ThetaSpec from_json(const std::string& text);

  // "2", "1/2.5" (a fraction of two reals) or "loglinear:c1,c2,...".
  static ThetaSpec parse_token(const std::string& token);

 private:
  ThetaSpec(Kind kind) : kind_(kind) {}
  Kind kind_;
  double c_ = 1.0;
  std::vector<double> coef_;
  std::vector<double> breaks_;
  std::vector<double> levels_;
  std::string label_;
};

}  // namespace hazshift
