#pragma once

#include <functional>

namespace hazshift {

// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b] to the given
// absolute tolerance, bisecting intervals until the local error estimate is
// met. Throws QuadratureError if the tolerance cannot be reached within
// max_depth bisection levels or the integrand is not finite.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth = 48);

}  // namespace hazshift
