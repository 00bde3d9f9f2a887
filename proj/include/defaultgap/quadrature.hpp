#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace defaultgap {

// Adaptive Gauss-Kronrod integration over [a, b]. Throws QuadratureFailure if
// the error estimate does not reach abs_tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12);

// Nodes and weights of n-point Gauss-Laguerre quadrature for
// integral_0^inf e^{-x} f(x) dx  ~=  sum w_i f(x_i).
// Kept independent of the adaptive route so the two can cross-check each other.
std::vector<std::pair<double, double>> gauss_laguerre(int n);

} // namespace defaultgap
