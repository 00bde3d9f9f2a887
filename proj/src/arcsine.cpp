#include "defaultgap/arcsine.hpp"

#include <cmath>
#include <stdexcept>

#include "defaultgap/errors.hpp"
#include "defaultgap/quadrature.hpp"

namespace defaultgap {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_params(const GapDensityParams& p) {
    if (!(p.n_interval > 0.0)) throw std::invalid_argument("n_interval must be > 0");
    if (!(p.u >= 0.0 && p.u < p.n_interval)) {
        throw std::invalid_argument("u must lie in [0, N)");
    }
    if (!(p.mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
}

// (2/pi) integral_0^theta phi((mu/2) sqrt(span) cos t) dt -- the raw density
// mass of {gap <= span sin^2(theta)} after the sin^2 substitution.
double substituted_mass(double theta, double span, double mu) {
    if (theta <= 0.0) return 0.0;
    const double k = 0.5 * mu * std::sqrt(span);
    return (2.0 / kPi) * integrate(
                             [k](double t) { return phi_aux_closed_form(k * std::cos(t)); },
                             0.0, theta, 1e-11);
}

} // namespace

double phi_aux_closed_form(double m) {
    if (!(m >= 0.0)) throw std::invalid_argument("phi_aux: argument must be >= 0");
    return 1.0 + m * std::sqrt(kPi / 2.0) * std::exp(0.5 * m * m) *
                     std::erf(m / std::sqrt(2.0));
}

double phi_aux(double m) {
    if (!(m >= 0.0)) throw std::invalid_argument("phi_aux: argument must be >= 0");
    // t = v^2 turns the sqrt(t) kink into an analytic integrand with Gaussian
    // decay; truncation at m/sqrt(2) + 10 leaves mass below 1e-16 relative.
    const double hi = m / std::sqrt(2.0) + 10.0;
    const double value = integrate(
        [m](double v) {
            return 2.0 * v * std::exp(-v * v) * std::cosh(m * std::sqrt(2.0) * v);
        },
        0.0, hi, 1e-10);
    const double closed = phi_aux_closed_form(m);
    if (std::fabs(value - closed) > 1e-8 * std::max(1.0, closed)) {
        throw QuadratureFailure("phi_aux: quadrature disagrees with closed form");
    }
    return value;
}

double phi_aux_laguerre(double m, int order) {
    const auto nodes = gauss_laguerre(order);
    double acc = 0.0;
    for (const auto& [x, w] : nodes) {
        acc += w * std::cosh(m * std::sqrt(2.0 * x));
    }
    return acc;
}

double gap_density(double s, const GapDensityParams& params) {
    check_params(params);
    const double span = params.n_interval - params.u;
    if (!(s > 0.0 && s < span)) {
        throw OutOfSupport("gap_density: s outside (0, N-u)");
    }
    return phi_aux_closed_form(0.5 * params.mu * std::sqrt(span - s)) /
           (kPi * std::sqrt(s * (span - s)));
}

double gap_total_mass(const GapDensityParams& params) {
    check_params(params);
    const double span = params.n_interval - params.u;
    return substituted_mass(kPi / 2.0, span, params.mu);
}

double gap_cdf(double s, const GapDensityParams& params) {
    check_params(params);
    const double span = params.n_interval - params.u;
    if (s < 0.0 || s > span) throw OutOfSupport("gap_cdf: s outside [0, N-u]");
    if (s == 0.0) return 0.0;
    if (s == span) return 1.0;
    // s = span sin^2(theta) maps the density onto (2/pi) phi(k cos(theta)),
    // free of endpoint singularities.
    const double theta = std::asin(std::sqrt(s / span));
    const double z = substituted_mass(kPi / 2.0, span, params.mu);
    const double head = substituted_mass(theta, span, params.mu);
    return head / z;
}

double arcsine_cdf(double s, double span) {
    if (!(span > 0.0)) throw std::invalid_argument("arcsine_cdf: span <= 0");
    if (s <= 0.0) return 0.0;
    if (s >= span) return 1.0;
    return (2.0 / kPi) * std::asin(std::sqrt(s / span));
}

double arcsine_density(double s, double span) {
    if (!(s > 0.0 && s < span)) throw OutOfSupport("arcsine_density: s outside (0,span)");
    return 1.0 / (kPi * std::sqrt(s * (span - s)));
}

} // namespace defaultgap
