#pragma once

namespace defaultgap {

// Parameters of the drift-corrected gap density for the Brownian case:
// firm value exp(mu W_t - mu^2 t/2), repayment spacing N, barrier first hit
// at time u into the interval.
struct GapDensityParams {
    double n_interval = 1.0; // N
    double u = 0.0;          // elapsed time at the barrier hit, in [0, N)
    double mu = 0.0;         // drift/volatility parameter of the reference GBM
};

// phi(m) = integral_0^inf e^{-t} cosh(m sqrt(2t)) dt, evaluated by adaptive
// quadrature and cross-checked against the closed-form reduction
//   1 + m sqrt(pi/2) e^{m^2/2} erf(m/sqrt(2));
// throws QuadratureFailure if the two disagree beyond 1e-8.
double phi_aux(double mu_arg);
double phi_aux_closed_form(double mu_arg);
double phi_aux_laguerre(double mu_arg, int order = 64);

// Raw (unnormalized) gap density
//   1/(pi sqrt(s (N-u-s))) * phi((mu/2) sqrt(N-u-s)),   0 < s < N-u.
// At mu = 0 this is the arcsine density on (0, N-u) and integrates to one;
// for mu > 0 its total mass Z is not one, see gap_total_mass.
double gap_density(double s, const GapDensityParams& params);

// Total mass Z(mu, N, u) of the raw density, via the s = (N-u) sin^2(theta)
// substitution that removes both endpoint singularities.
double gap_total_mass(const GapDensityParams& params);

// Normalized CDF of the gap law.
double gap_cdf(double s, const GapDensityParams& params);

// Closed-form arcsine CDF (2/pi) asin(sqrt(s/span)) on [0, span].
double arcsine_cdf(double s, double span);
double arcsine_density(double s, double span);

} // namespace defaultgap
