#include "defaultgap/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace defaultgap {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr double kPi = 3.14159265358979323846;

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(seed ^ splitmix64(salt));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffULL),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id & 0xffffffffULL),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
}

double RngStream::uniform() {
    // (x >> 11) has 53 random bits; the +0.5 keeps us strictly inside (0,1).
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    return normal_quantile(uniform());
}

double RngStream::exponential() {
    return -std::log(uniform());
}

int RngStream::poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean)) {
        throw std::invalid_argument("poisson: mean must be finite and >= 0");
    }
    if (mean == 0.0) return 0;
    if (mean > 700.0) {
        throw std::invalid_argument("poisson: mean too large for CDF inversion");
    }
    const double u = uniform();
    double term = std::exp(-mean);
    double cum = term;
    int k = 0;
    while (u > cum) {
        ++k;
        term *= mean / k;
        cum += term;
        if (k > 100000) break; // cum has saturated numerically
    }
    return k;
}

double RngStream::stable(double alpha, double beta) {
    const double v = kPi * (uniform() - 0.5);
    double w = exponential();
    while (w == 0.0) w = exponential();

    if (alpha == 1.0) {
        const double hv = kPi / 2.0 + beta * v;
        return (2.0 / kPi) *
               (hv * std::tan(v) - beta * std::log((w * std::cos(v)) / hv));
    }
    const double tb = beta * std::tan(kPi * alpha / 2.0);
    const double b = std::atan(tb) / alpha;
    const double s = std::pow(1.0 + tb * tb, 1.0 / (2.0 * alpha));
    return s * std::sin(alpha * (v + b)) /
           std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// AS 241 algorithm PPND16 (Wichura, 1988); relative error below 1e-15.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    }
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                  3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

} // namespace defaultgap
