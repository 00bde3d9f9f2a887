#pragma once

#include <cstdint>
#include <random>

namespace defaultgap {

// Reproducible random stream. A (seed, stream_id) pair fully determines the
// draw sequence, independent of thread count or scheduling: estimators assign
// one stream per path (stream_id = path index) and may evaluate paths in any
// order. Draws avoid std::*_distribution on purpose — their algorithms are
// implementation-defined, which would break the bit-reproducibility contract.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();

    // Standard normal via inverse-CDF transform of one uniform.
    double normal();

    // Exponential with unit mean.
    double exponential();

    // Poisson count by CDF inversion; mean must be modest (< ~700).
    int poisson(double mean);

    // Standard alpha-stable draw (scale 1, zero shift) in the parameterization
    // whose characteristic function is
    //   exp(-|t|^alpha (1 - i beta sgn(t) tan(pi alpha/2)))         alpha != 1
    //   exp(-|t| (1 + i beta (2/pi) sgn(t) log|t|))                 alpha == 1
    // sampled with the Chambers-Mallows-Stuck transform.
    double stable(double alpha, double beta);

  private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

// Derives a decorrelated child seed, used to give independent experiment
// phases disjoint stream families under one user-facing seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

// Inverse of the standard normal CDF (Wichura's AS 241, double precision).
double normal_quantile(double p);

// Standard normal CDF.
double normal_cdf(double x);

} // namespace defaultgap
