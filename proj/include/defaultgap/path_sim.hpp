#pragma once

#include <optional>
#include <vector>

#include "defaultgap/levy_model.hpp"
#include "defaultgap/rng.hpp"

namespace defaultgap {

struct TimeGrid {
    double t0 = 0.0;
    double dt = 1.0;
    int steps = 1;
    double time_at(int i) const { return t0 + dt * i; }
};

struct PathSample {
    TimeGrid grid;
    std::vector<double> log_values; // size steps + 1
};

// One increment X_{t+dt} - X_t of the log-value process.
double sample_increment(const LevyModel& model, double dt, RngStream& rng);

// Effective linear drift of the continuous part once small jumps are
// compensated (drift - lambda E[J 1_{J<1}] for jump-diffusions).
double effective_drift(const LevyModel& model);

PathSample sample_grid_path(const FirmValue& firm, const TimeGrid& grid,
                            RngStream& rng);

// Probability that a Brownian bridge from x_left to x_right over dt reaches
// the set {x <= level}: 1 when an endpoint is already there, otherwise
// exp(-2 (x_left-level)(x_right-level)/(sigma^2 dt)). Throws NotApplicable
// when sigma == 0.
double bridge_crossing_prob(double x_left, double x_right, double level,
                            double sigma, double dt);

// Last time in [0, dt] the bridge is at or below `level`, or nullopt when the
// bridge never gets there (possible only when both endpoints are above).
// Sampled exactly in distribution by recursive bisection with conditioned
// half-interval crossing indicators; the returned time has resolution
// dt * 2^-depth. If x_right <= level the answer is dt itself.
std::optional<double> sample_last_crossing_in_interval(double x_left,
                                                       double x_right,
                                                       double level, double sigma,
                                                       double dt, RngStream& rng,
                                                       int depth = 12);

// First time in [0, dt] the bridge is at or below `level`; nullopt when the
// bridge stays above. If x_left <= level the answer is 0.
std::optional<double> sample_first_crossing_in_interval(double x_left,
                                                        double x_right,
                                                        double level, double sigma,
                                                        double dt, RngStream& rng,
                                                        int depth = 12);

} // namespace defaultgap
