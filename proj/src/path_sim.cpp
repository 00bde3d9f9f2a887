#include "defaultgap/path_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "defaultgap/errors.hpp"

namespace defaultgap {

namespace {

constexpr double kPi = 3.14159265358979323846;

// P[bridge from u to v over span reaches {x <= level}] given both endpoints,
// assuming min(u, v) > level.
double dip_prob(double u, double v, double level, double sigma, double span) {
    return std::exp(-2.0 * (u - level) * (v - level) / (sigma * sigma * span));
}

// Draws (midpoint value, left-half dips, right-half dips) for the bridge over
// an interval of length `span` with endpoint values xa, xb, conditioned on
// the event that at least one half dips to {x <= level}. Conditioning is by
// rejection; each proposal is exact given the midpoint, so the accepted
// triple has the exact conditional law.
struct MidpointDraw {
    double xm;
    bool left;
    bool right;
};

MidpointDraw sample_conditioned_midpoint(double xa, double xb, double level,
                                         double sigma, double span,
                                         RngStream& rng) {
    const double mean = 0.5 * (xa + xb);
    const double sd = sigma * std::sqrt(0.25 * span);
    const double half = 0.5 * span;
    for (int tries = 0; tries < 1000000; ++tries) {
        const double xm = mean + sd * rng.normal();
        bool left, right;
        if (std::min(xa, xm) <= level) {
            left = true;
        } else {
            left = rng.uniform() < dip_prob(xa, xm, level, sigma, half);
        }
        if (std::min(xm, xb) <= level) {
            right = true;
        } else {
            right = rng.uniform() < dip_prob(xm, xb, level, sigma, half);
        }
        if (left || right) return {xm, left, right};
    }
    // Practically unreachable: entry probability and acceptance probability
    // cancel in expectation. Fall back to the midpoint value forced low.
    return {level, true, true};
}

} // namespace

double effective_drift(const LevyModel& model) {
    double b = model.drift;
    if (model.kind == ModelKind::SpectrallyPositiveJumpDiffusion &&
        model.jumps->intensity > 0.0) {
        b -= model.jumps->intensity * jump_compensator_mean(model.jumps->sizes);
    }
    return b;
}

double sample_increment(const LevyModel& model, double dt, RngStream& rng) {
    require_valid(model);
    if (dt < 0.0) throw std::invalid_argument("sample_increment: dt < 0");
    if (dt == 0.0) return 0.0;

    switch (model.kind) {
        case ModelKind::BrownianDrift:
            return model.drift * dt + model.sigma * std::sqrt(dt) * rng.normal();
        case ModelKind::SpectrallyPositiveJumpDiffusion: {
            double x = effective_drift(model) * dt +
                       model.sigma * std::sqrt(dt) * rng.normal();
            const int n = rng.poisson(model.jumps->intensity * dt);
            for (int i = 0; i < n; ++i) {
                x += std::visit(
                    [&rng](const auto& j) -> double {
                        using T = std::decay_t<decltype(j)>;
                        if constexpr (std::is_same_v<T, PointMassJumps>) {
                            return j.size;
                        } else if constexpr (std::is_same_v<T, ExponentialJumps>) {
                            return rng.exponential() / j.rate;
                        } else {
                            return std::exp(j.log_mean + j.log_sd * rng.normal());
                        }
                    },
                    model.jumps->sizes);
            }
            return x;
        }
        case ModelKind::AlphaStable: {
            const double alpha = model.stable->alpha;
            const double c = model.stable->scale;
            const double beta = model.stable->beta;
            double x = model.drift * dt;
            if (model.sigma > 0.0) x += model.sigma * std::sqrt(dt) * rng.normal();
            if (alpha == 1.0) {
                // scale c*dt plus the S1 log-scaling shift
                x += c * dt * rng.stable(alpha, beta) +
                     (2.0 / kPi) * c * beta * dt * std::log(c * dt);
            } else {
                x += c * std::pow(dt, 1.0 / alpha) * rng.stable(alpha, beta);
            }
            return x;
        }
    }
    throw std::logic_error("unreachable");
}

PathSample sample_grid_path(const FirmValue& firm, const TimeGrid& grid,
                            RngStream& rng) {
    if (!(firm.s0 > 0.0)) throw std::invalid_argument("firm value s0 must be > 0");
    if (grid.steps < 0 || !(grid.dt > 0.0)) {
        throw std::invalid_argument("sample_grid_path: bad grid");
    }
    PathSample p;
    p.grid = grid;
    p.log_values.resize(grid.steps + 1);
    p.log_values[0] = std::log(firm.s0);
    for (int i = 1; i <= grid.steps; ++i) {
        p.log_values[i] =
            p.log_values[i - 1] + sample_increment(firm.model, grid.dt, rng);
    }
    return p;
}

double bridge_crossing_prob(double x_left, double x_right, double level,
                            double sigma, double dt) {
    if (sigma <= 0.0) {
        throw NotApplicable("bridge crossing probability needs sigma > 0");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("bridge_crossing_prob: dt <= 0");
    if (std::min(x_left, x_right) <= level) return 1.0;
    return dip_prob(x_left, x_right, level, sigma, dt);
}

namespace {

enum class Locate { First, Last };

// Core bisection: locates the first or last visit to {x <= level}, given the
// bridge visits it (established by the caller). Exact in distribution; the
// interval containing the visit is halved `depth` times.
double locate_visit(double x_left, double x_right, double level, double sigma,
                    double dt, RngStream& rng, int depth, Locate which) {
    double a = 0.0, b = dt;
    double xa = x_left, xb = x_right;
    for (int d = 0; d < depth; ++d) {
        const auto mid = sample_conditioned_midpoint(xa, xb, level, sigma, b - a, rng);
        const double m = 0.5 * (a + b);
        const bool go_right = (which == Locate::Last) ? mid.right : !mid.left;
        if (go_right) {
            a = m;
            xa = mid.xm;
        } else {
            b = m;
            xb = mid.xm;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

std::optional<double> sample_last_crossing_in_interval(double x_left,
                                                       double x_right,
                                                       double level, double sigma,
                                                       double dt, RngStream& rng,
                                                       int depth) {
    if (sigma <= 0.0) {
        throw NotApplicable("last-crossing sampling needs sigma > 0; refine the "
                            "grid for pure-jump models");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    if (x_right <= level) return dt;
    if (x_left > level) {
        const double p = dip_prob(x_left, x_right, level, sigma, dt);
        if (rng.uniform() >= p) return std::nullopt;
    }
    return locate_visit(x_left, x_right, level, sigma, dt, rng, depth, Locate::Last);
}

std::optional<double> sample_first_crossing_in_interval(double x_left,
                                                        double x_right,
                                                        double level, double sigma,
                                                        double dt, RngStream& rng,
                                                        int depth) {
    if (sigma <= 0.0) {
        throw NotApplicable("first-crossing sampling needs sigma > 0; refine the "
                            "grid for pure-jump models");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    if (x_left <= level) return 0.0;
    if (x_right > level) {
        const double p = dip_prob(x_left, x_right, level, sigma, dt);
        if (rng.uniform() >= p) return std::nullopt;
    }
    return locate_visit(x_left, x_right, level, sigma, dt, rng, depth, Locate::First);
}

} // namespace defaultgap
