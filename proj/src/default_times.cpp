#include "defaultgap/default_times.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "defaultgap/errors.hpp"
#include "defaultgap/parallel.hpp"

namespace defaultgap {

namespace {

double log_barrier_of(const DebtSchedule& schedule) {
    return schedule.barrier > 0.0 ? std::log(schedule.barrier)
                                  : -std::numeric_limits<double>::infinity();
}

double sample_jump_size(const JumpSizeDist& d, RngStream& rng) {
    return std::visit(
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
        d);
}

// Last time a line from u to v over span is at or above level, or -1.
double line_last_visit_above(double u, double v, double level, double span) {
    if (v >= level) return span;
    if (u >= level) return span * (u - level) / (u - v);
    return -1.0;
}

} // namespace

void DebtSchedule::validate() const {
    if (!(n_interval > 0.0)) throw std::invalid_argument("n_interval must be > 0");
    if (!(barrier >= 0.0)) throw std::invalid_argument("barrier must be >= 0");
    if (horizon_payments < 1) throw std::invalid_argument("horizon_payments >= 1");
}

void EmpiricalDistribution::add(double value, double weight) {
    samples.emplace_back(value, weight);
}

double EmpiricalDistribution::total_weight() const {
    double s = 0.0;
    for (const auto& [v, w] : samples) s += w;
    return s;
}

void EmpiricalDistribution::normalize() {
    const double total = total_weight();
    if (!(total > 0.0)) throw std::invalid_argument("cannot normalize empty distribution");
    for (auto& [v, w] : samples) w /= total;
    normalized = true;
}

double EmpiricalDistribution::mean() const {
    double acc = 0.0, total = 0.0;
    for (const auto& [v, w] : samples) {
        acc += v * w;
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("mean of empty distribution");
    return acc / total;
}

double EmpiricalDistribution::quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level");
    if (samples.empty()) throw std::invalid_argument("quantile of empty distribution");
    auto sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double target = q * total_weight();
    double cum = 0.0;
    for (const auto& [v, w] : sorted) {
        cum += w;
        if (cum >= target) return v;
    }
    return sorted.back().first;
}

std::vector<double> EmpiricalDistribution::values() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& [v, w] : samples) out.push_back(v);
    return out;
}

RecordedDefault recorded_default(std::span<const double> log_values,
                                 const DebtSchedule& schedule) {
    schedule.validate();
    if (log_values.size() < static_cast<std::size_t>(schedule.horizon_payments) + 1) {
        throw std::invalid_argument("recorded_default: path shorter than horizon");
    }
    const double level = log_barrier_of(schedule);
    if (log_values[0] <= level) {
        throw BadStart("recorded_default: S_0 <= D");
    }
    RecordedDefault out;
    for (int k = 1; k <= schedule.horizon_payments; ++k) {
        if (log_values[k] <= level) {
            out.status = DefaultStatus::Defaulted;
            out.payment_index = k;
            out.tau_r = schedule.payment_time(k);
            out.log_value = log_values[k];
            return out;
        }
    }
    return out;
}

IntervalPath sample_interval(const LevyModel& model, double x_start, double dt,
                             RngStream& rng, const SimOptions& opts) {
    IntervalPath path;
    path.x_start = x_start;

    switch (model.kind) {
        case ModelKind::BrownianDrift: {
            path.x_end = x_start + model.drift * dt +
                         model.sigma * std::sqrt(dt) * rng.normal();
            return path;
        }
        case ModelKind::SpectrallyPositiveJumpDiffusion: {
            const double b = effective_drift(model);
            const int n = rng.poisson(model.jumps->intensity * dt);
            std::vector<double> times(n);
            for (int i = 0; i < n; ++i) times[i] = dt * rng.uniform();
            std::sort(times.begin(), times.end());
            double x = x_start;
            double t_prev = 0.0;
            path.jumps.reserve(n);
            for (int i = 0; i < n; ++i) {
                const double seg = times[i] - t_prev;
                x += b * seg;
                if (model.sigma > 0.0 && seg > 0.0) {
                    x += model.sigma * std::sqrt(seg) * rng.normal();
                }
                const double size = sample_jump_size(model.jumps->sizes, rng);
                path.jumps.push_back({times[i], x, x + size});
                x += size;
                t_prev = times[i];
            }
            const double seg = dt - t_prev;
            x += b * seg;
            if (model.sigma > 0.0 && seg > 0.0) {
                x += model.sigma * std::sqrt(seg) * rng.normal();
            }
            path.x_end = x;
            return path;
        }
        case ModelKind::AlphaStable: {
            const int m = std::max(1, opts.pure_jump_substeps);
            path.subgrid.resize(m + 1);
            path.subgrid[0] = x_start;
            const double sub = dt / m;
            for (int i = 1; i <= m; ++i) {
                path.subgrid[i] =
                    path.subgrid[i - 1] + sample_increment(model, sub, rng);
            }
            path.x_end = path.subgrid.back();
            return path;
        }
    }
    throw std::logic_error("unreachable");
}

double economic_default(const IntervalPath& interval, double dt,
                        double log_barrier, const LevyModel& model,
                        RngStream& rng, const SimOptions& opts) {
    const double L = log_barrier;
    if (!(interval.x_start > L)) {
        throw std::invalid_argument("economic_default: interval must start above the barrier");
    }

    if (!interval.subgrid.empty()) {
        const int m = static_cast<int>(interval.subgrid.size()) - 1;
        for (int i = m; i >= 0; --i) {
            if (interval.subgrid[i] >= L) return dt * i / m;
        }
        return 0.0;
    }

    if (interval.x_end >= L) return dt;

    // Scan segments between jump epochs from the back; the first segment
    // whose sub-path reaches {x >= L} contains tau_e.
    const int n_jumps = static_cast<int>(interval.jumps.size());
    for (int seg = n_jumps; seg >= 0; --seg) {
        const double t0 = seg == 0 ? 0.0 : interval.jumps[seg - 1].t;
        const double t1 = seg == n_jumps ? dt : interval.jumps[seg].t;
        const double u = seg == 0 ? interval.x_start : interval.jumps[seg - 1].x_after;
        const double v = seg == n_jumps ? interval.x_end : interval.jumps[seg].x_before;
        const double span = t1 - t0;
        if (span <= 0.0) {
            if (v >= L) return t1;
            if (u >= L) return t0;
            continue;
        }
        if (model.sigma > 0.0) {
            // Last visit of the bridge to {x >= L}; mirrored through negation.
            const auto hit = sample_last_crossing_in_interval(
                -u, -v, -L, model.sigma, span, rng, opts.bridge_depth);
            if (hit) return t0 + *hit;
        } else {
            const double hit = line_last_visit_above(u, v, L, span);
            if (hit >= 0.0) return t0 + hit;
        }
    }
    return 0.0; // unreachable: the start point is above the barrier
}

std::optional<double> first_passage_in_interval(const IntervalPath& interval,
                                                double dt, double log_barrier,
                                                const LevyModel& model,
                                                RngStream& rng,
                                                const SimOptions& opts) {
    const double L = log_barrier;
    if (interval.x_start <= L) return 0.0;

    if (!interval.subgrid.empty()) {
        const int m = static_cast<int>(interval.subgrid.size()) - 1;
        for (int i = 0; i <= m; ++i) {
            if (interval.subgrid[i] <= L) return dt * i / m;
        }
        return std::nullopt;
    }

    const int n_jumps = static_cast<int>(interval.jumps.size());
    for (int seg = 0; seg <= n_jumps; ++seg) {
        const double t0 = seg == 0 ? 0.0 : interval.jumps[seg - 1].t;
        const double t1 = seg == n_jumps ? dt : interval.jumps[seg].t;
        const double u = seg == 0 ? interval.x_start : interval.jumps[seg - 1].x_after;
        const double v = seg == n_jumps ? interval.x_end : interval.jumps[seg].x_before;
        const double span = t1 - t0;
        if (span <= 0.0) {
            if (u <= L) return t0;
            if (v <= L) return t1;
            continue;
        }
        if (model.sigma > 0.0) {
            const auto hit = sample_first_crossing_in_interval(
                u, v, L, model.sigma, span, rng, opts.bridge_depth);
            if (hit) return t0 + *hit;
        } else {
            // downward motion between upward jumps is the drift line
            if (u <= L) return t0;
            if (v <= L) return t0 + span * (u - L) / (u - v);
        }
    }
    return std::nullopt;
}

namespace {

DefaultOutcome simulate_one(const FirmValue& firm, const DebtSchedule& schedule,
                            RngStream& rng, const SimOptions& opts,
                            bool need_tau_e) {
    const double level = log_barrier_of(schedule);
    double x = std::log(firm.s0);
    if (x <= level) throw BadStart("sample_default_outcome: S_0 <= D");

    const double dt = schedule.n_interval;
    for (int k = 1; k <= schedule.horizon_payments; ++k) {
        const IntervalPath interval = sample_interval(firm.model, x, dt, rng, opts);
        if (interval.x_end <= level) {
            DefaultOutcome out;
            out.status = DefaultStatus::Defaulted;
            out.payment_index = k;
            out.tau_r = schedule.payment_time(k);
            out.value_at_default = std::exp(interval.x_end);
            out.log_value_prev = interval.x_start;
            if (need_tau_e) {
                const double offset =
                    economic_default(interval, dt, level, firm.model, rng, opts);
                out.tau_e = schedule.payment_time(k - 1) + offset;
                out.gap = out.tau_r - out.tau_e;
            }
            return out;
        }
        x = interval.x_end;
    }
    return DefaultOutcome{};
}

} // namespace

DefaultOutcome sample_default_outcome(const FirmValue& firm,
                                      const DebtSchedule& schedule,
                                      RngStream& rng, const SimOptions& opts) {
    schedule.validate();
    require_valid(firm.model);
    return simulate_one(firm, schedule, rng, opts, true);
}

std::vector<DefaultOutcome> simulate_outcomes(const FirmValue& firm,
                                              const DebtSchedule& schedule,
                                              std::int64_t n_paths,
                                              std::uint64_t seed,
                                              const SimOptions& opts,
                                              bool need_tau_e) {
    schedule.validate();
    require_valid(firm.model);
    if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    std::vector<DefaultOutcome> out(n_paths);
    parallel_for(n_paths, opts.threads, [&](std::int64_t i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        out[i] = simulate_one(firm, schedule, rng, opts, need_tau_e);
    });
    return out;
}

DefaultProbEstimate estimate_default_probabilities(const FirmValue& firm,
                                                   const DebtSchedule& schedule,
                                                   std::int64_t n_paths,
                                                   std::uint64_t seed,
                                                   const SimOptions& opts) {
    const auto outcomes = simulate_outcomes(firm, schedule, n_paths, seed, opts,
                                            /*need_tau_e=*/false);
    std::vector<std::int64_t> counts(schedule.horizon_payments + 1, 0);
    for (const auto& o : outcomes) {
        if (o.defaulted()) ++counts[o.payment_index];
    }
    DefaultProbEstimate est;
    est.n_paths = n_paths;
    est.std_err.assign(schedule.horizon_payments + 1, 0.0);
    const double n = static_cast<double>(n_paths);
    for (int k = 1; k <= schedule.horizon_payments; ++k) {
        const double u = counts[k] / n;
        est.u.add(static_cast<double>(k), u);
        est.std_err[k] = std::sqrt(u * (1.0 - u) / n);
        est.p_default += u;
    }
    return est;
}

EmpiricalDistribution gap_distribution_from(
    const std::vector<DefaultOutcome>& outcomes, const GapConditioning& cond) {
    EmpiricalDistribution dist;
    std::int64_t matched = 0;
    for (const auto& o : outcomes) {
        if (!o.defaulted()) continue;
        if (cond.kind == GapConditioning::Kind::GivenTauR &&
            o.payment_index != cond.payment_index) {
            continue;
        }
        dist.add(o.gap);
        ++matched;
    }
    if (matched == 0) throw NoDefaults("no defaulted paths match the conditioning");
    if (cond.kind == GapConditioning::Kind::Unconditional) {
        const double w = 1.0 / static_cast<double>(outcomes.size());
        for (auto& [v, weight] : dist.samples) weight = w;
    } else {
        dist.normalize();
    }
    return dist;
}

EmpiricalDistribution estimate_gap_distribution(const FirmValue& firm,
                                                const DebtSchedule& schedule,
                                                std::int64_t n_paths,
                                                std::uint64_t seed,
                                                const GapConditioning& cond,
                                                const SimOptions& opts) {
    const auto outcomes = simulate_outcomes(firm, schedule, n_paths, seed, opts);
    return gap_distribution_from(outcomes, cond);
}

DefaultTimeDistributions estimate_tau_e_distribution(const FirmValue& firm,
                                                     const DebtSchedule& schedule,
                                                     std::int64_t n_paths,
                                                     std::uint64_t seed,
                                                     const SimOptions& opts) {
    const auto outcomes = simulate_outcomes(firm, schedule, n_paths, seed, opts);
    DefaultTimeDistributions out;
    out.n_paths = n_paths;
    for (const auto& o : outcomes) {
        if (!o.defaulted()) continue;
        out.tau_e.add(o.tau_e);
        out.tau_r.add(o.tau_r);
        out.gap.add(o.gap);
        ++out.defaulted;
    }
    if (out.defaulted == 0) throw NoDefaults("no defaulted paths within horizon");
    out.tau_e.normalize();
    out.tau_r.normalize();
    out.gap.normalize();
    return out;
}

} // namespace defaultgap
