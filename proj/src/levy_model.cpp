#include "defaultgap/levy_model.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "defaultgap/errors.hpp"
#include "defaultgap/quadrature.hpp"
#include "defaultgap/rng.hpp"

namespace defaultgap {

namespace {

constexpr double kPi = 3.14159265358979323846;

void reject_unknown_fields(const nlohmann::json& obj,
                           const std::set<std::string>& allowed,
                           const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError("unknown field \"" + it.key() + "\" in " + where);
        }
    }
}

} // namespace

LevyModel LevyModel::brownian(double drift, double sigma) {
    LevyModel m;
    m.kind = ModelKind::BrownianDrift;
    m.drift = drift;
    m.sigma = sigma;
    return m;
}

LevyModel LevyModel::jump_diffusion(double drift, double sigma, JumpSpec jumps) {
    LevyModel m;
    m.kind = ModelKind::SpectrallyPositiveJumpDiffusion;
    m.drift = drift;
    m.sigma = sigma;
    m.jumps = std::move(jumps);
    return m;
}

LevyModel LevyModel::alpha_stable(double drift, StableSpec spec) {
    LevyModel m;
    m.kind = ModelKind::AlphaStable;
    m.drift = drift;
    m.stable = spec;
    return m;
}

std::vector<std::string> validate_model(const LevyModel& model) {
    std::vector<std::string> errs;
    if (!std::isfinite(model.drift)) errs.push_back("drift not finite");
    if (!std::isfinite(model.sigma)) errs.push_back("sigma not finite");
    if (model.sigma < 0.0) errs.push_back("sigma negative");

    const bool wants_jumps = model.kind == ModelKind::SpectrallyPositiveJumpDiffusion;
    const bool wants_stable = model.kind == ModelKind::AlphaStable;
    if (wants_jumps && !model.jumps) errs.push_back("jump spec missing");
    if (!wants_jumps && model.jumps) errs.push_back("jump spec not allowed for this kind");
    if (wants_stable && !model.stable) errs.push_back("stable spec missing");
    if (!wants_stable && model.stable) errs.push_back("stable spec not allowed for this kind");

    if (model.jumps) {
        if (!(model.jumps->intensity >= 0.0) || !std::isfinite(model.jumps->intensity)) {
            errs.push_back("jump intensity negative");
        }
        std::visit(
            [&errs](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, PointMassJumps>) {
                    if (!(d.size > 0.0)) errs.push_back("point-mass jump size not positive");
                } else if constexpr (std::is_same_v<T, ExponentialJumps>) {
                    if (!(d.rate > 0.0)) errs.push_back("exponential jump rate not positive");
                } else {
                    if (!(d.log_sd > 0.0)) errs.push_back("lognormal jump log-sd not positive");
                    if (!std::isfinite(d.log_mean)) errs.push_back("lognormal jump log-mean not finite");
                }
            },
            model.jumps->sizes);
    }
    if (model.stable) {
        if (!(model.stable->alpha > 0.0 && model.stable->alpha < 2.0)) {
            errs.push_back("alpha out of (0,2)");
        }
        if (!(model.stable->scale > 0.0)) errs.push_back("stable scale not positive");
        if (!(std::fabs(model.stable->beta) <= 1.0)) errs.push_back("stable beta out of [-1,1]");
    }
    return errs;
}

void require_valid(const LevyModel& model) {
    const auto errs = validate_model(model);
    if (!errs.empty()) {
        std::string msg = "invalid model:";
        for (const auto& e : errs) msg += " " + e + ";";
        throw std::invalid_argument(msg);
    }
}

double jump_exp_moment(const JumpSizeDist& d) {
    return std::visit(
        [](const auto& j) -> double {
            using T = std::decay_t<decltype(j)>;
            if constexpr (std::is_same_v<T, PointMassJumps>) {
                return std::exp(j.size);
            } else if constexpr (std::is_same_v<T, ExponentialJumps>) {
                if (j.rate <= 1.0) {
                    throw NoExponentialMoment(
                        "exponential jumps with rate <= 1 have E[e^J] = inf");
                }
                return j.rate / (j.rate - 1.0);
            } else {
                throw NoExponentialMoment("lognormal jump sizes have E[e^J] = inf");
            }
        },
        d);
}

double jump_compensator_mean(const JumpSizeDist& d) {
    return std::visit(
        [](const auto& j) -> double {
            using T = std::decay_t<decltype(j)>;
            if constexpr (std::is_same_v<T, PointMassJumps>) {
                return j.size < 1.0 ? j.size : 0.0;
            } else if constexpr (std::is_same_v<T, ExponentialJumps>) {
                const double r = j.rate;
                return -std::exp(-r) + (1.0 - std::exp(-r)) / r;
            } else {
                // E[J; J < 1] for lognormal J
                const double m = j.log_mean, s = j.log_sd;
                return std::exp(m + 0.5 * s * s) * normal_cdf((-m - s * s) / s);
            }
        },
        d);
}

std::complex<double> jump_char(const JumpSizeDist& d, double theta) {
    return std::visit(
        [theta](const auto& j) -> std::complex<double> {
            using T = std::decay_t<decltype(j)>;
            if constexpr (std::is_same_v<T, PointMassJumps>) {
                return std::exp(std::complex<double>(0.0, theta * j.size));
            } else if constexpr (std::is_same_v<T, ExponentialJumps>) {
                return j.rate / std::complex<double>(j.rate, -theta);
            } else {
                if (theta == 0.0) return 1.0;
                const double m = j.log_mean, s = j.log_sd;
                // E[e^{i theta J}] with J = e^Y, Y ~ N(m, s^2)
                const double norm = 1.0 / (s * std::sqrt(2.0 * kPi));
                auto pdf_part = [&](double y, bool imag) {
                    const double z = (y - m) / s;
                    const double w = norm * std::exp(-0.5 * z * z);
                    const double arg = theta * std::exp(y);
                    return w * (imag ? std::sin(arg) : std::cos(arg));
                };
                const double lo = m - 10.0 * s, hi = m + 10.0 * s;
                const double re =
                    integrate([&](double y) { return pdf_part(y, false); }, lo, hi, 1e-10);
                const double im =
                    integrate([&](double y) { return pdf_part(y, true); }, lo, hi, 1e-10);
                return {re, im};
            }
        },
        d);
}

std::complex<double> characteristic_exponent(const LevyModel& model, double theta) {
    require_valid(model);
    const std::complex<double> i(0.0, 1.0);
    std::complex<double> psi = i * model.drift * theta -
                               0.5 * model.sigma * model.sigma * theta * theta;
    if (model.kind == ModelKind::SpectrallyPositiveJumpDiffusion) {
        const double lambda = model.jumps->intensity;
        if (lambda > 0.0) {
            psi += lambda * (jump_char(model.jumps->sizes, theta) - 1.0 -
                             i * theta * jump_compensator_mean(model.jumps->sizes));
        }
    } else if (model.kind == ModelKind::AlphaStable) {
        const double alpha = model.stable->alpha;
        const double c = model.stable->scale;
        const double beta = model.stable->beta;
        if (theta != 0.0) {
            const double sgn = theta > 0.0 ? 1.0 : -1.0;
            const double at = std::pow(c * std::fabs(theta), alpha);
            if (alpha == 1.0) {
                psi += -c * std::fabs(theta) *
                       std::complex<double>(
                           1.0, beta * (2.0 / kPi) * sgn * std::log(std::fabs(theta)));
            } else {
                psi += -at * std::complex<double>(
                                 1.0, -beta * sgn * std::tan(kPi * alpha / 2.0));
            }
        }
    }
    return psi;
}

double martingale_drift(const LevyModel& model) {
    require_valid(model);
    switch (model.kind) {
        case ModelKind::BrownianDrift:
            return -0.5 * model.sigma * model.sigma;
        case ModelKind::SpectrallyPositiveJumpDiffusion: {
            const double lambda = model.jumps->intensity;
            double jump_term = 0.0;
            if (lambda > 0.0) {
                jump_term = lambda * (jump_exp_moment(model.jumps->sizes) - 1.0 -
                                      jump_compensator_mean(model.jumps->sizes));
            }
            return -0.5 * model.sigma * model.sigma - jump_term;
        }
        case ModelKind::AlphaStable:
            throw NoExponentialMoment(
                "alpha-stable log dynamics have no exponential moment");
    }
    throw std::logic_error("unreachable");
}

LevyModel with_martingale_drift(LevyModel model) {
    model.drift = martingale_drift(model);
    return model;
}

namespace {

JumpSizeDist parse_jump_sizes(const nlohmann::json& spec) {
    if (!spec.is_object()) throw ConfigError("jump sizes must be an object");
    const std::string type = spec.value("type", "");
    if (type == "point_mass") {
        reject_unknown_fields(spec, {"type", "size"}, "jump sizes");
        if (!spec.contains("size")) throw ConfigError("point_mass jumps need \"size\"");
        return PointMassJumps{spec.at("size").get<double>()};
    }
    if (type == "exponential") {
        reject_unknown_fields(spec, {"type", "rate"}, "jump sizes");
        if (!spec.contains("rate")) throw ConfigError("exponential jumps need \"rate\"");
        return ExponentialJumps{spec.at("rate").get<double>()};
    }
    if (type == "lognormal") {
        reject_unknown_fields(spec, {"type", "log_mean", "log_sd"}, "jump sizes");
        if (!spec.contains("log_mean") || !spec.contains("log_sd")) {
            throw ConfigError("lognormal jumps need \"log_mean\" and \"log_sd\"");
        }
        return LognormalJumps{spec.at("log_mean").get<double>(),
                              spec.at("log_sd").get<double>()};
    }
    throw ConfigError("unknown jump size type \"" + type + "\"");
}

} // namespace

LevyModel parse_model(const nlohmann::json& spec) {
    if (!spec.is_object()) throw ConfigError("model must be a JSON object");
    reject_unknown_fields(spec, {"kind", "b", "sigma", "jumps", "stable", "risk_neutral"},
                          "model");
    if (!spec.contains("kind")) throw ConfigError("model needs \"kind\"");
    const std::string kind = spec.at("kind").get<std::string>();

    LevyModel m;
    if (kind == "brownian") {
        m.kind = ModelKind::BrownianDrift;
    } else if (kind == "spectrally_positive_jump_diffusion") {
        m.kind = ModelKind::SpectrallyPositiveJumpDiffusion;
    } else if (kind == "alpha_stable") {
        m.kind = ModelKind::AlphaStable;
    } else {
        throw ConfigError("unknown model kind \"" + kind + "\"");
    }

    m.sigma = spec.value("sigma", 0.0);
    if (spec.contains("jumps")) {
        const auto& j = spec.at("jumps");
        reject_unknown_fields(j, {"intensity", "sizes"}, "jumps");
        if (!j.contains("intensity") || !j.contains("sizes")) {
            throw ConfigError("jumps need \"intensity\" and \"sizes\"");
        }
        m.jumps = JumpSpec{j.at("intensity").get<double>(),
                           parse_jump_sizes(j.at("sizes"))};
    }
    if (spec.contains("stable")) {
        const auto& s = spec.at("stable");
        reject_unknown_fields(s, {"alpha", "scale", "beta"}, "stable");
        if (!s.contains("alpha") || !s.contains("scale")) {
            throw ConfigError("stable spec needs \"alpha\" and \"scale\"");
        }
        m.stable = StableSpec{s.at("alpha").get<double>(), s.at("scale").get<double>(),
                              s.value("beta", 0.0)};
    }

    const bool risk_neutral = spec.value("risk_neutral", false);
    if (risk_neutral && spec.contains("b")) {
        throw ConfigError("\"b\" must be absent when risk_neutral is true");
    }
    if (!risk_neutral && !spec.contains("b")) {
        throw ConfigError("model needs \"b\" (or risk_neutral: true)");
    }
    if (!risk_neutral) m.drift = spec.at("b").get<double>();

    const auto errs = validate_model(m);
    if (!errs.empty()) {
        std::string msg = "invalid model:";
        for (const auto& e : errs) msg += " " + e + ";";
        throw ConfigError(msg);
    }
    if (risk_neutral) m.drift = martingale_drift(m);
    return m;
}

nlohmann::json model_to_json(const LevyModel& model) {
    nlohmann::json out;
    switch (model.kind) {
        case ModelKind::BrownianDrift: out["kind"] = "brownian"; break;
        case ModelKind::SpectrallyPositiveJumpDiffusion:
            out["kind"] = "spectrally_positive_jump_diffusion";
            break;
        case ModelKind::AlphaStable: out["kind"] = "alpha_stable"; break;
    }
    out["b"] = model.drift;
    out["sigma"] = model.sigma;
    if (model.jumps) {
        nlohmann::json sizes;
        std::visit(
            [&sizes](const auto& j) {
                using T = std::decay_t<decltype(j)>;
                if constexpr (std::is_same_v<T, PointMassJumps>) {
                    sizes = {{"type", "point_mass"}, {"size", j.size}};
                } else if constexpr (std::is_same_v<T, ExponentialJumps>) {
                    sizes = {{"type", "exponential"}, {"rate", j.rate}};
                } else {
                    sizes = {{"type", "lognormal"},
                             {"log_mean", j.log_mean},
                             {"log_sd", j.log_sd}};
                }
            },
            model.jumps->sizes);
        out["jumps"] = {{"intensity", model.jumps->intensity}, {"sizes", sizes}};
    }
    if (model.stable) {
        out["stable"] = {{"alpha", model.stable->alpha},
                         {"scale", model.stable->scale},
                         {"beta", model.stable->beta}};
    }
    return out;
}

} // namespace defaultgap
