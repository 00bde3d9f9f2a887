#pragma once

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace defaultgap {

// Parametric jump-size families for the spectrally positive compound-Poisson
// component. All are supported on (0, inf), so spectral positivity holds by
// construction.
struct PointMassJumps {
    double size = 1.0; // J == size
};
struct ExponentialJumps {
    double rate = 1.0; // density rate * exp(-rate x), x > 0
};
struct LognormalJumps {
    double log_mean = 0.0;  // mean of log J
    double log_sd = 1.0;    // sd of log J
};
using JumpSizeDist = std::variant<PointMassJumps, ExponentialJumps, LognormalJumps>;

struct JumpSpec {
    double intensity = 0.0; // Poisson rate per unit time
    JumpSizeDist sizes;
};

struct StableSpec {
    double alpha = 1.5;   // stability index, in (0, 2)
    double scale = 1.0;   // > 0, per unit time^(1/alpha)
    double beta = 0.0;    // skewness, in [-1, 1]
};

enum class ModelKind {
    BrownianDrift,
    SpectrallyPositiveJumpDiffusion,
    AlphaStable,
};

// Log-value dynamics X_t with S_t = S_0 exp(X_t).
//
// Conventions (these fix the meaning of `drift`):
//  - BrownianDrift:          X_t = b t + sigma W_t
//  - JumpDiffusion:          X_t = b t + sigma W_t + sum_{i<=P_t} J_i
//                                  - lambda t E[J 1_{J<1}]
//    i.e. b is the Levy-Khintchine drift under the truncation 1_{|x|<1};
//    jumps of size < 1 are compensated. The strict inequality matters only
//    for a point mass at exactly 1 and is the convention under which the
//    characteristic exponent and martingale condition are mutually
//    consistent.
//  - AlphaStable:            X_t = b t + stable(alpha, scale t^{1/alpha}, beta)
struct LevyModel {
    ModelKind kind = ModelKind::BrownianDrift;
    double drift = 0.0;
    double sigma = 0.0;
    std::optional<JumpSpec> jumps;    // JumpDiffusion only
    std::optional<StableSpec> stable; // AlphaStable only

    static LevyModel brownian(double drift, double sigma);
    static LevyModel jump_diffusion(double drift, double sigma, JumpSpec jumps);
    static LevyModel alpha_stable(double drift, StableSpec spec);
};

struct FirmValue {
    double s0 = 1.0; // initial firm value, > 0
    LevyModel model;
};

// Returns the list of violated parameter constraints; empty means valid.
std::vector<std::string> validate_model(const LevyModel& model);
void require_valid(const LevyModel& model); // throws std::invalid_argument

// Levy-Khintchine exponent psi with E[e^{i theta X_t}] = e^{t psi(theta)}.
std::complex<double> characteristic_exponent(const LevyModel& model, double theta);

// Drift b solving  b + sigma^2/2 + int (e^z - 1 - z 1_{z<1}) nu(dz) = 0,
// which makes (S_t) a martingale. The model's own drift field is ignored.
// Throws NoExponentialMoment when E[e^J] diverges (alpha-stable; lognormal
// jumps; exponential jumps with rate <= 1).
double martingale_drift(const LevyModel& model);

// Copy of the model with its drift replaced by martingale_drift.
LevyModel with_martingale_drift(LevyModel model);

// Jump-size functionals used by the exponent/martingale formulas above.
double jump_exp_moment(const JumpSizeDist& d);        // E[e^J], may throw
double jump_compensator_mean(const JumpSizeDist& d);  // E[J 1_{J<1}]
std::complex<double> jump_char(const JumpSizeDist& d, double theta); // E[e^{i theta J}]

// JSON wire format (see README):
//   {"kind": "...", "b": ..., "sigma": ..., "jumps": {...}, "stable": {...},
//    "risk_neutral": bool}
// Unknown fields are rejected. When risk_neutral is true, "b" must be absent
// and is computed from the martingale condition.
LevyModel parse_model(const nlohmann::json& spec);
nlohmann::json model_to_json(const LevyModel& model);

} // namespace defaultgap
