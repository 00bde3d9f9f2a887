#pragma once

#include <stdexcept>
#include <string>

namespace defaultgap {

// Error taxonomy. Everything derives from std::runtime_error so callers can
// catch broadly; the concrete types exist because tests and the CLI need to
// distinguish failure modes.

struct NotApplicable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoExponentialMoment : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BadStart : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoDefaults : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SeriesTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TruncationTooSevere : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfSupport : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace defaultgap
