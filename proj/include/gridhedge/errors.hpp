#pragma once

#include <stdexcept>
#include <string>

namespace gridhedge {

/// Input data (instance file, payoff parameters, ...) failed validation.
struct InvalidInstance : std::invalid_argument {
    explicit InvalidInstance(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A path coordinate is not a member of the model's level set.
struct InvalidPath : std::invalid_argument {
    explicit InvalidPath(const std::string& msg) : std::invalid_argument(msg) {}
};

/// The requested operation would enumerate more paths than the configured cap.
struct SizeLimitError : std::runtime_error {
    explicit SizeLimitError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The solver could not produce a certified answer within its iteration and
/// tolerance budget. Never raised with a partially trusted result attached.
struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& msg) : std::runtime_error(msg) {}
};

/// Pricing was requested on a market with no admissible martingale measure.
struct NoAdmissibleMeasure : std::runtime_error {
    explicit NoAdmissibleMeasure(const std::string& msg) : std::runtime_error(msg) {}
};

/// A call strip violates a static no-arbitrage condition in strike space
/// (negative price, monotonicity, butterfly) or is inconsistent with every
/// probability law on the grid levels.
struct StaticArbitrage : std::runtime_error {
    explicit StaticArbitrage(const std::string& msg) : std::runtime_error(msg) {}
};

/// A payoff expected to be convex along the level axis is not.
struct NotConvex : std::invalid_argument {
    explicit NotConvex(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A measure that was required to be a martingale measure is not one.
struct NotAMartingale : std::runtime_error {
    explicit NotAMartingale(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace gridhedge
