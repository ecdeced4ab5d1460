#pragma once

#include <stdexcept>
#include <string>

namespace nfpe {

// Invalid construction-time input: bad grids, out-of-range parameters,
// mismatched sizes. Recoverable by fixing the caller's setup.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Query outside the mathematical domain of an otherwise valid object
// (tau before the start time, x outside the coordinate map's range, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A computation that started from valid inputs failed to meet its accuracy
// or stability contract. The kind distinguishes abort causes so callers
// (and the CLI exit-code mapping) can react without string matching.
class NumericalError : public std::runtime_error {
public:
    enum class Kind {
        CflViolation,     // explicit step too large for current diffusion
        Truncation,       // integration window or grid loses tracked mass
        NormDrift,        // conserved integral drifted past tolerance
        NegativeDensity,  // density dipped below the negativity floor
        TrajectoryEscape, // characteristic left the resolved region
        Resolution,       // discretization error estimate exceeds target
    };

    NumericalError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

} // namespace nfpe
