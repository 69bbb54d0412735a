#pragma once

#include <stdexcept>
#include <string>

namespace dynheight {

enum class ErrorKind {
    invalid_parameter,
    resource_limit,
    precision_violation,
    numerical_failure,
    internal,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_parameter: return "invalid-parameter";
        case ErrorKind::resource_limit: return "resource-limit";
        case ErrorKind::precision_violation: return "precision-violation";
        case ErrorKind::numerical_failure: return "numerical-failure";
        case ErrorKind::internal: return "internal-error";
    }
    return "unknown";
}

/// Base class for every error raised by the library. The kind selects the
/// CLI exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InvalidParameter : Error {
    explicit InvalidParameter(const std::string& what) : Error(ErrorKind::invalid_parameter, what) {}
};

struct ResourceLimit : Error {
    explicit ResourceLimit(const std::string& what) : Error(ErrorKind::resource_limit, what) {}
};

struct PrecisionViolation : Error {
    explicit PrecisionViolation(const std::string& what) : Error(ErrorKind::precision_violation, what) {}
};

struct NumericalFailure : Error {
    explicit NumericalFailure(const std::string& what) : Error(ErrorKind::numerical_failure, what) {}
};

/// Raised by a solver that did not converge at the current working precision.
/// Callers catch it and retry with more bits.
struct PrecisionEscalation : NumericalFailure {
    explicit PrecisionEscalation(const std::string& what) : NumericalFailure(what) {}
};

struct InternalError : Error {
    explicit InternalError(const std::string& what) : Error(ErrorKind::internal, what) {}
};

}  // namespace dynheight
