#include "nvhedge/error.hpp"

#include <cmath>

namespace nvhedge {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::AssumptionViolated: return "assumption-violated";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::InternalConsistency: return "internal-consistency";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::Infeasible:
    case ErrorKind::NotApplicable: return 2;
    case ErrorKind::AssumptionViolated: return 3;
    case ErrorKind::DegenerateInput:
    case ErrorKind::InternalConsistency:
    case ErrorKind::NumericalFailure: return 4;
    }
    return 4;
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) fail(ErrorKind::InvalidInput, std::string(name) + " must be finite");
}

} // namespace nvhedge
