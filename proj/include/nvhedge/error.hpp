#pragma once

#include <stdexcept>
#include <string>

namespace nvhedge {

enum class ErrorKind {
    InvalidInput,
    Infeasible,
    NotApplicable,
    AssumptionViolated,
    DegenerateInput,
    InternalConsistency,
    NumericalFailure,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

// Process exit code used by the command-line tool:
// 2 validation, 3 assumption violation, 4 numerical failure.
int exit_code(ErrorKind kind) noexcept;

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorKind::InvalidInput, what);
}

void require_finite(double value, const char* name);

} // namespace nvhedge
