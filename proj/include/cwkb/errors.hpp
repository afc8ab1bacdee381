#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cwkb {

enum class Errc {
    NonConvergence,
    MultipleTurningPoint,
    BranchJump,
    QuadratureFailure,
    SignError,
    StepUnderflow,
    CutoffTooSmall,
    StiffnessFailure,
    MissedEigenvalue,
    NoBracket,
    PhaseAliasing,
    LostZero,
    TooFewZeros,
    UnsupportedFamily,
};

std::string_view to_string(Errc code);

// Numerical failure raised by the analysis modules. Input validation problems
// are reported with std::invalid_argument instead.
class Failure : public std::runtime_error {
public:
    Failure(Errc code, const std::string& detail);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& detail);

}  // namespace cwkb
