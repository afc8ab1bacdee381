#include "cwkb/errors.hpp"

namespace cwkb {

std::string_view to_string(Errc code)
{
    switch (code) {
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::MultipleTurningPoint: return "MultipleTurningPoint";
    case Errc::BranchJump: return "BranchJump";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::SignError: return "SignError";
    case Errc::StepUnderflow: return "StepUnderflow";
    case Errc::CutoffTooSmall: return "CutoffTooSmall";
    case Errc::StiffnessFailure: return "StiffnessFailure";
    case Errc::MissedEigenvalue: return "MissedEigenvalue";
    case Errc::NoBracket: return "NoBracket";
    case Errc::PhaseAliasing: return "PhaseAliasing";
    case Errc::LostZero: return "LostZero";
    case Errc::TooFewZeros: return "TooFewZeros";
    case Errc::UnsupportedFamily: return "UnsupportedFamily";
    }
    return "Unknown";
}

Failure::Failure(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code)
{
}

void fail(Errc code, const std::string& detail) { throw Failure(code, detail); }

}  // namespace cwkb
