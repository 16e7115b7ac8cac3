#include "bitraj/error.hpp"

#include <algorithm>
#include <sstream>

namespace bitraj {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::NonHermitian: return "NonHermitian";
    case Errc::NotAProjector: return "NotAProjector";
    case Errc::NonOrthogonal: return "NonOrthogonal";
    case Errc::IncompletePVM: return "IncompletePVM";
    case Errc::BadTrace: return "BadTrace";
    case Errc::NotPositive: return "NotPositive";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::BadSchedule: return "BadSchedule";
    case Errc::BadGrid: return "BadGrid";
    case Errc::EmptyGroup: return "EmptyGroup";
    case Errc::UncoveredOutcome: return "UncoveredOutcome";
    case Errc::UnknownOutcome: return "UnknownOutcome";
    case Errc::OutOfHorizon: return "OutOfHorizon";
    case Errc::NonSquare: return "NonSquare";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EnumerationTooLarge: return "EnumerationTooLarge";
    case Errc::BadPosition: return "BadPosition";
    case Errc::DomainMismatch: return "DomainMismatch";
    case Errc::NotNested: return "NotNested";
    case Errc::OverlappingEvents: return "OverlappingEvents";
    case Errc::TooCoarse: return "TooCoarse";
    case Errc::SlotOutcomeMismatch: return "SlotOutcomeMismatch";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::NormalizationError: return "NormalizationError";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {

std::string describe(const std::vector<Violation>& violations) {
    std::ostringstream os;
    os << violations.size() << " violation(s)";
    for (const auto& v : violations) {
        os << "; " << to_string(v.kind) << " in '" << v.field << "' (deviation " << v.deviation
           << " > tolerance " << v.tolerance << ")";
    }
    return os.str();
}

} // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(violations.empty() ? Errc::InvalidArgument : violations.front().kind, describe(violations)),
      violations_(std::move(violations)) {}

bool ValidationError::has(Errc kind) const noexcept {
    return std::any_of(violations_.begin(), violations_.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
}

} // namespace bitraj
