#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bitraj {

enum class Errc {
    NonHermitian,
    NotAProjector,
    NonOrthogonal,
    IncompletePVM,
    BadTrace,
    NotPositive,
    DimensionMismatch,
    BadSchedule,
    BadGrid,
    EmptyGroup,
    UncoveredOutcome,
    UnknownOutcome,
    OutOfHorizon,
    NonSquare,
    LengthMismatch,
    EnumerationTooLarge,
    BadPosition,
    DomainMismatch,
    NotNested,
    OverlappingEvents,
    TooCoarse,
    SlotOutcomeMismatch,
    IndexOutOfRange,
    DimensionTooLarge,
    NormalizationError,
    ParseError,
    InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// One violated invariant found while validating a scenario.
struct Violation {
    Errc kind;
    std::string field;
    double deviation = 0.0;
    double tolerance = 0.0;
};

// Thrown by validation when at least one invariant fails; carries every
// violation, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const noexcept { return violations_; }
    bool has(Errc kind) const noexcept;

private:
    std::vector<Violation> violations_;
};

} // namespace bitraj
