#pragma once

#include <stdexcept>
#include <string>

namespace coolseq {

/// A physical or numerical parameter is outside its allowed range.
struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Requested an interval (or dominant index) on an exactly-ground state.
struct DegenerateStateError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A conditional measurement postselected on an outcome of (numerically)
/// zero probability; the conditioned state is undefined.
struct MeasurementAnnihilationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The Fock cutoff required by the tail tolerance exceeds the configured cap.
struct CutoffCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace coolseq
