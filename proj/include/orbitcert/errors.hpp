#pragma once

#include <stdexcept>
#include <string>

namespace orbitcert {

// A computation was asked for outside its mathematical domain
// (division by an interval containing zero, sqrt of a negative
// enclosure, collision distance enclosing zero, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// The enclosure is too wide to decide the question either way.
// Callers typically subdivide or tighten and retry; this is never
// silently downgraded to a verdict.
struct IndeterminateError : std::runtime_error {
    explicit IndeterminateError(const std::string& what) : std::runtime_error(what) {}
};

// The rigorous integrator could not continue (step size underflow
// before the requested horizon).
struct BlowupError : std::runtime_error {
    explicit BlowupError(const std::string& what) : std::runtime_error(what) {}
};

// No section crossing was found before the integration budget ran out.
struct NoHitError : std::runtime_error {
    explicit NoHitError(const std::string& what) : std::runtime_error(what) {}
};

// Cover construction exhausted its subdivision budget; carries a
// human-readable list of the failing sub-intervals.
struct CoverError : std::runtime_error {
    explicit CoverError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed command line / config input.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace orbitcert
