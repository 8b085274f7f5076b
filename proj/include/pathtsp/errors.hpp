#pragma once

#include <stdexcept>
#include <string>

namespace pathtsp {

/// Base class for all errors raised by the toolkit.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input (JSON, TSPLIB, rational literals, CLI values).
struct ParseError : Error {
    using Error::Error;
};

/// Input costs violate a metric requirement; message names the witness.
struct MetricError : Error {
    using Error::Error;
};

/// A configured cap was exceeded (LP denominator, matching size, ...).
struct LimitError : Error {
    using Error::Error;
};

/// A provable invariant failed at runtime. Every inequality asserted by the
/// certification ledger is a theorem, so this always indicates a bug; the
/// message carries the full context of the failing check.
struct InternalError : Error {
    using Error::Error;
};

}  // namespace pathtsp
