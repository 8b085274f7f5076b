#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pathtsp {

// Exact arithmetic everywhere: every quantity the ledger compares is an
// mpq_class kept in canonical form (reduced, positive denominator).
using Int = mpz_class;
using Rat = mpq_class;

/// num/den as a canonical rational. den must be nonzero.
Rat rat(long num, long den = 1);

/// Parses "p", "-p", or "p/q". Throws ParseError on anything else.
Rat rat_from_string(const std::string& text);

/// Renders as "p" or "p/q" with positive q; inverse of rat_from_string.
std::string rat_to_string(const Rat& value);

/// Least common multiple of all denominators (1 for an empty list).
Int lcm_denominator(const std::vector<Rat>& values);

/// value * scale, which must be integral; throws InternalError otherwise.
Int scale_to_int(const Rat& value, const Int& scale);

std::optional<int64_t> to_int64(const Int& value);

}  // namespace pathtsp
