#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace stnets {

// All scalar arithmetic in this library is exact. GMP rationals keep order
// comparisons decidable regardless of how values were produced.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Rational rat_u64(std::uint64_t num, std::uint64_t den) {
    Rational q;
    mpz_class n, d;
    mpz_import(n.get_mpz_t(), 1, 1, sizeof(num), 0, 0, &num);
    mpz_import(d.get_mpz_t(), 1, 1, sizeof(den), 0, 0, &den);
    q = Rational(n) / Rational(d);
    return q;
}

/// Prints `p/q`, or just `p` for integers.
std::string to_string(const Rational& q);

/// Parses `p`, `-p`, `p/q` with optional sign. Throws Error{ParseError}.
Rational parse_rational(const std::string& text);

} // namespace stnets
