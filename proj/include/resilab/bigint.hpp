#pragma once

#include <gmp.h>
#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace resilab {

// Arbitrary-precision integer / rational. mpq_class values produced by the
// helpers below are always canonical (lowest terms, positive denominator).
using Int = mpz_class;
using Rat = mpq_class;

inline Int pow2(std::uint64_t e) {
    Int r = 1;
    mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), e);
    return r;
}

inline Int pow3(std::uint64_t e) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), 3, e);
    return r;
}

inline Int int_pow(unsigned long base, std::uint64_t e) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), base, e);
    return r;
}

inline Int pow10(std::uint64_t e) { return int_pow(10, e); }

/// Number of bits in |n|; 0 for n = 0.
inline std::size_t bit_length(const Int& n) {
    if (n == 0) return 0;
    return mpz_sizeinbase(n.get_mpz_t(), 2);
}

inline bool is_odd(const Int& n) { return mpz_odd_p(n.get_mpz_t()) != 0; }

inline std::string to_decimal(const Int& n) { return n.get_str(10); }

/// Strict decimal parse: digits only, nonempty, no sign, no whitespace.
inline Int parse_decimal(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty decimal string");
    for (char c : s) {
        if (c < '0' || c > '9') {
            throw std::invalid_argument("not a decimal string: '" + std::string(s) + "'");
        }
    }
    return Int(std::string(s), 10);
}

/// num/den reduced to lowest terms with positive denominator.
inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

/// Truncated (floor) decimal expansion of a nonnegative rational with exactly
/// `digits` digits after the point. Never rounds.
inline std::string truncated_decimal(const Rat& value, std::size_t digits) {
    if (digits < 1) throw std::invalid_argument("digits must be >= 1");
    if (value < 0) throw std::invalid_argument("negative value");
    Int scaled = value.get_num() * pow10(digits);
    mpz_tdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), value.get_den().get_mpz_t());
    std::string s = to_decimal(scaled);
    if (s.size() <= digits) s.insert(0, std::string(digits + 1 - s.size(), '0'));
    s.insert(s.size() - digits, ".");
    return s;
}

}  // namespace resilab
