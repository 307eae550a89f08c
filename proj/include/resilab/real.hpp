#pragma once

#include <gmp.h>
#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "bigint.hpp"

namespace resilab {

/// Working precision in bits for a decimal-digit request, with guard bits.
inline mpfr_prec_t bits_for_digits(unsigned digits) {
    return static_cast<mpfr_prec_t>((static_cast<std::uint64_t>(digits) * 3322 + 999) / 1000 + 32);
}

/// Certified enclosure [lo, hi] of a real value, maintained with MPFR
/// directed rounding. Every operation widens the enclosure outward, so a
/// strict comparison against the bounds is a proof at the working precision.
class Interval {
public:
    explicit Interval(mpfr_prec_t bits) {
        mpfr_init2(lo_, bits);
        mpfr_init2(hi_, bits);
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
    }

    Interval(const Interval& other) {
        mpfr_init2(lo_, mpfr_get_prec(other.lo_));
        mpfr_init2(hi_, mpfr_get_prec(other.hi_));
        mpfr_set(lo_, other.lo_, MPFR_RNDD);
        mpfr_set(hi_, other.hi_, MPFR_RNDU);
    }

    Interval(Interval&& other) noexcept {
        mpfr_init2(lo_, mpfr_get_prec(other.lo_));
        mpfr_init2(hi_, mpfr_get_prec(other.hi_));
        mpfr_swap(lo_, other.lo_);
        mpfr_swap(hi_, other.hi_);
    }

    Interval& operator=(Interval other) noexcept {
        mpfr_swap(lo_, other.lo_);
        mpfr_swap(hi_, other.hi_);
        return *this;
    }

    ~Interval() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }

    static Interval from_rat(const Rat& x, mpfr_prec_t bits) {
        Interval r(bits);
        mpfr_set_q(r.lo_, x.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_, x.get_mpq_t(), MPFR_RNDU);
        return r;
    }

    /// Enclosure of an unknown value inside [lo_rat, hi_rat].
    static Interval from_rat_bounds(const Rat& lo_rat, const Rat& hi_rat, mpfr_prec_t bits) {
        if (lo_rat > hi_rat) throw std::invalid_argument("inverted interval bounds");
        Interval r(bits);
        mpfr_set_q(r.lo_, lo_rat.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_, hi_rat.get_mpq_t(), MPFR_RNDU);
        return r;
    }

    static Interval from_ui(unsigned long x, mpfr_prec_t bits) {
        Interval r(bits);
        mpfr_set_ui(r.lo_, x, MPFR_RNDD);
        mpfr_set_ui(r.hi_, x, MPFR_RNDU);
        return r;
    }

    /// x^{1/k} for x >= 0.
    static Interval root_ui(unsigned long x, unsigned long k, mpfr_prec_t bits) {
        Interval r(bits);
        mpfr_set_ui(r.lo_, x, MPFR_RNDD);
        mpfr_set_ui(r.hi_, x, MPFR_RNDU);
        mpfr_rootn_ui(r.lo_, r.lo_, k, MPFR_RNDD);
        mpfr_rootn_ui(r.hi_, r.hi_, k, MPFR_RNDU);
        return r;
    }

    Interval log() const {
        if (mpfr_sgn(lo_) <= 0) throw std::domain_error("Interval::log requires a positive value");
        Interval r(prec());
        mpfr_log(r.lo_, lo_, MPFR_RNDD);
        mpfr_log(r.hi_, hi_, MPFR_RNDU);
        return r;
    }

    Interval exp() const {
        Interval r(prec());
        mpfr_exp(r.lo_, lo_, MPFR_RNDD);
        mpfr_exp(r.hi_, hi_, MPFR_RNDU);
        return r;
    }

    Interval operator+(const Interval& o) const {
        Interval r(prec());
        mpfr_add(r.lo_, lo_, o.lo_, MPFR_RNDD);
        mpfr_add(r.hi_, hi_, o.hi_, MPFR_RNDU);
        return r;
    }

    Interval operator-(const Interval& o) const {
        Interval r(prec());
        mpfr_sub(r.lo_, lo_, o.hi_, MPFR_RNDD);
        mpfr_sub(r.hi_, hi_, o.lo_, MPFR_RNDU);
        return r;
    }

    /// Product, both operands known nonnegative.
    Interval mul_positive(const Interval& o) const {
        if (mpfr_sgn(lo_) < 0 || mpfr_sgn(o.lo_) < 0) {
            throw std::domain_error("Interval::mul_positive requires nonnegative operands");
        }
        Interval r(prec());
        mpfr_mul(r.lo_, lo_, o.lo_, MPFR_RNDD);
        mpfr_mul(r.hi_, hi_, o.hi_, MPFR_RNDU);
        return r;
    }

    /// Scale by the positive rational num/den (value of any sign).
    Interval scaled(unsigned long num, unsigned long den) const {
        if (num == 0 || den == 0) throw std::invalid_argument("Interval::scaled requires positive scale");
        Interval r(*this);
        mpfr_mul_ui(r.lo_, r.lo_, num, MPFR_RNDD);
        mpfr_div_ui(r.lo_, r.lo_, den, MPFR_RNDD);
        mpfr_mul_ui(r.hi_, r.hi_, num, MPFR_RNDU);
        mpfr_div_ui(r.hi_, r.hi_, den, MPFR_RNDU);
        return r;
    }

    Interval add_rat(const Rat& q) const {
        Interval r(prec());
        mpfr_add_q(r.lo_, lo_, q.get_mpq_t(), MPFR_RNDD);
        mpfr_add_q(r.hi_, hi_, q.get_mpq_t(), MPFR_RNDU);
        return r;
    }

    bool certainly_less_rat(const Rat& q) const { return mpfr_cmp_q(hi_, q.get_mpq_t()) < 0; }
    bool certainly_greater_rat(const Rat& q) const { return mpfr_cmp_q(lo_, q.get_mpq_t()) > 0; }
    bool certainly_ge_rat(const Rat& q) const { return mpfr_cmp_q(lo_, q.get_mpq_t()) >= 0; }
    bool certainly_le_rat(const Rat& q) const { return mpfr_cmp_q(hi_, q.get_mpq_t()) <= 0; }
    bool certainly_less(const Interval& o) const { return mpfr_cmp(hi_, o.lo_) < 0; }

    bool contains_rat(const Rat& q) const {
        return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
    }

    mpfr_prec_t prec() const { return mpfr_get_prec(lo_); }
    const mpfr_t& lo() const { return lo_; }
    const mpfr_t& hi() const { return hi_; }

    /// Display only: the lower bound rounded to `digits` decimals.
    std::string to_string(unsigned digits = 15) const {
        char buf[512];
        mpfr_snprintf(buf, sizeof(buf), "%.*RNf", static_cast<int>(digits), lo_);
        return std::string(buf);
    }

private:
    mpfr_t lo_, hi_;
};

/// Euler's constant as a certified interval. The stored 50-digit literal is
/// validated once against MPFR's independently computed value; the enclosure
/// is [literal, literal + 10^-50].
inline Interval euler_gamma(mpfr_prec_t bits) {
    static const char* kGammaDigits50 =
        "57721566490153286060651209008240243104215933593992";
    static const Rat lo_rat = make_rat(parse_decimal(kGammaDigits50), pow10(50));
    static const Rat hi_rat = lo_rat + make_rat(1, pow10(50));

    static const bool validated = [] {
        mpfr_t g_lo, g_hi;
        mpfr_init2(g_lo, 240);
        mpfr_init2(g_hi, 240);
        mpfr_const_euler(g_lo, MPFR_RNDD);
        mpfr_const_euler(g_hi, MPFR_RNDU);
        const bool ok = mpfr_cmp_q(g_lo, lo_rat.get_mpq_t()) > 0 &&
                        mpfr_cmp_q(g_hi, hi_rat.get_mpq_t()) < 0;
        mpfr_clear(g_lo);
        mpfr_clear(g_hi);
        if (!ok) throw std::logic_error("stored Euler constant failed validation");
        return true;
    }();
    (void)validated;

    return Interval::from_rat_bounds(lo_rat, hi_rat, bits);
}

}  // namespace resilab
