#pragma once

// Numeric verification of the auxiliary bounds behind the residue analysis:
// harmonic-sum sandwiches, the restricted odd-reciprocal sums, the [20,1252]
// product claim and its limiting constant, and the resulting residue bound.
// Left-hand sides are exact rationals; right-hand sides are transcendental
// and evaluated as certified enclosures, so "pass" means the inequality holds
// with at least `margin` of room at the working precision, and a too-close
// call comes back inconclusive instead of guessing.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bigint.hpp"
#include "check.hpp"
#include "exact.hpp"
#include "real.hpp"

namespace resilab {

struct PrecisionConfig {
    unsigned working_digits = 50;
    Rat margin = make_rat(1, pow10(20));
    std::uint64_t harmonic_cap = 1'000'000;

    mpfr_prec_t bits() const {
        if (working_digits < 30) throw std::invalid_argument("working_digits must be >= 30");
        if (margin <= 0) throw std::invalid_argument("margin must be positive");
        return bits_for_digits(working_digits);
    }
};

/// Exact H_n = sum_{k=1..n} 1/k.
inline Rat harmonic_exact(std::uint64_t n, const PrecisionConfig& cfg = {}) {
    if (n < 1) throw std::invalid_argument("harmonic_exact requires n >= 1");
    if (n > cfg.harmonic_cap) throw std::invalid_argument("harmonic cap exceeded");
    Rat h = 0;
    for (std::uint64_t k = 1; k <= n; ++k) h += make_rat(1, Int(k));
    return h;
}

namespace detail {

// Verdict for the two-sided sandwich  ln n + gamma < H_n < ln n + gamma + 1/(2n).
inline CheckOutcome lemma4_verdict(std::uint64_t n, const Rat& harmonic,
                                   const PrecisionConfig& cfg) {
    const mpfr_prec_t bits = cfg.bits();
    const Interval lower = Interval::from_ui(n, bits).log() + euler_gamma(bits);
    const Interval upper = lower.add_rat(make_rat(1, Int(2) * Int(n)));

    CheckOutcome out;
    out.check = "lemma4";
    out.subject = std::to_string(n);
    out.detail = "H_n=" + truncated_decimal(harmonic, 12) + " ln(n)+g~" + lower.to_string(12);
    if (lower.certainly_ge_rat(harmonic) || upper.certainly_le_rat(harmonic)) {
        out.verdict = Verdict::Fail;
    } else if (lower.certainly_less_rat(harmonic - cfg.margin) &&
               upper.certainly_greater_rat(harmonic + cfg.margin)) {
        out.verdict = Verdict::Pass;
    } else {
        out.verdict = Verdict::Inconclusive;
    }
    return out;
}

// Verdict for a one-sided claim  lhs < rhs  with exact lhs.
inline CheckOutcome one_sided(const std::string& check, const std::string& subject,
                              const Rat& lhs, const Interval& rhs, const Rat& margin,
                              const std::string& detail) {
    CheckOutcome out;
    out.check = check;
    out.subject = subject;
    out.detail = detail;
    if (rhs.certainly_le_rat(lhs)) {
        out.verdict = Verdict::Fail;
    } else if (rhs.certainly_greater_rat(lhs + margin)) {
        out.verdict = Verdict::Pass;
    } else {
        out.verdict = Verdict::Inconclusive;
    }
    return out;
}

}  // namespace detail

/// ln n + gamma < H_n < ln n + gamma + 1/(2n), with margin.
inline CheckOutcome lemma4_check(std::uint64_t n, const PrecisionConfig& cfg = {}) {
    return detail::lemma4_verdict(n, harmonic_exact(n, cfg), cfg);
}

/// Same check over every n in [lo, hi], with the harmonic sum carried along
/// incrementally (one rational addition per n).
inline std::vector<CheckOutcome> lemma4_range(std::uint64_t lo, std::uint64_t hi,
                                              const PrecisionConfig& cfg = {}) {
    if (lo < 1 || lo > hi) throw std::invalid_argument("lemma4_range requires 1 <= lo <= hi");
    if (hi > cfg.harmonic_cap) throw std::invalid_argument("harmonic cap exceeded");
    std::vector<CheckOutcome> outs;
    outs.reserve(hi - lo + 1);
    Rat h = 0;
    for (std::uint64_t k = 1; k < lo; ++k) h += make_rat(1, Int(k));
    for (std::uint64_t n = lo; n <= hi; ++n) {
        h += make_rat(1, Int(n));
        outs.push_back(detail::lemma4_verdict(n, h, cfg));
    }
    return outs;
}

namespace detail {

// Ascending odd integers >= 5 not divisible by 3: 5, 7, 11, 13, 17, 19, ...
// The m-th pair is (6m-1, 6m+1), so the 2m-th element is 6m+1.
class EligibleIter {
public:
    std::uint64_t next() {
        const std::uint64_t v = value_;
        value_ += step_;
        step_ ^= 6;  // alternate +2 / +4
        return v;
    }

private:
    std::uint64_t value_ = 5;
    std::uint64_t step_ = 2;
};

}  // namespace detail

/// The first t odd integers >= 5 that are not divisible by 3.
inline std::vector<std::uint64_t> eligible_sequence(std::uint64_t t) {
    if (t < 1) throw std::invalid_argument("eligible_sequence requires t >= 1");
    std::vector<std::uint64_t> seq;
    seq.reserve(t);
    detail::EligibleIter it;
    for (std::uint64_t i = 0; i < t; ++i) seq.push_back(it.next());
    return seq;
}

/// Exact sum of 1/k over the first t eligible integers.
inline Rat eligible_reciprocal_sum(std::uint64_t t) {
    if (t < 1) throw std::invalid_argument("eligible_reciprocal_sum requires t >= 1");
    Rat s = 0;
    detail::EligibleIter it;
    for (std::uint64_t i = 0; i < t; ++i) s += make_rat(1, Int(it.next()));
    return s;
}

/// Exact product of (1 + 1/(3j)) over the first t eligible integers.
inline Rat eligible_product(std::uint64_t t) {
    if (t < 1) throw std::invalid_argument("eligible_product requires t >= 1");
    Rat p = 1;
    detail::EligibleIter it;
    for (std::uint64_t i = 0; i < t; ++i) {
        const Int three_j = Int(3) * Int(it.next());
        p *= make_rat(three_j + 1, three_j);
    }
    return p;
}

namespace detail {

// RHS of the restricted-sum bound:
//   ln(3^{1/2} 2^{2/3}) + gamma/3 - 1 + (1/3) ln m + 5/(6m).
inline Interval lemma5_rhs(std::uint64_t m, mpfr_prec_t bits) {
    Interval rhs = Interval::from_ui(3, bits).log().scaled(1, 2) +
                   Interval::from_ui(2, bits).log().scaled(2, 3) +
                   euler_gamma(bits).scaled(1, 3) +
                   Interval::from_ui(m, bits).log().scaled(1, 3);
    return rhs.add_rat(make_rat(5, Int(6) * Int(m)) - 1);
}

inline CheckOutcome lemma5_verdict(std::uint64_t m, const Rat& restricted_sum,
                                   const PrecisionConfig& cfg) {
    const Interval rhs = lemma5_rhs(m, cfg.bits());
    return one_sided("lemma5", std::to_string(m), restricted_sum, rhs, cfg.margin,
                     "sum(2m terms)=" + truncated_decimal(restricted_sum, 12) +
                         " rhs~" + rhs.to_string(12));
}

}  // namespace detail

/// Restricted sum bound: sum of 1/k over the first 2m eligible integers is
/// below ln(3^{1/2} 2^{2/3}) + gamma/3 - 1 + (1/3) ln m + 5/(6m).
inline CheckOutcome lemma5_check(std::uint64_t m, const PrecisionConfig& cfg = {}) {
    if (m < 1) throw std::invalid_argument("lemma5_check requires m >= 1");
    return detail::lemma5_verdict(m, eligible_reciprocal_sum(2 * m), cfg);
}

inline std::vector<CheckOutcome> lemma5_range(std::uint64_t lo, std::uint64_t hi,
                                              const PrecisionConfig& cfg = {}) {
    if (lo < 1 || lo > hi) throw std::invalid_argument("lemma5_range requires 1 <= lo <= hi");
    std::vector<CheckOutcome> outs;
    outs.reserve(hi - lo + 1);
    detail::EligibleIter it;
    Rat sum = 0;
    std::uint64_t terms = 0;
    for (std::uint64_t m = lo; m <= hi; ++m) {
        while (terms < 2 * m) {
            sum += make_rat(1, Int(it.next()));
            ++terms;
        }
        outs.push_back(detail::lemma5_verdict(m, sum, cfg));
    }
    return outs;
}

namespace detail {

// Exact ninth-power form of the product claim at t:
//   ((118/117) * prod_first_t (1 + 1/(3j)))^9 < t,
// with the product carried un-reduced as an integer pair.
inline CheckOutcome claim_verdict(std::uint64_t t, const Int& prod_num, const Int& prod_den) {
    Int lhs = prod_num * 118;
    mpz_pow_ui(lhs.get_mpz_t(), lhs.get_mpz_t(), 9);
    Int rhs = prod_den * 117;
    mpz_pow_ui(rhs.get_mpz_t(), rhs.get_mpz_t(), 9);
    rhs *= Int(t);
    const int c = cmp(lhs, rhs);
    CheckOutcome out;
    out.check = "theorem2_claim";
    out.subject = std::to_string(t);
    out.verdict = (c < 0) ? Verdict::Pass : Verdict::Fail;
    out.detail = c < 0 ? "((118/117)*product)^9 < t" : "((118/117)*product)^9 >= t (VIOLATION)";
    return out;
}

}  // namespace detail

/// The product claim for O(N) = t in [20, 1252], decided entirely in integer
/// arithmetic (the t = 20 case holds by a relative margin of only ~4e-5, so
/// the ninth powers are compared exactly).
inline CheckOutcome theorem2_numeric_claim(std::uint64_t t, const PrecisionConfig& = {}) {
    if (t < 20 || t > 1252) throw std::invalid_argument("theorem2_numeric_claim requires 20 <= t <= 1252");
    Int num = 1, den = 1;
    detail::EligibleIter it;
    for (std::uint64_t i = 0; i < t; ++i) {
        const unsigned long j = it.next();
        num *= 3 * j + 1;
        den *= 3 * j;
    }
    return detail::claim_verdict(t, num, den);
}

inline std::vector<CheckOutcome> theorem2_claim_range(std::uint64_t lo, std::uint64_t hi,
                                                      const PrecisionConfig& = {}) {
    if (lo < 20 || hi > 1252 || lo > hi) {
        throw std::invalid_argument("theorem2_claim_range requires 20 <= lo <= hi <= 1252");
    }
    std::vector<CheckOutcome> outs;
    outs.reserve(hi - lo + 1);
    Int num = 1, den = 1;
    detail::EligibleIter it;
    std::uint64_t terms = 0;
    for (std::uint64_t t = lo; t <= hi; ++t) {
        while (terms < t) {
            const unsigned long j = it.next();
            num *= 3 * j + 1;
            den *= 3 * j;
            ++terms;
        }
        outs.push_back(detail::claim_verdict(t, num, den));
    }
    return outs;
}

/// Transcendental cross-check of the same claim:
/// (118/117) * product + margin < t^{1/9} on certified enclosures.
inline CheckOutcome theorem2_numeric_claim_transcendental(std::uint64_t t,
                                                          const PrecisionConfig& cfg = {}) {
    if (t < 20 || t > 1252) throw std::invalid_argument("theorem2_numeric_claim requires 20 <= t <= 1252");
    const Rat lhs = make_rat(118, 117) * eligible_product(t);
    const Interval rhs = Interval::root_ui(t, 9, cfg.bits());
    return detail::one_sided("theorem2_claim_x", std::to_string(t), lhs, rhs, cfg.margin,
                             "lhs=" + truncated_decimal(lhs, 12) + " t^(1/9)~" + rhs.to_string(12));
}

/// The limiting constant 3^{1/6} 2^{1/9} e^{gamma/9 - 38/117} lies in
/// [0.999467, 0.999468), and stays below 0.99999981 / 0.99999964 after the
/// e^{5/(9*1043)} / e^{2/(3*1252)} tail factors.
inline CheckOutcome theorem2_constant_check(const PrecisionConfig& cfg = {}) {
    const mpfr_prec_t bits = cfg.bits();
    const Interval constant =
        Interval::root_ui(3, 6, bits)
            .mul_positive(Interval::root_ui(2, 9, bits))
            .mul_positive(euler_gamma(bits).scaled(1, 9).add_rat(-make_rat(38, 117)).exp());

    const Rat lo_band = make_rat(999467, 1000000);
    const Rat hi_band = make_rat(999468, 1000000);
    const Rat cap_even = make_rat(99999981, 100000000);
    const Rat cap_odd = make_rat(99999964, 100000000);

    const Interval even_tail =
        constant.mul_positive(Interval::from_rat(make_rat(5, Int(9) * Int(1043)), bits).exp());
    const Interval odd_tail =
        constant.mul_positive(Interval::from_rat(make_rat(2, Int(3) * Int(1252)), bits).exp());

    const bool band_pass = constant.certainly_ge_rat(lo_band) && constant.certainly_less_rat(hi_band);
    const bool band_fail = constant.certainly_less_rat(lo_band) || constant.certainly_ge_rat(hi_band);
    const bool even_pass = even_tail.certainly_greater_rat(lo_band) && even_tail.certainly_less_rat(cap_even);
    const bool even_fail = even_tail.certainly_le_rat(lo_band) || even_tail.certainly_ge_rat(cap_even);
    const bool odd_pass = odd_tail.certainly_greater_rat(lo_band) && odd_tail.certainly_less_rat(cap_odd);
    const bool odd_fail = odd_tail.certainly_le_rat(lo_band) || odd_tail.certainly_ge_rat(cap_odd);

    CheckOutcome out;
    out.check = "theorem2_constant";
    out.subject = "-";
    out.detail = "constant~" + constant.to_string(12) + " with_e5_9*1043~" + even_tail.to_string(12) +
                 " with_e2_3*1252~" + odd_tail.to_string(12);
    if (band_fail || even_fail || odd_fail) {
        out.verdict = Verdict::Fail;
    } else if (band_pass && even_pass && odd_pass) {
        out.verdict = Verdict::Pass;
    } else {
        out.verdict = Verdict::Inconclusive;
    }
    return out;
}

/// The residue bound chain behind "Res < 1.55 when O <= 19": the eligible
/// reciprocal sum over 19 terms plus 1/3 lands in [1.3046, 1.3047), then
/// e^{1.3047/3} < 1.55; plus spot instances of ln Res(N) < (1/3) sum 1/N_j.
inline CheckOutcome corollary_bound_check(const PrecisionConfig& cfg = {}) {
    const mpfr_prec_t bits = cfg.bits();
    const Rat sum_with_head = eligible_reciprocal_sum(19) + make_rat(1, 3);
    const bool sum_pass = sum_with_head >= make_rat(13046, 10000) &&
                          sum_with_head < make_rat(13047, 10000);

    const Interval exp_bound = Interval::from_rat(make_rat(13047, 30000), bits).exp();
    const Rat cap = make_rat(31, 20);
    const bool exp_pass = exp_bound.certainly_less_rat(cap - cfg.margin);
    const bool exp_fail = exp_bound.certainly_ge_rat(cap);

    // ln Res(N) < (1/3) sum 1/N_j on sampled odd branches.
    bool instances_pass = true;
    bool instances_fail = false;
    for (const long n : {7L, 27L, 993L, 3277L, 54321L}) {
        const OddBranch branch = odd_branch(Int(n));
        Rat recip = 0;
        for (const Int& v : branch.values) recip += make_rat(1, v);
        const Rat third = recip / 3;
        const Interval log_res = Interval::from_rat(residue_of(Int(n)).value(), bits).log();
        if (log_res.certainly_ge_rat(third)) instances_fail = true;
        if (!log_res.certainly_less_rat(third - cfg.margin)) instances_pass = false;
    }

    CheckOutcome out;
    out.check = "corollary1";
    out.subject = "-";
    out.detail = "sum19+1/3=" + truncated_decimal(sum_with_head, 8) +
                 " e^(1.3047/3)~" + exp_bound.to_string(10);
    if (!sum_pass || exp_fail || instances_fail) {
        out.verdict = Verdict::Fail;
    } else if (exp_pass && instances_pass) {
        out.verdict = Verdict::Pass;
    } else {
        out.verdict = Verdict::Inconclusive;
    }
    return out;
}

}  // namespace resilab
