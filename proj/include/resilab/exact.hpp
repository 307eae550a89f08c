#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "bigint.hpp"
#include "check.hpp"
#include "trajectory.hpp"

namespace resilab {

/// Canonical exact residue 2^e / (3^o * n_odd). residue_of() always builds it
/// from the odd part of N, so Res(N) and Res(2^s*N) compare equal.
struct ResidueTriple {
    std::uint64_t e = 0;
    std::uint64_t o = 0;
    Int n_odd = 1;

    ResidueTriple() = default;
    ResidueTriple(std::uint64_t e_, std::uint64_t o_, Int n_odd_)
        : e(e_), o(o_), n_odd(std::move(n_odd_)) {
        if (n_odd < 1 || !is_odd(n_odd)) {
            throw std::invalid_argument("ResidueTriple requires odd positive n_odd, got " +
                                        n_odd.get_str(10));
        }
    }

    Rat value() const { return make_rat(pow2(e), pow3(o) * n_odd); }

    friend bool operator==(const ResidueTriple& a, const ResidueTriple& b) {
        return a.e == b.e && a.o == b.o && a.n_odd == b.n_odd;
    }
};

/// Sign of (2^e / (3^o * n_odd)) - x, by cross multiplication.
inline int residue_cmp_rat(const ResidueTriple& r, const Rat& x) {
    Int lhs = x.get_den();
    mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), r.e);
    const Int rhs = x.get_num() * pow3(r.o) * r.n_odd;
    return cmp(lhs, rhs);
}

/// Exact ordering by value via cross multiplication:
/// 2^{a.e} * 3^{b.o} * b.n_odd  vs  2^{b.e} * 3^{a.o} * a.n_odd.
inline std::strong_ordering residue_compare(const ResidueTriple& a, const ResidueTriple& b) {
    Int lhs = pow3(b.o) * b.n_odd;
    mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), a.e);
    Int rhs = pow3(a.o) * a.n_odd;
    mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), b.e);
    const int c = cmp(lhs, rhs);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

/// Res(n) as a canonical triple: (E(n_odd), O(n_odd), n_odd).
inline ResidueTriple residue_of(const Int& n, std::uint64_t step_budget = kDefaultStepBudget) {
    const OddPart p = odd_part(n);
    const StepCounts c = trajectory_stats(p.odd, step_budget);
    return ResidueTriple(c.even, c.odd, p.odd);
}

/// Exact truncated decimal expansion of the residue: 2^e * 10^digits div
/// (3^o * n_odd), truncation (floor), never rounding.
inline std::string residue_decimal(const ResidueTriple& r, std::size_t digits) {
    Int num = pow2(r.e) * pow10(digits);
    Int den = pow3(r.o) * r.n_odd;
    mpz_tdiv_q(num.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    std::string s = to_decimal(num);
    if (s.size() <= digits) s.insert(0, std::string(digits + 1 - s.size(), '0'));
    s.insert(s.size() - digits, ".");
    return s;
}

/// Res(n_odd) in product form: the exact product of (1 + 1/(3*N_j)) over the
/// odd branch, reduced. Empty product (= 1) for n_odd = 1.
inline Rat residue_product(const Int& n_odd, std::uint64_t step_budget = kDefaultStepBudget) {
    if (n_odd < 1 || !is_odd(n_odd)) {
        throw std::invalid_argument("residue_product requires odd n >= 1");
    }
    Rat product = 1;
    detail::walk_odd(n_odd, n_odd, 0, step_budget, [&product](const Int& v, std::uint64_t) {
        Int three_v = 3 * v;
        product *= make_rat(three_v + 1, three_v);
    });
    return product;
}

/// Res(n) >= 1, as integers: 3^O * n_odd <= 2^E. Equality holds exactly when
/// n is a power of 2.
inline CheckOutcome check_lower(const Int& n, std::uint64_t step_budget = kDefaultStepBudget) {
    const ResidueTriple r = residue_of(n, step_budget);
    const int c = cmp(pow3(r.o) * r.n_odd, pow2(r.e));
    CheckOutcome out;
    out.check = "lower";
    out.subject = to_decimal(n);
    out.equality = (c == 0);
    out.verdict = (c <= 0) ? Verdict::Pass : Verdict::Fail;
    out.detail = "E=" + std::to_string(r.e) + " O=" + std::to_string(r.o) +
                 " n_odd=" + to_decimal(r.n_odd) +
                 (c < 0 ? "; 3^O*n_odd < 2^E (strict)"
                        : c == 0 ? "; 3^O*n_odd = 2^E (equality)"
                                 : "; 3^O*n_odd > 2^E (VIOLATION)");
    return out;
}

/// Weak residue conjecture instance: Res(n) <= 2, as integers
/// 2^E <= 2 * 3^O * n_odd.
inline CheckOutcome check_wrc(const Int& n, std::uint64_t step_budget = kDefaultStepBudget) {
    const ResidueTriple r = residue_of(n, step_budget);
    Int bound = pow3(r.o) * r.n_odd;
    mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), 1);
    const int c = cmp(pow2(r.e), bound);
    CheckOutcome out;
    out.check = "wrc";
    out.subject = to_decimal(n);
    out.equality = (c == 0);
    out.verdict = (c <= 0) ? Verdict::Pass : Verdict::Fail;
    out.detail = "E=" + std::to_string(r.e) + " O=" + std::to_string(r.o) +
                 " n_odd=" + to_decimal(r.n_odd) +
                 (c <= 0 ? "; 2^E <= 2*3^O*n_odd" : "; 2^E > 2*3^O*n_odd (VIOLATION)");
    return out;
}

namespace detail {

// Largest k >= 0 with base^k * den <= num, plus whether the bound is exact.
// Binary search on k with exact power comparisons; initial bracket from bit
// lengths (base^k >= 2^k, so k never exceeds bit_length(num)-bit_length(den)+1).
struct LogRatio {
    std::uint64_t k = 0;
    bool exact = false;  // base^k * den == num
};

inline LogRatio log_ratio_floor(unsigned long base, const Int& num, const Int& den) {
    if (base < 2) throw std::invalid_argument("log ratio base must be >= 2");
    if (den < 1) throw std::invalid_argument("log ratio denominator must be >= 1");
    if (num < den) throw std::invalid_argument("log ratio requires num >= den");

    const auto fits = [&](std::uint64_t k) {
        Int p;
        mpz_ui_pow_ui(p.get_mpz_t(), base, k);
        p *= den;
        return cmp(p, num);  // <0 / 0 / >0 against num
    };

    // true k satisfies 2^k <= base^k <= num/den < 2^{delta+1}
    const std::size_t delta = bit_length(num) - bit_length(den);
    std::uint64_t lo = 0;                       // fits(lo) <= 0 (num >= den)
    std::uint64_t hi = static_cast<std::uint64_t>(delta) + 2;  // fits(hi) > 0
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (fits(mid) <= 0) lo = mid; else hi = mid;
    }
    LogRatio r;
    r.k = lo;
    r.exact = (fits(lo) == 0);
    return r;
}

}  // namespace detail

/// floor(log_base(num/den)) for num/den >= 1: the largest k with
/// base^k * den <= num.
inline std::uint64_t floor_log_ratio(unsigned long base, const Int& num, const Int& den) {
    return detail::log_ratio_floor(base, num, den).k;
}

/// ceil(log_base(num/den)) for num/den >= 1: the smallest k with
/// base^k * den >= num.
inline std::uint64_t ceil_log_ratio(unsigned long base, const Int& num, const Int& den) {
    const detail::LogRatio r = detail::log_ratio_floor(base, num, den);
    return r.exact ? r.k : r.k + 1;
}

/// Outcome of evaluating the six step-count formulas for one N.
/// Index order: O from D, E from D, D from O, E from O, D from E, O from E.
struct FormulaCheck {
    Int n;
    StepCounts counts;
    std::array<std::uint64_t, 6> predicted{};
    std::array<bool, 6> matches{};

    bool all_match() const {
        for (bool m : matches) {
            if (!m) return false;
        }
        return true;
    }
};

inline constexpr std::array<const char*, 6> kFormulaNames = {
    "O from D", "E from D", "D from O", "E from O", "D from E", "O from E",
};

/// Evaluates all six floor/ceiling step-count formulas exactly and compares
/// each prediction against the true count:
///   O = floor(log6(2^D / N))      E = ceil(log6(3^D * N))
///   D = ceil(log2(6^O * N))       E = ceil(log2(3^O * N))
///   D = floor(log3(6^E / N))      O = floor(log3(2^E / N))
inline FormulaCheck predict_all(const Int& n, const StepCounts& counts) {
    if (n < 1) throw std::invalid_argument("predict_all requires n >= 1");
    if (!counts.consistent()) {
        throw std::invalid_argument("inconsistent step counts: total != odd + even");
    }
    const Int one = 1;
    FormulaCheck f;
    f.n = n;
    f.counts = counts;
    f.predicted[0] = floor_log_ratio(6, pow2(counts.total), n);
    f.predicted[1] = ceil_log_ratio(6, pow3(counts.total) * n, one);
    f.predicted[2] = ceil_log_ratio(2, int_pow(6, counts.odd) * n, one);
    f.predicted[3] = ceil_log_ratio(2, pow3(counts.odd) * n, one);
    f.predicted[4] = floor_log_ratio(3, int_pow(6, counts.even), n);
    f.predicted[5] = floor_log_ratio(3, pow2(counts.even), n);

    const std::array<std::uint64_t, 6> truth = {counts.odd,  counts.even, counts.total,
                                                counts.even, counts.total, counts.odd};
    for (std::size_t i = 0; i < 6; ++i) f.matches[i] = (f.predicted[i] == truth[i]);
    return f;
}

/// Res(n) < O(n)^{1/9} for O(n) >= 20, compared at the ninth power as
/// integers: 2^{9E} < O * 3^{9O} * n_odd^9. Not applicable below O = 20.
/// (Even n reduce to their odd part; both sides scale by 2^{9s}.)
inline CheckOutcome check_theorem2(const Int& n, std::uint64_t step_budget = kDefaultStepBudget) {
    const ResidueTriple r = residue_of(n, step_budget);
    CheckOutcome out;
    out.check = "theorem2";
    out.subject = to_decimal(n);
    if (r.o < 20) {
        out.verdict = Verdict::NotApplicable;
        out.detail = "O=" + std::to_string(r.o) + " < 20";
        return out;
    }
    Int rhs;
    mpz_pow_ui(rhs.get_mpz_t(), r.n_odd.get_mpz_t(), 9);
    rhs *= pow3(9 * r.o);
    mpz_mul_ui(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<unsigned long>(r.o));
    const int c = cmp(pow2(9 * r.e), rhs);
    out.verdict = (c < 0) ? Verdict::Pass : Verdict::Fail;
    out.detail = "E=" + std::to_string(r.e) + " O=" + std::to_string(r.o) +
                 " n_odd=" + to_decimal(r.n_odd) +
                 (c < 0 ? "; 2^9E < O*3^9O*n_odd^9" : "; 2^9E >= O*3^9O*n_odd^9 (VIOLATION)");
    return out;
}

}  // namespace resilab
