#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <resilab/analysis.hpp>

#include "oracles.hpp"

using resilab::Int;
using resilab::PrecisionConfig;
using resilab::Rat;
using resilab::Verdict;

TEST_CASE("harmonic_exact") {
    CHECK(resilab::harmonic_exact(1) == 1);
    CHECK(resilab::harmonic_exact(2) == resilab::make_rat(3, 2));
    CHECK(resilab::harmonic_exact(4) == resilab::make_rat(25, 12));

    Rat prev = resilab::harmonic_exact(1);
    for (std::uint64_t n = 2; n <= 300; ++n) {
        const Rat h = resilab::harmonic_exact(n);
        CHECK(h - prev == resilab::make_rat(1, Int(n)));
        prev = h;
    }

    PrecisionConfig tight;
    tight.harmonic_cap = 10;
    CHECK_THROWS_AS(resilab::harmonic_exact(11, tight), std::invalid_argument);
    CHECK_THROWS_AS(resilab::harmonic_exact(0), std::invalid_argument);
}

TEST_CASE("euler gamma enclosure matches the library computation") {
    const auto g = resilab::euler_gamma(resilab::bits_for_digits(50));
    // Glossary-level prefix.
    CHECK(g.certainly_greater_rat(resilab::make_rat(5772156649, 10000000000)));
    CHECK(g.certainly_less_rat(resilab::make_rat(5772156650, 10000000000)));
}

TEST_CASE("lemma4_check") {
    CHECK(resilab::lemma4_check(1).verdict == Verdict::Pass);
    CHECK(resilab::lemma4_check(100).verdict == Verdict::Pass);
    CHECK(resilab::lemma4_check(10000).verdict == Verdict::Pass);

    // Range helper agrees with the one-shot form.
    const auto outs = resilab::lemma4_range(1, 50);
    REQUIRE(outs.size() == 50);
    for (std::uint64_t n = 1; n <= 50; ++n) {
        CHECK(outs[n - 1].verdict == resilab::lemma4_check(n).verdict);
        CHECK(outs[n - 1].subject == std::to_string(n));
    }
}

TEST_CASE("lemma4 margin monotonicity and precision stability") {
    PrecisionConfig generous;  // defaults: 50 digits, margin 1e-20
    PrecisionConfig absurd = generous;
    absurd.margin = resilab::make_rat(1, 2);  // a gap of 1/2 is too much to ask
    PrecisionConfig doubled = generous;
    doubled.working_digits = 100;

    for (const std::uint64_t n : {1ULL, 7ULL, 64ULL, 1000ULL}) {
        const auto base = resilab::lemma4_check(n, generous);
        CHECK(base.verdict == Verdict::Pass);
        // Growing the margin can only downgrade pass -> inconclusive, never to fail.
        const auto wide = resilab::lemma4_check(n, absurd);
        CHECK(wide.verdict != Verdict::Fail);
        // Doubling the working precision never flips a pass.
        CHECK(resilab::lemma4_check(n, doubled).verdict == Verdict::Pass);
    }
}

TEST_CASE("precision stability of the remaining transcendental checks") {
    PrecisionConfig doubled;
    doubled.working_digits = 100;
    CHECK(resilab::lemma5_check(1, doubled).verdict == Verdict::Pass);
    CHECK(resilab::lemma5_check(500, doubled).verdict == Verdict::Pass);
    CHECK(resilab::theorem2_constant_check(doubled).verdict == Verdict::Pass);
    CHECK(resilab::corollary_bound_check(doubled).verdict == Verdict::Pass);
    CHECK(resilab::theorem2_numeric_claim_transcendental(20, doubled).verdict == Verdict::Pass);

    PrecisionConfig minimum;
    minimum.working_digits = 30;
    CHECK(resilab::theorem2_constant_check(minimum).verdict == Verdict::Pass);
    PrecisionConfig too_low;
    too_low.working_digits = 29;
    CHECK_THROWS_AS(resilab::theorem2_constant_check(too_low), std::invalid_argument);
}

TEST_CASE("eligible_sequence") {
    CHECK(resilab::eligible_sequence(2) == std::vector<std::uint64_t>{5, 7});
    CHECK(resilab::eligible_sequence(6) == std::vector<std::uint64_t>{5, 7, 11, 13, 17, 19});
    CHECK(resilab::eligible_sequence(1) == std::vector<std::uint64_t>{5});

    const auto seq = resilab::eligible_sequence(400);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(seq[i] % 2 == 1);
        CHECK(seq[i] >= 5);
        CHECK(seq[i] % 3 != 0);
        if (i > 0) CHECK(seq[i] > seq[i - 1]);
    }
    // The 2m-th element is 6m+1.
    for (std::uint64_t m = 1; m <= 200; ++m) CHECK(seq[2 * m - 1] == 6 * m + 1);
}

TEST_CASE("eligible_reciprocal_sum") {
    CHECK(resilab::eligible_reciprocal_sum(1) == resilab::make_rat(1, 5));
    CHECK(resilab::eligible_reciprocal_sum(2) == resilab::make_rat(12, 35));

    // First 19 terms plus 1/3 truncates to 1.3046.
    const Rat s = resilab::eligible_reciprocal_sum(19) + resilab::make_rat(1, 3);
    CHECK(resilab::truncated_decimal(s, 4) == "1.3046");
}

TEST_CASE("lemma5_check") {
    const auto m1 = resilab::lemma5_check(1);
    CHECK(m1.verdict == Verdict::Pass);
    // LHS is 12/35 = 0.342857...; RHS evaluates near 1.0371.
    CHECK(resilab::eligible_reciprocal_sum(2) == resilab::make_rat(12, 35));

    CHECK(resilab::lemma5_check(10).verdict == Verdict::Pass);
    CHECK(resilab::lemma5_check(100).verdict == Verdict::Pass);

    const auto outs = resilab::lemma5_range(1, 40);
    REQUIRE(outs.size() == 40);
    for (std::uint64_t m = 1; m <= 40; ++m) {
        CHECK(outs[m - 1].verdict == Verdict::Pass);
        CHECK(outs[m - 1].verdict == resilab::lemma5_check(m).verdict);
    }
}

TEST_CASE("eligible_product") {
    CHECK(resilab::eligible_product(1) == resilab::make_rat(16, 15));
    CHECK(resilab::eligible_product(2) == resilab::make_rat(352, 315));

    Rat expected = 1;
    for (const std::uint64_t j : {5, 7, 11, 13, 17}) {
        expected *= resilab::make_rat(3 * j + 1, 3 * j);
    }
    CHECK(resilab::eligible_product(5) == expected);
}

TEST_CASE("theorem2_numeric_claim") {
    CHECK(resilab::theorem2_numeric_claim(20).verdict == Verdict::Pass);
    CHECK(resilab::theorem2_numeric_claim(512).verdict == Verdict::Pass);
    CHECK(resilab::theorem2_numeric_claim(1252).verdict == Verdict::Pass);
    CHECK_THROWS_AS(resilab::theorem2_numeric_claim(19), std::invalid_argument);
    CHECK_THROWS_AS(resilab::theorem2_numeric_claim(1253), std::invalid_argument);

    // Exact and transcendental forms agree on a sample.
    for (const std::uint64_t t : {20, 21, 100, 700, 1252}) {
        const auto exact = resilab::theorem2_numeric_claim(t);
        const auto cross = resilab::theorem2_numeric_claim_transcendental(t);
        CHECK(exact.verdict == Verdict::Pass);
        CHECK(cross.verdict == Verdict::Pass);
    }

    const auto outs = resilab::theorem2_claim_range(20, 60);
    REQUIRE(outs.size() == 41);
    for (const auto& o : outs) CHECK(o.verdict == Verdict::Pass);
}

TEST_CASE("theorem2_constant_check") {
    const auto out = resilab::theorem2_constant_check();
    CHECK(out.verdict == Verdict::Pass);
    CHECK(out.detail.find("0.999467") != std::string::npos);
}

TEST_CASE("corollary_bound_check") {
    const auto out = resilab::corollary_bound_check();
    CHECK(out.verdict == Verdict::Pass);
    CHECK(out.detail.find("1.3046") != std::string::npos);
}
