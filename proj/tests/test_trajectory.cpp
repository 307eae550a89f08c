#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include <resilab/trajectory.hpp>

#include "oracles.hpp"

using resilab::Int;
using resilab::OddBranch;
using resilab::StepCounts;

TEST_CASE("collatz_step") {
    CHECK(resilab::collatz_step(7) == 22);
    CHECK(resilab::collatz_step(22) == 11);
    CHECK(resilab::collatz_step(1) == 4);
    CHECK_THROWS_AS(resilab::collatz_step(0), std::invalid_argument);
}

TEST_CASE("trajectory of 7 step by step") {
    const std::vector<long> expected = {7,  22, 11, 34, 17, 52, 26, 13, 40,
                                        20, 10, 5,  16, 8,  4,  2,  1};
    Int n = 7;
    std::vector<long> seen = {7};
    while (n != 1) {
        n = resilab::collatz_step(n);
        seen.push_back(n.get_si());
    }
    CHECK(seen == expected);
}

TEST_CASE("odd_part") {
    CHECK(resilab::odd_part(12) == resilab::OddPart{2, 3});
    CHECK(resilab::odd_part(7) == resilab::OddPart{0, 7});
    CHECK(resilab::odd_part(1024) == resilab::OddPart{10, 1});
    CHECK_THROWS_AS(resilab::odd_part(0), std::invalid_argument);
}

TEST_CASE("trajectory_stats known values") {
    CHECK(resilab::trajectory_stats(7) == StepCounts{16, 5, 11});
    CHECK(resilab::trajectory_stats(1024) == StepCounts{10, 0, 10});
    CHECK(resilab::trajectory_stats(1) == StepCounts{0, 0, 0});
    CHECK(resilab::trajectory_stats(3) == StepCounts{7, 2, 5});

    // O(27) = 41; D and E frozen from the one-step oracle.
    const StepCounts s27 = resilab::trajectory_stats(27);
    CHECK(s27 == StepCounts{111, 41, 70});
    CHECK(oracle::naive_stats(27) == s27);
}

TEST_CASE("odd multiples of 3 have the expected odd-step counts") {
    // The six case values for N in {3, 9, 15, 21, 27, 33}, by direct iteration.
    const std::pair<long, std::uint64_t> cases[] = {{3, 2},  {9, 6},  {15, 5},
                                                    {21, 1}, {27, 41}, {33, 8}};
    for (const auto& [n, odd_steps] : cases) {
        CHECK(resilab::trajectory_stats(n).odd == odd_steps);
        CHECK(oracle::naive_stats(n).odd == odd_steps);
    }
}

TEST_CASE("trajectory_stats step budget") {
    CHECK_NOTHROW(resilab::trajectory_stats(7, 16));
    CHECK_THROWS_AS(resilab::trajectory_stats(7, 15), resilab::BudgetExceeded);
    try {
        resilab::trajectory_stats(7, 15);
    } catch (const resilab::BudgetExceeded& e) {
        CHECK(e.seed == 7);
        CHECK(std::string(e.what()).find("7") != std::string::npos);
    }
    CHECK_NOTHROW(resilab::trajectory_stats(1024, 10));
    CHECK_THROWS_AS(resilab::trajectory_stats(1024, 9), resilab::BudgetExceeded);
}

TEST_CASE("odd_branch known values") {
    const OddBranch b7 = resilab::odd_branch(7);
    CHECK(b7.values == std::vector<Int>{7, 11, 17, 13, 5});
    CHECK(b7.divisions == std::vector<std::uint64_t>{1, 1, 2, 3, 4});

    CHECK(resilab::odd_branch(16).empty());
    CHECK(resilab::odd_branch(1).empty());

    const OddBranch b5 = resilab::odd_branch(5);
    CHECK(b5.values == std::vector<Int>{5});
    CHECK(b5.divisions == std::vector<std::uint64_t>{4});
}

namespace {

void check_branch_invariants(const Int& n) {
    const OddBranch b = resilab::odd_branch(n);
    const StepCounts c = resilab::trajectory_stats(n);
    const resilab::OddPart p = resilab::odd_part(n);

    REQUIRE(b.values.size() == b.divisions.size());
    CHECK(b.values.size() == c.odd);

    std::uint64_t division_sum = 0;
    for (std::size_t j = 0; j < b.values.size(); ++j) {
        CHECK(resilab::is_odd(b.values[j]));
        CHECK(b.values[j] >= 3);  // 1 never appears
        CHECK(b.divisions[j] >= 1);
        if (j >= 1) CHECK(b.values[j] % 3 != 0);  // N_j for j >= 2, 1-indexed
        division_sum += b.divisions[j];
    }
    CHECK(division_sum == c.even - p.twos);

    // Replay: N_{j+1} = (3 N_j + 1) / 2^{m_j}, and the last step lands on 1.
    for (std::size_t j = 0; j < b.values.size(); ++j) {
        const Int next = j + 1 < b.values.size() ? b.values[j + 1] : Int(1);
        CHECK(next * resilab::pow2(b.divisions[j]) == 3 * b.values[j] + 1);
    }

    // Against the one-step oracle.
    CHECK(b.values == oracle::naive_odd_values(p.odd));
    CHECK(b.divisions == oracle::naive_divisions(p.odd));
}

}  // namespace

TEST_CASE("odd_branch invariants over small range and random values") {
    for (long n = 1; n <= 2000; ++n) check_branch_invariants(n);

    std::mt19937_64 rng(20260808);
    for (int i = 0; i < 200; ++i) {
        check_branch_invariants(Int(static_cast<unsigned long>(rng() % (1ULL << 40)) + 1));
    }
}

TEST_CASE("stats invariants: D = O + E and the 2^s scaling identity") {
    std::mt19937_64 rng(42);
    for (long n = 1; n <= 5000; ++n) {
        const StepCounts c = resilab::trajectory_stats(n);
        CHECK(c.consistent());
    }
    for (int i = 0; i < 100; ++i) {
        const Int m = 2 * Int(static_cast<unsigned long>(rng() % 100000)) + 1;
        const std::uint64_t s = rng() % 30;
        const StepCounts base = resilab::trajectory_stats(m);
        const StepCounts scaled = resilab::trajectory_stats(m * resilab::pow2(s));
        CHECK(scaled.total == s + base.total);
        CHECK(scaled.odd == base.odd);
        CHECK(scaled.even == s + base.even);
    }
}

TEST_CASE("fast path equals one-step oracle on [1, 4000]") {
    for (long n = 1; n <= 4000; ++n) {
        CHECK(resilab::trajectory_stats(n) == oracle::naive_stats(n));
    }
}
