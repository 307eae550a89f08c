#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bigint.hpp"

namespace resilab {

/// Guard against the unproven divergent case: iteration stops with this
/// error instead of running forever. Carries the seed and the value reached
/// so a too-small budget can be told apart from a counterexample candidate.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(Int seed, Int last, std::uint64_t steps)
        : std::runtime_error("step budget exceeded after " + std::to_string(steps) +
                             " steps starting from " + seed.get_str(10) +
                             " (last value " + last.get_str(10) + ")"),
          seed(std::move(seed)),
          last_value(std::move(last)),
          steps_taken(steps) {}

    Int seed;
    Int last_value;
    std::uint64_t steps_taken;
};

inline constexpr std::uint64_t kDefaultStepBudget = 10'000'000;

/// Step counts of the iteration from N down to 1, the terminal 1 excluded.
/// total = odd + even always; N = 2^k gives (k, 0, k); N = 1 gives (0, 0, 0).
struct StepCounts {
    std::uint64_t total = 0;  // D(N)
    std::uint64_t odd = 0;    // O(N)
    std::uint64_t even = 0;   // E(N)

    bool consistent() const { return total == odd + even; }
    friend bool operator==(const StepCounts&, const StepCounts&) = default;
};

/// One Collatz step: 3n+1 for odd n, n/2 for even n.
inline Int collatz_step(const Int& n) {
    if (n < 1) throw std::invalid_argument("collatz_step requires n >= 1");
    if (is_odd(n)) return 3 * n + 1;
    return n / 2;
}

struct OddPart {
    std::uint64_t twos = 0;  // s with n = 2^s * odd
    Int odd;

    friend bool operator==(const OddPart&, const OddPart&) = default;
};

/// n = 2^s * odd with odd ... odd.
inline OddPart odd_part(const Int& n) {
    if (n < 1) throw std::invalid_argument("odd_part requires n >= 1");
    const auto s = mpz_scan1(n.get_mpz_t(), 0);
    OddPart p;
    p.twos = s;
    mpz_tdiv_q_2exp(p.odd.get_mpz_t(), n.get_mpz_t(), s);
    return p;
}

namespace detail {

// Core loop shared by trajectory_stats / odd_branch: walks the odd values of
// the trajectory of an odd m, bundling each 3x+1 step with the following run
// of halvings. visit(value, halvings) is called once per odd value (1 never
// visited).
template <typename Visitor>
StepCounts walk_odd(const Int& seed, const Int& m, std::uint64_t taken,
                    std::uint64_t step_budget, Visitor&& visit) {
    StepCounts c;
    Int cur = m;
    while (cur != 1) {
        if (taken + c.total >= step_budget) {
            throw BudgetExceeded(seed, cur, taken + c.total);
        }
        const Int odd_value = cur;
        mpz_mul_ui(cur.get_mpz_t(), cur.get_mpz_t(), 3);
        mpz_add_ui(cur.get_mpz_t(), cur.get_mpz_t(), 1);
        const auto halvings = mpz_scan1(cur.get_mpz_t(), 0);
        mpz_tdiv_q_2exp(cur.get_mpz_t(), cur.get_mpz_t(), halvings);
        c.odd += 1;
        c.even += halvings;
        c.total += 1 + halvings;
        if (taken + c.total > step_budget) {
            throw BudgetExceeded(seed, cur, step_budget);
        }
        visit(odd_value, static_cast<std::uint64_t>(halvings));
    }
    return c;
}

}  // namespace detail

/// (D, O, E) for n. Even prefixes are collapsed through odd_part (one even
/// step per halving), so cost is proportional to the odd-step count.
inline StepCounts trajectory_stats(const Int& n, std::uint64_t step_budget = kDefaultStepBudget) {
    if (n < 1) throw std::invalid_argument("trajectory_stats requires n >= 1");
    const OddPart p = odd_part(n);
    if (p.twos > step_budget) throw BudgetExceeded(n, p.odd, p.twos);
    StepCounts c = detail::walk_odd(n, p.odd, p.twos, step_budget, [](const Int&, std::uint64_t) {});
    c.total += p.twos;
    c.even += p.twos;
    return c;
}

/// The odd values (except 1) visited by n's trajectory, in order, with the
/// number of halvings taken after each. Empty exactly when n is a power of 2.
struct OddBranch {
    std::vector<Int> values;                // N_1 ... N_i
    std::vector<std::uint64_t> divisions;   // m_j: N_{j+1} * 2^{m_j} = 3*N_j + 1

    bool empty() const { return values.empty(); }
    std::size_t size() const { return values.size(); }
};

inline OddBranch odd_branch(const Int& n, std::uint64_t step_budget = kDefaultStepBudget) {
    if (n < 1) throw std::invalid_argument("odd_branch requires n >= 1");
    const OddPart p = odd_part(n);
    if (p.twos > step_budget) throw BudgetExceeded(n, p.odd, p.twos);
    OddBranch b;
    detail::walk_odd(n, p.odd, p.twos, step_budget, [&b](const Int& v, std::uint64_t m) {
        b.values.push_back(v);
        b.divisions.push_back(m);
    });
    return b;
}

}  // namespace resilab
