#pragma once
// Randomized property suites shared by the CLI `validate` command and the
// acceptance binary.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace osar {

struct SuiteResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    double worst = 0.0;  // worst observed value of the suite's checked quantity
    std::string detail;
    bool passed() const { return cases > 0 && failures == 0; }
};

// Relative gap 1 - V(eps)/V(0) lies in [0, eps(B+L)] on random instances.
SuiteResult suite_eps_gap(std::size_t instances, std::uint64_t seed);
// At eps = 0: no simulation share at adversarial points, positive share at the
// zero-KL favorable point.
SuiteResult suite_zero_eps_support(std::size_t instances, std::uint64_t seed);
// Discrete KRR recursion against refits.
SuiteResult suite_krr_recursion(std::size_t sequences, std::size_t steps, std::uint64_t seed);
// Nystrom QR-update path against the pseudo-inverse closed form.
SuiteResult suite_nystrom_update(std::size_t sequences, std::size_t steps, std::uint64_t seed);
// Nystrom closed form against gradient descent on the penalized objective.
SuiteResult suite_nystrom_gradient(std::size_t instances, std::uint64_t seed);
// Deficit-greedy allocator meets both optimality conditions at sum N = total.
SuiteResult suite_balance(std::size_t instances, std::size_t total, std::uint64_t seed);
// Conservation and zero-contamination identities of the supply chain simulator.
SuiteResult suite_supply_chain(std::size_t reps, std::uint64_t seed);
// Scalar and AVX2 kernels agree (skipped with a note if AVX2 is unavailable).
SuiteResult suite_simd(std::size_t cases, std::uint64_t seed);

std::vector<SuiteResult> run_all_suites(std::uint64_t seed, bool quick);

}  // namespace osar
