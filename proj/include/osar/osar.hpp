#pragma once
// The sequential allocation loops: discrete support with sample-mean or KRR
// estimates, and continuous support with a moving MAP anchor, optionally
// enlarging the adversarial set with a fixed dense design or posterior draws.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "osar/problems.hpp"

namespace osar {

enum class Estimator { SampleMean, Krr };
enum class Variant { PlusPlus, FixedDense, PosteriorSample };

Estimator parse_estimator(const std::string& s);
std::string estimator_name(Estimator e);
Variant parse_variant(const std::string& s);
std::string variant_name(Variant v);

struct RunConfig {
    std::size_t batch = 50;
    double epsilon = 1e-4;
    std::size_t m0 = 50, n0 = 1;
    double budget = 4000;
    Estimator estimator = Estimator::SampleMean;
    std::string subroutine = "deficit_greedy";
    Variant variant = Variant::PlusPlus;
    // Posterior draws per iteration for the posterior-sampling variant.
    std::size_t design_size = 2601;
    // Keep the per-point simulation shares in every snapshot.
    bool trajectory_alpha = true;

    static RunConfig from(const ProblemDefaults& d);
    void validate() const;
};

struct BudgetLedger {
    double total = 0.0;
    double spent = 0.0;
    std::size_t batches = 0;
    std::size_t batch = 0;
    std::size_t m0 = 0, n0 = 0;
    std::vector<double> costs;
    std::vector<std::size_t> data_counts;           // m_l
    std::vector<std::vector<std::size_t>> counts;   // [i][b], fixed points
    std::vector<std::size_t> map_counts;            // per solution, continuous kind

    // Spend recomputed from the counters.
    double recount() const;
    // Simulation replications per point, MAP last when present.
    std::vector<std::size_t> point_totals() const;
};

struct Snapshot {
    double t = 0.0;
    std::size_t best = 0;
    double preference = 0.0;
    std::vector<double> alpha;  // simulation share of spend per point (MAP last)
    std::vector<double> beta;   // data share of spend per source
};

struct RunResult {
    std::size_t returned = 0;
    std::uint64_t seed = 0;
    BudgetLedger ledger;
    std::vector<Snapshot> trajectory;  // one per batch iteration, then the final state
    std::vector<double> alpha, beta;   // final empirical shares
    double overshoot = 0.0;            // spent - total (final batch may land past T)
    std::size_t map_perturbations = 0;
    std::size_t lp_pivots = 0;
};

struct MpbEstimate {
    std::size_t best = 0;
    std::vector<std::size_t> owner;  // plug-in best per point
    std::vector<std::vector<std::size_t>> favorable;  // points owned by each solution
    std::vector<double> preference;
};
// means[i][b]; ties go to the lowest index on both levels.
MpbEstimate estimate_mpb(const std::vector<std::vector<double>>& means, std::span<const double> pmf);

RunResult run_osar(const Problem& problem, const RunConfig& cfg, std::uint64_t seed);
RunResult run_osar_continuous(const Problem& problem, const RunConfig& cfg, std::uint64_t seed);
// Dispatches on the support kind.
RunResult run(const Problem& problem, const RunConfig& cfg, std::uint64_t seed);

}  // namespace osar
