#pragma once
// Two-stage food supply chain: three first-stage centers feed three second-stage
// centers, which ship to one retailer. theta holds ten arc contamination rates in
// the order c14 c15 c24 c25 c26 c35 c36 c47 c57 c67.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "osar/problems.hpp"

namespace osar {

inline constexpr std::size_t kNumArcs = 10;
// (from, to) per arc, centers numbered 1..6 and the retailer 7.
inline constexpr std::array<std::array<int, 2>, kNumArcs> kArcs{{{1, 4}, {1, 5}, {2, 4}, {2, 5}, {2, 6},
                                                                {3, 5}, {3, 6}, {4, 7}, {5, 7}, {6, 7}}};
std::vector<double> supply_chain_theta0();

struct Routing {
    // p[arc] is the routing probability along the arc; rows per origin sum to 1.
    std::array<double, kNumArcs> p{0.5, 0.5, 1.0 / 3, 1.0 / 3, 1.0 / 3, 0.5, 0.5, 1.0, 1.0, 1.0};
    void validate() const;
};

struct Replication {
    long qtot = 0;
    long delivered = 0;
    long discarded = 0;
};

// One replication with the control facility at `center` (1..6).
Replication simulate_supply_chain_detail(int center, std::span<const double> theta,
                                         const Routing& routing, Rng& rng);
double simulate_supply_chain(int center, std::span<const double> theta, const Routing& routing, Rng& rng);
// Expected delivered units, in closed form (E[Q_tot] = 500).
double supply_chain_expected(int center, std::span<const double> theta, const Routing& routing);

class SupplyChainProblem final : public Problem {
public:
    SupplyChainProblem(Routing routing = {}, std::size_t num_anchors = 100, std::size_t design_size = 10000,
                       std::uint64_t anchor_seed = 20240101, std::size_t reps_per_output = 10);

    std::string id() const override { return "supply_chain"; }
    std::size_t num_solutions() const override { return 6; }
    const std::vector<InputSourceModel>& sources() const override { return sources_; }
    const ParameterSupport& support() const override { return support_; }
    std::vector<double> theta0() const override { return theta0_; }
    std::size_t true_best() const override { return 1; }  // center 2
    // Negated average delivery over a batch of replications (the framework minimizes).
    double simulate(std::size_t i, std::span<const double> theta, Rng& rng) const override;
    std::optional<double> known_std(std::size_t, std::span<const double>) const override {
        return std::nullopt;
    }
    std::optional<double> true_mean(std::size_t i, std::span<const double> theta) const override;
    const PointSet* dense_design() const override { return &dense_; }
    ProblemDefaults defaults() const override;
    const Routing& routing() const { return routing_; }

private:
    Routing routing_;
    std::vector<InputSourceModel> sources_;
    ParameterSupport support_;
    std::vector<double> theta0_;
    PointSet dense_;
    std::size_t reps_;
};

}  // namespace osar
