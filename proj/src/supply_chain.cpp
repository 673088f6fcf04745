#include "osar/supply_chain.hpp"

#include <cmath>
#include <random>

namespace osar {
namespace {

void check_theta(std::span<const double> th) {
    if (th.size() != kNumArcs) throw DomainError("supply chain: theta must have ten components");
    for (double c : th)
        if (!(c >= 0.1 - 1e-9 && c <= 0.3 + 1e-9)) throw DomainError("supply chain: rate outside [0.1, 0.3]");
}

void check_center(int center) {
    if (center < 1 || center > 6) throw DomainError("supply chain: center must be in 1..6");
}

long binomial(long n, double p, Rng& rng) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    return std::binomial_distribution<long>(n, p)(rng);
}

// Survival probability along an arc; nothing is lost past the installed facility.
double survive(std::size_t arc, int center, std::span<const double> th) {
    return kArcs[arc][0] == center ? 1.0 : 1.0 - th[arc];
}

}  // namespace

std::vector<double> supply_chain_theta0() {
    return {0.1516, 0.2384, 0.2707, 0.2986, 0.2987, 0.2121, 0.1556, 0.1485, 0.1110, 0.1478};
}

void Routing::validate() const {
    for (int from = 1; from <= 6; ++from) {
        double s = 0.0;
        for (std::size_t a = 0; a < kNumArcs; ++a) {
            if (kArcs[a][0] != from) continue;
            if (!(p[a] >= 0.0)) throw InputError("routing: negative probability");
            s += p[a];
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw InputError("routing: outbound probabilities of center " + std::to_string(from) +
                             " do not sum to 1");
    }
}

Replication simulate_supply_chain_detail(int center, std::span<const double> th, const Routing& routing,
                                         Rng& rng) {
    check_center(center);
    if (th.size() != kNumArcs) throw DomainError("supply chain: theta must have ten components");
    Replication rep;
    rep.qtot = std::uniform_int_distribution<long>(475, 525)(rng);
    std::array<long, 8> stock{};  // units at centers 1..7
    // Even first-stage split, drawn as sequential conditional binomials.
    long left = rep.qtot;
    for (int c = 1; c <= 3; ++c) {
        const long n = c == 3 ? left : binomial(left, 1.0 / (4 - c), rng);
        stock[c] = n;
        left -= n;
    }
    for (int from = 1; from <= 6; ++from) {
        long avail = stock[from];
        double mass = 1.0;
        for (std::size_t a = 0; a < kNumArcs; ++a) {
            if (kArcs[a][0] != from) continue;
            const double pa = routing.p[a];
            const long n = pa >= mass - 1e-15 ? avail : binomial(avail, pa / mass, rng);
            avail -= n;
            mass -= pa;
            stock[kArcs[a][1]] += binomial(n, survive(a, center, th), rng);
        }
    }
    rep.delivered = stock[7];
    rep.discarded = rep.qtot - rep.delivered;
    return rep;
}

double simulate_supply_chain(int center, std::span<const double> th, const Routing& routing, Rng& rng) {
    return static_cast<double>(simulate_supply_chain_detail(center, th, routing, rng).delivered);
}

double supply_chain_expected(int center, std::span<const double> th, const Routing& routing) {
    check_center(center);
    if (th.size() != kNumArcs) throw DomainError("supply chain: theta must have ten components");
    std::array<double, 8> flow{};
    flow[1] = flow[2] = flow[3] = 500.0 / 3.0;
    for (int from = 1; from <= 6; ++from)
        for (std::size_t a = 0; a < kNumArcs; ++a)
            if (kArcs[a][0] == from) flow[kArcs[a][1]] += flow[from] * routing.p[a] * survive(a, center, th);
    return flow[7];
}

SupplyChainProblem::SupplyChainProblem(Routing routing, std::size_t num_anchors, std::size_t design_size,
                                       std::uint64_t anchor_seed, std::size_t reps)
    : routing_(routing), theta0_(supply_chain_theta0()), reps_(reps) {
    routing_.validate();
    if (num_anchors == 0 || reps_ == 0) throw InputError("supply chain: need anchors and reps");
    sources_.assign(kNumArcs, InputSourceModel::truncated_beta(1.0, 0.1, 0.3, 0.5, 0.5));
    std::vector<double> lo(kNumArcs, 0.1), hi(kNumArcs, 0.3);
    // Anchors are prior draws.
    PosteriorState prior(sources_, ParameterSupport::continuous(lo, hi, halton_design(kNumArcs, 1, 0.1, 0.3)));
    Rng rng = make_rng(anchor_seed, 0);
    support_ = ParameterSupport::continuous(lo, hi, sample_posterior(prior, num_anchors, rng));
    dense_ = halton_design(kNumArcs, design_size, 0.1, 0.3);
}

double SupplyChainProblem::simulate(std::size_t i, std::span<const double> th, Rng& rng) const {
    check_theta(th);
    double s = 0.0;
    for (std::size_t r = 0; r < reps_; ++r) s += simulate_supply_chain(static_cast<int>(i) + 1, th, routing_, rng);
    return -s / static_cast<double>(reps_);
}

std::optional<double> SupplyChainProblem::true_mean(std::size_t i, std::span<const double> th) const {
    check_theta(th);
    return -supply_chain_expected(static_cast<int>(i) + 1, th, routing_);
}

ProblemDefaults SupplyChainProblem::defaults() const {
    ProblemDefaults d;
    d.batch = 50;
    d.epsilon = 1e-4;
    d.m0 = 5;
    d.n0 = 5;
    d.budget = 5000;
    return d;
}

}  // namespace osar
