#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "osar/osar.hpp"
#include "osar/problems.hpp"
#include "osar/supply_chain.hpp"

using namespace osar;

TEST_CASE("MPB on a two-point example") {
    const std::vector<std::vector<double>> means{{0, 1}, {1, 0}};
    const std::vector<double> pmf{0.7, 0.3};
    const auto e = estimate_mpb(means, pmf);
    CHECK(e.best == 0);
    CHECK(e.owner == std::vector<std::size_t>{0, 1});
    CHECK(e.favorable[0] == std::vector<std::size_t>{0});
    CHECK(e.favorable[1] == std::vector<std::size_t>{1});
    CHECK(e.preference[0] == doctest::Approx(0.7));
}

TEST_CASE("MPB ties go to the lowest index") {
    const std::vector<std::vector<double>> means{{2, 2, 2}, {2, 2, 2}};
    const std::vector<double> pmf{0.2, 0.3, 0.5};
    const auto e = estimate_mpb(means, pmf);
    CHECK(e.best == 0);
    CHECK(e.owner == std::vector<std::size_t>{0, 0, 0});
    const std::vector<std::vector<double>> split{{0, 1}, {1, 0}};
    const std::vector<double> even{0.5, 0.5};
    CHECK(estimate_mpb(split, even).best == 0);
}

TEST_CASE("algorithm names parse") {
    CHECK(parse_estimator("krr") == Estimator::Krr);
    CHECK(parse_estimator(estimator_name(Estimator::SampleMean)) == Estimator::SampleMean);
    for (auto v : {Variant::PlusPlus, Variant::FixedDense, Variant::PosteriorSample})
        CHECK(parse_variant(variant_name(v)) == v);
    CHECK_THROWS(parse_variant("nope"));
}

TEST_CASE("budget equal to the initialization cost runs no batches") {
    SyntheticProblem p(Scenario::Baseline, false);
    RunConfig c = RunConfig::from(p.defaults());
    c.budget = 50 * 2 + 121 * 10;
    const auto r = run(p, c, 4);
    CHECK(r.ledger.batches == 0);
    CHECK(r.trajectory.size() == 1);
    CHECK(r.returned == r.trajectory.back().best);
    CHECK(r.ledger.spent == doctest::Approx(c.budget));
}

TEST_CASE("configuration errors") {
    SyntheticProblem p(Scenario::Baseline, false);
    RunConfig c = RunConfig::from(p.defaults());
    c.epsilon = 0.3;
    CHECK_THROWS_AS(run(p, c, 1), ConfigError);
    c = RunConfig::from(p.defaults());
    c.budget = 100;
    CHECK_THROWS_AS(run(p, c, 1), ConfigError);
    c = RunConfig::from(p.defaults());
    c.n0 = 0;
    CHECK_THROWS(run(p, c, 1));
    c = RunConfig::from(p.defaults());
    c.batch = 0;
    CHECK_THROWS(c.validate());
}

TEST_CASE("discrete runs are reproducible and account for every unit of budget") {
    SyntheticProblem p(Scenario::Baseline, false);
    for (auto est : {Estimator::SampleMean, Estimator::Krr}) {
        RunConfig c = RunConfig::from(p.defaults());
        c.estimator = est;
        c.budget = 2500;
        const auto a = run(p, c, 99), b = run(p, c, 99);
        CHECK(a.returned == b.returned);
        CHECK(a.ledger.counts == b.ledger.counts);
        CHECK(a.ledger.data_counts == b.ledger.data_counts);
        CHECK(a.ledger.spent == doctest::Approx(a.ledger.recount()));
        CHECK(a.ledger.spent >= c.budget);
        CHECK(a.overshoot == doctest::Approx(a.ledger.spent - c.budget));
        const double share = std::accumulate(a.alpha.begin(), a.alpha.end(), 0.0) +
                             std::accumulate(a.beta.begin(), a.beta.end(), 0.0);
        CHECK(share == doctest::Approx(1.0).epsilon(1e-9));
        for (std::size_t i = 1; i < a.trajectory.size(); ++i) CHECK(a.trajectory[i].t > a.trajectory[i - 1].t);
    }
}

TEST_CASE("data costs are charged per observation") {
    SyntheticProblem p(Scenario::S3, false);
    RunConfig c = RunConfig::from(p.defaults());
    c.budget = 2000;
    const auto r = run(p, c, 5);
    double sims = 0.0;
    for (std::size_t n : r.ledger.point_totals()) sims += static_cast<double>(n);
    const double expect = sims + static_cast<double>(r.ledger.data_counts[0]) + 2.0 * r.ledger.data_counts[1];
    CHECK(r.ledger.spent == doctest::Approx(expect));
}

TEST_CASE("the toy problem concentrates on the true best") {
    const TableProblem t = TableProblem::toy();
    RunConfig c = RunConfig::from(t.defaults());
    c.budget = 3000;
    std::size_t hits = 0;
    for (std::uint64_t s = 1; s <= 10; ++s) hits += run(t, c, s).returned == t.true_best();
    CHECK(hits >= 9);
}

TEST_CASE("continuous variants run and keep the MAP anchor last") {
    SyntheticProblem p(Scenario::Baseline, true, 20);
    for (auto v : {Variant::PlusPlus, Variant::FixedDense, Variant::PosteriorSample}) {
        RunConfig c = RunConfig::from(p.defaults());
        c.variant = v;
        c.budget = 1800;
        c.design_size = 200;
        const auto r = run(p, c, 3);
        CHECK(r.returned < 10);
        CHECK(r.ledger.map_counts.size() == 10);
        CHECK(r.ledger.point_totals().size() == p.support().size() + 1);
        CHECK(r.ledger.spent == doctest::Approx(r.ledger.recount()));
        CHECK(r.alpha.size() == p.support().size() + 1);
        const auto again = run(p, c, 3);
        CHECK(again.returned == r.returned);
        CHECK(again.ledger.map_counts == r.ledger.map_counts);
    }
}

TEST_CASE("continuous run on a problem with unknown output variance") {
    // Small supply chain instance: few anchors, short design.
    SupplyChainProblem p(Routing{}, 15, 100, 3, 2);
    RunConfig c = RunConfig::from(p.defaults());
    c.variant = Variant::FixedDense;
    c.budget = 1500;
    const auto r = run(p, c, 1);
    CHECK(r.returned < 6);
    CHECK(r.ledger.spent == doctest::Approx(r.ledger.recount()));
}
