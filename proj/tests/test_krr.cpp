#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "osar/krr.hpp"
#include "osar/validation.hpp"

using namespace osar;

namespace {

PointSet line_points(std::vector<double> xs) { return PointSet(1, std::move(xs)); }

}  // namespace

TEST_CASE("kernel and Gram basics") {
    SeKernel k{{0.5}, 2.0};
    const double a = 0.0, b = 1.0;
    CHECK(k(std::span<const double>(&a, 1), std::span<const double>(&b, 1)) == doctest::Approx(2.0 * std::exp(-2.0)));
    CHECK(k.unit(std::span<const double>(&a, 1), std::span<const double>(&a, 1)) == 1.0);
    const auto pts = line_points({0.0, 0.5, 2.0});
    const Eigen::MatrixXd g = gram(k, pts);
    CHECK(g.rows() == 3);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(g(0, 0) == doctest::Approx(2.0));
    CHECK((gram(k, pts, pts) - g).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("median lengthscale") {
    // pairwise |dx| over {0, 1, 3}: 1, 2, 3 -> median 2; second axis constant -> 1
    PointSet p(2, {0, 5, 1, 5, 3, 5});
    const auto ls = median_lengthscale(p);
    CHECK(ls[0] == doctest::Approx(2.0));
    CHECK(ls[1] == doctest::Approx(1.0));
}

TEST_CASE("single point regression is scalar shrinkage") {
    const auto pts = line_points({0.3});
    SeKernel k{{1.0}, 4.0};
    const double mu = 5.0, gamma = 1.0, lambda = 2.0, kappa = 1.0;
    const std::size_t n = 3;
    const auto s = fit_discrete(std::vector<double>{mu}, std::vector<std::size_t>{n}, std::vector<double>{lambda}, k,
                                pts, gamma, kappa);
    const double expect = gamma + 4.0 / (4.0 + kappa * lambda * lambda / n) * (mu - gamma);
    CHECK(s.mu_hat[0] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("vanishing regularizer interpolates the sample means") {
    const auto pts = line_points({0.0, 1.0, 2.0, 3.0});
    SeKernel k{{0.4}, 1.0};
    const std::vector<double> mu{1.0, -2.0, 0.5, 3.0}, sd(4, 1e-4);
    const std::vector<std::size_t> n(4, 1);
    const auto s = fit_discrete(mu, n, sd, k, pts, 0.0, 1e-10);
    for (int b = 0; b < 4; ++b) CHECK(std::abs(s.mu_hat[b] - mu[b]) < 1e-6);
}

TEST_CASE("constant means equal to the prior mean stay put") {
    const auto pts = line_points({0.0, 0.7, 1.1});
    SeKernel k{{0.5}, 2.0};
    const auto s = fit_discrete(std::vector<double>(3, 1.5), std::vector<std::size_t>{1, 4, 2},
                                std::vector<double>{1, 2, 3}, k, pts, 1.5, 1.0);
    for (int b = 0; b < 3; ++b) CHECK(s.mu_hat[b] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("every point needs a replication") {
    const auto pts = line_points({0.0, 10.0});
    SeKernel k{{0.5}, 2.0};
    CHECK_THROWS(fit_discrete(std::vector<double>{4.0, 0.0}, std::vector<std::size_t>{5, 0},
                              std::vector<double>{1, 1}, k, pts, 1.0, 1.0));
}

TEST_CASE("zero-innovation update leaves predictions unchanged") {
    const auto pts = line_points({0.0, 0.5, 1.0});
    SeKernel k{{0.5}, 2.0};
    auto s = fit_discrete(std::vector<double>{1, 2, 0}, std::vector<std::size_t>{1, 1, 1}, std::vector<double>{1, 1, 1},
                          k, pts, 0.0, 1.0);
    const Eigen::VectorXd before = s.mu_hat;
    const auto next = update_discrete(s, 1, s.mu_hat[1]);
    CHECK((next.mu_hat - before).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(next.counts[1] == 2);
    CHECK(s.counts[1] == 1);  // value form leaves the input alone
}

TEST_CASE("recursion matches a refit after a random update sequence") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const auto pts = line_points({0.0, 0.3, 0.6, 0.9, 1.2, 1.5});
    SeKernel k{{0.4}, 1.5};
    std::vector<double> mu(6), sd(6), sums(6);
    std::vector<std::size_t> n(6, 1);
    for (int b = 0; b < 6; ++b) {
        mu[b] = u(rng);
        sd[b] = 0.5 + std::abs(u(rng));
        sums[b] = mu[b];
    }
    auto s = fit_discrete(mu, n, sd, k, pts, 0.2, 1.0);
    for (int t = 0; t < 50; ++t) {
        const std::size_t b = rng() % 6;
        const double y = u(rng);
        update_discrete_inplace(s, b, y);
        sums[b] += y;
        ++n[b];
    }
    for (int b = 0; b < 6; ++b) mu[b] = sums[b] / static_cast<double>(n[b]);
    const auto ref = fit_discrete(mu, n, sd, k, pts, 0.2, 1.0);
    CHECK((s.mu_hat - ref.mu_hat).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((s.C - ref.C).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("recursion requires the unit regularizer") {
    const auto pts = line_points({0.0, 1.0});
    SeKernel k{{0.5}, 1.0};
    auto s = fit_discrete(std::vector<double>{0, 1}, std::vector<std::size_t>{1, 1}, std::vector<double>{1, 1}, k, pts,
                          0.0, 0.5);
    CHECK_THROWS(update_discrete_inplace(s, 0, 1.0));
}

TEST_CASE("Nystrom: outputs equal to the prior mean give the prior mean") {
    PointSet anchors(2, {0.0, 0.0, 0.5, 0.5, 1.0, 0.2, 0.3, 0.9});
    SeKernel k{{0.4, 0.4}, 2.0};
    NystromKrr m(k, anchors, 3.0, 1.0, NystromKrr::Solver::Cod);
    for (std::size_t b = 0; b < 3; ++b) m.set_anchor_stats(b, 2.0, 0.0);
    m.add_map_observation(3.0, 1.0);
    m.add_map_observation(3.0, 0.5);
    const auto p = m.predict_anchors();
    for (Eigen::Index i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("Nystrom: solvers agree with the pseudo-inverse reference") {
    PointSet anchors(2, {0.1, 0.1, 0.4, 0.8, 0.9, 0.3, 0.6, 0.6, 0.5, 0.2});
    SeKernel k{{0.3, 0.3}, 1.5};
    const std::vector<double> means{1.0, -0.5, 2.0, 0.3}, sd{1.0, 0.7, 1.3, 0.9};
    const std::vector<std::size_t> counts{3, 1, 5, 2};
    std::vector<MapObservation> hist{{{0.5, 0.2}, 0.8, 1.1}, {{0.5, 0.2}, 1.4, 0.6}};
    const NystromFit ref = fit_nystrom(anchors, means, counts, sd, hist, k, 0.4, 1.0);
    for (auto solver : {NystromKrr::Solver::PseudoInverse, NystromKrr::Solver::QrUpdate, NystromKrr::Solver::Cod}) {
        NystromKrr m(k, anchors, 0.4, 1.0, solver);
        for (std::size_t b = 0; b < 4; ++b) {
            const double w = static_cast<double>(counts[b]) / (sd[b] * sd[b]);
            m.set_anchor_stats(b, w, w * (means[b] - 0.4));
        }
        for (const auto& h : hist) m.add_map_observation(h.y, h.noise);
        CHECK((m.predict_anchors() - ref.mu_hat).cwiseAbs().maxCoeff() < 1e-8);
        // dense prediction at the anchors is the same thing
        CHECK((m.predict(anchors) - ref.mu_hat).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("Nystrom: history scale multiplies the MAP weights") {
    PointSet anchors(1, {0.0, 0.5, 1.0});
    SeKernel k{{0.5}, 1.0};
    NystromKrr a(k, anchors, 0.0, 1.0, NystromKrr::Solver::Cod), b(k, anchors, 0.0, 1.0, NystromKrr::Solver::Cod);
    a.set_anchor_stats(0, 1.0, 1.0);
    b.set_anchor_stats(0, 1.0, 1.0);
    a.add_map_observation(2.0, 1.0);
    a.set_history_scale(0.25);
    b.add_map_observation(2.0, 4.0);
    CHECK((a.predict_anchors() - b.predict_anchors()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Nystrom: QR update and gradient suites, small") {
    CHECK(suite_nystrom_update(20, 30, 1).passed());
    CHECK(suite_nystrom_gradient(5, 1).passed());
    CHECK(suite_krr_recursion(20, 30, 1).passed());
}
