#include "osar/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <cstdio>
#include <sstream>

#include "osar/allocation.hpp"
#include "osar/krr.hpp"
#include "osar/rates.hpp"
#include "osar/rng.hpp"
#include "osar/rns_allocator.hpp"
#include "osar/simd.hpp"
#include "osar/supply_chain.hpp"

namespace osar {
namespace {

double unif(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
std::size_t pick(Rng& rng, std::size_t a, std::size_t b) {
    return std::uniform_int_distribution<std::size_t>(a, b)(rng);
}

// Random instance whose eps = 0 value is positive: favorable points carry a
// positive rate, every other row has a positive KL entry.
AllocationInstance random_instance(Rng& rng, std::size_t B, std::size_t L) {
    AllocationInstance in;
    in.kl.assign(B, std::vector<double>(L));
    in.g_star.assign(B, 0.0);
    in.favorable.assign(B, 0);
    for (std::size_t b = 0; b < B; ++b) {
        in.favorable[b] = unif(rng, 0, 1) < 0.3;
        for (auto& v : in.kl[b]) v = unif(rng, 0, 1) < 0.2 ? 0.0 : unif(rng, 0.0, 2.0);
        if (in.favorable[b]) {
            in.g_star[b] = unif(rng, 0.01, 1.0);
        } else if (*std::max_element(in.kl[b].begin(), in.kl[b].end()) == 0.0) {
            in.kl[b][pick(rng, 0, L - 1)] = unif(rng, 0.1, 2.0);
        }
    }
    return in;
}

PointSet random_points(Rng& rng, std::size_t n, std::size_t dim) {
    PointSet p(dim);
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : x) v = unif(rng, 0.0, 1.0);
        p.push_back(x);
    }
    return p;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void note_worst(SuiteResult& r, double v) { r.worst = std::max(r.worst, v); }

}  // namespace

SuiteResult suite_eps_gap(std::size_t instances, std::uint64_t seed) {
    SuiteResult r{"eps_gap", 0, 0, -1.0, ""};
    Rng rng = make_rng(seed, 11);
    for (std::size_t c = 0; c < instances; ++c) {
        const std::size_t B = pick(rng, 1, 50), L = pick(rng, 1, 5);
        AllocationInstance in = random_instance(rng, B, L);
        in.epsilon = 0.0;
        const double v0 = solve_maxmin_lp(in).objective;
        const double bound = unif(rng, 0.0, 1.0) / static_cast<double>(B + L);
        in.epsilon = bound;
        const double ve = solve_maxmin_lp(in).objective;
        const double gap = 1.0 - ve / v0;
        const double cap = bound * static_cast<double>(B + L);
        ++r.cases;
        if (!(v0 > 0.0) || gap < -1e-9 || gap > cap + 1e-9) ++r.failures;
        note_worst(r, gap - cap);
    }
    r.detail = "max (gap - eps(B+L)) = " + fmt(r.worst);
    return r;
}

SuiteResult suite_zero_eps_support(std::size_t instances, std::uint64_t seed) {
    SuiteResult r{"zero_eps_support", 0, 0, 0.0, ""};
    Rng rng = make_rng(seed, 12);
    double min_center = 1e300;
    for (std::size_t c = 0; c < instances; ++c) {
        const std::size_t B = pick(rng, 2, 50), L = pick(rng, 1, 5);
        AllocationInstance in = random_instance(rng, B, L);
        in.epsilon = 0.0;
        const std::size_t center = pick(rng, 0, B - 1);
        std::fill(in.kl[center].begin(), in.kl[center].end(), 0.0);
        in.favorable[center] = 1;
        in.g_star[center] = unif(rng, 0.01, 1.0);
        const AllocationSolution s = solve_maxmin_lp(in);
        ++r.cases;
        bool ok = s.alpha[center] > 0.0;
        for (std::size_t b = 0; b < B; ++b)
            if (!in.favorable[b]) {
                ok = ok && s.alpha[b] <= 1e-10;
                note_worst(r, s.alpha[b]);
            }
        min_center = std::min(min_center, s.alpha[center]);
        if (!ok) ++r.failures;
    }
    r.detail = "max adversarial alpha = " + fmt(r.worst) +
               ", min alpha at the zero-KL point = " + fmt(min_center);
    return r;
}

SuiteResult suite_krr_recursion(std::size_t sequences, std::size_t steps, std::uint64_t seed) {
    SuiteResult r{"krr_recursion", 0, 0, 0.0, ""};
    Rng rng = make_rng(seed, 13);
    for (std::size_t c = 0; c < sequences; ++c) {
        const std::size_t B = pick(rng, 3, 15);
        const PointSet pts = random_points(rng, B, 2);
        SeKernel k{{unif(rng, 0.2, 0.8), unif(rng, 0.2, 0.8)}, unif(rng, 0.5, 5.0)};
        std::vector<double> means(B), stds(B);
        std::vector<std::size_t> counts(B);
        for (std::size_t b = 0; b < B; ++b) {
            means[b] = unif(rng, -2, 2);
            stds[b] = unif(rng, 0.3, 2.0);
            counts[b] = pick(rng, 1, 5);
        }
        const double gamma = unif(rng, -1, 1);
        DiscreteKrr s = fit_discrete(means, counts, stds, k, pts, gamma, 1.0);
        s.refit_every = steps + 1;  // pure recursion
        std::vector<double> sums(B);
        for (std::size_t b = 0; b < B; ++b) sums[b] = means[b] * static_cast<double>(counts[b]);
        for (std::size_t t = 0; t < steps; ++t) {
            const std::size_t b = pick(rng, 0, B - 1);
            const double y = unif(rng, -3, 3);
            update_discrete_inplace(s, b, y);
            sums[b] += y;
            ++counts[b];
        }
        for (std::size_t b = 0; b < B; ++b) means[b] = sums[b] / static_cast<double>(counts[b]);
        const DiscreteKrr ref = fit_discrete(means, counts, stds, k, pts, gamma, 1.0);
        const double err = (s.mu_hat - ref.mu_hat).cwiseAbs().maxCoeff();
        ++r.cases;
        if (!(err <= 1e-8)) ++r.failures;
        note_worst(r, err);
    }
    r.detail = "max |recursion - refit| = " + fmt(r.worst);
    return r;
}

SuiteResult suite_nystrom_update(std::size_t sequences, std::size_t steps, std::uint64_t seed) {
    SuiteResult r{"nystrom_update", 0, 0, 0.0, ""};
    Rng rng = make_rng(seed, 14);
    for (std::size_t c = 0; c < sequences; ++c) {
        const std::size_t B = pick(rng, 3, 12);
        PointSet anchors = random_points(rng, B + 1, 2);
        SeKernel k{{unif(rng, 0.1, 0.3), unif(rng, 0.1, 0.3)}, unif(rng, 0.5, 3.0)};
        const double gamma = unif(rng, -1, 1);
        NystromKrr m(k, anchors, gamma, 1.0, NystromKrr::Solver::QrUpdate);
        std::vector<double> sums(B, 0.0), stds(B);
        std::vector<std::size_t> counts(B, 0);
        for (auto& s : stds) s = unif(rng, 0.3, 2.0);
        std::vector<MapObservation> hist;
        m.coefficients();  // start from a factorization so later events use the rank-one path
        for (std::size_t t = 0; t < steps; ++t) {
            const double u = unif(rng, 0, 1);
            const double y = unif(rng, -3, 3);
            if (u < 0.6) {
                const std::size_t b = pick(rng, 0, B - 1);
                m.add_anchor_observation(b, y, stds[b] * stds[b]);
                sums[b] += y;
                ++counts[b];
            } else if (u < 0.9) {
                const double noise = unif(rng, 0.2, 2.0);
                m.add_map_observation(y, noise);
                const auto th = anchors[B];
                hist.push_back({{th.begin(), th.end()}, y, noise});
            } else {
                const std::vector<double> th{unif(rng, 0, 1), unif(rng, 0, 1)};
                m.move_map(th);
                std::copy(th.begin(), th.end(), anchors[B].begin());
            }
            m.coefficients();
        }
        std::vector<double> means(B, 0.0);
        for (std::size_t b = 0; b < B; ++b)
            if (counts[b]) means[b] = sums[b] / static_cast<double>(counts[b]);
        const NystromFit ref = fit_nystrom(anchors, means, counts, stds, hist, k, gamma, 1.0);
        const double err = (m.predict_anchors() - ref.mu_hat).cwiseAbs().maxCoeff();
        ++r.cases;
        if (!(err <= 1e-6)) ++r.failures;
        note_worst(r, err);
    }
    r.detail = "max |QR update - pseudo-inverse| = " + fmt(r.worst);
    return r;
}

SuiteResult suite_nystrom_gradient(std::size_t instances, std::uint64_t seed) {
    SuiteResult r{"nystrom_gradient", 0, 0, 0.0, ""};
    Rng rng = make_rng(seed, 15);
    for (std::size_t c = 0; c < instances; ++c) {
        const std::size_t B = pick(rng, 2, 7);  // plus the MAP anchor: at most 8
        const PointSet anchors = random_points(rng, B + 1, 2);
        SeKernel k{{unif(rng, 0.15, 0.4), unif(rng, 0.15, 0.4)}, unif(rng, 0.5, 2.0)};
        const double gamma = unif(rng, -1, 1);
        std::vector<double> means(B), stds(B);
        std::vector<std::size_t> counts(B);
        for (std::size_t b = 0; b < B; ++b) {
            means[b] = unif(rng, -2, 2);
            stds[b] = unif(rng, 0.5, 2.0);
            counts[b] = pick(rng, 1, 6);
        }
        std::vector<MapObservation> hist;
        const std::size_t H = pick(rng, 0, 6);
        for (std::size_t h = 0; h < H; ++h) {
            const auto th = h % 2 ? anchors[B] : anchors[pick(rng, 0, B)];
            hist.push_back({{th.begin(), th.end()}, unif(rng, -2, 2), unif(rng, 0.3, 2.0)});
        }
        const NystromFit closed = fit_nystrom(anchors, means, counts, stds, hist, k, gamma, 1.0);

        // Objective in the anchor coefficients: quadratic with Hessian A and
        // linear term b.
        const Eigen::MatrixXd kbar = gram(k, anchors);
        const Eigen::Index n = kbar.rows();
        Eigen::MatrixXd A = kbar;  // kappa = 1
        Eigen::VectorXd bv = Eigen::VectorXd::Zero(n);
        for (std::size_t b = 0; b < B; ++b) {
            const double w = static_cast<double>(counts[b]) / (stds[b] * stds[b]);
            const Eigen::VectorXd col = kbar.col(static_cast<Eigen::Index>(b));
            A += w * col * col.transpose();
            bv += w * (means[b] - gamma) * col;
        }
        for (const auto& h : hist) {
            Eigen::VectorXd col(n);
            for (Eigen::Index j = 0; j < n; ++j) col[j] = k(anchors[static_cast<std::size_t>(j)], h.theta);
            A += col * col.transpose() / h.noise;
            bv += (h.y - gamma) / h.noise * col;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        const double step = 1.0 / es.eigenvalues().maxCoeff();
        // Nesterov-accelerated gradient steps with adaptive restart.
        Eigen::VectorXd cf = Eigen::VectorXd::Zero(n), prev = cf, look = cf;
        double mom = 1.0;
        for (std::size_t it = 0; it < 2000000; ++it) {
            const Eigen::VectorXd g = A * look - bv;
            if ((A * cf - bv).norm() < 1e-13) break;
            prev = cf;
            cf = look - step * g;
            const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * mom * mom));
            if (g.dot(cf - prev) > 0.0) {
                mom = 1.0;
                look = cf;
                continue;
            }
            look = cf + ((mom - 1.0) / next) * (cf - prev);
            mom = next;
        }
        const Eigen::VectorXd gd = (kbar * cf).array() + gamma;
        const double err = (gd - closed.mu_hat).cwiseAbs().maxCoeff();
        ++r.cases;
        if (!(err <= 1e-5)) ++r.failures;
        note_worst(r, err);
    }
    r.detail = "max |closed form - gradient descent| = " + fmt(r.worst);
    return r;
}

SuiteResult suite_balance(std::size_t instances, std::size_t total, std::uint64_t seed) {
    SuiteResult r{"balance", 0, 0, 0.0, ""};
    Rng rng = make_rng(seed, 16);
    DeficitGreedyAllocator alloc;
    double worst_vb = 0.0, worst_spread = 0.0;
    for (std::size_t c = 0; c < instances; ++c) {
        const std::size_t k = pick(rng, 2, 6);
        PointAllocatorState st;
        st.means.resize(k);
        st.stds.resize(k);
        st.counts.assign(k, 1);
        // Unique best with gaps in [0.1, 2].
        const std::size_t best = pick(rng, 0, k - 1);
        const double base = unif(rng, -1.0, 1.0);
        for (std::size_t i = 0; i < k; ++i) {
            st.means[i] = i == best ? base : base + unif(rng, 0.1, 2.0);
            st.stds[i] = unif(rng, 0.5, 2.0);
        }
        std::size_t n = k;
        while (n < total) {
            const std::size_t m = std::min<std::size_t>(50, total - n);
            const auto add = alloc.allocate_batch(st, m);
            for (std::size_t i = 0; i < k; ++i) st.counts[i] += add[i];
            n += m;
        }
        std::vector<double> a(k);
        for (std::size_t i = 0; i < k; ++i) a[i] = static_cast<double>(st.counts[i]) / static_cast<double>(n);
        const BalanceResidual res = balance_residual(st.means, st.stds, a, best);
        const double vb = std::abs(res.variance_balance) / (a[best] * a[best] / (st.stds[best] * st.stds[best]));
        double lo = 1e300;
        for (std::size_t i = 0; i < k; ++i)
            if (i != best)
                lo = std::min(lo, pairwise_rate({st.means[best], st.stds[best], a[best]},
                                                {st.means[i], st.stds[i], a[i]}));
        const double spread = res.rate_spread / lo;
        worst_vb = std::max(worst_vb, vb);
        worst_spread = std::max(worst_spread, spread);
        ++r.cases;
        if (!(vb <= 0.01) || !(spread <= 0.05)) ++r.failures;
    }
    r.worst = std::max(worst_vb, worst_spread);
    std::ostringstream os;
    os << "max normalized variance balance = " << worst_vb << ", max relative rate spread = " << worst_spread;
    r.detail = os.str();
    return r;
}

SuiteResult suite_supply_chain(std::size_t reps, std::uint64_t seed) {
    SuiteResult r{"supply_chain", 0, 0, 0.0, ""};
    Rng rng = make_rng(seed, 17);
    const Routing routing;
    const auto th0 = supply_chain_theta0();
    const std::vector<double> clean(kNumArcs, 0.0);
    for (std::size_t t = 0; t < reps; ++t) {
        const int center = static_cast<int>(pick(rng, 1, 6));
        const Replication a = simulate_supply_chain_detail(center, th0, routing, rng);
        const Replication z = simulate_supply_chain_detail(center, clean, routing, rng);
        ++r.cases;
        const bool ok = a.delivered + a.discarded == a.qtot && a.delivered >= 0 && a.delivered <= a.qtot &&
                        a.qtot >= 475 && a.qtot <= 525 && z.delivered == z.qtot;
        if (!ok) ++r.failures;
    }
    r.detail = "conservation and zero-contamination identities";
    return r;
}

SuiteResult suite_simd(std::size_t cases, std::uint64_t seed) {
    SuiteResult r{"simd", 0, 0, 0.0, ""};
    const simd::KernelTable* v = simd::avx2_table();
    if (!v) {
        r.cases = 1;
        r.detail = "AVX2 unavailable; scalar only";
        return r;
    }
    const simd::KernelTable& s = simd::scalar_table();
    Rng rng = make_rng(seed, 18);
    for (std::size_t c = 0; c < cases; ++c) {
        const std::size_t n = pick(rng, 0, 300);
        std::vector<double> x(n), y(n);
        for (auto& e : x) e = unif(rng, -1, 1);
        for (auto& e : y) e = unif(rng, -1, 1);
        const double d1 = s.dot(x.data(), y.data(), n), d2 = v->dot(x.data(), y.data(), n);
        std::vector<double> y1 = y, y2 = y;
        s.axpy(0.37, x.data(), y1.data(), n);
        v->axpy(0.37, x.data(), y2.data(), n);
        double err = std::abs(d1 - d2) / (1.0 + std::abs(d1));
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(y1[i] - y2[i]));
        ++r.cases;
        if (!(err <= 1e-12)) ++r.failures;
        note_worst(r, err);
    }
    r.detail = "max scalar/AVX2 difference = " + fmt(r.worst);
    return r;
}

std::vector<SuiteResult> run_all_suites(std::uint64_t seed, bool quick) {
    const std::size_t f = quick ? 5 : 1;
    return {suite_eps_gap(500 / f, seed),
            suite_zero_eps_support(500 / f, seed),
            suite_krr_recursion(200 / f, 50, seed),
            suite_nystrom_update(200 / f, 50, seed),
            suite_nystrom_gradient(20 / f, seed),
            suite_balance(20 / f, quick ? 20000 : 100000, seed),
            suite_supply_chain(10000 / f, seed),
            suite_simd(1000 / f, seed)};
}

}  // namespace osar
