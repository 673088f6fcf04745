#include "osar/osar.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <random>

#include "osar/allocation.hpp"
#include "osar/krr.hpp"
#include "osar/rates.hpp"
#include "osar/rns_allocator.hpp"
#include "osar/simd.hpp"

namespace osar {

Estimator parse_estimator(const std::string& s) {
    if (s == "sample_mean" || s == "osar") return Estimator::SampleMean;
    if (s == "krr" || s == "osar_plus") return Estimator::Krr;
    throw ConfigError("unknown estimator: " + s);
}

std::string estimator_name(Estimator e) { return e == Estimator::Krr ? "krr" : "sample_mean"; }

Variant parse_variant(const std::string& s) {
    if (s == "plus_plus" || s == "pp") return Variant::PlusPlus;
    if (s == "fd" || s == "fixed_dense") return Variant::FixedDense;
    if (s == "ps" || s == "posterior_sample") return Variant::PosteriorSample;
    throw ConfigError("unknown variant: " + s);
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::PlusPlus: return "plus_plus";
        case Variant::FixedDense: return "fd";
        case Variant::PosteriorSample: return "ps";
    }
    return "plus_plus";
}

RunConfig RunConfig::from(const ProblemDefaults& d) {
    RunConfig c;
    c.batch = d.batch;
    c.epsilon = d.epsilon;
    c.m0 = d.m0;
    c.n0 = d.n0;
    c.budget = d.budget;
    return c;
}

void RunConfig::validate() const {
    if (batch == 0) throw ConfigError("batch size must be positive");
    if (!(epsilon >= 0.0) || epsilon >= 1.0) throw ConfigError("epsilon must lie in [0, 1)");
    if (n0 == 0) throw ConfigError("n0 must be at least 1");
    if (!(budget >= 0.0) || !std::isfinite(budget)) throw ConfigError("budget must be finite and >= 0");
    make_allocator(subroutine);  // throws on unknown names
}

double BudgetLedger::recount() const {
    double t = 0.0;
    for (std::size_t l = 0; l < costs.size(); ++l) t += costs[l] * static_cast<double>(data_counts[l]);
    std::size_t sims = 0;
    for (const auto& row : counts) sims = std::accumulate(row.begin(), row.end(), sims);
    sims = std::accumulate(map_counts.begin(), map_counts.end(), sims);
    return t + static_cast<double>(sims);
}

std::vector<std::size_t> BudgetLedger::point_totals() const {
    const std::size_t B = counts.empty() ? 0 : counts.front().size();
    std::vector<std::size_t> tot(B, 0);
    for (const auto& row : counts)
        for (std::size_t b = 0; b < B; ++b) tot[b] += row[b];
    if (!map_counts.empty()) tot.push_back(std::accumulate(map_counts.begin(), map_counts.end(), std::size_t{0}));
    return tot;
}

MpbEstimate estimate_mpb(const std::vector<std::vector<double>>& means, std::span<const double> pmf) {
    const std::size_t k = means.size();
    if (k == 0) throw InputError("estimate_mpb: no solutions");
    const std::size_t B = pmf.size();
    MpbEstimate e;
    e.owner.assign(B, 0);
    e.favorable.assign(k, {});
    e.preference.assign(k, 0.0);
    for (std::size_t b = 0; b < B; ++b) {
        std::size_t o = 0;
        for (std::size_t i = 1; i < k; ++i)
            if (means[i].at(b) < means[o][b]) o = i;
        e.owner[b] = o;
        e.favorable[o].push_back(b);
        e.preference[o] += pmf[b];
    }
    for (std::size_t i = 1; i < k; ++i)
        if (e.preference[i] > e.preference[e.best]) e.best = i;
    return e;
}

namespace {

// Running mean and variance of the outputs at one (solution, point) pair.
struct Welford {
    std::size_t n = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double y) {
        ++n;
        const double d = y - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (y - mean);
    }
    std::optional<double> var() const {
        if (n < 2) return std::nullopt;
        return m2 / static_cast<double>(n - 1);
    }
};

constexpr double kFallbackStd = 1.0;
constexpr double kMinVar = 1e-12;

std::size_t binomial(std::size_t n, double p, Rng& rng) {
    p = std::clamp(p, 0.0, 1.0);
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    return static_cast<std::size_t>(std::binomial_distribution<long>(static_cast<long>(n), p)(rng));
}

double init_cost(const Problem& p, const RunConfig& cfg, std::size_t points) {
    double c = 0.0;
    for (const auto& s : p.sources()) c += s.cost * static_cast<double>(cfg.m0);
    return c + static_cast<double>(points * p.num_solutions() * cfg.n0);
}

void check_common(const Problem& problem, const RunConfig& cfg, std::size_t points) {
    cfg.validate();
    const std::size_t L = problem.sources().size();
    if (cfg.epsilon * static_cast<double>(points + L) >= 1.0)
        throw ConfigError("epsilon*(B+L) must be below 1");
    if (cfg.budget < init_cost(problem, cfg, points))
        throw ConfigError("budget is below the initialization cost");
    if (problem.num_solutions() < 2) throw ConfigError("need at least two solutions");
}

void collect_data(const Problem& problem, PosteriorState& post, BudgetLedger& led, std::size_t l, std::size_t m,
                  Rng& rng) {
    if (m == 0) return;
    std::vector<double> z(m);
    for (auto& v : z) v = problem.draw_input(l, rng);
    post.absorb(l, z);
    led.data_counts[l] += m;
}

void fill_shares(const BudgetLedger& led, std::vector<double>& alpha, std::vector<double>& beta) {
    const double t = led.spent > 0.0 ? led.spent : 1.0;
    const auto tot = led.point_totals();
    alpha.resize(tot.size());
    for (std::size_t b = 0; b < tot.size(); ++b) alpha[b] = static_cast<double>(tot[b]) / t;
    beta.resize(led.costs.size());
    for (std::size_t l = 0; l < beta.size(); ++l)
        beta[l] = led.costs[l] * static_cast<double>(led.data_counts[l]) / t;
}

void record(RunResult& res, const RunConfig& cfg, const MpbEstimate& mpb) {
    Snapshot s;
    s.t = res.ledger.spent;
    s.best = mpb.best;
    s.preference = mpb.preference[mpb.best];
    std::vector<double> a;
    fill_shares(res.ledger, a, s.beta);
    if (cfg.trajectory_alpha) s.alpha = std::move(a);
    res.trajectory.push_back(std::move(s));
}

// Plug-in G* at one point from current means, stds and replication fractions.
double plug_in_rate(const std::vector<std::vector<double>>& means, const std::vector<std::vector<double>>& stds,
                    const std::vector<std::size_t>& counts, std::size_t b, std::size_t owner,
                    std::vector<GaussianArm>& arms) {
    const std::size_t k = means.size();
    const double tot = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
    arms.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        arms[i].mean = means[i][b];
        arms[i].std = stds[i][b];
        arms[i].fraction = tot > 0.0 ? static_cast<double>(counts[i]) / tot : 0.0;
    }
    return min_challenger_rate(arms, owner);
}

// KL row of a point relative to the MAP, each entry divided by the source cost.
std::vector<double> kl_row(const PosteriorState& post, std::span<const double> map, std::span<const double> th) {
    const std::size_t L = post.num_sources();
    std::vector<double> row(L);
    for (std::size_t l = 0; l < L; ++l) row[l] = empirical_kl(post, l, map[l], th[l]) / post.source(l).cost;
    return row;
}

}  // namespace

// ------------------------------------------------------------------ discrete

RunResult run_osar(const Problem& problem, const RunConfig& cfg, std::uint64_t seed) {
    const ParameterSupport& sup = problem.support();
    if (!sup.is_discrete()) throw ConfigError("run_osar needs a discrete support");
    const std::size_t B = sup.size(), k = problem.num_solutions(), L = problem.sources().size();
    check_common(problem, cfg, B);
    const auto allocator = make_allocator(cfg.subroutine);

    RunResult res;
    res.seed = seed;
    Rng rng = make_rng(seed, 0);
    BudgetLedger& led = res.ledger;
    led.total = cfg.budget;
    led.batch = cfg.batch;
    led.m0 = cfg.m0;
    led.n0 = cfg.n0;
    for (const auto& s : problem.sources()) led.costs.push_back(s.cost);
    led.data_counts.assign(L, 0);
    led.counts.assign(k, std::vector<std::size_t>(B, 0));

    PosteriorState post(problem.sources(), sup);
    for (std::size_t l = 0; l < L; ++l) collect_data(problem, post, led, l, cfg.m0, rng);

    std::vector<std::vector<Welford>> stats(k, std::vector<Welford>(B));
    std::vector<std::vector<double>> known(k, std::vector<double>(B, 0.0));
    bool all_known = true;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t b = 0; b < B; ++b) {
            const auto s = problem.known_std(i, sup.points[b]);
            if (s) known[i][b] = *s;
            else all_known = false;
        }
    auto simulate = [&](std::size_t i, std::size_t b) {
        const double y = problem.simulate(i, sup.points[b], rng);
        stats[i][b].add(y);
        ++led.counts[i][b];
        return y;
    };
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t r = 0; r < cfg.n0; ++r) simulate(i, b);
    led.spent = led.recount();

    std::vector<std::vector<double>> means(k, std::vector<double>(B)), stds(k, std::vector<double>(B));
    auto refresh_stds = [&] {
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t b = 0; b < B; ++b) {
                if (known[i][b] > 0.0) {
                    stds[i][b] = known[i][b];
                    continue;
                }
                const auto v = stats[i][b].var();
                stds[i][b] = v ? std::sqrt(std::max(*v, kMinVar)) : kFallbackStd;
            }
    };
    refresh_stds();

    std::vector<DiscreteKrr> krr;
    if (cfg.estimator == Estimator::Krr) {
        krr.reserve(k);
        const std::vector<double> ls = median_lengthscale(sup.points);
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<double> m0(B);
            std::vector<std::size_t> c0(B);
            for (std::size_t b = 0; b < B; ++b) {
                m0[b] = stats[i][b].mean;
                c0[b] = stats[i][b].n;
            }
            KrrHyper h = default_hyper(sup.points, m0);
            h.kernel.lengthscale = ls;
            krr.push_back(fit_discrete(m0, c0, stds[i], h.kernel, sup.points, h.gamma, h.kappa));
        }
    }
    auto refresh_means = [&] {
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t b = 0; b < B; ++b)
                means[i][b] = krr.empty() ? stats[i][b].mean : krr[i].mu_hat[static_cast<Eigen::Index>(b)];
    };

    std::vector<GaussianArm> arms;
    std::vector<std::size_t> col(k);
    PointAllocatorState pstate;
    AllocationInstance inst;
    inst.epsilon = cfg.epsilon;
    inst.kl.assign(B, std::vector<double>(L));
    inst.g_star.assign(B, 0.0);
    inst.favorable.assign(B, 0);

    for (;;) {
        refresh_means();
        const auto& pmf = post.pmf();
        const MpbEstimate mpb = estimate_mpb(means, pmf);
        record(res, cfg, mpb);
        if (led.spent >= led.total) {
            res.returned = mpb.best;
            break;
        }
        const auto map = sup.points[map_index(post)];
        for (std::size_t b = 0; b < B; ++b) {
            for (std::size_t i = 0; i < k; ++i) col[i] = led.counts[i][b];
            inst.g_star[b] = plug_in_rate(means, stds, col, b, mpb.owner[b], arms);
            inst.favorable[b] = mpb.owner[b] == mpb.best;
            inst.kl[b] = kl_row(post, map, sup.points[b]);
        }
        const AllocationSolution sol = solve_maxmin_lp(inst);

        double cost = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            const std::size_t m = binomial(cfg.batch, sol.beta[l] / led.costs[l], rng);
            collect_data(problem, post, led, l, m, rng);
            cost += led.costs[l] * static_cast<double>(m);
        }
        std::vector<std::size_t> nhat(B);
        for (std::size_t b = 0; b < B; ++b) nhat[b] = binomial(cfg.batch, sol.alpha[b], rng);
        for (std::size_t b = 0; b < B; ++b) {
            if (nhat[b] == 0) continue;
            pstate.counts.resize(k);
            pstate.means.resize(k);
            pstate.stds.resize(k);
            for (std::size_t i = 0; i < k; ++i) {
                pstate.counts[i] = led.counts[i][b];
                pstate.means[i] = means[i][b];
                pstate.stds[i] = stds[i][b];
            }
            const auto split = allocator->allocate_batch(pstate, nhat[b]);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t r = 0; r < split[i]; ++r) {
                    const double y = simulate(i, b);
                    if (!krr.empty() && all_known) update_discrete_inplace(krr[i], b, y);
                }
            cost += static_cast<double>(nhat[b]);
        }
        if (!all_known) {
            refresh_stds();
            // Unknown variances change Sigma itself: refit from scratch.
            for (std::size_t i = 0; i < krr.size(); ++i) {
                for (std::size_t b = 0; b < B; ++b) {
                    krr[i].sums[b] = stats[i][b].mean * static_cast<double>(stats[i][b].n);
                    krr[i].counts[b] = stats[i][b].n;
                    krr[i].noise[b] = stds[i][b] * stds[i][b];
                }
                refit_discrete(krr[i]);
            }
        }
        led.spent += cost;
        ++led.batches;
    }
    fill_shares(led, res.alpha, res.beta);
    res.overshoot = led.spent - led.total;
    return res;
}

// ---------------------------------------------------------------- continuous

namespace {

// Moves a MAP that coincides with a fixed anchor slightly into the box interior.
bool separate_from_anchors(std::vector<double>& th, const ParameterSupport& sup) {
    const std::size_t B = sup.size();
    for (std::size_t b = 0; b < B; ++b) {
        const auto a = sup.points[b];
        if (!std::equal(a.begin(), a.end(), th.begin())) continue;
        for (std::size_t d = 0; d < th.size(); ++d) {
            const double w = sup.upper[d] - sup.lower[d];
            th[d] += th[d] < sup.upper[d] ? 1e-9 * w : -1e-9 * w;
        }
        return true;
    }
    return false;
}

}  // namespace

RunResult run_osar_continuous(const Problem& problem, const RunConfig& cfg, std::uint64_t seed) {
    const ParameterSupport& sup = problem.support();
    if (sup.is_discrete()) throw ConfigError("run_osar_continuous needs a continuous support");
    const std::size_t B = sup.size(), k = problem.num_solutions(), L = problem.sources().size();
    const std::size_t P = B + 1;  // fixed anchors and the MAP
    check_common(problem, cfg, P);
    const PointSet* fixed_design = problem.dense_design();
    if (cfg.variant == Variant::FixedDense && (!fixed_design || fixed_design->empty()))
        throw ConfigError("fixed-dense variant needs a non-empty design");
    if (cfg.variant == Variant::PosteriorSample && cfg.design_size == 0)
        throw ConfigError("posterior-sampling variant needs a positive design size");
    const auto allocator = make_allocator(cfg.subroutine);

    RunResult res;
    res.seed = seed;
    Rng rng = make_rng(seed, 0);
    BudgetLedger& led = res.ledger;
    led.total = cfg.budget;
    led.batch = cfg.batch;
    led.m0 = cfg.m0;
    led.n0 = cfg.n0;
    for (const auto& s : problem.sources()) led.costs.push_back(s.cost);
    led.data_counts.assign(L, 0);
    led.counts.assign(k, std::vector<std::size_t>(B, 0));
    led.map_counts.assign(k, 0);

    PosteriorState post(problem.sources(), sup);
    for (std::size_t l = 0; l < L; ++l) collect_data(problem, post, led, l, cfg.m0, rng);

    std::vector<std::vector<Welford>> stats(k, std::vector<Welford>(B));
    // Per-solution MAP outputs in arrival order (for the recent-half variance).
    std::vector<std::vector<double>> map_y(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t r = 0; r < cfg.n0; ++r) {
                stats[i][b].add(problem.simulate(i, sup.points[b], rng));
                ++led.counts[i][b];
            }

    std::vector<double> map = map_estimate(post);
    if (separate_from_anchors(map, sup)) ++res.map_perturbations;
    PointSet anchors = sup.points;
    anchors.push_back(map);

    // Hyperparameters from the initial anchor means.
    const std::vector<double> ls = median_lengthscale(sup.points);
    std::vector<NystromKrr> krr;
    krr.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> m0(B);
        for (std::size_t b = 0; b < B; ++b) m0[b] = stats[i][b].mean;
        KrrHyper h = default_hyper(sup.points, m0);
        h.kernel.lengthscale = ls;
        krr.emplace_back(h.kernel, anchors, h.gamma, h.kappa, NystromKrr::Solver::Cod);
    }

    std::vector<std::vector<double>> stds(k, std::vector<double>(P, kFallbackStd));
    std::vector<std::vector<char>> known_at(k, std::vector<char>(B, 0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t b = 0; b < B; ++b)
            if (const auto s = problem.known_std(i, sup.points[b])) {
                stds[i][b] = *s;
                known_at[i][b] = 1;
            }
    const bool map_known = problem.known_std(0, map).has_value();

    auto anchor_var = [&](std::size_t i, std::size_t b) {
        if (known_at[i][b]) return stds[i][b] * stds[i][b];
        const auto v = stats[i][b].var();
        return v ? std::max(*v, kMinVar) : kFallbackStd * kFallbackStd;
    };
    // Most recent ceil(N/2) MAP outputs; needs two before it replaces the fallback.
    auto map_var = [&](std::size_t i) {
        const auto& y = map_y[i];
        const std::size_t h = (y.size() + 1) / 2;
        if (h < 2) {
            double s = 0.0;
            for (std::size_t b = 0; b < B; ++b) s += anchor_var(i, b);
            return s / static_cast<double>(B);
        }
        Welford w;
        for (std::size_t r = y.size() - h; r < y.size(); ++r) w.add(y[r]);
        return std::max(*w.var(), kMinVar);
    };
    auto push_anchor_stats = [&](std::size_t i, std::size_t b) {
        const double v = anchor_var(i, b);
        stds[i][b] = std::sqrt(v);
        const double n = static_cast<double>(stats[i][b].n);
        krr[i].set_anchor_stats(b, n / v, n * (stats[i][b].mean - krr[i].gamma()) / v);
    };
    auto simulate_map = [&](std::size_t i) {
        const double y = problem.simulate(i, map, rng);
        map_y[i].push_back(y);
        ++led.map_counts[i];
        if (map_known) {
            const double s = *problem.known_std(i, map);
            krr[i].add_map_observation(y, s * s);
        } else {
            krr[i].add_map_observation(y, 1.0);  // rescaled by the shared variance below
        }
    };
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t b = 0; b < B; ++b) push_anchor_stats(i, b);
        for (std::size_t r = 0; r < cfg.n0; ++r) simulate_map(i);
    }
    auto refresh_map_std = [&] {
        for (std::size_t i = 0; i < k; ++i) {
            if (map_known) {
                stds[i][B] = *problem.known_std(i, map);
            } else {
                const double v = map_var(i);
                stds[i][B] = std::sqrt(v);
                krr[i].set_history_scale(1.0 / v);
            }
        }
    };
    refresh_map_std();
    led.spent = led.recount();

    // Unit-signal cross Gram between the fixed design and the fixed anchors; the
    // lengthscale is shared by every solution.
    SeKernel unit_kernel;
    unit_kernel.lengthscale = ls;
    Eigen::MatrixXd fixed_cross;
    if (cfg.variant == Variant::FixedDense) fixed_cross = gram(unit_kernel, *fixed_design, sup.points);

    std::vector<std::vector<double>> means(k, std::vector<double>(P));
    std::vector<GaussianArm> arms;
    std::vector<std::size_t> col(k);
    PointAllocatorState pstate;
    AllocationInstance inst;
    inst.epsilon = cfg.epsilon;
    inst.kl.assign(P, std::vector<double>(L));
    inst.g_star.assign(P, 0.0);
    inst.favorable.assign(P, 0);
    PointSet design;
    Eigen::MatrixXd cross;
    std::vector<Eigen::VectorXd> dense_pred(k);

    for (;;) {
        std::vector<double> next = map_estimate(post);
        if (separate_from_anchors(next, sup)) ++res.map_perturbations;
        if (next != map) {
            map = next;
            std::copy(map.begin(), map.end(), anchors[B].begin());
            for (auto& m : krr) m.move_map(map);
            refresh_map_std();
        }
        for (std::size_t i = 0; i < k; ++i) {
            const Eigen::VectorXd p = krr[i].predict_anchors();
            for (std::size_t b = 0; b < P; ++b) means[i][b] = p[static_cast<Eigen::Index>(b)];
        }
        const std::vector<double> pmf = post.pmf_over(anchors);
        const MpbEstimate mpb = estimate_mpb(means, pmf);
        record(res, cfg, mpb);
        if (led.spent >= led.total) {
            res.returned = mpb.best;
            break;
        }
        for (std::size_t b = 0; b < P; ++b) {
            for (std::size_t i = 0; i < k; ++i) col[i] = b < B ? led.counts[i][b] : led.map_counts[i];
            inst.g_star[b] = plug_in_rate(means, stds, col, b, mpb.owner[b], arms);
            inst.favorable[b] = mpb.owner[b] == mpb.best;
            inst.kl[b] = kl_row(post, map, anchors[b]);
        }
        inst.extra_kl.clear();
        if (cfg.variant != Variant::PlusPlus) {
            const PointSet* dset = fixed_design;
            if (cfg.variant == Variant::PosteriorSample) {
                design = sample_posterior(post, cfg.design_size, rng);
                dset = &design;
                cross = gram(unit_kernel, design, sup.points);
            }
            const Eigen::MatrixXd& kx = cfg.variant == Variant::FixedDense ? fixed_cross : cross;
            const std::size_t nd = dset->size();
            Eigen::VectorXd kmap(static_cast<Eigen::Index>(nd));
            for (std::size_t d = 0; d < nd; ++d) kmap[static_cast<Eigen::Index>(d)] = unit_kernel((*dset)[d], map);
            for (std::size_t i = 0; i < k; ++i) {
                const Eigen::VectorXd& c = krr[i].coefficients();
                const double sig = krr[i].kernel().signal;
                dense_pred[i] = (sig * (kx * c.head(static_cast<Eigen::Index>(B)) + kmap * c[static_cast<Eigen::Index>(B)]))
                                    .array() +
                                krr[i].gamma();
            }
            for (std::size_t d = 0; d < nd; ++d) {
                const Eigen::Index di = static_cast<Eigen::Index>(d);
                std::size_t o = 0;
                for (std::size_t i = 1; i < k; ++i)
                    if (dense_pred[i][di] < dense_pred[o][di]) o = i;
                if (o != mpb.best) inst.extra_kl.push_back(kl_row(post, map, (*dset)[d]));
            }
        }
        const AllocationSolution sol = solve_maxmin_lp(inst);

        double cost = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            const std::size_t m = binomial(cfg.batch, sol.beta[l] / led.costs[l], rng);
            collect_data(problem, post, led, l, m, rng);
            cost += led.costs[l] * static_cast<double>(m);
        }
        std::vector<std::size_t> nhat(P);
        for (std::size_t b = 0; b < P; ++b) nhat[b] = binomial(cfg.batch, sol.alpha[b], rng);
        for (std::size_t b = 0; b < P; ++b) {
            if (nhat[b] == 0) continue;
            pstate.counts.resize(k);
            pstate.means.resize(k);
            pstate.stds.resize(k);
            for (std::size_t i = 0; i < k; ++i) {
                pstate.counts[i] = b < B ? led.counts[i][b] : led.map_counts[i];
                pstate.means[i] = means[i][b];
                pstate.stds[i] = stds[i][b];
            }
            const auto split = allocator->allocate_batch(pstate, nhat[b]);
            for (std::size_t i = 0; i < k; ++i) {
                if (split[i] == 0) continue;
                if (b == B) {
                    for (std::size_t r = 0; r < split[i]; ++r) simulate_map(i);
                    continue;
                }
                for (std::size_t r = 0; r < split[i]; ++r) {
                    stats[i][b].add(problem.simulate(i, sup.points[b], rng));
                    ++led.counts[i][b];
                }
                push_anchor_stats(i, b);
            }
            cost += static_cast<double>(nhat[b]);
        }
        refresh_map_std();
        led.spent += cost;
        ++led.batches;
    }
    fill_shares(led, res.alpha, res.beta);
    res.overshoot = led.spent - led.total;
    return res;
}

RunResult run(const Problem& problem, const RunConfig& cfg, std::uint64_t seed) {
    return problem.support().is_discrete() ? run_osar(problem, cfg, seed) : run_osar_continuous(problem, cfg, seed);
}

}  // namespace osar
