// Acceptance checks, one PASS/FAIL line per criterion. Optional arguments pick
// a subset by number, e.g. `osar_acceptance 3 4 5`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "osar/allocation.hpp"
#include "osar/harness.hpp"
#include "osar/input_models.hpp"
#include "osar/supply_chain.hpp"
#include "osar/validation.hpp"

using namespace osar;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

ExperimentConfig synthetic_config(const std::string& scenario, const std::string& algorithm, bool continuous = false) {
    nlohmann::json j;
    j["problem"] = {{"id", "synthetic"}, {"scenario", scenario}, {"continuous", continuous}};
    j["algorithm"] = algorithm;
    j["runs"] = 1000;
    j["seed"] = 1;
    return ExperimentConfig::from_json(j);
}

std::string suite_line(const SuiteResult& r) {
    return r.name + " " + (r.passed() ? "ok" : "failed") + " (" + std::to_string(r.failures) + "/" +
           std::to_string(r.cases) + " failures; " + r.detail + ")";
}

// ------------------------------------------------------------------ criteria

Verdict baseline_regression(double& osar_plus_pcs) {
    const auto a = run_experiment(synthetic_config("baseline", "osar"));
    const auto b = run_experiment(synthetic_config("baseline", "osar_plus"));
    osar_plus_pcs = b.pcs;
    const bool ok = std::abs(a.pcs - 0.972) <= 0.03 && std::abs(b.pcs - 0.981) <= 0.03 && b.pcs >= a.pcs - 0.01;
    return {ok, "PCS(OSAR) = " + fmt("%.3f", a.pcs) + " vs 0.972, PCS(OSAR+) = " + fmt("%.3f", b.pcs) +
                    " vs 0.981, R = 1000, mean m(OSAR+) = (" + fmt("%.0f", b.mean_m[0]) + ", " +
                    fmt("%.0f", b.mean_m[1]) + ")"};
}

Verdict scenario_ordering(std::optional<double> baseline_plus) {
    const double s4a = run_experiment(synthetic_config("s4", "osar")).pcs;
    const double s4b = run_experiment(synthetic_config("s4", "osar_plus")).pcs;
    const double base = baseline_plus ? *baseline_plus : run_experiment(synthetic_config("baseline", "osar_plus")).pcs;
    const double s1 = run_experiment(synthetic_config("s1", "osar_plus")).pcs;
    const double s2 = run_experiment(synthetic_config("s2", "osar_plus")).pcs;
    const double s3 = run_experiment(synthetic_config("s3", "osar_plus")).pcs;
    const bool ok = std::abs(s4a - 1.0) <= 0.005 && std::abs(s4b - 1.0) <= 0.005 && s3 <= std::min({base, s1, s2});
    return {ok, "S4 PCS = " + fmt("%.3f", s4a) + " / " + fmt("%.3f", s4b) + "; OSAR+ baseline/S1/S2/S3 = " +
                    fmt("%.3f", base) + "/" + fmt("%.3f", s1) + "/" + fmt("%.3f", s2) + "/" + fmt("%.3f", s3)};
}

Verdict eps_gap() {
    const auto r = suite_eps_gap(500, 7);
    return {r.passed(), suite_line(r)};
}

Verdict zero_eps_support() {
    const auto r = suite_zero_eps_support(500, 7);
    return {r.passed(), suite_line(r)};
}

Verdict krr_oracles() {
    const auto a = suite_krr_recursion(200, 50, 7);
    const auto b = suite_nystrom_update(200, 50, 7);
    const auto c = suite_nystrom_gradient(20, 7);
    return {a.passed() && b.passed() && c.passed(), suite_line(a) + "; " + suite_line(b) + "; " + suite_line(c)};
}

Verdict toy_convergence() {
    const TableProblem toy = TableProblem::toy();
    RunConfig cfg = RunConfig::from(toy.defaults());
    cfg.budget = 1e5;
    cfg.trajectory_alpha = false;
    const TargetRatios t = target_ratios(toy, cfg.epsilon);
    double sum = 0.0, worst = 0.0;
    const int seeds = 20;
    for (int s = 1; s <= seeds; ++s) {
        const RunResult r = run(toy, cfg, static_cast<std::uint64_t>(s));
        double d = 0.0;
        for (std::size_t l = 0; l < t.beta.size(); ++l) d = std::max(d, std::abs(r.beta[l] - t.beta[l]));
        sum += d;
        worst = std::max(worst, d);
    }
    const double mean = sum / seeds;
    return {mean <= 0.05, "mean |beta_T - beta*|_inf = " + fmt("%.4f", mean) + " (worst seed " + fmt("%.4f", worst) +
                              "), beta* = (" + fmt("%.4f", t.beta[0]) + ", " + fmt("%.4f", t.beta[1]) + ")"};
}

Verdict balance() {
    const auto r = suite_balance(20, 100000, 7);
    return {r.passed(), suite_line(r)};
}

Verdict continuous_consistency() {
    const auto problem = make_problem(synthetic_config("baseline", "osar_fd", true).problem);
    std::string detail;
    bool ok = true;
    for (const char* alg : {"osar_fd", "osar_ps"}) {
        RunConfig cfg = synthetic_config("baseline", alg, true).run;
        cfg.budget = 2e4;
        cfg.trajectory_alpha = false;
        int hits = 0;
        for (int s = 1; s <= 50; ++s) hits += run(*problem, cfg, static_cast<std::uint64_t>(s)).returned == problem->true_best();
        ok = ok && hits >= 48;
        detail += std::string(alg) + " " + std::to_string(hits) + "/50 at T = 2e4; ";
    }
    const double pp = run_experiment(synthetic_config("baseline", "osar_pp", true)).pcs;
    const double fd = run_experiment(synthetic_config("baseline", "osar_fd", true)).pcs;
    ok = ok && (1.0 - pp) > (1.0 - fd);
    detail += "T = 4000, R = 1000: 1-PCS(OSAR++) = " + fmt("%.3f", 1.0 - pp) + ", 1-PCS(OSAR+FD) = " + fmt("%.3f", 1.0 - fd);
    return {ok, detail};
}

Verdict supply_chain_truth() {
    const Routing routing;
    const auto th0 = supply_chain_theta0();
    Rng rng = make_rng(2024, 0);
    const long n = 1000000;
    std::vector<double> mean(6), var(6);
    for (int c = 1; c <= 6; ++c) {
        double s = 0.0, s2 = 0.0;
        for (long r = 0; r < n; ++r) {
            const double y = simulate_supply_chain(c, th0, routing, rng);
            s += y;
            s2 += y * y;
        }
        mean[c - 1] = s / n;
        var[c - 1] = (s2 / n - mean[c - 1] * mean[c - 1]) * n / (n - 1);
    }
    std::vector<int> order{0, 1, 2, 3, 4, 5};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return mean[a] > mean[b]; });
    const int best = order[0], second = order[1];
    const double z = (mean[best] - mean[second]) / std::sqrt(var[best] / n + var[second] / n);

    // Monotonicity: lower contamination everywhere delivers more.
    const std::vector<double> lo(kNumArcs, 0.1), hi(kNumArcs, 0.3);
    double sl = 0, ql = 0, sh = 0, qh = 0;
    const long m = 10000;
    for (long r = 0; r < m; ++r) {
        const double a = simulate_supply_chain(best + 1, lo, routing, rng);
        const double b = simulate_supply_chain(best + 1, hi, routing, rng);
        sl += a, ql += a * a, sh += b, qh += b * b;
    }
    const double ml = sl / m, mh = sh / m;
    const double mono = (ml - mh) / std::sqrt((ql / m - ml * ml) / m + (qh / m - mh * mh) / m);
    const auto cons = suite_supply_chain(10000, 7);

    const bool ok = best == 1 && z > 4.0 && mono > 4.0 && cons.passed();
    return {ok, "best center " + std::to_string(best + 1) + " (" + fmt("%.2f", mean[best]) + ") vs runner-up " +
                    std::to_string(second + 1) + " (" + fmt("%.2f", mean[second]) + "), margin " + fmt("%.1f", z) +
                    " pooled SE; monotonicity " + fmt("%.1f", mono) + " SE; " + suite_line(cons)};
}

// Posterior of a two-point support under exactly known means: the only error
// left is input-data error, so 1 - preference is the adversarial point's mass.
Verdict posterior_rate() {
    const std::vector<InputSourceModel> sources{InputSourceModel::exponential(1.0), InputSourceModel::exponential(2.0)};
    const PointSet pts(2, {1.6, 1.4, 1.8, 1.6});
    const std::vector<double> beta{0.5, 0.5};
    double rate = 0.0;
    for (std::size_t l = 0; l < 2; ++l) rate += beta[l] / sources[l].cost * kl_divergence(sources[l], pts[0][l], pts[1][l]);

    auto log_tail = [](const PosteriorState& st) {
        const auto& lp = st.log_pmf();
        const double top = std::max(lp[0], lp[1]);
        return lp[1] - (top + std::log(std::exp(lp[0] - top) + std::exp(lp[1] - top)));
    };
    const double t1 = 1e4, t2 = 1e5;
    double slope = 0.0;
    const int seeds = 50;
    for (int s = 0; s < seeds; ++s) {
        Rng rng = make_rng(4242, static_cast<std::uint64_t>(s));
        PosteriorState st(sources, ParameterSupport::discrete(pts));
        double at1 = 0.0;
        for (double t : {t1, t2}) {
            for (std::size_t l = 0; l < 2; ++l) {
                const auto want = static_cast<std::size_t>(std::floor(beta[l] * t / sources[l].cost));
                std::vector<double> z(want - st.data(l).count());
                for (auto& v : z) v = draw_observation(sources[l], pts[0][l], rng);
                st.absorb(l, z);
            }
            if (t == t1) at1 = log_tail(st);
            else slope += -(log_tail(st) - at1) / (t2 - t1);
        }
    }
    slope /= seeds;
    const double rel = std::abs(slope - rate) / rate;
    return {rel <= 0.25, "empirical slope " + fmt("%.6g", slope) + " vs rate " + fmt("%.6g", rate) + " (relative error " +
                             fmt("%.3f", rel) + ")"};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> pick;
    for (int a = 1; a < argc; ++a) pick.insert(std::atoi(argv[a]));
    auto wanted = [&](int c) { return pick.empty() || pick.count(c); };

    std::optional<double> baseline_plus;
    const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
        {1, [&] {
             double b = 0.0;
             auto v = baseline_regression(b);
             baseline_plus = b;
             return v;
         }},
        {2, [&] { return scenario_ordering(baseline_plus); }},
        {3, eps_gap},
        {4, zero_eps_support},
        {5, krr_oracles},
        {6, toy_convergence},
        {7, balance},
        {8, continuous_consistency},
        {9, supply_chain_truth},
        {10, posterior_rate},
    };
    int failed = 0;
    for (const auto& [id, fn] : criteria) {
        if (!wanted(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d: %s  %s  [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str(), sec);
        std::fflush(stdout);
        failed += !v.pass;
    }
    return failed ? 1 : 0;
}
