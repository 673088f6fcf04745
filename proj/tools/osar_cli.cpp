// Command-line front end: run experiments, print target ratios, run property suites.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "osar/harness.hpp"
#include "osar/simd.hpp"
#include "osar/validation.hpp"

namespace {

void pin_simd(const std::string& isa) {
    if (isa.empty()) return;
    const bool ok = isa == "scalar" ? osar::simd::force(osar::simd::Isa::Scalar)
                                    : osar::simd::force(osar::simd::Isa::Avx2);
    if (!ok) throw osar::ConfigError("SIMD variant unavailable: " + isa);
}

void print_vec(const char* name, const std::vector<double>& v) {
    std::printf("%s:", name);
    for (double x : v) std::printf(" %.6g", x);
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OSAR ranking and selection under input uncertainty"};
    app.require_subcommand(1);
    std::string isa;
    app.add_option("--simd", isa, "Pin kernels: scalar or avx2")->check(CLI::IsMember({"scalar", "avx2"}));

    auto* run = app.add_subcommand("run", "Run a macrorun experiment from a JSON config");
    std::string config_path, out_stem;
    std::size_t runs = 0, threads = 0;
    std::uint64_t seed = 0;
    bool seed_set = false, quiet = false;
    run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--runs", runs, "Macrorun count override");
    run->add_option("--seed", seed, "Base seed override")->each([&](const std::string&) { seed_set = true; });
    run->add_option("--out", out_stem, "Write <stem>.csv and <stem>.json");
    run->add_option("--threads", threads, "Worker threads (0: all cores)");
    run->add_flag("--quiet", quiet, "No progress output");

    auto* targets = app.add_subcommand("targets", "Print ground-truth epsilon-optimal ratios");
    std::string problem_id = "synthetic", scenario = "baseline";
    bool continuous = false;
    double epsilon = -1.0;
    std::size_t dense = 2000;
    targets->add_option("--problem", problem_id, "synthetic or toy")->check(CLI::IsMember({"synthetic", "toy"}));
    targets->add_option("--scenario", scenario, "baseline, s1..s5");
    targets->add_flag("--continuous", continuous, "Continuous support");
    targets->add_option("--epsilon", epsilon, "Floor (default: the problem's)");
    targets->add_option("--dense", dense, "Adversarial grid intervals per axis (continuous)");

    auto* validate = app.add_subcommand("validate", "Run the property suites");
    bool quick = false;
    std::uint64_t vseed = 7;
    validate->add_flag("--quick", quick, "Smaller suites");
    validate->add_option("--seed", vseed, "Suite seed");

    CLI11_PARSE(app, argc, argv);

    try {
        pin_simd(isa);
        if (*run) {
            std::ifstream f(config_path);
            const nlohmann::json j = nlohmann::json::parse(f);
            osar::ExperimentConfig cfg = osar::ExperimentConfig::from_json(j);
            if (runs) cfg.runs = runs;
            if (seed_set) cfg.base_seed = seed;
            if (threads) cfg.threads = threads;
            osar::Progress progress;
            if (!quiet)
                progress = [](std::size_t d, std::size_t n) {
                    if (d == n || d % 50 == 0) std::fprintf(stderr, "\r%zu/%zu runs", d, n);
                    if (d == n) std::fprintf(stderr, "\n");
                };
            const osar::AggregateReport rep = osar::run_experiment(cfg, progress);
            std::printf("problem %s, %zu runs, true best %zu\n", cfg.problem.id.c_str(), rep.runs, rep.true_best + 1);
            std::printf("PCS %.4f (SE %.4f)\n", rep.pcs, rep.se);
            print_vec("mean m", rep.mean_m);
            std::printf("mean n: %.1f, mean spend %.1f, %.2f s/run\n", rep.mean_n, rep.mean_spent,
                        rep.seconds / static_cast<double>(rep.runs));
            for (std::size_t g = 0; g < cfg.budget_grid.size(); ++g)
                std::printf("T=%g PCS %.4f (SE %.4f)\n", cfg.budget_grid[g], rep.grid_pcs[g], rep.grid_se[g]);
            if (!out_stem.empty()) osar::export_report(rep, out_stem);
            return 0;
        }
        if (*targets) {
            osar::ProblemSpec spec;
            spec.id = problem_id;
            spec.continuous = continuous;
            spec.scenario = osar::parse_scenario(scenario);
            const auto p = osar::make_problem(spec);
            const double eps = epsilon >= 0.0 ? epsilon : p->defaults().epsilon;
            const osar::TargetRatios t = osar::target_ratios(*p, eps, dense);
            std::printf("problem %s, epsilon %g\n", p->id().c_str(), eps);
            print_vec("beta*", t.beta);
            print_vec("alpha*", t.alpha);
            std::printf("objective %.10g, adversarial dense rows %zu\n", t.objective, t.adversarial_rows);
            return 0;
        }
        if (*validate) {
            bool all = true;
            std::printf("kernels: %s\n", std::string(osar::simd::name(osar::simd::active().isa)).c_str());
            for (const auto& r : osar::run_all_suites(vseed, quick)) {
                std::printf("%-18s %s  cases=%zu failures=%zu  %s\n", r.name.c_str(), r.passed() ? "PASS" : "FAIL",
                            r.cases, r.failures, r.detail.c_str());
                all = all && r.passed();
            }
            return all ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
