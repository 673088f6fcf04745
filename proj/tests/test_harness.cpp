#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "osar/allocation.hpp"
#include "osar/common.hpp"
#include "osar/harness.hpp"
#include "osar/input_models.hpp"
#include "osar/problems.hpp"

using namespace osar;

namespace {

ExperimentConfig toy_config(std::size_t runs, double budget) {
    ExperimentConfig c;
    c.problem.id = "toy";
    c.run = RunConfig::from(make_problem(c.problem)->defaults());
    c.run.budget = budget;
    c.runs = runs;
    c.base_seed = 11;
    c.threads = 1;
    return c;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char ch : s) n += ch == '\n';
    return n;
}

}  // namespace

TEST_CASE("single macrorun gives PCS 0 or 1 with zero standard error") {
    const auto rep = run_experiment(toy_config(1, 20000));
    CHECK((rep.pcs == 0.0 || rep.pcs == 1.0));
    CHECK(rep.se == 0.0);
    CHECK(pcs_standard_error(0.5, 100) == doctest::Approx(0.05));
}

TEST_CASE("reports are deterministic and independent of the worker count") {
    auto c = toy_config(12, 1500);
    c.budget_grid = {500, 1000, 1500};
    const auto a = run_experiment(c);
    const auto b = run_experiment(c);
    CHECK(report_to_json(a).dump() == report_to_json(b).dump());
    c.threads = 3;
    auto d = run_experiment(c);
    d.config.threads = 1;
    CHECK(d.returned == a.returned);
    CHECK(d.pcs == a.pcs);
    CHECK(d.mean_m == a.mean_m);
}

TEST_CASE("report JSON round trip and CSV") {
    auto c = toy_config(4, 1500);
    c.budget_grid = {500, 1500};
    const auto r = run_experiment(c);
    const auto back = report_from_json(report_to_json(r));
    CHECK(back == r);
    const std::string csv = report_csv(r);
    CHECK(csv.rfind("budget,pcs,se,log_one_minus_pcs", 0) == 0);
    CHECK(count_lines(csv) == 3);

    c.budget_grid.clear();
    const auto empty = run_experiment(c);
    CHECK(count_lines(report_csv(empty)) == 1);

    const auto dir = std::filesystem::temp_directory_path() / "osar_harness_test";
    std::filesystem::create_directories(dir);
    const std::string stem = (dir / "toy").string();
    export_report(r, stem);
    std::ifstream jf(stem + ".json"), cf(stem + ".csv");
    CHECK(jf.good());
    CHECK(cf.good());
    std::stringstream ss;
    ss << jf.rdbuf();
    CHECK(report_from_json(nlohmann::json::parse(ss.str())) == r);
    std::filesystem::remove_all(dir);
}

TEST_CASE("config parsing applies problem defaults, then overrides") {
    const auto j = nlohmann::json::parse(R"({
        "problem": {"id": "synthetic", "scenario": "s5"},
        "algorithm": "osar_plus",
        "run": {"batch": 25},
        "runs": 7,
        "seed": 3,
        "budget_grid": [2000, 4000]
    })");
    const auto c = ExperimentConfig::from_json(j);
    CHECK(c.problem.scenario == Scenario::S5);
    CHECK(c.run.epsilon == doctest::Approx(1e-3));
    CHECK(c.run.estimator == Estimator::Krr);
    CHECK(c.run.batch == 25);
    CHECK(c.runs == 7);
    CHECK(c.base_seed == 3);
    CHECK_NOTHROW(c.validate());
    CHECK(ExperimentConfig::from_json(c.to_json()).to_json() == c.to_json());

    CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(R"({"algorithm": "bico"})")), ConfigError);
    auto bad = c;
    bad.budget_grid = {3000, 2000};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad.budget_grid = {5000};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.runs = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    ProblemSpec unknown;
    unknown.id = "queue";
    CHECK_THROWS_AS(make_problem(unknown), ConfigError);
}

TEST_CASE("target ratios: baseline favors the first source") {
    ProblemSpec s;
    const auto p = make_problem(s);
    const auto t = target_ratios(*p, 1e-4);
    CHECK(t.beta[0] > t.beta[1]);
    double sum = std::accumulate(t.alpha.begin(), t.alpha.end(), 0.0) + t.beta[0] + t.beta[1];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(target_ratios(*p, 0.3), InfeasibleError);
}

TEST_CASE("target ratios on a two-point instance match the hand solution") {
    // theta0 = 1 favors solution 0; theta = 2 favors solution 1.
    TableProblem t("two_point", {InputSourceModel::exponential(1.0)}, PointSet(1, {1.0, 2.0}), {{0, 1}, {1, 0}},
                   {{1, 1}, {1, 1}}, 0);
    const double eps = 1e-3;
    const auto r = target_ratios(t, eps);
    // beta * KL = alpha_0 * g with alpha_0 = 1 - eps - beta, g = 1/8
    const double kl = std::log(2.0) - 0.5, g = 0.125;
    const double beta = g * (1.0 - eps) / (kl + g);
    CHECK(r.beta[0] == doctest::Approx(beta).epsilon(1e-9));
    CHECK(r.alpha[0] == doctest::Approx(1.0 - eps - beta).epsilon(1e-9));
    CHECK(r.alpha[1] == doctest::Approx(eps).epsilon(1e-9));
    CHECK(r.objective == doctest::Approx(beta * kl).epsilon(1e-9));
}

TEST_CASE("flooring costs at most the epsilon fraction of the target objective") {
    const TableProblem toy = TableProblem::toy();
    TableProblem two("two_point", {InputSourceModel::exponential(1.0)}, PointSet(1, {1.0, 2.0}), {{0, 1}, {1, 0}},
                     {{1, 1}, {1, 1}}, 0);
    SyntheticProblem base(Scenario::Baseline, false);
    for (const Problem* p : {static_cast<const Problem*>(&toy), static_cast<const Problem*>(&two),
                             static_cast<const Problem*>(&base)}) {
        const double dims = static_cast<double>(p->support().size() + p->sources().size());
        const double v0 = target_ratios(*p, 0.0).objective;
        for (double eps : {1e-4, 1e-3}) CHECK(target_ratios(*p, eps).objective >= (1.0 - eps * dims) * v0 - 1e-12);
    }
}

TEST_CASE("PCS grows with the budget on the baseline") {
    nlohmann::json j;
    j["problem"] = {{"id", "synthetic"}, {"scenario", "baseline"}};
    j["algorithm"] = "osar";
    j["runs"] = 1000;
    j["seed"] = 1;
    j["budget_grid"] = {1000, 4000};
    const auto rep = run_experiment(ExperimentConfig::from_json(j));
    REQUIRE(rep.grid_pcs.size() == 2);
    const double pooled = std::sqrt(rep.grid_se[0] * rep.grid_se[0] + rep.grid_se[1] * rep.grid_se[1]);
    CHECK(rep.grid_pcs[1] - rep.grid_pcs[0] >= 3.0 * pooled);
}

TEST_CASE("target ratios need known output variances") {
    ProblemSpec s;
    s.id = "supply_chain";
    s.anchors = 10;
    s.design_size = 50;
    const auto p = make_problem(s);
    CHECK_THROWS(target_ratios(*p, 1e-4));
}

TEST_CASE("build stamp is present") { CHECK_FALSE(build_stamp().empty()); }
