#pragma once
// Experiment orchestration: seeded macrorun fans, PCS aggregation, ground-truth
// target ratios, and CSV/JSON export.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "osar/osar.hpp"
#include "osar/problems.hpp"
#include "osar/supply_chain.hpp"

namespace osar {

struct ProblemSpec {
    std::string id = "synthetic";  // synthetic | toy | supply_chain
    bool continuous = false;
    Scenario scenario = Scenario::Baseline;
    std::optional<std::vector<double>> theta0;   // synthetic override
    std::size_t dense_intervals = 50;            // synthetic continuous design
    std::optional<Routing> routing;              // supply chain override
    std::size_t anchors = 100, design_size = 10000, reps = 10;
    std::uint64_t anchor_seed = 20240101;

    bool operator==(const ProblemSpec&) const = default;
};

std::unique_ptr<Problem> make_problem(const ProblemSpec& spec);

struct ExperimentConfig {
    ProblemSpec problem;
    RunConfig run;
    std::size_t runs = 1000;
    std::uint64_t base_seed = 1;
    std::vector<double> budget_grid;  // PCS curve gridpoints; empty means none
    std::size_t threads = 0;          // 0: hardware concurrency

    void validate() const;
    // Problem defaults first, then any keys present in `j`.
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct AggregateReport {
    ExperimentConfig config;
    std::string build;
    std::size_t true_best = 0;
    std::size_t runs = 0;
    double pcs = 0.0, se = 0.0;
    std::vector<double> grid_pcs, grid_se;  // per budget gridpoint
    std::vector<double> mean_m;             // mean data count per source at the end
    double mean_n = 0.0;                    // mean simulation replications
    std::vector<double> mean_alpha, mean_beta;
    double mean_spent = 0.0;
    std::vector<std::size_t> returned;      // per run, in run-index order
    double seconds = 0.0;                   // wall clock, not serialized

    bool operator==(const AggregateReport& o) const;
};

double pcs_standard_error(double pcs, std::size_t runs);

using Progress = std::function<void(std::size_t done, std::size_t total)>;
AggregateReport run_experiment(const ExperimentConfig& cfg, const Progress& progress = {});

nlohmann::json report_to_json(const AggregateReport& r);
AggregateReport report_from_json(const nlohmann::json& j);
// Columns: budget, pcs, se, log_one_minus_pcs.
std::string report_csv(const AggregateReport& r);
void export_report(const AggregateReport& r, const std::string& stem);

struct TargetRatios {
    std::vector<double> alpha, beta;
    double objective = 0.0;
    std::size_t adversarial_rows = 0;
};
// Ground-truth epsilon-optimal ratios. Continuous supports add theta0 to the
// anchors and approximate the adversarial region with a (n+1)^d grid over the box.
TargetRatios target_ratios(const Problem& problem, double epsilon, std::size_t dense_intervals = 2000);

std::string build_stamp();

}  // namespace osar
