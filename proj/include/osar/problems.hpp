#pragma once
// Benchmark problems behind a common interface: the two-source synthetic family
// (discrete grid or continuous box), small table-driven instances, and the food
// supply chain contamination model.

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osar/common.hpp"
#include "osar/input_models.hpp"
#include "osar/rng.hpp"

namespace osar {

// Suggested run settings that belong to a problem or scenario.
struct ProblemDefaults {
    std::size_t batch = 50;
    double epsilon = 1e-4;
    std::size_t m0 = 50, n0 = 1;
    double budget = 4000;
};

class Problem {
public:
    virtual ~Problem() = default;
    virtual std::string id() const = 0;
    virtual std::size_t num_solutions() const = 0;
    virtual const std::vector<InputSourceModel>& sources() const = 0;
    virtual const ParameterSupport& support() const = 0;
    virtual std::vector<double> theta0() const = 0;
    // Solution index (zero-based) that is optimal at theta0.
    virtual std::size_t true_best() const = 0;
    virtual double simulate(std::size_t i, std::span<const double> theta, Rng& rng) const = 0;
    // Output standard deviation when known; nullopt means it is estimated.
    virtual std::optional<double> known_std(std::size_t i, std::span<const double> theta) const = 0;
    // Exact mean when available (needed for target ratios).
    virtual std::optional<double> true_mean(std::size_t, std::span<const double>) const {
        return std::nullopt;
    }
    // Fixed dense design for the adversarial-set augmentation (continuous kind).
    virtual const PointSet* dense_design() const { return nullptr; }
    virtual ProblemDefaults defaults() const { return {}; }

    double draw_input(std::size_t source, Rng& rng) const;
};

// ---------------------------------------------------------------- synthetic

enum class Scenario { Baseline, S1, S2, S3, S4, S5 };
Scenario parse_scenario(const std::string& s);
std::string scenario_name(Scenario s);

// eta_i(theta) = (5 th1 + 2.5 th2 - 10 sqrt(i))^2, i one-based.
double synthetic_mean(std::size_t i_one_based, std::span<const double> theta);
double synthetic_std(Scenario sc, std::span<const double> theta, std::span<const double> theta0);

PointSet synthetic_grid(std::size_t per_axis_intervals);  // (n+1)^2 points on [1,3]x[1,2]

class SyntheticProblem final : public Problem {
public:
    SyntheticProblem(Scenario sc, bool continuous, std::size_t dense_intervals = 50);

    std::string id() const override;
    std::size_t num_solutions() const override { return 10; }
    const std::vector<InputSourceModel>& sources() const override { return sources_; }
    const ParameterSupport& support() const override { return support_; }
    std::vector<double> theta0() const override { return theta0_; }
    std::size_t true_best() const override;
    double simulate(std::size_t i, std::span<const double> theta, Rng& rng) const override;
    std::optional<double> known_std(std::size_t i, std::span<const double> theta) const override;
    std::optional<double> true_mean(std::size_t i, std::span<const double> theta) const override;
    const PointSet* dense_design() const override { return continuous_ ? &dense_ : nullptr; }
    ProblemDefaults defaults() const override;

    Scenario scenario() const { return sc_; }
    void set_theta0(std::vector<double> th) { theta0_ = std::move(th); }

private:
    void check_box(std::span<const double> theta) const;

    Scenario sc_;
    bool continuous_;
    std::vector<InputSourceModel> sources_;
    ParameterSupport support_;
    std::vector<double> theta0_;
    PointSet dense_;
};

// ------------------------------------------------------------------- tables

// Discrete instance given by explicit mean and std tables (solution x point).
class TableProblem final : public Problem {
public:
    TableProblem(std::string id, std::vector<InputSourceModel> sources, PointSet points,
                 std::vector<std::vector<double>> means, std::vector<std::vector<double>> stds,
                 std::size_t theta0_index);

    // Two exponential sources with unit costs, points {1, 1.6}^2, theta0 = (1, 1), k = 3.
    static TableProblem toy();

    std::string id() const override { return id_; }
    std::size_t num_solutions() const override { return means_.size(); }
    const std::vector<InputSourceModel>& sources() const override { return sources_; }
    const ParameterSupport& support() const override { return support_; }
    std::vector<double> theta0() const override;
    std::size_t true_best() const override;
    double simulate(std::size_t i, std::span<const double> theta, Rng& rng) const override;
    std::optional<double> known_std(std::size_t i, std::span<const double> theta) const override;
    std::optional<double> true_mean(std::size_t i, std::span<const double> theta) const override;
    ProblemDefaults defaults() const override;

    std::size_t point_index(std::span<const double> theta) const;

private:
    std::string id_;
    std::vector<InputSourceModel> sources_;
    ParameterSupport support_;
    std::vector<std::vector<double>> means_, stds_;
    std::size_t theta0_index_;
};

// ------------------------------------------------------------------ halton

double radical_inverse(std::size_t index, unsigned base);
// Points with indices 1..n, bases the first `dim` primes, mapped to [lo, hi]^dim.
PointSet halton_design(std::size_t dim, std::size_t n, double lo = 0.0, double hi = 1.0);

}  // namespace osar
