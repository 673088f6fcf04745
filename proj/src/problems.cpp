#include "osar/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace osar {

double Problem::draw_input(std::size_t source, Rng& rng) const {
    return draw_observation(sources().at(source), theta0().at(source), rng);
}

Scenario parse_scenario(const std::string& s) {
    if (s == "baseline") return Scenario::Baseline;
    if (s == "s1" || s == "scenario1") return Scenario::S1;
    if (s == "s2" || s == "scenario2") return Scenario::S2;
    if (s == "s3" || s == "scenario3") return Scenario::S3;
    if (s == "s4" || s == "scenario4") return Scenario::S4;
    if (s == "s5" || s == "scenario5") return Scenario::S5;
    throw ConfigError("unknown scenario: " + s);
}

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Baseline: return "baseline";
        case Scenario::S1: return "s1";
        case Scenario::S2: return "s2";
        case Scenario::S3: return "s3";
        case Scenario::S4: return "s4";
        case Scenario::S5: return "s5";
    }
    return "baseline";
}

double synthetic_mean(std::size_t i, std::span<const double> th) {
    const double v = 5.0 * th[0] + 2.5 * th[1] - 10.0 * std::sqrt(static_cast<double>(i));
    return v * v;
}

double synthetic_std(Scenario sc, std::span<const double> th, std::span<const double> th0) {
    const double dist = std::max(std::abs(th[0] - th0[0]), std::abs(th[1] - th0[1]));
    if (sc == Scenario::S1) return 6.0 - 2.0 * dist;
    if (sc == Scenario::S2) return 2.0 + 2.0 * dist;
    return 8.0;
}

PointSet synthetic_grid(std::size_t n) {
    PointSet g(2);
    g.reserve((n + 1) * (n + 1));
    for (std::size_t a = 0; a <= n; ++a)
        for (std::size_t b = 0; b <= n; ++b) {
            const double p[2] = {1.0 + 2.0 * static_cast<double>(a) / static_cast<double>(n),
                                 1.0 + static_cast<double>(b) / static_cast<double>(n)};
            g.push_back(p);
        }
    return g;
}

SyntheticProblem::SyntheticProblem(Scenario sc, bool continuous, std::size_t dense_intervals)
    : sc_(sc), continuous_(continuous) {
    const double c2 = sc == Scenario::S3 ? 2.0 : 1.0;
    sources_ = {InputSourceModel::exponential(1.0), InputSourceModel::exponential(c2)};
    if (continuous) {
        support_ = ParameterSupport::continuous({1.0, 1.0}, {3.0, 2.0}, synthetic_grid(10));
        theta0_ = {std::numbers::pi / 2.0, std::numbers::sqrt2};
        dense_ = synthetic_grid(dense_intervals);
    } else {
        support_ = ParameterSupport::discrete(synthetic_grid(10));
        theta0_ = {1.6, 1.4};
    }
    if (sc == Scenario::S4) theta0_ = {1.4, 1.2};
}

std::string SyntheticProblem::id() const {
    return std::string("synthetic_") + (continuous_ ? "continuous_" : "discrete_") + scenario_name(sc_);
}

void SyntheticProblem::check_box(std::span<const double> th) const {
    constexpr double tol = 1e-9;
    if (th.size() != 2 || th[0] < 1.0 - tol || th[0] > 3.0 + tol || th[1] < 1.0 - tol || th[1] > 2.0 + tol)
        throw DomainError("synthetic problem: theta outside [1,3]x[1,2]");
}

std::size_t SyntheticProblem::true_best() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < 10; ++i)
        if (synthetic_mean(i + 1, theta0_) < synthetic_mean(best + 1, theta0_)) best = i;
    return best;
}

double SyntheticProblem::simulate(std::size_t i, std::span<const double> th, Rng& rng) const {
    check_box(th);
    const double mu = synthetic_mean(i + 1, th);
    const double sd = synthetic_std(sc_, th, theta0_);
    return std::normal_distribution<double>(mu, sd)(rng);
}

std::optional<double> SyntheticProblem::known_std(std::size_t, std::span<const double> th) const {
    check_box(th);
    return synthetic_std(sc_, th, theta0_);
}

std::optional<double> SyntheticProblem::true_mean(std::size_t i, std::span<const double> th) const {
    check_box(th);
    return synthetic_mean(i + 1, th);
}

ProblemDefaults SyntheticProblem::defaults() const {
    ProblemDefaults d;
    d.batch = 50;
    d.epsilon = sc_ == Scenario::S5 ? 1e-3 : 1e-4;
    d.m0 = 50;
    d.n0 = 1;
    d.budget = 4000;
    return d;
}

// ------------------------------------------------------------------- tables

TableProblem::TableProblem(std::string id, std::vector<InputSourceModel> sources, PointSet points,
                           std::vector<std::vector<double>> means, std::vector<std::vector<double>> stds,
                           std::size_t theta0_index)
    : id_(std::move(id)),
      sources_(std::move(sources)),
      support_(ParameterSupport::discrete(std::move(points))),
      means_(std::move(means)),
      stds_(std::move(stds)),
      theta0_index_(theta0_index) {
    const std::size_t B = support_.size();
    if (means_.size() < 2 || stds_.size() != means_.size()) throw InputError("table problem: need k >= 2 solutions");
    for (std::size_t i = 0; i < means_.size(); ++i) {
        if (means_[i].size() != B || stds_[i].size() != B) throw InputError("table problem: ragged tables");
        for (double s : stds_[i])
            if (!(s > 0.0)) throw InputError("table problem: stds must be positive");
    }
    if (theta0_index_ >= B) throw InputError("table problem: theta0 index out of range");
}

TableProblem TableProblem::toy() {
    PointSet pts(2, {1.0, 1.0, 1.6, 1.0, 1.0, 1.6, 1.6, 1.6});
    std::vector<std::vector<double>> means{{0, 1, 1, 0}, {1, 0, 2, 1}, {1, 2, 0, 1}};
    std::vector<std::vector<double>> stds(3, std::vector<double>(4, 1.0));
    return TableProblem("toy", {InputSourceModel::exponential(1.0), InputSourceModel::exponential(1.0)},
                        std::move(pts), std::move(means), std::move(stds), 0);
}

std::vector<double> TableProblem::theta0() const {
    const auto p = support_.points[theta0_index_];
    return {p.begin(), p.end()};
}

std::size_t TableProblem::true_best() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < means_.size(); ++i)
        if (means_[i][theta0_index_] < means_[best][theta0_index_]) best = i;
    return best;
}

std::size_t TableProblem::point_index(std::span<const double> th) const {
    for (std::size_t b = 0; b < support_.size(); ++b)
        if (std::equal(th.begin(), th.end(), support_.points[b].begin())) return b;
    throw DomainError("table problem: theta is not a support point");
}

double TableProblem::simulate(std::size_t i, std::span<const double> th, Rng& rng) const {
    const std::size_t b = point_index(th);
    return std::normal_distribution<double>(means_[i][b], stds_[i][b])(rng);
}

std::optional<double> TableProblem::known_std(std::size_t i, std::span<const double> th) const {
    return stds_[i][point_index(th)];
}

std::optional<double> TableProblem::true_mean(std::size_t i, std::span<const double> th) const {
    return means_[i][point_index(th)];
}

ProblemDefaults TableProblem::defaults() const {
    ProblemDefaults d;
    d.batch = 50;
    d.epsilon = 1e-3;
    d.m0 = 10;
    d.n0 = 1;
    d.budget = 1e5;
    return d;
}

// ------------------------------------------------------------------ halton

double radical_inverse(std::size_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

PointSet halton_design(std::size_t dim, std::size_t n, double lo, double hi) {
    static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (dim == 0 || dim > std::size(primes)) throw InputError("halton_design: unsupported dimension");
    PointSet p(dim);
    p.reserve(n);
    std::vector<double> x(dim);
    for (std::size_t j = 1; j <= n; ++j) {
        for (std::size_t d = 0; d < dim; ++d) x[d] = lo + (hi - lo) * radical_inverse(j, primes[d]);
        p.push_back(x);
    }
    return p;
}

}  // namespace osar
