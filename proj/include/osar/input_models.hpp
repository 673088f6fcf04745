#pragma once
// Conjugate input models, the induced posterior over a parameter support, and
// KL divergences between input distributions.

#include <cstddef>
#include <span>
#include <vector>

#include "osar/common.hpp"
#include "osar/rng.hpp"

namespace osar {

enum class Family {
    Exponential,    // mean-parameterized; prior is inverse-gamma (shape a, scale b)
    TruncatedBeta,  // Bernoulli data; prior density prop. to th^p (1-th)^q on [lower, upper]
};

struct InputSourceModel {
    Family family = Family::Exponential;
    // Exponential: {a, b} with density prop. to th^(-a-1) exp(-b/th); {-1, 0} is flat.
    // TruncatedBeta: {p, q}.
    std::vector<double> prior{-1.0, 0.0};
    double cost = 1.0;
    double lower = 0.0;  // TruncatedBeta only
    double upper = 1.0;

    static InputSourceModel exponential(double cost, double a = -1.0, double b = 0.0);
    static InputSourceModel truncated_beta(double cost, double lower, double upper, double p = 0.5,
                                           double q = 0.5);
    void validate() const;
};

struct ParameterSupport {
    enum class Kind { DiscreteGrid, ContinuousBox };
    Kind kind = Kind::DiscreteGrid;
    PointSet points;  // the grid, or the anchors for the continuous kind
    std::vector<double> lower, upper;  // box (continuous kind)

    static ParameterSupport discrete(PointSet grid);
    static ParameterSupport continuous(std::vector<double> lower, std::vector<double> upper,
                                       PointSet anchors);
    std::size_t dim() const { return points.dim(); }
    std::size_t size() const { return points.size(); }
    bool is_discrete() const { return kind == Kind::DiscreteGrid; }
    void validate() const;
};

// Per-source data and sufficient statistics.
struct SourceData {
    std::vector<double> log;  // retained observations
    double sum = 0.0;         // accumulated in arrival order
    std::size_t count() const { return log.size(); }
};

class PosteriorState {
public:
    PosteriorState() = default;
    PosteriorState(std::vector<InputSourceModel> sources, ParameterSupport support);

    // In-place conjugate update; the free function below is the value form.
    void absorb(std::size_t source, std::span<const double> observations);

    std::size_t num_sources() const { return sources_.size(); }
    const InputSourceModel& source(std::size_t l) const { return sources_.at(l); }
    const std::vector<InputSourceModel>& sources() const { return sources_; }
    const SourceData& data(std::size_t l) const { return data_.at(l); }
    const ParameterSupport& support() const { return support_; }

    // Discrete kind: normalized pmf and the unnormalized log posterior at each point.
    const std::vector<double>& pmf() const { return pmf_; }
    const std::vector<double>& log_pmf() const { return log_post_; }

    // Unnormalized log posterior density of source l at th (sum of prior and likelihood).
    double log_density(std::size_t l, double th) const;
    double log_density(std::span<const double> theta) const;

    // Posterior normalized over an arbitrary finite point list.
    std::vector<double> pmf_over(const PointSet& pts) const;

private:
    void recompute();

    std::vector<InputSourceModel> sources_;
    ParameterSupport support_;
    std::vector<SourceData> data_;
    std::vector<double> log_post_;
    std::vector<double> pmf_;
};

PosteriorState update_posterior(const PosteriorState& state, std::size_t source,
                                std::span<const double> observations);

// Discrete kind: pmf argmax (lowest index on ties). Continuous kind: closed-form
// per-source posterior mode clamped to the box.
std::vector<double> map_estimate(const PosteriorState& state);
std::size_t map_index(const PosteriorState& state);

double kl_divergence(Family family, double th_from, double th_to);
double kl_divergence(const InputSourceModel& src, double th_from, double th_to);

// (1/m) sum_j log(f_hat(Z_j) / f_b(Z_j)) over the retained data of `source`.
double empirical_kl_unclamped(const PosteriorState& state, std::size_t source, double th_hat,
                              double th_b);
// Same quantity accumulated term by term over the raw log; reference for the
// sufficient-statistic form.
double empirical_kl_raw(const PosteriorState& state, std::size_t source, double th_hat,
                        double th_b);
double empirical_kl(const PosteriorState& state, std::size_t source, double th_hat, double th_b);

// Sum of pmf mass per solution. owner[b] is the solution that owns point b.
std::vector<double> posterior_preference(std::span<const double> pmf,
                                         std::span<const std::size_t> owner, std::size_t k);
// Partition form; throws InputError unless `sets` partition 0..pmf.size()-1.
std::vector<double> posterior_preference(std::span<const double> pmf,
                                         const std::vector<std::vector<std::size_t>>& sets);

// Draws n points i.i.d. from the continuous posterior restricted to the box.
PointSet sample_posterior(const PosteriorState& state, std::size_t n, Rng& rng);

// One observation from the data-generating distribution of a source.
double draw_observation(const InputSourceModel& src, double th, Rng& rng);

}  // namespace osar
