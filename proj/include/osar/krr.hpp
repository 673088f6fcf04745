#pragma once
// Kernel ridge regression of the mean surface of one solution over the input
// parameter: the full discrete-support predictor with a Sherman-Morrison
// recursion, and the Nystrom predictor restricted to an anchor set.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "osar/common.hpp"

namespace osar {

// Squared-exponential kernel: signal * exp(-0.5 * sum ((a-b)/ls)^2).
struct SeKernel {
    std::vector<double> lengthscale;
    double signal = 1.0;

    double operator()(std::span<const double> a, std::span<const double> b) const;
    // Unit-signal version.
    double unit(std::span<const double> a, std::span<const double> b) const;
};

Eigen::MatrixXd gram(const SeKernel& k, const PointSet& a, const PointSet& b);
Eigen::MatrixXd gram(const SeKernel& k, const PointSet& a);

// Per-dimension median of pairwise absolute differences (zero-width dimensions
// fall back to 1).
std::vector<double> median_lengthscale(const PointSet& pts);

struct KrrHyper {
    SeKernel kernel;
    double gamma = 0.0;
    double kappa = 1.0;
};
// Median-heuristic lengthscale; signal = sample variance of the initial means,
// gamma = their mean.
KrrHyper default_hyper(const PointSet& anchors, std::span<const double> initial_means);

// ---------------------------------------------------------------- discrete

struct DiscreteKrr {
    Eigen::MatrixXd K;       // B x B Gram
    Eigen::MatrixXd C;       // K - K (K + Sigma)^-1 K
    Eigen::VectorXd mu_hat;  // predictions at the B points
    std::vector<double> sums, noise;  // per-point output sums and lambda^2
    std::vector<std::size_t> counts;
    double gamma = 0.0, kappa = 1.0;
    std::size_t updates_since_refit = 0;
    std::size_t refit_every = 500;
};

DiscreteKrr fit_discrete(std::span<const double> sample_means, std::span<const std::size_t> counts,
                         std::span<const double> stds, const Eigen::MatrixXd& K, double gamma,
                         double kappa);
DiscreteKrr fit_discrete(std::span<const double> sample_means, std::span<const std::size_t> counts,
                         std::span<const double> stds, const SeKernel& kernel, const PointSet& points,
                         double gamma, double kappa);

// One observation Y at point b; requires kappa == 1.
void update_discrete_inplace(DiscreteKrr& s, std::size_t b, double y);
DiscreteKrr update_discrete(const DiscreteKrr& s, std::size_t b, double y);

// Recomputes mu_hat and C from the stored sums and counts.
void refit_discrete(DiscreteKrr& s);

// ----------------------------------------------------------------- Nystrom

struct MapObservation {
    std::vector<double> theta;
    double y = 0.0;
    double noise = 1.0;  // lambda^2 of this replication
};

// Design site contributing w k k' to A and wy k to b, where k is the kernel
// column between the anchors and the site location.
struct NystromSite {
    std::vector<double> theta;
    double w = 0.0, wy = 0.0;
    Eigen::VectorXd k;
};

class NystromKrr {
public:
    enum class Solver { PseudoInverse, QrUpdate, Cod };

    NystromKrr() = default;
    // Anchors are the fixed points followed by the current MAP. Grid statistics
    // give weight counts/lambda^2 to each fixed anchor.
    NystromKrr(const SeKernel& kernel, PointSet anchors, double gamma, double kappa, Solver solver);

    std::size_t num_anchors() const { return anchors_.size(); }
    const PointSet& anchors() const { return anchors_; }
    double gamma() const { return gamma_; }
    const SeKernel& kernel() const { return kernel_; }

    // Sets the absolute weight of fixed anchor b: w = N/lambda^2, wy = N (mu - gamma)/lambda^2.
    void set_anchor_stats(std::size_t b, double w, double wy);
    // One new replication at fixed anchor b (rank-one update).
    void add_anchor_observation(std::size_t b, double y, double noise);
    // One replication at the current MAP (the last anchor).
    void add_map_observation(double y, double noise);
    // Multiplies every MAP-history weight by `scale`, for a shared plug-in variance.
    void set_history_scale(double scale);
    double history_scale() const { return hist_scale_; }
    // Moves the last anchor to a new MAP.
    void move_map(std::span<const double> theta);

    // Least-squares coefficients for the current A and b.
    const Eigen::VectorXd& coefficients();
    Eigen::VectorXd predict_anchors();
    // Predictions at arbitrary points, gamma + K(points, anchors) c.
    Eigen::VectorXd predict(const PointSet& pts);

    Eigen::MatrixXd assemble_a() const;
    Eigen::VectorXd assemble_b() const;
    const Eigen::MatrixXd& q() const { return q_; }
    const Eigen::MatrixXd& r() const { return r_; }
    const Eigen::MatrixXd& kbar() const { return kbar_; }
    std::size_t num_history_sites() const { return hist_.size(); }
    Solver solver() const { return solver_; }

private:
    void rank_one(const Eigen::VectorXd& u, const Eigen::VectorXd& v);
    void invalidate_factor() { qr_valid_ = false; coeff_valid_ = false; }
    void refactor();

    SeKernel kernel_;
    PointSet anchors_;
    double gamma_ = 0.0, kappa_ = 1.0;
    Solver solver_ = Solver::Cod;

    Eigen::MatrixXd kbar_;
    std::vector<double> grid_w_, grid_wy_;
    Eigen::MatrixXd a_grid_, h_;  // sum w k k' over fixed anchors / history sites
    Eigen::VectorXd b_grid_, hb_;
    std::vector<NystromSite> hist_;
    double hist_scale_ = 1.0;

    Eigen::MatrixXd q_, r_;
    bool qr_valid_ = false;
    std::size_t updates_since_refactor_ = 0;
    Eigen::VectorXd coeff_;
    bool coeff_valid_ = false;
};

// Reference construction straight from the closed form with an SVD
// pseudo-inverse (rank tolerance 1e-12 * dim * sigma_max). Fixed anchors carry
// sample means with counts and stds; the history is the full MAP replication list.
struct NystromFit {
    Eigen::VectorXd coeff;
    Eigen::VectorXd mu_hat;  // at the anchors
};
NystromFit fit_nystrom(const PointSet& anchors, std::span<const double> sample_means,
                       std::span<const std::size_t> counts, std::span<const double> stds,
                       const std::vector<MapObservation>& history, const SeKernel& kernel,
                       double gamma, double kappa);

// Minimum-norm least squares by truncated SVD.
Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double rtol);

}  // namespace osar
