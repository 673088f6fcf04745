#pragma once
// Gaussian large-deviation rates for pairwise false selection and the optimal
// static allocation at one parameter point.

#include <cstddef>
#include <span>
#include <vector>

namespace osar {

struct GaussianArm {
    double mean = 0.0;
    double std = 1.0;
    double fraction = 0.0;
};

// (eta_i - eta_b)^2 / (2 (l_i^2/a_i + l_b^2/a_b)); zero when either fraction is zero.
double pairwise_rate(const GaussianArm& best, const GaussianArm& challenger);

// min over challengers of pairwise_rate at the given fractions.
double min_challenger_rate(std::span<const GaussianArm> arms, std::size_t best);

struct PointRate {
    double g_star = 0.0;
    std::vector<double> alpha;  // sums to one
};

// Maximizes the minimum challenger rate over the simplex. Throws DegenerateError
// when the best mean is not strictly smallest.
PointRate optimal_point_rate(std::span<const double> means, std::span<const double> stds,
                             std::size_t best);

// Residuals of the two optimality conditions at alpha: the variance balance
// a_b^2/l_b^2 - sum a_i^2/l_i^2 and the spread (max - min) of challenger rates.
struct BalanceResidual {
    double variance_balance = 0.0;
    double rate_spread = 0.0;
};
BalanceResidual balance_residual(std::span<const double> means, std::span<const double> stds,
                                 std::span<const double> alpha, std::size_t best);

}  // namespace osar
