#include "osar/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "osar/common.hpp"

namespace osar {

double pairwise_rate(const GaussianArm& b, const GaussianArm& c) {
    if (b.fraction <= 0.0 || c.fraction <= 0.0) return 0.0;
    const double gap = c.mean - b.mean;
    return gap * gap / (2.0 * (c.std * c.std / c.fraction + b.std * b.std / b.fraction));
}

double min_challenger_rate(std::span<const GaussianArm> arms, std::size_t best) {
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < arms.size(); ++i)
        if (i != best) r = std::min(r, pairwise_rate(arms[best], arms[i]));
    return r;
}

namespace {

struct Instance {
    std::span<const double> mu, sd;
    std::size_t best;
};

// Challenger fraction giving pairwise rate z when the best arm holds ab.
double invert(const Instance& in, std::size_t i, double ab, double z) {
    const double d = in.mu[i] - in.mu[in.best];
    const double lb2 = in.sd[in.best] * in.sd[in.best];
    const double denom = d * d / (2.0 * z) - lb2 / ab;
    return in.sd[i] * in.sd[i] / denom;
}

// For fixed ab, the common rate z at which the challenger fractions fill 1 - ab.
double common_rate(const Instance& in, double ab, std::vector<double>& alpha) {
    const std::size_t k = in.mu.size();
    const double lb2 = in.sd[in.best] * in.sd[in.best];
    double zmax = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
        if (i == in.best) continue;
        const double d = in.mu[i] - in.mu[in.best];
        zmax = std::min(zmax, d * d * ab / (2.0 * lb2));
    }
    // Fill(z) increases from 0 to infinity on (0, zmax).
    double lo = 0.0, hi = zmax;
    for (int it = 0; it < 200; ++it) {
        const double z = 0.5 * (lo + hi);
        double s = 0.0;
        for (std::size_t i = 0; i < k && s <= 1.0 - ab; ++i)
            if (i != in.best) s += invert(in, i, ab, z);
        (s > 1.0 - ab ? hi : lo) = z;
        if (hi - lo <= 1e-15 * hi) break;
    }
    const double z = 0.5 * (lo + hi);
    alpha.assign(k, 0.0);
    alpha[in.best] = ab;
    for (std::size_t i = 0; i < k; ++i)
        if (i != in.best) alpha[i] = invert(in, i, ab, z);
    return z;
}

double variance_balance(const Instance& in, std::span<const double> a) {
    double r = a[in.best] * a[in.best] / (in.sd[in.best] * in.sd[in.best]);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (i != in.best) r -= a[i] * a[i] / (in.sd[i] * in.sd[i]);
    return r;
}

}  // namespace

PointRate optimal_point_rate(std::span<const double> means, std::span<const double> stds,
                             std::size_t best) {
    const std::size_t k = means.size();
    if (k < 2 || stds.size() != k || best >= k) throw InputError("optimal_point_rate: bad arm list");
    for (std::size_t i = 0; i < k; ++i) {
        if (!(stds[i] > 0.0)) throw InputError("optimal_point_rate: stds must be positive");
        if (i != best && !(means[i] > means[best]))
            throw DegenerateError("optimal_point_rate: best mean is not strictly smallest");
    }
    const Instance in{means, stds, best};
    std::vector<double> alpha;
    // The variance balance is decreasing in ab: small ab leaves the challengers
    // with most of the mass.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double ab = 0.5 * (lo + hi);
        common_rate(in, ab, alpha);
        (variance_balance(in, alpha) > 0.0 ? hi : lo) = ab;
    }
    PointRate out;
    out.g_star = common_rate(in, 0.5 * (lo + hi), alpha);
    double s = 0.0;
    for (double a : alpha) s += a;
    for (double& a : alpha) a /= s;
    std::vector<GaussianArm> arms(k);
    for (std::size_t i = 0; i < k; ++i) arms[i] = {means[i], stds[i], alpha[i]};
    out.g_star = min_challenger_rate(arms, best);
    out.alpha = std::move(alpha);
    return out;
}

BalanceResidual balance_residual(std::span<const double> means, std::span<const double> stds,
                                 std::span<const double> alpha, std::size_t best) {
    const Instance in{means, stds, best};
    BalanceResidual r;
    r.variance_balance = variance_balance(in, alpha);
    double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (i == best) continue;
        const double g = pairwise_rate({means[best], stds[best], alpha[best]}, {means[i], stds[i], alpha[i]});
        mn = std::min(mn, g);
        mx = std::max(mx, g);
    }
    r.rate_spread = mx - mn;
    return r;
}

}  // namespace osar
