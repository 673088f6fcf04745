#include "osar/input_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/inverse_gamma.hpp>

namespace osar {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_param(const InputSourceModel& src, double th) {
    const bool ok = src.family == Family::Exponential ? (th > 0.0 && std::isfinite(th))
                                                      : (th > 0.0 && th < 1.0);
    if (!ok) {
        std::ostringstream os;
        os << "invalid parameter " << th << " for "
           << (src.family == Family::Exponential ? "exponential" : "truncated beta") << " source";
        throw DomainError(os.str());
    }
}

// Log-likelihood of the retained data at th, from the sufficient statistics.
double log_lik(const InputSourceModel& src, const SourceData& d, double th) {
    const double m = static_cast<double>(d.count());
    if (src.family == Family::Exponential) return -m * std::log(th) - d.sum / th;
    const double s = d.sum;
    return s * std::log(th) + (m - s) * std::log1p(-th);
}

double log_prior(const InputSourceModel& src, double th) {
    if (src.family == Family::Exponential)
        return -(src.prior[0] + 1.0) * std::log(th) - src.prior[1] / th;
    if (th < src.lower || th > src.upper) return kNegInf;
    return src.prior[0] * std::log(th) + src.prior[1] * std::log1p(-th);
}

// Conjugate posterior hyperparameters in the same parameterization as the prior.
std::pair<double, double> posterior_hyper(const InputSourceModel& src, const SourceData& d) {
    const double m = static_cast<double>(d.count());
    if (src.family == Family::Exponential) return {src.prior[0] + m, src.prior[1] + d.sum};
    return {src.prior[0] + d.sum, src.prior[1] + (m - d.sum)};
}

double mode_unclamped(const InputSourceModel& src, const SourceData& d, double lo, double hi) {
    const auto [h0, h1] = posterior_hyper(src, d);
    if (src.family == Family::Exponential) {
        // th^(-h0-1) exp(-h1/th): stationary point h1/(h0+1).
        if (h0 + 1.0 <= 0.0) return h1 > 0.0 ? hi : lo;
        return h1 / (h0 + 1.0);
    }
    // th^h0 (1-th)^h1
    if (h0 + h1 <= 0.0) return 0.5 * (lo + hi);
    if (h0 <= 0.0) return lo;
    if (h1 <= 0.0) return hi;
    return h0 / (h0 + h1);
}

}  // namespace

InputSourceModel InputSourceModel::exponential(double cost, double a, double b) {
    InputSourceModel m;
    m.family = Family::Exponential;
    m.prior = {a, b};
    m.cost = cost;
    m.validate();
    return m;
}

InputSourceModel InputSourceModel::truncated_beta(double cost, double lower, double upper, double p,
                                                  double q) {
    InputSourceModel m;
    m.family = Family::TruncatedBeta;
    m.prior = {p, q};
    m.cost = cost;
    m.lower = lower;
    m.upper = upper;
    m.validate();
    return m;
}

void InputSourceModel::validate() const {
    if (!(cost > 0.0)) throw InputError("input source cost must be positive");
    if (prior.size() != 2) throw InputError("input source prior needs two hyperparameters");
    if (family == Family::TruncatedBeta && !(0.0 <= lower && lower < upper && upper <= 1.0))
        throw InputError("truncated beta bounds must satisfy 0 <= lower < upper <= 1");
}

ParameterSupport ParameterSupport::discrete(PointSet grid) {
    ParameterSupport s;
    s.kind = Kind::DiscreteGrid;
    s.points = std::move(grid);
    s.validate();
    return s;
}

ParameterSupport ParameterSupport::continuous(std::vector<double> lower, std::vector<double> upper,
                                              PointSet anchors) {
    ParameterSupport s;
    s.kind = Kind::ContinuousBox;
    s.lower = std::move(lower);
    s.upper = std::move(upper);
    s.points = std::move(anchors);
    s.validate();
    return s;
}

void ParameterSupport::validate() const {
    if (points.dim() == 0) throw InputError("support has zero dimension");
    if (kind == Kind::DiscreteGrid) {
        if (points.size() < 2) throw InputError("discrete support needs at least two points");
        for (std::size_t a = 0; a < points.size(); ++a)
            for (std::size_t b = a + 1; b < points.size(); ++b)
                if (std::equal(points[a].begin(), points[a].end(), points[b].begin()))
                    throw InputError("discrete support points must be distinct");
        return;
    }
    if (lower.size() != points.dim() || upper.size() != points.dim())
        throw InputError("box bounds do not match the anchor dimension");
    for (std::size_t d = 0; d < lower.size(); ++d)
        if (!(lower[d] < upper[d])) throw InputError("box needs lower < upper");
    for (std::size_t b = 0; b < points.size(); ++b)
        for (std::size_t d = 0; d < points.dim(); ++d)
            if (points[b][d] < lower[d] || points[b][d] > upper[d])
                throw InputError("anchor point outside the box");
}

PosteriorState::PosteriorState(std::vector<InputSourceModel> sources, ParameterSupport support)
    : sources_(std::move(sources)), support_(std::move(support)), data_(sources_.size()) {
    if (sources_.size() != support_.dim())
        throw InputError("one input source per support dimension is required");
    for (const auto& s : sources_) s.validate();
    support_.validate();
    if (support_.is_discrete()) {
        for (std::size_t b = 0; b < support_.size(); ++b)
            for (std::size_t l = 0; l < sources_.size(); ++l) check_param(sources_[l], support_.points[b][l]);
    }
    recompute();
}

void PosteriorState::absorb(std::size_t source, std::span<const double> obs) {
    if (source >= sources_.size()) throw InputError("source index out of range");
    if (obs.empty()) return;
    const auto& src = sources_[source];
    for (double z : obs) {
        const bool ok = src.family == Family::Exponential ? (z > 0.0 && std::isfinite(z))
                                                          : (z == 0.0 || z == 1.0);
        if (!ok) {
            std::ostringstream os;
            os << "observation " << z << " rejected for source " << source;
            throw InputError(os.str());
        }
    }
    auto& d = data_[source];
    // Sequential accumulation keeps the statistics independent of how a stream
    // of observations is cut into batches.
    for (double z : obs) {
        d.log.push_back(z);
        d.sum += z;
    }
    recompute();
}

double PosteriorState::log_density(std::size_t l, double th) const {
    return log_prior(sources_[l], th) + log_lik(sources_[l], data_[l], th);
}

double PosteriorState::log_density(std::span<const double> theta) const {
    double s = 0.0;
    for (std::size_t l = 0; l < sources_.size(); ++l) s += log_density(l, theta[l]);
    return s;
}

void PosteriorState::recompute() {
    if (!support_.is_discrete()) return;
    const std::size_t B = support_.size();
    log_post_.assign(B, 0.0);
    for (std::size_t b = 0; b < B; ++b) log_post_[b] = log_density(support_.points[b]);
    const double mx = *std::max_element(log_post_.begin(), log_post_.end());
    pmf_.assign(B, 0.0);
    double z = 0.0;
    for (std::size_t b = 0; b < B; ++b) z += pmf_[b] = std::exp(log_post_[b] - mx);
    for (double& p : pmf_) p /= z;
}

std::vector<double> PosteriorState::pmf_over(const PointSet& pts) const {
    std::vector<double> lp(pts.size());
    for (std::size_t b = 0; b < pts.size(); ++b) lp[b] = log_density(pts[b]);
    const double mx = *std::max_element(lp.begin(), lp.end());
    double z = 0.0;
    for (double& v : lp) z += v = std::exp(v - mx);
    for (double& v : lp) v /= z;
    return lp;
}

PosteriorState update_posterior(const PosteriorState& state, std::size_t source,
                                std::span<const double> observations) {
    PosteriorState next = state;
    next.absorb(source, observations);
    return next;
}

std::size_t map_index(const PosteriorState& state) {
    const auto& p = state.log_pmf();
    if (p.empty()) throw InputError("map_index needs a discrete support");
    // Compare in log space; exp() could flatten distinct tiny masses into ties.
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::vector<double> map_estimate(const PosteriorState& state) {
    const auto& sup = state.support();
    if (sup.is_discrete()) {
        const auto p = sup.points[map_index(state)];
        return {p.begin(), p.end()};
    }
    std::vector<double> th(state.num_sources());
    for (std::size_t l = 0; l < th.size(); ++l) {
        const double lo = sup.lower[l], hi = sup.upper[l];
        th[l] = std::clamp(mode_unclamped(state.source(l), state.data(l), lo, hi), lo, hi);
    }
    return th;
}

double kl_divergence(Family family, double from, double to) {
    if (family == Family::Exponential) {
        if (!(from > 0.0 && to > 0.0)) throw DomainError("exponential KL needs positive means");
        return std::log(to / from) + from / to - 1.0;
    }
    if (!(from > 0.0 && from < 1.0 && to > 0.0 && to < 1.0))
        throw DomainError("Bernoulli KL needs parameters in (0, 1)");
    return from * std::log(from / to) + (1.0 - from) * std::log((1.0 - from) / (1.0 - to));
}

double kl_divergence(const InputSourceModel& src, double from, double to) {
    return kl_divergence(src.family, from, to);
}

double empirical_kl_unclamped(const PosteriorState& state, std::size_t l, double th_hat, double th_b) {
    const auto& src = state.source(l);
    const auto& d = state.data(l);
    if (d.count() == 0) throw InputError("empirical KL needs at least one observation");
    check_param(src, th_hat);
    check_param(src, th_b);
    const double m = static_cast<double>(d.count());
    const double zbar = d.sum / m;
    if (src.family == Family::Exponential)
        return std::log(th_b / th_hat) + zbar * (1.0 / th_b - 1.0 / th_hat);
    return zbar * std::log(th_hat / th_b) + (1.0 - zbar) * std::log((1.0 - th_hat) / (1.0 - th_b));
}

double empirical_kl_raw(const PosteriorState& state, std::size_t l, double th_hat, double th_b) {
    const auto& src = state.source(l);
    const auto& d = state.data(l);
    if (d.count() == 0) throw InputError("empirical KL needs at least one observation");
    double s = 0.0;
    for (double z : d.log) {
        double a, b;
        if (src.family == Family::Exponential) {
            a = -std::log(th_hat) - z / th_hat;
            b = -std::log(th_b) - z / th_b;
        } else {
            a = z > 0.5 ? std::log(th_hat) : std::log1p(-th_hat);
            b = z > 0.5 ? std::log(th_b) : std::log1p(-th_b);
        }
        if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("zero density at a retained observation");
        s += a - b;
    }
    return s / static_cast<double>(d.count());
}

double empirical_kl(const PosteriorState& state, std::size_t source, double th_hat, double th_b) {
    return std::max(0.0, empirical_kl_unclamped(state, source, th_hat, th_b));
}

std::vector<double> posterior_preference(std::span<const double> pmf,
                                         std::span<const std::size_t> owner, std::size_t k) {
    if (owner.size() != pmf.size()) throw InputError("owner and pmf lengths differ");
    std::vector<double> pref(k, 0.0);
    for (std::size_t b = 0; b < pmf.size(); ++b) {
        if (owner[b] >= k) throw InputError("owner index out of range");
        pref[owner[b]] += pmf[b];
    }
    return pref;
}

std::vector<double> posterior_preference(std::span<const double> pmf,
                                         const std::vector<std::vector<std::size_t>>& sets) {
    std::vector<std::size_t> owner(pmf.size(), sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t b : sets[i]) {
            if (b >= pmf.size() || owner[b] != sets.size())
                throw InputError("favorable sets do not partition the support");
            owner[b] = i;
        }
    for (std::size_t o : owner)
        if (o == sets.size()) throw InputError("favorable sets do not partition the support");
    return posterior_preference(pmf, owner, sets.size());
}

double draw_observation(const InputSourceModel& src, double th, Rng& rng) {
    if (src.family == Family::Exponential) return std::exponential_distribution<double>(1.0 / th)(rng);
    return std::bernoulli_distribution(th)(rng) ? 1.0 : 0.0;
}

namespace {

// One truncated draw per call for a single source.
class SourceSampler {
public:
    SourceSampler(const PosteriorState& st, std::size_t l) : st_(st), l_(l) {
        lo_ = st.support().lower[l];
        hi_ = st.support().upper[l];
        const auto& src = st.source(l);
        std::tie(h0_, h1_) = posterior_hyper(src, st.data(l));
        mode_ = std::clamp(mode_unclamped(src, st.data(l), lo_, hi_), lo_, hi_);
        log_peak_ = st.log_density(l, mode_);
        exp_ = src.family == Family::Exponential;
        proper_ = exp_ ? (h0_ > 0.0 && h1_ > 0.0) : (h0_ > -1.0 && h1_ > -1.0);
        if (!proper_) return;
        if (exp_) {
            boost::math::inverse_gamma_distribution<double> d(h0_, h1_);
            flo_ = boost::math::cdf(d, lo_);
            fhi_ = boost::math::cdf(d, hi_);
            slo_ = boost::math::cdf(boost::math::complement(d, lo_));
            shi_ = boost::math::cdf(boost::math::complement(d, hi_));
        } else {
            boost::math::beta_distribution<double> d(h0_ + 1.0, h1_ + 1.0);
            flo_ = boost::math::cdf(d, lo_);
            fhi_ = boost::math::cdf(d, hi_);
            slo_ = boost::math::cdf(boost::math::complement(d, lo_));
            shi_ = boost::math::cdf(boost::math::complement(d, hi_));
        }
        mass_ = std::max(fhi_ - flo_, slo_ - shi_);
    }

    double draw(Rng& rng) const {
        if (proper_ && mass_ >= 0.5) {
            for (;;) {
                const double th = unrestricted(rng);
                if (th >= lo_ && th <= hi_) return th;
            }
        }
        if (proper_ && mass_ > 1e-12) return inverse_cdf(rng);
        // Flat envelope over the box; the density is unimodal with peak at mode_.
        std::uniform_real_distribution<double> u(lo_, hi_);
        std::uniform_real_distribution<double> v(0.0, 1.0);
        for (;;) {
            const double th = u(rng);
            if (std::log(v(rng)) <= st_.log_density(l_, th) - log_peak_) return th;
        }
    }

private:
    double unrestricted(Rng& rng) const {
        if (exp_) return 1.0 / std::gamma_distribution<double>(h0_, 1.0 / h1_)(rng);
        const double x = std::gamma_distribution<double>(h0_ + 1.0, 1.0)(rng);
        const double y = std::gamma_distribution<double>(h1_ + 1.0, 1.0)(rng);
        return x / (x + y);
    }

    double inverse_cdf(Rng& rng) const {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double w = u(rng);
        const bool use_upper = flo_ > 0.5;  // the box sits in the upper tail
        double th;
        if (exp_) {
            boost::math::inverse_gamma_distribution<double> d(h0_, h1_);
            th = use_upper ? boost::math::quantile(boost::math::complement(d, shi_ + w * (slo_ - shi_)))
                           : boost::math::quantile(d, flo_ + w * (fhi_ - flo_));
        } else {
            boost::math::beta_distribution<double> d(h0_ + 1.0, h1_ + 1.0);
            th = use_upper ? boost::math::quantile(boost::math::complement(d, shi_ + w * (slo_ - shi_)))
                           : boost::math::quantile(d, flo_ + w * (fhi_ - flo_));
        }
        return std::clamp(th, lo_, hi_);
    }

    const PosteriorState& st_;
    std::size_t l_;
    double lo_ = 0, hi_ = 0, h0_ = 0, h1_ = 0, mode_ = 0, log_peak_ = 0;
    double flo_ = 0, fhi_ = 0, slo_ = 0, shi_ = 0, mass_ = 0;
    bool exp_ = true, proper_ = false;
};

}  // namespace

PointSet sample_posterior(const PosteriorState& state, std::size_t n, Rng& rng) {
    if (state.support().is_discrete()) throw InputError("posterior sampling needs a continuous support");
    const std::size_t L = state.num_sources();
    std::vector<SourceSampler> samplers;
    samplers.reserve(L);
    for (std::size_t l = 0; l < L; ++l) samplers.emplace_back(state, l);
    std::vector<double> flat(n * L);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < L; ++l) flat[j * L + l] = samplers[l].draw(rng);
    return PointSet(L, std::move(flat));
}

}  // namespace osar
