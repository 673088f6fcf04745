#include "osar/krr.hpp"

#include <algorithm>
#include <cmath>

#include "osar/simd.hpp"

namespace osar {

double SeKernel::unit(std::span<const double> a, std::span<const double> b) const {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double z = (a[d] - b[d]) / lengthscale[d];
        s += z * z;
    }
    return std::exp(-0.5 * s);
}

double SeKernel::operator()(std::span<const double> a, std::span<const double> b) const {
    return signal * unit(a, b);
}

Eigen::MatrixXd gram(const SeKernel& k, const PointSet& a, const PointSet& b) {
    const std::size_t dim = a.dim();
    std::vector<double> inv(dim), d2(b.size());
    for (std::size_t d = 0; d < dim; ++d) inv[d] = 1.0 / k.lengthscale[d];
    Eigen::MatrixXd g(a.size(), b.size());
    const auto& kt = simd::active();
    for (std::size_t i = 0; i < a.size(); ++i) {
        kt.scaled_sq_dist(b.data(), b.size(), dim, a[i].data(), inv.data(), d2.data());
        for (std::size_t j = 0; j < b.size(); ++j) g(i, j) = k.signal * std::exp(-0.5 * d2[j]);
    }
    return g;
}

Eigen::MatrixXd gram(const SeKernel& k, const PointSet& a) {
    Eigen::MatrixXd g = gram(k, a, a);
    return 0.5 * (g + g.transpose());
}

std::vector<double> median_lengthscale(const PointSet& pts) {
    const std::size_t n = pts.size(), dim = pts.dim();
    std::vector<double> ls(dim, 1.0), diffs;
    diffs.reserve(n * (n - 1) / 2);
    for (std::size_t d = 0; d < dim; ++d) {
        diffs.clear();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) diffs.push_back(std::abs(pts[i][d] - pts[j][d]));
        if (diffs.empty()) continue;
        auto mid = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
        std::nth_element(diffs.begin(), mid, diffs.end());
        double med = *mid;
        if (diffs.size() % 2 == 0) med = 0.5 * (med + *std::max_element(diffs.begin(), mid));
        if (med > 0.0) ls[d] = med;
    }
    return ls;
}

KrrHyper default_hyper(const PointSet& anchors, std::span<const double> m) {
    KrrHyper h;
    h.kernel.lengthscale = median_lengthscale(anchors);
    double mean = 0.0;
    for (double v : m) mean += v;
    mean /= static_cast<double>(m.size());
    double var = 0.0;
    for (double v : m) var += (v - mean) * (v - mean);
    var = m.size() > 1 ? var / static_cast<double>(m.size() - 1) : 0.0;
    h.kernel.signal = var > 0.0 ? var : 1.0;
    h.gamma = mean;
    h.kappa = 1.0;
    return h;
}

// ---------------------------------------------------------------- discrete

namespace {

void discrete_solve(DiscreteKrr& s) {
    const Eigen::Index B = s.K.rows();
    Eigen::VectorXd resid(B);
    Eigen::MatrixXd M = s.K;
    Eigen::MatrixXd Ms = s.K;  // K + Sigma for the recursion matrix
    for (Eigen::Index b = 0; b < B; ++b) {
        const double n = static_cast<double>(s.counts[b]);
        if (n <= 0.0) throw InputError("fit_discrete: every point needs at least one replication");
        const double sig = s.noise[b] / n;
        M(b, b) += s.kappa * sig;
        Ms(b, b) += sig;
        resid[b] = s.sums[b] / n - s.gamma;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) throw std::runtime_error("fit_discrete: K + kappa Sigma not positive definite");
    s.mu_hat = Eigen::VectorXd::Constant(B, s.gamma) + s.K.transpose() * llt.solve(resid);
    Eigen::LLT<Eigen::MatrixXd> llt2(Ms);
    s.C = s.K - s.K * llt2.solve(s.K);
    s.C = 0.5 * (s.C + s.C.transpose());
    s.updates_since_refit = 0;
}

}  // namespace

DiscreteKrr fit_discrete(std::span<const double> means, std::span<const std::size_t> counts,
                         std::span<const double> stds, const Eigen::MatrixXd& K, double gamma,
                         double kappa) {
    const std::size_t B = means.size();
    if (counts.size() != B || stds.size() != B || static_cast<std::size_t>(K.rows()) != B)
        throw InputError("fit_discrete: length mismatch");
    DiscreteKrr s;
    s.K = K;
    s.gamma = gamma;
    s.kappa = kappa;
    s.counts.assign(counts.begin(), counts.end());
    s.sums.resize(B);
    s.noise.resize(B);
    for (std::size_t b = 0; b < B; ++b) {
        if (!(stds[b] > 0.0)) throw InputError("fit_discrete: stds must be positive");
        s.sums[b] = means[b] * static_cast<double>(counts[b]);
        s.noise[b] = stds[b] * stds[b];
    }
    discrete_solve(s);
    return s;
}

DiscreteKrr fit_discrete(std::span<const double> means, std::span<const std::size_t> counts,
                         std::span<const double> stds, const SeKernel& kernel, const PointSet& points,
                         double gamma, double kappa) {
    return fit_discrete(means, counts, stds, gram(kernel, points), gamma, kappa);
}

void refit_discrete(DiscreteKrr& s) { discrete_solve(s); }

void update_discrete_inplace(DiscreteKrr& s, std::size_t b, double y) {
    if (s.kappa != 1.0) throw InputError("update_discrete: the recursion holds for kappa = 1 only");
    const Eigen::Index B = s.C.rows();
    const double denom = s.noise[b] + s.C(b, b);
    const Eigen::VectorXd c = s.C.col(static_cast<Eigen::Index>(b));
    const double gain = (y - s.mu_hat[b]) / denom;
    const auto& kt = simd::active();
    kt.axpy(gain, c.data(), s.mu_hat.data(), static_cast<std::size_t>(B));
    // C is symmetric and column-major: downdate column by column.
    for (Eigen::Index j = 0; j < B; ++j)
        kt.axpy(-c[j] / denom, c.data(), s.C.col(j).data(), static_cast<std::size_t>(B));
    s.sums[b] += y;
    s.counts[b] += 1;
    if (++s.updates_since_refit >= s.refit_every) discrete_solve(s);
}

DiscreteKrr update_discrete(const DiscreteKrr& s, std::size_t b, double y) {
    DiscreteKrr n = s;
    update_discrete_inplace(n, b, y);
    return n;
}

// ----------------------------------------------------------------- Nystrom

Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double rtol) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cut = sv.size() ? rtol * sv[0] : 0.0;
    Eigen::VectorXd utb = svd.matrixU().transpose() * b;
    for (Eigen::Index i = 0; i < sv.size(); ++i) utb[i] = sv[i] > cut ? utb[i] / sv[i] : 0.0;
    return svd.matrixV() * utb;
}

NystromKrr::NystromKrr(const SeKernel& kernel, PointSet anchors, double gamma, double kappa, Solver solver)
    : kernel_(kernel), anchors_(std::move(anchors)), gamma_(gamma), kappa_(kappa), solver_(solver) {
    const Eigen::Index n = static_cast<Eigen::Index>(anchors_.size());
    if (n < 2) throw InputError("Nystrom KRR needs at least one fixed anchor and the MAP");
    kbar_ = gram(kernel_, anchors_);
    grid_w_.assign(static_cast<std::size_t>(n - 1), 0.0);
    grid_wy_.assign(static_cast<std::size_t>(n - 1), 0.0);
    a_grid_ = Eigen::MatrixXd::Zero(n, n);
    h_ = Eigen::MatrixXd::Zero(n, n);
    b_grid_ = Eigen::VectorXd::Zero(n);
    hb_ = Eigen::VectorXd::Zero(n);
    invalidate_factor();
}

Eigen::MatrixXd NystromKrr::assemble_a() const {
    Eigen::MatrixXd a = a_grid_ + hist_scale_ * h_ + kappa_ * kbar_;
    return a;
}

Eigen::VectorXd NystromKrr::assemble_b() const { return b_grid_ + hist_scale_ * hb_; }

void NystromKrr::set_anchor_stats(std::size_t b, double w, double wy) {
    const double dw = w - grid_w_.at(b), dwy = wy - grid_wy_[b];
    if (dw == 0.0 && dwy == 0.0) return;
    grid_w_[b] = w;
    grid_wy_[b] = wy;
    const Eigen::VectorXd k = kbar_.col(static_cast<Eigen::Index>(b));
    if (dw != 0.0) {
        a_grid_.noalias() += dw * k * k.transpose();
        if (qr_valid_) rank_one(dw * k, k);
    }
    b_grid_ += dwy * k;
    coeff_valid_ = false;
}

void NystromKrr::add_anchor_observation(std::size_t b, double y, double noise) {
    set_anchor_stats(b, grid_w_.at(b) + 1.0 / noise, grid_wy_[b] + (y - gamma_) / noise);
}

void NystromKrr::add_map_observation(double y, double noise) {
    const Eigen::Index last = static_cast<Eigen::Index>(anchors_.size()) - 1;
    const auto map = anchors_[anchors_.size() - 1];
    if (hist_.empty() || !std::equal(map.begin(), map.end(), hist_.back().theta.begin())) {
        NystromSite s;
        s.theta.assign(map.begin(), map.end());
        s.k = kbar_.col(last);
        hist_.push_back(std::move(s));
    }
    NystromSite& s = hist_.back();
    const double w = 1.0 / noise;
    s.w += w;
    s.wy += (y - gamma_) * w;
    h_.noalias() += w * s.k * s.k.transpose();
    hb_ += (y - gamma_) * w * s.k;
    if (qr_valid_) rank_one(hist_scale_ * w * s.k, s.k);
    coeff_valid_ = false;
}

void NystromKrr::set_history_scale(double scale) {
    if (scale == hist_scale_) return;
    hist_scale_ = scale;
    invalidate_factor();
}

void NystromKrr::move_map(std::span<const double> theta) {
    const std::size_t last = anchors_.size() - 1;
    auto cur = anchors_[last];
    if (std::equal(cur.begin(), cur.end(), theta.begin())) return;
    std::copy(theta.begin(), theta.end(), cur.begin());
    const Eigen::Index L = static_cast<Eigen::Index>(last);
    const Eigen::Index n = L + 1;
    for (Eigen::Index j = 0; j < n; ++j) kbar_(L, j) = kbar_(j, L) = kernel_(anchors_[last], anchors_[j]);
    // Row/column L of the grid part: sum_b w_b k_b[L] k_b.
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    double bl = 0.0;
    for (Eigen::Index b = 0; b < L; ++b) {
        const double w = grid_w_[b];
        if (w == 0.0 && grid_wy_[b] == 0.0) continue;
        row += w * kbar_(L, b) * kbar_.col(b);
        bl += grid_wy_[b] * kbar_(L, b);
    }
    a_grid_.row(L) = row.transpose();
    a_grid_.col(L) = row;
    b_grid_[L] = bl;
    Eigen::VectorXd hrow = Eigen::VectorXd::Zero(n);
    double hl = 0.0;
    for (auto& s : hist_) {
        s.k[L] = kernel_(anchors_[last], s.theta);
        hrow += s.w * s.k[L] * s.k;
        hl += s.wy * s.k[L];
    }
    h_.row(L) = hrow.transpose();
    h_.col(L) = hrow;
    hb_[L] = hl;
    invalidate_factor();
}

void NystromKrr::refactor() {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(assemble_a());
    q_ = qr.householderQ();
    r_ = qr.matrixQR().triangularView<Eigen::Upper>();
    qr_valid_ = true;
    updates_since_refactor_ = 0;
}

// Givens update of Q R to the factorization of Q R + u v'.
void NystromKrr::rank_one(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const Eigen::Index n = r_.rows();
    Eigen::VectorXd w = q_.transpose() * u;
    auto rotate_rows = [&](Eigen::Index k, double c, double s, Eigen::Index from) {
        for (Eigen::Index j = from; j < n; ++j) {
            const double x = r_(k, j), y = r_(k + 1, j);
            r_(k, j) = c * x + s * y;
            r_(k + 1, j) = -s * x + c * y;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = q_(i, k), y = q_(i, k + 1);
            q_(i, k) = c * x + s * y;
            q_(i, k + 1) = -s * x + c * y;
        }
    };
    for (Eigen::Index k = n - 2; k >= 0; --k) {
        const double a = w[k], b = w[k + 1];
        if (b == 0.0) continue;
        const double r = std::hypot(a, b), c = a / r, s = b / r;
        w[k] = r;
        w[k + 1] = 0.0;
        rotate_rows(k, c, s, k);
    }
    r_.row(0) += w[0] * v.transpose();
    for (Eigen::Index k = 0; k < n - 1; ++k) {
        const double a = r_(k, k), b = r_(k + 1, k);
        if (b == 0.0) continue;
        const double r = std::hypot(a, b), c = a / r, s = b / r;
        rotate_rows(k, c, s, k);
        r_(k + 1, k) = 0.0;
    }
    if (++updates_since_refactor_ >= 500) qr_valid_ = false;
}

const Eigen::VectorXd& NystromKrr::coefficients() {
    if (coeff_valid_) return coeff_;
    const double rtol = 1e-12 * static_cast<double>(anchors_.size());
    switch (solver_) {
        case Solver::PseudoInverse:
            coeff_ = pinv_solve(assemble_a(), assemble_b(), rtol);
            break;
        case Solver::QrUpdate: {
            if (!qr_valid_) refactor();
            const Eigen::VectorXd qtb = q_.transpose() * assemble_b();
            coeff_ = r_.triangularView<Eigen::Upper>().solve(qtb);
            break;
        }
        case Solver::Cod: {
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
            cod.setThreshold(rtol);
            cod.compute(assemble_a());
            coeff_ = cod.solve(assemble_b());
            break;
        }
    }
    coeff_valid_ = true;
    return coeff_;
}

Eigen::VectorXd NystromKrr::predict_anchors() {
    const Eigen::VectorXd& c = coefficients();
    return (kbar_ * c).array() + gamma_;
}

Eigen::VectorXd NystromKrr::predict(const PointSet& pts) {
    const Eigen::VectorXd& c = coefficients();
    const Eigen::MatrixXd kd = gram(kernel_, pts, anchors_);
    return (kd * c).array() + gamma_;
}

NystromFit fit_nystrom(const PointSet& anchors, std::span<const double> means,
                       std::span<const std::size_t> counts, std::span<const double> stds,
                       const std::vector<MapObservation>& history, const SeKernel& kernel,
                       double gamma, double kappa) {
    const std::size_t nb = anchors.size();
    const std::size_t B = nb - 1;
    if (means.size() != B || counts.size() != B || stds.size() != B)
        throw InputError("fit_nystrom: statistics must cover the fixed anchors");
    // Columns of K-tilde: the fixed anchors, then every MAP replication.
    PointSet design(anchors.dim());
    for (std::size_t b = 0; b < B; ++b) design.push_back(anchors[b]);
    for (const auto& h : history) design.push_back(h.theta);
    const std::size_t nd = design.size();
    Eigen::VectorXd winv(nd), y(nd);
    for (std::size_t b = 0; b < B; ++b) {
        winv[b] = counts[b] > 0 ? static_cast<double>(counts[b]) / (stds[b] * stds[b]) : 0.0;
        y[b] = counts[b] > 0 ? means[b] - gamma : 0.0;
    }
    for (std::size_t r = 0; r < history.size(); ++r) {
        winv[B + r] = 1.0 / history[r].noise;
        y[B + r] = history[r].y - gamma;
    }
    const Eigen::MatrixXd kbar = gram(kernel, anchors);
    const Eigen::MatrixXd kt = gram(kernel, anchors, design);
    const Eigen::MatrixXd a = kt * winv.asDiagonal() * kt.transpose() + kappa * kbar;
    const Eigen::VectorXd rhs = kt * winv.asDiagonal() * y;
    NystromFit f;
    f.coeff = pinv_solve(a, rhs, 1e-12 * static_cast<double>(nb));
    f.mu_hat = (kbar * f.coeff).array() + gamma;
    return f;
}

}  // namespace osar
