#include "osar/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "osar/common.hpp"
#include "osar/simplex.hpp"

namespace osar {

std::size_t AllocationInstance::num_sources() const {
    if (!kl.empty()) return kl.front().size();
    if (!extra_kl.empty()) return extra_kl.front().size();
    return 0;
}

void AllocationInstance::validate() const {
    const std::size_t B = kl.size(), L = num_sources();
    if (L == 0) throw InputError("allocation instance has no input sources");
    if (g_star.size() != B || favorable.size() != B) throw InputError("allocation instance: length mismatch");
    auto check_rows = [L](const std::vector<std::vector<double>>& rows) {
        for (const auto& r : rows) {
            if (r.size() != L) throw InputError("allocation instance: ragged KL rows");
            for (double v : r)
                if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("allocation instance: KL entries must be >= 0");
        }
    };
    check_rows(kl);
    check_rows(extra_kl);
    for (double g : g_star)
        if (!(g >= 0.0) || !std::isfinite(g)) throw InputError("allocation instance: g* entries must be >= 0");
    if (epsilon < 0.0) throw InputError("allocation instance: epsilon must be >= 0");
    if (epsilon * static_cast<double>(B + L) >= 1.0) {
        std::ostringstream os;
        os << "allocation infeasible: eps*(B+L) = " << epsilon * static_cast<double>(B + L) << " >= 1";
        throw InfeasibleError(os.str());
    }
}

std::vector<std::size_t> pareto_minimal_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    if (!rows.empty() && rows.front().size() == 2) {
        // Two columns: sort lexicographically and sweep the running minimum.
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return rows[a][0] != rows[b][0] ? rows[a][0] < rows[b][0] : rows[a][1] < rows[b][1];
        });
        std::vector<std::size_t> keep;
        double low = std::numeric_limits<double>::infinity();
        for (std::size_t j : order)
            if (rows[j][1] < low) {
                low = rows[j][1];
                keep.push_back(j);
            }
        std::sort(keep.begin(), keep.end());
        return keep;
    }
    std::vector<double> sum(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) sum[j] = std::accumulate(rows[j].begin(), rows[j].end(), 0.0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sum[a] < sum[b]; });
    // A dominator has no larger sum, so it is always met first.
    std::vector<std::size_t> keep;
    for (std::size_t j : order) {
        bool dominated = false;
        for (std::size_t f : keep) {
            bool le = true;
            for (std::size_t l = 0; l < rows[j].size() && le; ++l) le = rows[f][l] <= rows[j][l];
            if (le) {
                dominated = true;
                break;
            }
        }
        if (!dominated) keep.push_back(j);
    }
    std::sort(keep.begin(), keep.end());
    return keep;
}

double evaluate_maxmin(const AllocationInstance& inst, const std::vector<double>& alpha,
                       const std::vector<double>& beta) {
    double v = std::numeric_limits<double>::infinity();
    auto kl_term = [&](const std::vector<double>& row) {
        double s = 0.0;
        for (std::size_t l = 0; l < row.size(); ++l) s += beta[l] * row[l];
        return s;
    };
    for (std::size_t b = 0; b < inst.kl.size(); ++b)
        v = std::min(v, kl_term(inst.kl[b]) + (inst.favorable[b] ? alpha[b] * inst.g_star[b] : 0.0));
    for (const auto& r : inst.extra_kl) v = std::min(v, kl_term(r));
    return v;
}

AllocationSolution solve_maxmin_lp(const AllocationInstance& inst) {
    inst.validate();
    const std::size_t B = inst.kl.size(), L = inst.num_sources();
    const double eps = inst.epsilon;
    const double uniform = 1.0 / static_cast<double>(B + L);

    // Only favorable points with a positive rate gain anything from alpha above
    // the floor; all other rows are KL-only and can be reduced to their
    // Pareto-minimal subset without changing the optimum.
    std::vector<std::size_t> active;
    std::vector<std::vector<double>> kl_only;
    for (std::size_t b = 0; b < B; ++b) {
        if (inst.favorable[b] && inst.g_star[b] > 0.0)
            active.push_back(b);
        else
            kl_only.push_back(inst.kl[b]);
    }
    kl_only.insert(kl_only.end(), inst.extra_kl.begin(), inst.extra_kl.end());

    // An all-zero KL-only row pins the max-min value at 0 for every feasible
    // point, so any allocation is optimal. Pick the one that is best for the
    // remaining rows (one lexicographic max-min step) instead of whatever vertex
    // the simplex lands on, which tends to park the whole budget on one source.
    const auto zero_row = [](const std::vector<double>& r) {
        return std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; });
    };
    const bool pinned = std::any_of(kl_only.begin(), kl_only.end(), zero_row);
    std::erase_if(kl_only, zero_row);

    AllocationSolution sol;
    if (active.empty() && kl_only.empty()) {
        sol.alpha.assign(B, uniform);
        sol.beta.assign(L, uniform);
        sol.objective = 0.0;
        return sol;
    }
    std::vector<std::vector<double>> kl_rows;
    for (std::size_t j : pareto_minimal_rows(kl_only)) kl_rows.push_back(kl_only[j]);

    // Variables: D, beta'_l (L), alpha'_a (active). beta = eps + beta', alpha = eps + alpha'.
    const std::size_t A = active.size();
    LinearProgram lp;
    lp.n = 1 + L + A;
    lp.c.assign(lp.n, 0.0);
    lp.c[0] = 1.0;
    auto add_row = [&](const std::vector<double>& kl, double g, std::size_t a) {
        std::vector<double> row(lp.n, 0.0);
        row[0] = 1.0;
        double rhs = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            row[1 + l] = -kl[l];
            rhs += eps * kl[l];
        }
        if (a < A) {
            row[1 + L + a] = -g;
            rhs += eps * g;
        }
        lp.a_le.push_back(std::move(row));
        lp.b_le.push_back(rhs);
    };
    for (std::size_t a = 0; a < A; ++a) add_row(inst.kl[active[a]], inst.g_star[active[a]], a);
    for (const auto& r : kl_rows) add_row(r, 0.0, A);
    std::vector<double> eq(lp.n, 1.0);
    eq[0] = 0.0;
    lp.a_eq.push_back(std::move(eq));
    lp.b_eq.push_back(1.0 - eps * static_cast<double>(B + L));

    const LpResult res = solve_lp(lp);
    if (res.status != LpResult::Status::Optimal) {
        if (res.status == LpResult::Status::Infeasible) throw InfeasibleError("allocation LP infeasible");
        throw std::runtime_error("allocation LP did not reach an optimum");
    }
    sol.beta.assign(L, eps);
    for (std::size_t l = 0; l < L; ++l) sol.beta[l] += res.x[1 + l];
    sol.alpha.assign(B, eps);
    for (std::size_t a = 0; a < A; ++a) sol.alpha[active[a]] += res.x[1 + L + a];
    sol.objective = pinned ? 0.0 : res.x[0];
    return sol;
}

InputOnlySolution input_only_lp(const std::vector<std::vector<double>>& kl_rows,
                                const std::vector<double>& costs) {
    if (kl_rows.empty()) throw InputError("input_only_lp: empty adversarial set");
    const std::size_t L = costs.size();
    LinearProgram lp;
    lp.n = 1 + L;
    lp.c.assign(lp.n, 0.0);
    lp.c[0] = 1.0;
    for (const auto& r : kl_rows) {
        if (r.size() != L) throw InputError("input_only_lp: ragged rows");
        std::vector<double> row(lp.n, 0.0);
        row[0] = 1.0;
        for (std::size_t l = 0; l < L; ++l) {
            if (!(costs[l] > 0.0) || !(r[l] >= 0.0)) throw InputError("input_only_lp: bad coefficients");
            row[1 + l] = -r[l] / costs[l];
        }
        lp.a_le.push_back(std::move(row));
        lp.b_le.push_back(0.0);
    }
    std::vector<double> eq(lp.n, 1.0);
    eq[0] = 0.0;
    lp.a_eq.push_back(std::move(eq));
    lp.b_eq.push_back(1.0);
    const LpResult res = solve_lp(lp);
    if (res.status != LpResult::Status::Optimal) throw std::runtime_error("input_only_lp: no optimum");
    InputOnlySolution out;
    out.beta.assign(res.x.begin() + 1, res.x.end());
    out.objective = res.x[0];
    return out;
}

double optimality_gap_bound(std::size_t B, std::size_t L, double epsilon) {
    const double n = static_cast<double>(B + L);
    if (!(epsilon > 0.0 && epsilon < 1.0 / n)) throw DomainError("epsilon must lie in (0, 1/(B+L))");
    return epsilon * n;
}

}  // namespace osar
