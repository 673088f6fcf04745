#pragma once
// Max-min budget allocation between input data collection (beta) and simulation
// at the support points (alpha), with every fraction floored at epsilon.

#include <cstddef>
#include <vector>

namespace osar {

struct AllocationInstance {
    // kl[b][l] = KL(theta_hat^l || theta_b^l) / c_l for each point that carries an alpha.
    std::vector<std::vector<double>> kl;
    std::vector<double> g_star;
    std::vector<char> favorable;
    double epsilon = 0.0;
    // Rows of the inner minimum that carry no alpha (densely predicted adversarial
    // points, or the true adversarial set on a fine grid).
    std::vector<std::vector<double>> extra_kl;

    std::size_t num_points() const { return kl.size(); }
    std::size_t num_sources() const;
    void validate() const;
};

struct AllocationSolution {
    std::vector<double> alpha;
    std::vector<double> beta;
    double objective = 0.0;
};

AllocationSolution solve_maxmin_lp(const AllocationInstance& inst);

// min over every row of kl . beta + alpha_b g_b 1{favorable}, evaluated directly.
double evaluate_maxmin(const AllocationInstance& inst, const std::vector<double>& alpha,
                       const std::vector<double>& beta);

struct InputOnlySolution {
    std::vector<double> beta;
    double objective = 0.0;
};
// max D s.t. D <= sum_l beta_l kl[j][l] / c_l, sum beta = 1, beta >= 0.
InputOnlySolution input_only_lp(const std::vector<std::vector<double>>& kl_rows,
                                const std::vector<double>& costs);

// eps (B + L); throws DomainError unless 0 < eps < 1/(B+L).
double optimality_gap_bound(std::size_t B, std::size_t L, double epsilon);

// Indices of rows not weakly dominated by another row (a row dominates when it is
// componentwise <=). Exact duplicates keep their lowest index.
std::vector<std::size_t> pareto_minimal_rows(const std::vector<std::vector<double>>& rows);

}  // namespace osar
