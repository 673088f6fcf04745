#pragma once
// Dense two-phase tableau simplex with Bland's rule.
//   maximize c'x  s.t.  A_le x <= b_le,  A_eq x = b_eq,  x >= 0,  with b >= 0.

#include <cstddef>
#include <vector>

namespace osar {

struct LinearProgram {
    std::size_t n = 0;  // structural variables
    std::vector<double> c;
    std::vector<std::vector<double>> a_le, a_eq;
    std::vector<double> b_le, b_eq;
};

struct LpResult {
    enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };
    Status status = Status::Optimal;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t pivots = 0;
};

LpResult solve_lp(const LinearProgram& lp);

}  // namespace osar
