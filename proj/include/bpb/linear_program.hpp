#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bpb::lp {

enum class Status { Optimal, Infeasible, Unbounded };

/// Dense linear program
///
///     minimize    c . x
///     subject to  A_ub x <= b_ub
///                 A_eq x == b_eq
///                 x_j >= 0 unless free[j]
///
/// Either constraint block may be empty (zero rows). Sized for the small
/// problems that show up in polytope distance queries (tens of variables,
/// a few hundred rows).
struct Problem {
    Eigen::VectorXd c;
    Eigen::MatrixXd a_ub;
    Eigen::VectorXd b_ub;
    Eigen::MatrixXd a_eq;
    Eigen::VectorXd b_eq;
    std::vector<bool> free;  // empty means "all nonnegative"

    explicit Problem(Eigen::Index num_vars);
    Eigen::Index num_vars() const { return c.size(); }

    void add_le(const Eigen::RowVectorXd& row, double rhs);
    void add_ge(const Eigen::RowVectorXd& row, double rhs);
    void add_eq(const Eigen::RowVectorXd& row, double rhs);
};

struct Solution {
    Status status = Status::Infeasible;
    double objective = 0.0;
    Eigen::VectorXd x;
};

/// Two-phase primal simplex with Bland's anti-cycling rule.
Solution solve(const Problem& problem, double tol = 1e-11);

}  // namespace bpb::lp
