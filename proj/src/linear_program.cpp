#include "bpb/linear_program.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bpb::lp {

Problem::Problem(Eigen::Index num_vars)
    : c(Eigen::VectorXd::Zero(num_vars)),
      a_ub(0, num_vars),
      b_ub(0),
      a_eq(0, num_vars),
      b_eq(0),
      free(static_cast<std::size_t>(num_vars), false) {}

namespace {

void append_row(Eigen::MatrixXd& a, Eigen::VectorXd& b, const Eigen::RowVectorXd& row, double rhs) {
    if (row.size() != a.cols()) throw std::invalid_argument("lp: row width does not match variable count");
    a.conservativeResize(a.rows() + 1, Eigen::NoChange);
    b.conservativeResize(b.size() + 1);
    a.row(a.rows() - 1) = row;
    b(b.size() - 1) = rhs;
}

class Tableau {
public:
    Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

    Eigen::Index rows() const { return t_.rows() - 1; }
    Eigen::Index cols() const { return t_.cols() - 1; }
    double& at(Eigen::Index i, Eigen::Index j) { return t_(i, j); }
    double rhs(Eigen::Index i) const { return t_(i, t_.cols() - 1); }
    double& rhs(Eigen::Index i) { return t_(i, t_.cols() - 1); }
    double cost(Eigen::Index j) const { return t_(rows(), j); }
    double value() const { return -t_(rows(), t_.cols() - 1); }
    std::vector<Eigen::Index>& basis() { return basis_; }

    void set_objective(const Eigen::VectorXd& c) {
        t_.row(rows()).setZero();
        t_.row(rows()).head(cols()) = c.transpose();
        for (Eigen::Index i = 0; i < rows(); ++i) {
            const double cb = c(basis_[static_cast<std::size_t>(i)]);
            if (cb != 0.0) t_.row(rows()) -= cb * t_.row(i);
        }
    }

    void pivot(Eigen::Index r, Eigen::Index c) {
        t_.row(r) /= t_(r, c);
        for (Eigen::Index i = 0; i < t_.rows(); ++i) {
            if (i == r) continue;
            const double f = t_(i, c);
            if (f != 0.0) t_.row(i) -= f * t_.row(r);
        }
        basis_[static_cast<std::size_t>(r)] = c;
    }

    // Runs Bland-rule simplex iterations over columns [0, allowed).
    Status run(Eigen::Index allowed, double tol) {
        const int max_iter = 100000;
        for (int iter = 0; iter < max_iter; ++iter) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < allowed; ++j) {
                if (cost(j) < -tol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return Status::Optimal;
            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < rows(); ++i) {
                const double a = t_(i, enter);
                if (a <= 1e-9) continue;
                const double ratio = rhs(i) / a;
                if (ratio < best - 1e-12 ||
                    (std::abs(ratio - best) <= 1e-12 && leave >= 0 &&
                     basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0) return Status::Unbounded;
            pivot(leave, enter);
        }
        throw std::runtime_error("lp: iteration limit reached");
    }

    void drop_row(Eigen::Index r) {
        const Eigen::Index n = t_.rows();
        if (r < n - 1) t_.middleRows(r, n - 1 - r) = t_.bottomRows(n - 1 - r).eval();
        t_.conservativeResize(n - 1, Eigen::NoChange);
        basis_.erase(basis_.begin() + r);
    }

private:
    Eigen::MatrixXd t_;
    std::vector<Eigen::Index> basis_;
};

}  // namespace

void Problem::add_le(const Eigen::RowVectorXd& row, double rhs) { append_row(a_ub, b_ub, row, rhs); }
void Problem::add_ge(const Eigen::RowVectorXd& row, double rhs) { append_row(a_ub, b_ub, -row, -rhs); }
void Problem::add_eq(const Eigen::RowVectorXd& row, double rhs) { append_row(a_eq, b_eq, row, rhs); }

Solution solve(const Problem& p, double tol) {
    const Eigen::Index n = p.num_vars();
    const Eigen::Index m_ub = p.a_ub.rows();
    const Eigen::Index m_eq = p.a_eq.rows();
    const Eigen::Index m = m_ub + m_eq;

    // Column layout: structural (free variables split in two), slacks, artificials.
    std::vector<Eigen::Index> pos(static_cast<std::size_t>(n)), neg(static_cast<std::size_t>(n), -1);
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        pos[static_cast<std::size_t>(j)] = col++;
        if (!p.free.empty() && p.free[static_cast<std::size_t>(j)]) neg[static_cast<std::size_t>(j)] = col++;
    }
    const Eigen::Index num_struct = col;
    const Eigen::Index slack0 = num_struct;
    const Eigen::Index art0 = slack0 + m_ub;

    std::vector<bool> needs_art(static_cast<std::size_t>(m), false);
    Eigen::Index num_art = 0;
    for (Eigen::Index i = 0; i < m_ub; ++i)
        if (p.b_ub(i) < 0) needs_art[static_cast<std::size_t>(i)] = true;
    for (Eigen::Index i = 0; i < m_eq; ++i) needs_art[static_cast<std::size_t>(m_ub + i)] = true;
    for (bool b : needs_art) num_art += b ? 1 : 0;

    Tableau tab(m, art0 + num_art);
    Eigen::Index art = art0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const bool is_ub = i < m_ub;
        const Eigen::RowVectorXd row = is_ub ? Eigen::RowVectorXd(p.a_ub.row(i)) : Eigen::RowVectorXd(p.a_eq.row(i - m_ub));
        double b = is_ub ? p.b_ub(i) : p.b_eq(i - m_ub);
        const double sign = b < 0 ? -1.0 : 1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            tab.at(i, pos[static_cast<std::size_t>(j)]) = sign * row(j);
            if (neg[static_cast<std::size_t>(j)] >= 0) tab.at(i, neg[static_cast<std::size_t>(j)]) = -sign * row(j);
        }
        if (is_ub) tab.at(i, slack0 + i) = sign;
        tab.rhs(i) = sign * b;
        if (needs_art[static_cast<std::size_t>(i)]) {
            tab.at(i, art) = 1.0;
            tab.basis()[static_cast<std::size_t>(i)] = art++;
        } else {
            tab.basis()[static_cast<std::size_t>(i)] = slack0 + i;
        }
    }

    Solution sol;
    if (num_art > 0) {
        Eigen::VectorXd c1 = Eigen::VectorXd::Zero(tab.cols());
        c1.tail(num_art).setOnes();
        tab.set_objective(c1);
        tab.run(tab.cols(), tol);
        double scale = 1.0;
        for (Eigen::Index i = 0; i < tab.rows(); ++i) scale = std::max(scale, std::abs(tab.rhs(i)));
        if (tab.value() > 1e-9 * scale) {
            sol.status = Status::Infeasible;
            return sol;
        }
        // Pivot remaining zero-level artificials out of the basis; drop redundant rows.
        for (Eigen::Index i = tab.rows() - 1; i >= 0; --i) {
            if (tab.basis()[static_cast<std::size_t>(i)] < art0) continue;
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < art0; ++j) {
                if (std::abs(tab.at(i, j)) > 1e-9) {
                    enter = j;
                    break;
                }
            }
            if (enter >= 0)
                tab.pivot(i, enter);
            else
                tab.drop_row(i);
        }
    }

    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(tab.cols());
    for (Eigen::Index j = 0; j < n; ++j) {
        c2(pos[static_cast<std::size_t>(j)]) = p.c(j);
        if (neg[static_cast<std::size_t>(j)] >= 0) c2(neg[static_cast<std::size_t>(j)]) = -p.c(j);
    }
    tab.set_objective(c2);
    const Status st = tab.run(art0, tol);
    if (st == Status::Unbounded) {
        sol.status = Status::Unbounded;
        return sol;
    }

    Eigen::VectorXd full = Eigen::VectorXd::Zero(tab.cols());
    for (Eigen::Index i = 0; i < tab.rows(); ++i) full(tab.basis()[static_cast<std::size_t>(i)]) = tab.rhs(i);
    sol.x.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double v = full(pos[static_cast<std::size_t>(j)]);
        if (neg[static_cast<std::size_t>(j)] >= 0) v -= full(neg[static_cast<std::size_t>(j)]);
        sol.x(j) = v;
    }
    sol.objective = p.c.dot(sol.x);
    sol.status = Status::Optimal;
    return sol;
}

}  // namespace bpb::lp
