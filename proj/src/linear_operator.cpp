#include "bpb/linear_operator.hpp"

#include <algorithm>
#include <cmath>

#include "bpb/space_zoo.hpp"

namespace bpb {

LinearOperator::LinearOperator(SpacePtr domain, SpacePtr codomain, Mat matrix)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)) {
    if (!domain_ || !codomain_) throw InputError("operator needs both spaces");
    if (matrix_.rows() != codomain_->dim() || matrix_.cols() != domain_->dim())
        throw InputError("operator matrix shape does not match codomain x domain dimensions");
    const auto& ext = domain_->extreme_points();
    std::vector<double> vals(ext.size());
    for (std::size_t i = 0; i < ext.size(); ++i) {
        vals[i] = codomain_->norm(matrix_ * ext[i]);
        norm_ = std::max(norm_, vals[i]);
    }
    for (std::size_t i = 0; i < ext.size(); ++i)
        if (vals[i] >= norm_ - 1e-12 * std::max(1.0, norm_)) witnesses_.push_back(static_cast<int>(i));
}

Vec LinearOperator::apply(const Vec& x) const {
    if (x.size() != domain_->dim()) throw InputError("operator applied to a vector of the wrong length");
    return matrix_ * x;
}

Vec LinearOperator::adjoint(const Vec& y_star) const {
    if (y_star.size() != codomain_->dim()) throw InputError("adjoint applied to a functional of the wrong length");
    return matrix_.transpose() * y_star;
}

LinearOperator LinearOperator::scaled(double s) const { return with_matrix(s * matrix_); }

LinearOperator LinearOperator::plus(const LinearOperator& other) const {
    if (other.matrix_.rows() != matrix_.rows() || other.matrix_.cols() != matrix_.cols()) throw InputError("operator shapes differ");
    return with_matrix(matrix_ + other.matrix_);
}

LinearOperator LinearOperator::minus(const LinearOperator& other) const { return plus(other.scaled(-1.0)); }

LinearOperator LinearOperator::with_matrix(Mat m) const { return LinearOperator(domain_, codomain_, std::move(m)); }

double operator_norm(const LinearOperator& t) { return t.norm(); }

double operator_distance(const LinearOperator& t, const LinearOperator& f) {
    if (t.matrix().rows() != f.matrix().rows() || t.matrix().cols() != f.matrix().cols()) throw InputError("operator shapes differ");
    const Mat d = t.matrix() - f.matrix();
    double best = 0.0;
    for (const Vec& v : t.domain()->extreme_points()) best = std::max(best, t.codomain()->norm(d * v));
    return best;
}

LinearOperator rank_one(SpacePtr domain, SpacePtr codomain, const Vec& g, const Vec& w) {
    return LinearOperator(std::move(domain), std::move(codomain), w * g.transpose());
}

PairClass classify_pair(const Vec& x, const LinearOperator& t, double eps, double tol) {
    PairClass c;
    c.x_norm = t.domain()->norm(x);
    c.t_norm = t.norm();
    c.tx_norm = t.codomain()->norm(t.apply(x));
    c.in_pi_eps = c.x_norm <= 1 + tol && c.t_norm <= 1 + tol && c.tx_norm > 1 - eps - tol;
    c.in_pi_eps_spherical = c.in_pi_eps && std::abs(c.x_norm - 1) <= tol && std::abs(c.t_norm - 1) <= tol;
    c.in_pi = std::abs(c.x_norm - 1) <= tol && std::abs(c.t_norm - 1) <= tol && std::abs(c.tx_norm - 1) <= tol;
    return c;
}

bool attains_on_segment(const LinearOperator& t, const Vec& u, const Vec& v, double tol) {
    const PolyhedralSpace& y = *t.codomain();
    const double n = t.norm();
    for (double l : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        if (std::abs(y.norm(t.apply(l * u + (1 - l) * v)) - n) > tol) return false;
    }
    const Vec tu = t.apply(u), tv = t.apply(v);
    for (int i = 0; i < y.num_functionals(); ++i) {
        const Vec g = y.functional(i);
        for (double s : {1.0, -1.0}) {
            if (std::abs(s * g.dot(tu) - n) <= tol && std::abs(s * g.dot(tv) - n) <= tol) return true;
        }
    }
    return false;
}

bool AttainingPair::holds() const {
    const double zn = f.domain()->norm(z);
    const double fz = f.codomain()->norm(f.apply(z));
    if (std::abs(zn - 1) > tol) return false;
    if (std::abs(fz - f.norm()) > tol) return false;
    if (mode == AttainMode::Exact && std::abs(f.norm() - 1) > tol) return false;
    return true;
}

nlohmann::json operator_to_json(const LinearOperator& t) {
    nlohmann::json j;
    j["domain"] = t.domain()->name();
    j["codomain"] = t.codomain()->name();
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < t.matrix().rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < t.matrix().cols(); ++c) row.push_back(t.matrix()(r, c));
        rows.push_back(row);
    }
    j["matrix"] = rows;
    return j;
}

LinearOperator operator_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("domain") || !j.contains("codomain") || !j.contains("matrix"))
        throw InputError("operator JSON needs 'domain', 'codomain' and 'matrix'");
    const SpacePtr x = space_by_name(j["domain"].get<std::string>()).space;
    const SpacePtr y = space_by_name(j["codomain"].get<std::string>()).space;
    const auto& rows = j["matrix"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != y->dim()) throw InputError("operator matrix needs one row per codomain coordinate");
    Mat m(y->dim(), x->dim());
    for (int r = 0; r < y->dim(); ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != x->dim()) throw InputError("operator matrix row has the wrong length");
        for (int c = 0; c < x->dim(); ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return LinearOperator(x, y, m);
}

}  // namespace bpb
