#include "bpb/beta_structure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "bpb/linear_program.hpp"

namespace bpb {

namespace {

void check_shape(const BetaStructure& s) {
    if (!s.space) throw InputError("beta structure has no space");
    if (s.y.size() != s.y_star.size()) throw InputError("beta structure: y and y* counts differ");
    if (s.y.empty()) throw InputError("beta structure is empty");
    for (std::size_t a = 0; a < s.y.size(); ++a) {
        if (s.y[a].size() != s.space->dim() || s.y_star[a].size() != s.space->dim())
            throw InputError("beta structure: vector length does not match the space");
    }
}

// How far the family {y*} is from being 1-norming (0 when it is).
double norming_defect(const BetaStructure& s, std::uint64_t seed, int random_points) {
    const PolyhedralSpace& sp = *s.space;
    auto family_norm = [&](const Vec& v) {
        double m = 0.0;
        for (const Vec& f : s.y_star) m = std::max(m, std::abs(f.dot(v)));
        return m;
    };
    double defect = 0.0;
    if (sp.has_extreme_points()) {
        for (const Vec& v : sp.extreme_points()) defect = std::max(defect, std::abs(family_norm(v) - sp.norm(v)));
    } else {
        // Each norming functional must lie in the absolutely convex hull of {y*}.
        const int p = s.size();
        const int d = sp.dim();
        for (int i = 0; i < sp.num_functionals(); ++i) {
            lp::Problem prob(2 * p);
            prob.c.setOnes();
            for (int r = 0; r < d; ++r) {
                Eigen::RowVectorXd row(2 * p);
                for (int a = 0; a < p; ++a) {
                    row(a) = s.y_star[static_cast<std::size_t>(a)](r);
                    row(p + a) = -s.y_star[static_cast<std::size_t>(a)](r);
                }
                prob.add_eq(row, sp.functionals()(i, r));
            }
            const lp::Solution sol = lp::solve(prob);
            if (sol.status != lp::Status::Optimal) return 1.0;
            defect = std::max(defect, sol.objective - 1.0);
        }
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    for (int k = 0; k < random_points; ++k) {
        Vec v(sp.dim());
        for (int j = 0; j < sp.dim(); ++j) v(j) = g(rng);
        const double n = sp.norm(v);
        if (n > 0) defect = std::max(defect, std::abs(family_norm(v) - n) / n);
    }
    return defect;
}

}  // namespace

BetaReport verify_beta(const BetaStructure& s, double tol, std::uint64_t seed) {
    check_shape(s);
    const PolyhedralSpace& sp = *s.space;
    const int p = s.size();
    BetaReport rep;
    auto breach = [&](double amount, std::pair<int, int> where, const std::string& what) {
        if (amount > rep.worst_violation) {
            rep.worst_violation = amount;
            rep.witness = where;
            rep.message = what;
        }
    };
    for (int a = 0; a < p; ++a) {
        const Vec& y = s.y[static_cast<std::size_t>(a)];
        const Vec& ys = s.y_star[static_cast<std::size_t>(a)];
        breach(std::abs(sp.norm(y) - 1.0), {a, a}, "y is not a unit vector");
        breach(std::abs(sp.dual_norm(ys) - 1.0), {a, a}, "y* does not have dual norm 1");
        breach(std::abs(ys.dot(y) - 1.0), {a, a}, "y*(y) != 1");
    }
    double worst_off = 0.0;
    for (int a = 0; a < p; ++a)
        for (int c = 0; c < p; ++c)
            if (a != c) worst_off = std::max(worst_off, std::abs(s.y_star[static_cast<std::size_t>(a)].dot(s.y[static_cast<std::size_t>(c)])));
    rep.worst_off_diagonal = worst_off;
    for (int a = 0; a < p; ++a)
        for (int c = 0; c < p; ++c)
            if (a != c && std::abs(s.y_star[static_cast<std::size_t>(a)].dot(s.y[static_cast<std::size_t>(c)])) >= worst_off - 1e-12)
                rep.tied_witnesses.emplace_back(a, c);
    if (p > 1 && !rep.tied_witnesses.empty()) breach(worst_off - s.rho, rep.tied_witnesses.front(), "off-diagonal value exceeds rho");
    breach(norming_defect(s, seed, 1000), {-1, -1}, "family {y*} is not 1-norming");
    rep.pass = rep.worst_violation <= tol;
    if (rep.pass) rep.message = "ok";
    return rep;
}

double minimal_rho(const BetaStructure& s, double tol) {
    check_shape(s);
    const PolyhedralSpace& sp = *s.space;
    for (int a = 0; a < s.size(); ++a) {
        if (std::abs(s.y_star[static_cast<std::size_t>(a)].dot(s.y[static_cast<std::size_t>(a)]) - 1.0) > tol) {
            std::ostringstream os;
            os << "y*(y) != 1 for pair " << a;
            throw InvalidStructureError(os.str());
        }
        if (std::abs(sp.dual_norm(s.y_star[static_cast<std::size_t>(a)]) - 1.0) > tol)
            throw InvalidStructureError("a functional of the structure does not have dual norm 1");
    }
    if (norming_defect(s, 1, 200) > tol) throw InvalidStructureError("family {y*} is not 1-norming");
    double worst = 0.0;
    for (int a = 0; a < s.size(); ++a)
        for (int c = 0; c < s.size(); ++c)
            if (a != c) worst = std::max(worst, std::abs(s.y_star[static_cast<std::size_t>(a)].dot(s.y[static_cast<std::size_t>(c)])));
    return worst;
}

LinftyIsometry linfty_isometry(const BetaStructure& s, std::uint64_t seed) {
    LinftyIsometry out;
    const int n = s.space ? s.space->dim() : 0;
    const double r = minimal_rho(s);
    if (!(r < 1.0 / n)) {
        std::ostringstream os;
        os << "minimal rho " << r << " is not below 1/n = " << 1.0 / n;
        out.reason = os.str();
        return out;
    }
    if (s.size() != n) {
        std::ostringstream os;
        os << "structure with rho < 1/n must have exactly n = " << n << " pairs, got " << s.size();
        throw InvalidStructureError(os.str());
    }
    out.u.resize(n, n);
    for (int a = 0; a < n; ++a) out.u.row(a) = s.y_star[static_cast<std::size_t>(a)].transpose();
    const PolyhedralSpace& sp = *s.space;
    auto defect = [&](const Vec& y) { return std::abs((out.u * y).cwiseAbs().maxCoeff() - sp.norm(y)); };
    double worst = 0.0;
    if (sp.has_extreme_points())
        for (const Vec& v : sp.extreme_points()) worst = std::max(worst, defect(v));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    for (int k = 0; k < 10000; ++k) {
        Vec y(n);
        for (int j = 0; j < n; ++j) y(j) = g(rng);
        worst = std::max(worst, defect(y) / std::max(1.0, sp.norm(y)));
    }
    if (worst > 1e-12) {
        std::ostringstream os;
        os << "U is not isometric: defect " << worst;
        out.reason = os.str();
        return out;
    }
    out.ok = true;
    return out;
}

}  // namespace bpb
