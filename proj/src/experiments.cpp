#include <algorithm>
#include <cmath>
#include <random>

#include "bpb/linear_program.hpp"
#include "bpb/moduli.hpp"
#include "bpb/sampling.hpp"
#include "bpb/space_zoo.hpp"

namespace bpb {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InputError(what);
}

/// Distance in Z_rho^(n) from w to {h : |h_i| <= 1, sum h_i = rho n}, the face of z*.
double z_face_distance(const ZBundle& z, const Vec& w) {
    const int n = z.n;
    const double rn = z.rho * n;
    lp::Problem p(n + 1);
    p.c.setZero();
    p.c(n) = 1.0;
    p.free.assign(static_cast<std::size_t>(n + 1), true);
    p.free[static_cast<std::size_t>(n)] = false;
    for (int i = 0; i < n; ++i) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n + 1);
        row(i) = 1.0;
        row(n) = -1.0;
        p.add_le(row, w(i));  // h_i - w_i <= s
        row(i) = -1.0;
        p.add_le(row, -w(i));  // w_i - h_i <= s
        Eigen::RowVectorXd box = Eigen::RowVectorXd::Zero(n + 1);
        box(i) = 1.0;
        p.add_le(box, 1.0);
        p.add_ge(box, -1.0);
    }
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(n + 1);
    sum.head(n).setOnes();
    p.add_eq(sum, rn);
    // |sum (w - h)| / (rho n) <= s, with sum h = rho n.
    const double excess = w.sum() - rn;
    Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(n + 1);
    s(n) = -rn;
    p.add_le(s, -std::abs(excess));
    const lp::Solution sol = lp::solve(p);
    if (sol.status != lp::Status::Optimal) throw InternalError("face distance LP failed");
    return sol.objective;
}

}  // namespace

PsiRatioReport psi_ratio(const PolyhedralSpace& x, const PolyhedralSpace& y, const std::vector<double>& epsilons,
                         const ModulusOptions& opts) {
    require(!epsilons.empty(), "psi_ratio needs at least one eps");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        require(epsilons[i] > 0.0 && epsilons[i] <= 0.1, "psi_ratio needs eps in (0, 0.1]");
        if (i > 0) require(epsilons[i] < epsilons[i - 1], "psi_ratio needs a decreasing eps list");
    }
    PsiRatioReport rep;
    ModulusOptions o = opts;
    o.spherical = true;
    for (double eps : epsilons) {
        PsiRatio r;
        r.eps = eps;
        r.bracket = operator_modulus(x, y, eps, o);
        const double s = std::sqrt(2.0 * eps);
        r.ratio_lo = r.bracket.lo / s;
        r.ratio_hi = r.bracket.hi / s;
        rep.rows.push_back(r);
    }
    if (opts.codomain_rho) {
        const double rho = *opts.codomain_rho;
        rep.lower_bound = std::min(std::sqrt(2.0 * rho / (1.0 - rho)), 1.0);
        rep.upper_bound = std::sqrt((1.0 + rho) / (1.0 - rho));
    }
    bool up = true, down = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        const PsiRatio& a = rep.rows[i - 1];
        const PsiRatio& b = rep.rows[i];
        const double diff = 0.5 * (b.ratio_lo + b.ratio_hi) - 0.5 * (a.ratio_lo + a.ratio_hi);
        const double slack = 0.5 * ((a.ratio_hi - a.ratio_lo) + (b.ratio_hi - b.ratio_lo));
        if (diff < -slack) up = false;
        if (diff > slack) down = false;
    }
    rep.monotone_trend = up || down;
    return rep;
}

PsiConstructionReport psi_construction_experiment(int n, double rho, double eps, std::optional<double> eps0_opt,
                                                  std::optional<double> delta) {
    require(n >= 2, "n must be at least 2");
    require(rho >= 1.0 / n && rho < 1.0, "rho must lie in [1/n, 1)");
    require(eps > 0.0 && eps < 1.0, "need 0 < eps < 1");
    PsiConstructionReport r;
    r.n = n;
    r.rho = rho;
    r.eps = eps;
    const double k_real = 0.5 * n * (1.0 - rho) + 1.0;
    r.k = static_cast<int>(std::lround(k_real));
    require(r.k >= 1 && r.k <= n, "k out of range");
    r.theta = r.k - k_real;
    const double denom = n * (1.0 - rho) + 2.0 + 2.0 * r.theta;
    r.eps0_limit = std::pow(2.0 + 2.0 * r.theta, 2) / (n * rho * denom);
    const double eps0 = eps0_opt ? *eps0_opt : 0.98 * std::min(eps, r.eps0_limit);
    require(eps0 > 0.0 && eps0 < eps, "need 0 < eps0 < eps");
    r.eps0 = eps0;
    r.delta = delta ? *delta : std::sqrt(n * rho * eps0 / denom);
    require(r.delta > 0.0 && r.delta < 1.0, "delta must lie in (0, 1)");
    r.t = -1.0 + (4.0 + 4.0 * r.theta - 2.0 * n * rho * eps0 / r.delta) / denom;

    const ZBundle z = make_z(n, rho);
    auto l1 = make_l1(2);
    r.x = vec2(1.0 - r.delta, r.delta);
    r.t_matrix = Mat(n, 2);
    for (int i = 0; i < n; ++i) {
        r.t_matrix(i, 0) = rho;
        r.t_matrix(i, 1) = i < r.k ? r.t : 1.0;
    }
    const LinearOperator t(l1, z.space, r.t_matrix);
    const Vec tx = t.apply(r.x);
    r.z_star_tx = z.z_star.dot(tx);
    r.t_norm = t.norm();
    r.tx_norm = z.space->norm(tx);
    r.in_pi_eps_spherical = classify_pair(r.x, t, eps).in_pi_eps_spherical;
    r.point_cost = 2.0 * r.delta;
    r.face_lower_bound = 2.0 * n * rho * (eps0 / r.delta) / denom;
    r.face_distance = z_face_distance(z, r.t_matrix.col(1));
    r.branch_residual = std::abs(r.point_cost - r.face_lower_bound);
    BoundParams bp;
    bp.rho = rho;
    bp.eps = eps0;
    bp.n = n;
    bp.theta = r.theta;
    r.c_value = bound("psi_construction", bp).value;
    r.c_ratio = r.c_value / std::sqrt(2.0 * eps0);
    return r;
}

std::vector<NoncontinuityRow> noncontinuity_table(double eps, const std::vector<double>& rhos, int bm_budget,
                                                  std::uint64_t seed) {
    require(eps > 0.0 && eps < 0.5, "noncontinuity_table needs eps in (0, 1/2)");
    auto l1 = make_l1(2);
    std::vector<NoncontinuityRow> rows;
    for (double rho : rhos) {
        require(rho >= 0.5 && rho < 1.0, "rho must lie in [1/2, 1)");
        NoncontinuityRow row;
        row.rho = rho;
        row.hexagon_lower = bound("thm_hexagon_lower", {rho, eps, {}, {}, {}}).value;
        row.limit_upper = bound("thm_beta0_exact", {{}, eps, {}, {}, {}}).value;
        row.bm_upper = banach_mazur_upper(*make_hexagon(rho).space, *l1, bm_budget, seed);
        row.gap = row.hexagon_lower - row.limit_upper;
        rows.push_back(row);
    }
    return rows;
}

std::vector<ConjectureScanRow> conjecture_scan(int num_spaces, const std::vector<double>& epsilons,
                                               const ModulusOptions& opts) {
    require(num_spaces >= 1, "conjecture_scan needs at least one space");
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<int> count(2, 6);
    std::vector<ConjectureScanRow> rows;
    for (int s = 0; s < num_spaces; ++s) {
        const std::string name = "random:" + std::to_string(s);
        const SpacePtr x = sample_polygon_space(rng, count(rng), name);
        for (double eps : epsilons) {
            require(eps > 0.0 && eps < 1.0, "conjecture_scan needs eps in (0, 1)");
            ConjectureScanRow row;
            row.space = name;
            row.num_functionals = x->num_functionals();
            row.eps = eps;
            row.bracket = functional_modulus(*x, eps, opts, true);
            row.bound = std::min(std::sqrt(2.0 * eps), 1.0);
            row.excess = row.bracket.lo - row.bound;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace bpb
