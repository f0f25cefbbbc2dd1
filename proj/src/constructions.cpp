#include "bpb/constructions.hpp"

#include "bpb/space_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bpb {

namespace {

constexpr double kNormTol = 1e-9;

void require(bool ok, const std::string& what) {
    if (!ok) throw InputError(what);
}

struct AlphaChoice {
    int index = -1;
    int sign = 1;
};

// Index maximizing |y*_a(w)|, ties to the lowest index; sign makes y*_a(w) >= 0.
AlphaChoice select_alpha(const BetaStructure& beta, const Vec& w) {
    AlphaChoice c;
    double best = -1.0;
    for (int a = 0; a < beta.size(); ++a) {
        const double v = std::abs(beta.y_star[static_cast<std::size_t>(a)].dot(w));
        if (v > best + 1e-12) {
            best = v;
            c.index = a;
        }
    }
    if (c.index < 0) throw InputError("beta structure has no pairs");
    c.sign = beta.y_star[static_cast<std::size_t>(c.index)].dot(w) < 0 ? -1 : 1;
    return c;
}

BetaStructure flip_pair(const BetaStructure& beta, int a, int sign) {
    BetaStructure b = beta;
    if (sign < 0) {
        b.y[static_cast<std::size_t>(a)] = -b.y[static_cast<std::size_t>(a)];
        b.y_star[static_cast<std::size_t>(a)] = -b.y_star[static_cast<std::size_t>(a)];
    }
    return b;
}

// A norming functional of unit dual norm attaining ||z|| at z.
Vec norming_functional(const PolyhedralSpace& x, const Vec& z) {
    const int i = x.norm_witness(z);
    const Vec g = x.functional(i);
    return g.dot(z) < 0 ? Vec(-g) : g;
}

void check_operator_pair(const BetaStructure& beta, const LinearOperator& t, const Vec& x, double eps) {
    require(beta.space && beta.space->dim() == t.codomain()->dim(), "beta structure lives on a different codomain");
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    require(beta.rho >= 0.0 && beta.rho < 1.0, "beta parameter must lie in [0, 1)");
    require(t.norm() <= 1.0 + kNormTol, "operator norm exceeds 1");
    require(t.domain()->norm(x) <= 1.0 + kNormTol, "x lies outside the unit ball");
    require(t.codomain()->norm(t.apply(x)) > 1.0 - eps, "||Tx|| > 1 - eps does not hold");
}

void fill_distances(PerturbationResult& r, const LinearOperator& t, const Vec& x) {
    r.x_distance = t.domain()->norm(x - r.z);
    r.t_distance = operator_distance(t, r.f);
}

// S = scale T + y0 ((1 + eta) z* - scale x*)^T.
LinearOperator form_operator(const LinearOperator& t, const Vec& y0, const Vec& z_star, const Vec& x_star, double eta,
                             double scale) {
    const Vec g = (1.0 + eta) * z_star - scale * x_star;
    return t.with_matrix(scale * t.matrix() + y0 * g.transpose());
}

PerturbationResult beta_construction(const BetaStructure& beta, const LinearOperator& t, const Vec& x, double eps,
                                     double k, double alpha0) {
    const double rho = beta.rho;
    const AlphaChoice ac = select_alpha(beta, t.apply(x));
    const Vec y_star0 = ac.sign * beta.y_star[static_cast<std::size_t>(ac.index)];
    const Vec y0 = ac.sign * beta.y[static_cast<std::size_t>(ac.index)];
    const Vec x_star = t.adjoint(y_star0);
    const double c = 1.0 - alpha0 / 3.0;
    const ScalarBpbResult sc = alpha0 > 0.0 ? bpb_scalar_nonsquare(*t.domain(), x, x_star, eps, k, alpha0)
                                            : bpb_scalar(*t.domain(), x, x_star, eps, k);
    const double eta = 2.0 * k * c * rho / (1.0 - rho);
    const LinearOperator s = form_operator(t, y0, sc.z_star, x_star, eta, 1.0);
    const double s_norm = s.norm();
    if (std::abs(s_norm - (1.0 + eta)) > 1e-9) throw InternalError("perturbed operator norm differs from 1 + eta");
    if (std::abs(t.codomain()->norm(s.apply(sc.z)) - s_norm) > 1e-9)
        throw InternalError("perturbed operator does not attain its norm at z");
    PerturbationResult r{sc.z, s.scaled(1.0 / s_norm), s};
    r.z_star = sc.z_star;
    r.alpha0 = ac.index;
    r.alpha_sign = ac.sign;
    r.eta = eta;
    r.k = k;
    r.rho = rho;
    r.alpha_nonsquare = alpha0;
    r.guarantee_x = eps / k;
    r.guarantee_t = 2.0 * k * c * (1.0 + rho) / (1.0 - rho);
    r.guarantee = std::max(r.guarantee_x, r.guarantee_t);
    r.branch = alpha0 > 0.0 ? "nonsquare" : "construction";
    fill_distances(r, t, x);
    return r;
}

}  // namespace

PhelpsResult phelps_step(const PolyhedralSpace& x_space, const Vec& x, const Vec& f, double eta, double k) {
    require(k > 0.0 && k < 1.0, "phelps_step needs 0 < k < 1");
    require(eta > 0.0, "phelps_step needs eta > 0");
    require(x.size() == x_space.dim() && f.size() == x_space.dim(), "dimension mismatch");
    require(x_space.norm(x) <= 1.0 + kNormTol, "x lies outside the unit ball");
    require(std::abs(x_space.dual_norm(f) - 1.0) <= kNormTol, "f must have dual norm 1");
    require(f.dot(x) > 1.0 - eta, "f(x) > 1 - eta does not hold");

    const PolyhedralSpace dual = x_space.dual();
    const double x_scale = eta / k;
    PhelpsResult best;
    double best_score = std::numeric_limits<double>::infinity();
    for (const Face& face : x_space.faces()) {
        const NearestPoint yp = x_space.nearest_in_hull(x, face.vertices);
        if (yp.distance / x_scale >= best_score) continue;
        std::vector<Vec> gens;
        gens.reserve(face.active.size());
        for (const SignedFunctional& sf : face.active) gens.push_back(sf.sign * x_space.functional(sf.index));
        const NearestPoint zp = dual.nearest_in_cone(f, gens);
        const double score = std::max(yp.distance / x_scale, zp.distance / k);
        if (score < best_score) {
            best_score = score;
            best.y = yp.point;
            best.zeta = zp.point;
            best.x_distance = yp.distance;
            best.f_distance = zp.distance;
        }
    }
    if (!(best_score < 1.0)) throw InternalError("no attaining pair within the required distances");
    return best;
}

ScalarBpbResult bpb_scalar(const PolyhedralSpace& x_space, const Vec& x, const Vec& f, double eps, double k_tilde) {
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    require(k_tilde > 0.0 && k_tilde < 1.0, "k_tilde must lie in (0, 1)");
    require(x.size() == x_space.dim() && f.size() == x_space.dim(), "dimension mismatch");
    require(x_space.norm(x) <= 1.0 + kNormTol, "x lies outside the unit ball");
    const double nf = x_space.dual_norm(f);
    require(nf <= 1.0 + kNormTol, "f lies outside the dual unit ball");
    require(f.dot(x) > 1.0 - eps, "f(x) > 1 - eps does not hold");
    require(nf > 0.0, "f must be nonzero");

    ScalarBpbResult r;
    if (k_tilde < eps / 2.0) {
        // Any unit z* is at distance >= 1 - ||f|| from f.
        require(1.0 - nf < 2.0 * k_tilde, "no unit functional within 2 k_tilde of f");
        r.trivial_branch = true;
        r.z_star = f / nf;
        const Face face = x_space.support_face(r.z_star);
        r.z = x_space.nearest_in_hull(x, face.vertices).point;
        r.guarantee_x = 2.0;
        r.guarantee_f = 2.0 * k_tilde;
    } else {
        const double eta = 1.0 - (1.0 - eps) / nf;
        const double k = k_tilde * (nf - (1.0 - eps)) / (eps * nf);
        const PhelpsResult ph = phelps_step(x_space, x, f / nf, eta, k);
        const Vec y_star = nf * ph.zeta;
        r.z = ph.y;
        r.z_star = y_star / x_space.dual_norm(y_star);
        r.guarantee_x = eps / k_tilde;
        r.guarantee_f = 2.0 * k_tilde;
    }
    r.achieved_x_dist = x_space.norm(x - r.z);
    r.achieved_f_dist = x_space.dual_norm(f - r.z_star);
    if (!(r.achieved_f_dist < r.guarantee_f) || r.achieved_x_dist > r.guarantee_x ||
        (!r.trivial_branch && !(r.achieved_x_dist < r.guarantee_x)))
        throw InternalError("scalar step missed its distance bounds");
    return r;
}

NonSquarenessEstimate nonsquareness_parameter(const PolyhedralSpace& x_space) {
    if (!x_space.has_extreme_points())
        throw UnsupportedDimensionError("non-squareness needs the vertices of the unit ball");
    const auto& ext = x_space.extreme_points();
    double sup = 0.0;
    for (std::size_t i = 0; i < ext.size(); ++i)
        for (std::size_t j = i; j < ext.size(); ++j)
            sup = std::max(sup, 0.5 * (x_space.norm(ext[i] + ext[j]) + x_space.norm(ext[i] - ext[j])));
    NonSquarenessEstimate e;
    e.alpha_lo = e.alpha_hi = std::clamp(2.0 - sup, 0.0, 2.0);
    return e;
}

ScalarBpbResult bpb_scalar_nonsquare(const PolyhedralSpace& x_space, const Vec& x, const Vec& f, double eps, double k,
                                     double alpha0) {
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    require(alpha0 > 0.0, "alpha0 must be positive");
    require(x.size() == x_space.dim() && f.size() == x_space.dim(), "dimension mismatch");
    require(std::abs(x_space.norm(x) - 1.0) <= kNormTol, "x must be a unit vector");
    const double nf = x_space.dual_norm(f);
    require(nf <= 1.0 + kNormTol, "f lies outside the dual unit ball");
    require(f.dot(x) > 1.0 - eps, "f(x) > 1 - eps does not hold");
    const double alpha =
        std::min(nonsquareness_parameter(x_space).alpha_lo, nonsquareness_parameter(x_space.dual()).alpha_lo);
    require(alpha0 < alpha, "alpha0 = " + std::to_string(alpha0) + " is not below the non-squareness " +
                                std::to_string(alpha) + " of the space and its dual");
    const double c = 1.0 - alpha0 / 3.0;
    require(k >= eps / (2.0 * c) && k <= 0.5, "k must lie in [eps/(2(1 - alpha0/3)), 1/2]");

    const double eta = 1.0 - (1.0 - eps) / nf;
    const double k_inner = k * (nf - (1.0 - eps)) / (eps * nf);
    const PhelpsResult ph = phelps_step(x_space, x, f / nf, eta, k_inner);
    ScalarBpbResult r;
    r.z = ph.y;
    r.z_star = ph.zeta / x_space.dual_norm(ph.zeta);
    r.guarantee_x = eps / k;
    r.guarantee_f = 2.0 * k * c;
    r.achieved_x_dist = x_space.norm(x - r.z);
    r.achieved_f_dist = x_space.dual_norm(f - r.z_star);
    if (!(r.achieved_x_dist < r.guarantee_x) || !(r.achieved_f_dist < r.guarantee_f))
        throw InternalError("non-square scalar step missed its distance bounds");
    return r;
}

Vec face_projection(const BetaStructure& beta, const Vec& y, int alpha0, double r) {
    require(alpha0 >= 0 && alpha0 < beta.size(), "alpha0 out of range");
    require(r > 0.0 && r < 1.0, "r must lie in (0, 1)");
    require(y.size() == beta.space->dim(), "dimension mismatch");
    require(beta.space->norm(y) <= 1.0 + 1e-12, "y lies outside the unit ball");
    const double v = beta.y_star[static_cast<std::size_t>(alpha0)].dot(y);
    require(v >= 1.0 - r - 1e-12, "y*_alpha0(y) >= 1 - r does not hold");
    const double rho = beta.rho;
    const double r0 = std::max(0.0, 1.0 - v);
    const double denom = 1.0 - rho + rho * r0;
    return (r0 / denom) * beta.y[static_cast<std::size_t>(alpha0)] + (1.0 - r0 * rho / denom) * y;
}

PerturbationResult lindenstrauss_perturbation(const BetaStructure& beta, const LinearOperator& t, const Vec& x,
                                              double eps, std::optional<double> k) {
    check_operator_pair(beta, t, x, eps);
    const double rho = beta.rho;
    if (k) {
        require(*k >= eps / 2.0 && *k < 1.0, "k must lie in [eps/2, 1)");
        return beta_construction(beta, t, x, eps, *k, 0.0);
    }
    const double k_default = std::sqrt(eps / 2.0 * (1.0 - rho) / (1.0 + rho));
    if (k_default >= eps / 2.0) {
        PerturbationResult r = beta_construction(beta, t, x, eps, k_default, 0.0);
        r.guarantee = std::min(std::sqrt(2.0 * eps * (1.0 + rho) / (1.0 - rho)), 2.0);
        return r;
    }

    // Bound 2: keep the closest of a few attaining pairs.
    const PolyhedralSpace& xs = *t.domain();
    const PolyhedralSpace& ys = *t.codomain();
    std::vector<PerturbationResult> cands;
    {
        const Vec z = x / xs.norm(x);
        const Vec tz = t.apply(z);
        const LinearOperator f = rank_one(t.domain(), t.codomain(), norming_functional(xs, z), tz / ys.norm(tz));
        cands.push_back(PerturbationResult{z, f, f});
    }
    {
        const LinearOperator f = t.scaled(1.0 / t.norm());
        const auto& ext = xs.extreme_points();
        Vec z = ext[static_cast<std::size_t>(t.witnesses().front())];
        for (int w : t.witnesses()) {
            const Vec& v = ext[static_cast<std::size_t>(w)];
            if (xs.norm(x - v) < xs.norm(x - z)) z = v;
        }
        cands.push_back(PerturbationResult{z, f, f});
    }
    for (auto& c : cands) fill_distances(c, t, x);
    cands.push_back(beta_construction(beta, t, x, eps, eps / 2.0, 0.0));
    auto best = std::min_element(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
        return a.max_distance() < b.max_distance();
    });
    PerturbationResult r = *best;
    if (r.branch.empty()) {
        const AlphaChoice ac = select_alpha(beta, t.apply(x));
        r.alpha0 = ac.index;
        r.alpha_sign = ac.sign;
    }
    r.rho = rho;
    r.branch = "trivial";
    r.guarantee_x = r.guarantee_t = r.guarantee = 2.0;
    return r;
}

double nonsquare_eps_threshold(double rho, double alpha0) {
    const double c = 1.0 - alpha0 / 3.0;
    return std::min({2.0 * c * (1.0 - rho) / (1.0 + rho), 0.5 * c * (1.0 + rho) / (1.0 - rho), 1.0});
}

PerturbationResult lindenstrauss_perturbation_nonsquare(const BetaStructure& beta, const LinearOperator& t,
                                                        const Vec& x, double eps, std::optional<double> alpha0,
                                                        std::optional<double> k) {
    check_operator_pair(beta, t, x, eps);
    require(std::abs(t.norm() - 1.0) <= kNormTol, "operator must have norm 1");
    require(std::abs(t.domain()->norm(x) - 1.0) <= kNormTol, "x must be a unit vector");
    const PolyhedralSpace& xs = *t.domain();
    const double alpha = std::min(nonsquareness_parameter(xs).alpha_lo, nonsquareness_parameter(xs.dual()).alpha_lo);
    require(alpha > 1e-12, "domain is not uniformly non-square");
    const double a0 = alpha0 ? *alpha0 : alpha * (1.0 - 1e-6);
    require(a0 > 0.0 && a0 < alpha, "alpha0 must lie in (0, " + std::to_string(alpha) + ")");
    const double rho = beta.rho;
    const double threshold = nonsquare_eps_threshold(rho, a0);
    require(eps < threshold, "eps must be below the threshold " + std::to_string(threshold));
    const double c = 1.0 - a0 / 3.0;
    const double kk = k ? *k : std::sqrt(eps / (2.0 * c) * (1.0 - rho) / (1.0 + rho));
    PerturbationResult r = beta_construction(beta, t, x, eps, kk, a0);
    if (!k) r.guarantee = std::sqrt(2.0 * eps * c) * std::sqrt((1.0 + rho) / (1.0 - rho));
    return r;
}

PerturbationResult modified_perturbation(const BetaStructure& beta, const LinearOperator& t, const Vec& x, double eps,
                                         std::optional<double> k_tilde) {
    check_operator_pair(beta, t, x, eps);
    const double rho = beta.rho;
    const PolyhedralSpace& xs = *t.domain();
    const AlphaChoice ac = select_alpha(beta, t.apply(x));

    if (!k_tilde && eps >= (1.0 - rho) / (1.0 + rho)) {
        const LinearOperator zero = t.scaled(0.0);
        PerturbationResult r{x / xs.norm(x), zero, zero};
        r.alpha0 = ac.index;
        r.alpha_sign = ac.sign;
        r.rho = rho;
        r.guarantee_x = r.guarantee_t = r.guarantee = 1.0;
        r.strict = false;
        r.branch = "trivial";
        fill_distances(r, t, x);
        return r;
    }
    const double kt = k_tilde ? *k_tilde : std::sqrt(eps * (1.0 - rho) / (1.0 + rho));
    require(kt >= eps && kt < 1.0, "k_tilde must lie in [eps, 1)");

    const Vec y_star0 = ac.sign * beta.y_star[static_cast<std::size_t>(ac.index)];
    const Vec y0 = ac.sign * beta.y[static_cast<std::size_t>(ac.index)];
    const Vec x_star = t.adjoint(y_star0);
    const double nx = xs.dual_norm(x_star);
    const double k = kt * (nx - (1.0 - eps)) / (eps * nx);
    const PhelpsResult ph = phelps_step(xs, x, x_star / nx, 1.0 - (1.0 - eps) / nx, k);
    const Vec z_star = nx * ph.zeta;
    const double nz = xs.dual_norm(z_star);
    const double eta = rho * (k * nx + nx * std::abs(1.0 - nz)) / (nz * (1.0 - rho)) + 1e-12;
    const LinearOperator s = form_operator(t, y0, z_star, x_star, eta, nz);
    if (std::abs(t.codomain()->norm(s.apply(ph.y)) - s.norm()) > 1e-9 * std::max(1.0, s.norm()))
        throw InternalError("modified operator does not attain its norm at z");

    PerturbationResult r{ph.y, s, s};
    r.z_star = z_star;
    r.alpha0 = ac.index;
    r.alpha_sign = ac.sign;
    r.eta = eta;
    r.k = kt;
    r.rho = rho;
    r.guarantee_x = eps / kt;
    r.guarantee_t = kt * (1.0 + rho) / (1.0 - rho);
    r.guarantee = k_tilde ? std::max(r.guarantee_x, r.guarantee_t)
                          : std::min(std::sqrt(eps * (1.0 + rho) / (1.0 - rho)), 1.0);
    r.strict = false;
    r.branch = "construction";
    fill_distances(r, t, x);
    return r;
}

double ell1_bound_a(double rho, double eps) {
    require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0, 1]");
    require(eps > 0.0, "eps must be positive");
    const double h = std::sqrt(eps / 2.0);
    return std::sqrt(2.0 * eps) * (1.0 + rho) / (std::sqrt(1.0 - rho * rho + eps / 2.0 * rho * rho) + rho * h);
}

PerturbationResult ell1_perturbation(const BetaStructure& beta, const LinearOperator& t, const Vec& x, double eps) {
    check_operator_pair(beta, t, x, eps);
    require(is_l1_plane(*t.domain()), "domain must be l1^2");
    const PolyhedralSpace& ys = *t.codomain();
    const double rho = beta.rho;

    // Signed permutation u with u x = (t(1 - delta), t delta), 0 <= delta <= 1/2.
    const int a = std::abs(x(0)) >= std::abs(x(1)) ? 0 : 1;
    const int b = 1 - a;
    Mat u = Mat::Zero(2, 2);
    u(0, a) = x(a) < 0 ? -1.0 : 1.0;
    u(1, b) = x(b) < 0 ? -1.0 : 1.0;
    const Vec xc = u * x;
    const Mat tc = t.matrix() * u.transpose();
    const double tn = xc(0) + xc(1);
    const double delta = xc(1) / tn;
    const Vec c1 = tc.col(0), c2 = tc.col(1);
    const Vec e1 = vec2(1.0, 0.0);

    const double big_a = ell1_bound_a(rho, eps);
    Vec yc;
    Mat fc(ys.dim(), 2);
    std::string branch;
    int alpha0 = -1, alpha_sign = 1;
    if (big_a >= 1.0) {
        branch = "normalize";
        yc = e1;
        const double n1 = ys.norm(c1), n2 = ys.norm(c2);
        fc.col(0) = n1 > 0.0 ? Vec(c1 / n1) : beta.y.front();
        fc.col(1) = n2 > 0.0 ? Vec(c2 / n2) : Vec::Zero(ys.dim());
    } else {
        const AlphaChoice ac = select_alpha(beta, tc * xc);
        alpha0 = ac.index;
        alpha_sign = ac.sign;
        if (2.0 * tn * delta + 1.0 - tn <= big_a) {
            branch = "vertex";
            yc = e1;
            fc.col(0) = c1 / ys.norm(c1);
            fc.col(1) = c2;
        } else {
            branch = "face";
            const double eps_prime = (eps - (1.0 - tn)) / tn;
            const double r = eps_prime / delta;
            if (!(r > 0.0 && r < 1.0)) throw InternalError("face projection radius outside (0, 1)");
            const BetaStructure flipped = flip_pair(beta, ac.index, ac.sign);
            yc = xc / tn;
            fc.col(0) = face_projection(flipped, c1, ac.index, r);
            fc.col(1) = face_projection(flipped, c2, ac.index, r);
        }
    }
    const LinearOperator f = t.with_matrix(fc * u);
    PerturbationResult res{u.transpose() * yc, f, f};
    res.alpha0 = alpha0;
    res.alpha_sign = alpha_sign;
    res.rho = rho;
    res.guarantee_x = res.guarantee_t = res.guarantee = std::min(big_a, 1.0);
    res.strict = false;
    res.branch = branch;
    fill_distances(res, t, x);
    return res;
}

}  // namespace bpb
