#include <doctest.h>

#include <cmath>
#include <random>

#include "bpb/constructions.hpp"
#include "bpb/moduli.hpp"
#include "bpb/sampling.hpp"
#include "bpb/space_zoo.hpp"

using namespace bpb;

namespace {

BoundParams re(double rho, double eps) {
    BoundParams p;
    p.rho = rho;
    p.eps = eps;
    return p;
}

BoundParams e_only(double eps) {
    BoundParams p;
    p.eps = eps;
    return p;
}

// Random attaining operator from l1^2: either a vertex (one unit column, the other in
// the ball) or an edge mapped into a facet of the codomain ball. Modified mode rescales.
std::pair<Vec, LinearOperator> random_attaining(std::mt19937_64& rng, const SpacePtr& l1, const SpacePtr& y,
                                                AttainMode mode) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double s1 = u(rng) < 0.5 ? 1.0 : -1.0, s2 = u(rng) < 0.5 ? 1.0 : -1.0;
    Mat m(y->dim(), 2);
    Vec z(2);
    if (u(rng) < 0.4) {
        const int i = u(rng) < 0.5 ? 0 : 1;
        m.col(i) = sample_unit(rng, *y);
        m.col(1 - i) = u(rng) * sample_unit(rng, *y);
        z = Vec::Zero(2);
        z(i) = s1;
    } else {
        const auto facets = y->facets();
        const Face& f = facets[std::uniform_int_distribution<std::size_t>(0, facets.size() - 1)(rng)];
        for (int c = 0; c < 2; ++c) {
            Vec w = Vec::Zero(y->dim());
            double total = 0.0;
            for (const Vec& v : f.vertices) {
                const double a = u(rng);
                w += a * v;
                total += a;
            }
            m.col(c) = (c == 0 ? s1 : s2) * w / total;
        }
        const double l = u(rng);
        z = vec2(s1 * l, s2 * (1 - l));
    }
    if (mode == AttainMode::Modified) m *= 1.5 * u(rng);
    return {z, LinearOperator(l1, y, m)};
}

}  // namespace

TEST_CASE("bound formulas: examples and domains") {
    CHECK(bound("thm_beta_upper", re(0.5, 0.02)).value == doctest::Approx(0.2 * std::sqrt(3.0)).epsilon(1e-12));
    for (double eps : {0.01, 0.1, 0.3})
        CHECK(std::abs(bound("thm_ell1_upper", re(0.0, eps)).value - std::min(std::sqrt(2 * eps), 1.0)) < 1e-12);
    CHECK(std::abs(ell1_bound_a(0.5, 0.25) - 1.0) < 1e-12);
    CHECK(std::abs(bound("thm_hexagon_lower", re(0.75, 0.1)).value - std::sqrt(0.6)) < 1e-12);
    CHECK(bound("thm_hexagon_lower", re(0.9, 0.25)).value == 1.0);
    CHECK(bound("thm_beta0_exact", e_only(0.25)).value == doctest::Approx(std::sqrt(0.5)));
    CHECK(bound("thm_beta0_exact", e_only(0.6)).value == 1.0);
    CHECK(bound("modified_ell1R", e_only(0.16)).value == doctest::Approx(0.4));
    CHECK(bound("modified_lower", re(0.75, 0.1)).value == doctest::Approx(std::sqrt(0.6)));
    CHECK(bound("modified_upper", re(0.0, 0.09)).value == doctest::Approx(0.3));
    CHECK(bound("bpb_functional", e_only(0.125)).value == doctest::Approx(0.5));
    BoundParams ns = re(0.5, 0.02);
    ns.alpha0 = 0.3;
    CHECK(bound("thm_nonsquare_upper", ns).value ==
          doctest::Approx(std::sqrt(2 * 0.02 * 0.9) * std::sqrt(3.0)).epsilon(1e-12));
    BoundParams psi = re(0.5, 0.049);
    psi.n = 20;
    psi.theta = 0.0;
    CHECK(bound("psi_construction", psi).value == doctest::Approx(std::sqrt(0.098) * std::sqrt(1.0 / 0.6)));

    CHECK(bound("thm_hexagon_lower", re(0.75, 0.1)).side == BoundSide::Lower);
    CHECK(bound("thm_beta_upper", re(0.75, 0.1)).side == BoundSide::Upper);
    CHECK(bound_names().size() == 10);
    for (const auto& name : bound_names()) CHECK_THROWS_AS(bound(name, BoundParams{}), InputError);
    CHECK_THROWS_AS(bound("no_such_bound", re(0.5, 0.1)), InputError);
    CHECK_THROWS_AS(bound("thm_beta_upper", re(1.0, 0.1)), InputError);
    CHECK_THROWS_AS(bound("thm_hexagon_lower", re(0.4, 0.1)), InputError);
    CHECK_THROWS_AS(bound("thm_beta_upper", re(0.5, -0.1)), InputError);
    psi.theta = 0.7;
    CHECK_THROWS_AS(bound("psi_construction", psi), InputError);
}

TEST_CASE("A(rho, eps): quadratic identity, monotonicity, limits") {
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            const double rho = 0.5 + 0.45 * i / 19.0;
            const double eps = 0.01 + 0.89 * j / 19.0;
            const double a = ell1_bound_a(rho, eps);
            CHECK(std::abs(a * a * (1 - rho) + 2 * rho * eps * a - 2 * eps * (1 + rho)) < 1e-10);
        }
    }
    for (double eps : {0.01, 0.2, 0.7}) {
        double prev = ell1_bound_a(0.0, eps);
        CHECK(std::abs(prev - std::sqrt(2 * eps)) < 1e-12);
        for (int i = 1; i <= 100; ++i) {
            const double a = ell1_bound_a(i / 100.0, eps);
            CHECK(a >= prev - 1e-15);
            prev = a;
        }
        CHECK(std::abs(ell1_bound_a(1.0, eps) - 2.0) < 1e-12);
    }
}

TEST_CASE("inner distance on l1^2: vertex/edge formula matches the face LP") {
    std::mt19937_64 rng(11);
    auto l1 = make_l1(2);
    const std::vector<SpacePtr> cods = {make_linf(2), make_hexagon(0.75).space, make_real(), make_l1(2),
                                        make_z(3, 0.5).space, make_hexagon(0.5).space};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int count = 0;
    for (const auto& y : cods) {
        for (int i = 0; i < 170; ++i) {
            // Mix of admissible pairs and arbitrary points (the value is a distance everywhere).
            Vec x;
            LinearOperator t = sample_unit_operator(rng, l1, y);
            if (i % 2 == 0) {
                const AlmostAttainingPair p = sample_almost_attaining(rng, l1, y, i % 4 == 0);
                x = p.x;
                t = p.t;
            } else {
                x = vec2(2 * u(rng) - 1, 2 * u(rng) - 1);
                t = t.scaled(1.5 * u(rng));
            }
            for (AttainMode mode : {AttainMode::Exact, AttainMode::Modified}) {
                const double fast = inner_distance_l1_plane(x, t, mode);
                const double lp = inner_distance(x, t, mode);
                CHECK(std::abs(fast - lp) < 1e-9);
                ++count;
            }
        }
    }
    CHECK(count >= 2000);
}

TEST_CASE("inner distance never exceeds the distance to a sampled attaining pair") {
    std::mt19937_64 rng(12);
    auto l1 = make_l1(2);
    for (const auto& y : {make_linf(2), make_hexagon(0.75).space, make_real()}) {
        for (int i = 0; i < 100; ++i) {
            const AlmostAttainingPair p = sample_almost_attaining(rng, l1, y, true);
            for (AttainMode mode : {AttainMode::Exact, AttainMode::Modified}) {
                const double h = inner_distance_l1_plane(p.x, p.t, mode);
                for (int j = 0; j < 20; ++j) {
                    const auto [z, f] = random_attaining(rng, l1, y, mode);
                    REQUIRE(AttainingPair{z, f, mode}.holds());
                    CHECK(h <= std::max(l1->norm(p.x - z), operator_distance(p.t, f)) + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("inner distance is 1-Lipschitz in the max-metric") {
    std::mt19937_64 rng(13);
    auto l1 = make_l1(2);
    std::normal_distribution<double> g(0.0, 0.05);
    for (const auto& y : {make_linf(2), make_hexagon(0.6).space}) {
        for (int i = 0; i < 1000; ++i) {
            const AlmostAttainingPair p = sample_almost_attaining(rng, l1, y, false);
            const Vec dx = vec2(g(rng), g(rng));
            Mat dm(2, 2);
            dm << g(rng), g(rng), g(rng), g(rng);
            const LinearOperator t2 = p.t.with_matrix(p.t.matrix() + dm);
            const double d = std::max(l1->norm(dx), operator_distance(p.t, t2));
            for (AttainMode mode : {AttainMode::Exact, AttainMode::Modified}) {
                const double a = inner_distance_l1_plane(p.x, p.t, mode);
                const double b = inner_distance_l1_plane(p.x + dx, t2, mode);
                CHECK(std::abs(a - b) <= d + 1e-12);
            }
        }
    }
}

TEST_CASE("extremal pairs: exact inner values") {
    // (x, T) = ((1/2, 1/2), identity) into Y_0.9: every attaining pair is at distance 1.
    auto l1 = make_l1(2);
    const HexagonBundle h = make_hexagon(0.9);
    const LinearOperator id(l1, h.space, Mat::Identity(2, 2));
    CHECK(std::abs(inner_distance_l1_plane(vec2(0.5, 0.5), id, AttainMode::Exact) - 1.0) < 1e-12);
    CHECK(std::abs(inner_distance(vec2(0.5, 0.5), id, AttainMode::Exact) - 1.0) < 1e-9);
    // Rank-one pair into linf^2: x = (1 - a, a), T = [xi, (1 - 2a) xi], a = sqrt(eps/2).
    const double eps = 0.125, a = std::sqrt(eps / 2);
    const Vec xi = vec2(1.0, 0.3);
    auto linf = make_linf(2);
    Mat m(2, 2);
    m.col(0) = xi;
    m.col(1) = (1 - 2 * a) * xi;
    const LinearOperator t(l1, linf, m);
    CHECK(std::abs(linf->norm(t.apply(vec2(1 - a, a))) - (1 - eps)) < 1e-12);
    CHECK(std::abs(inner_distance_l1_plane(vec2(1 - a, a), t, AttainMode::Exact) - std::sqrt(2 * eps)) < 1e-12);
}

TEST_CASE("operator modulus: beta = 0 codomains") {
    auto l1 = make_l1(2);
    auto linf = make_linf(2);
    ModulusOptions o;
    for (double eps : {0.125, 0.25, 0.45}) {
        const ModulusBracket b = operator_modulus(*l1, *linf, eps, o);
        CHECK(b.certified);
        CHECK(b.kind == ModulusKind::OperatorSpherical);
        CHECK(b.contains(std::sqrt(2 * eps)));
        CHECK(b.width() <= 0.05);
        CHECK(b.lo >= 0.0);
        CHECK(b.hi <= 2.0);
    }
    CHECK(operator_modulus(*l1, *linf, 0.6, o).contains(1.0));
    // l1^2 is isometric to linf^2, so the same value.
    const ModulusBracket b = operator_modulus(*l1, *l1, 0.25, o);
    CHECK(b.contains(std::sqrt(0.5)));
    CHECK(b.width() <= 0.05);
}

TEST_CASE("operator modulus: hexagon lower bound and bound sandwich") {
    auto l1 = make_l1(2);
    ModulusOptions o;
    const ModulusBracket a = operator_modulus(*l1, *make_hexagon(0.75).space, 0.1, o);
    CHECK(a.lo >= std::sqrt(0.6) - 0.02);
    const ModulusBracket b = operator_modulus(*l1, *make_hexagon(0.9).space, 0.25, o);
    CHECK(b.lo >= 0.98);
    for (double rho : {0.5, 0.6, 0.75, 0.9}) {
        for (double eps : {0.05, 0.1, 0.2}) {
            const ModulusBracket c = operator_modulus(*l1, *make_hexagon(rho).space, eps, o);
            const double upper = std::min(bound("thm_beta_upper", re(rho, eps)).value,
                                          bound("thm_ell1_upper", re(rho, eps)).value);
            const double lower = bound("thm_hexagon_lower", re(rho, eps)).value;
            CHECK(c.lo - 1e-9 <= upper);
            CHECK(c.hi + 1e-9 >= lower);
        }
    }
}

TEST_CASE("operator modulus: sampled admissible pairs stay below hi") {
    std::mt19937_64 rng(14);
    auto l1 = make_l1(2);
    ModulusOptions o;
    for (const auto& y : {make_linf(2), make_hexagon(0.75).space}) {
        for (double eps : {0.1, 0.3}) {
            const ModulusBracket b = operator_modulus(*l1, *y, eps, o);
            for (int i = 0; i < 300; ++i) {
                const AlmostAttainingPair p = sample_pair_for_eps(rng, l1, y, eps, true);
                CHECK(inner_distance_l1_plane(p.x, p.t, AttainMode::Exact) <= b.hi + 1e-12);
            }
        }
    }
}

TEST_CASE("operator modulus: monotone in eps, spherical below full") {
    auto l1 = make_l1(2);
    auto hex = make_hexagon(0.6).space;
    ModulusOptions o;
    ModulusBracket prev = operator_modulus(*l1, *hex, 0.05, o);
    for (double eps : {0.1, 0.15, 0.2, 0.3, 0.4}) {
        const ModulusBracket b = operator_modulus(*l1, *hex, eps, o);
        CHECK(0.5 * (b.lo + b.hi) >= 0.5 * (prev.lo + prev.hi) - 0.5 * (b.width() + prev.width()));
        CHECK(b.hi >= prev.lo - 1e-12);
        prev = b;
    }
    ModulusOptions ball = o;
    ball.spherical = false;
    for (double eps : {0.1, 0.25}) {
        const ModulusBracket s = operator_modulus(*l1, *hex, eps, o);
        const ModulusBracket f = operator_modulus(*l1, *hex, eps, ball);
        CHECK(f.kind == ModulusKind::Operator);
        CHECK(s.lo <= f.hi + 1e-12);
        CHECK(s.hi <= f.hi + s.width() + f.width());
    }
}

TEST_CASE("operator modulus: refining the mesh keeps brackets overlapping") {
    auto l1 = make_l1(2);
    auto hex = make_hexagon(0.75).space;
    ModulusOptions coarse;
    coarse.target_width = 0.04;
    ModulusOptions fine = coarse;
    fine.target_width = 0.02;
    ModulusOptions half = fine;
    half.outer_mesh = coarse.outer_mesh / 2;
    fine.outer_mesh = coarse.outer_mesh / 4;
    for (double eps : {0.05, 0.2}) {
        const ModulusBracket a = operator_modulus(*l1, *hex, eps, coarse);
        const ModulusBracket m = operator_modulus(*l1, *hex, eps, half);
        const ModulusBracket b = operator_modulus(*l1, *hex, eps, fine);
        CHECK(b.lo >= a.lo - 1e-12);  // the finer search starts from the same seeds
        CHECK(b.lo <= a.hi + 1e-12);
        CHECK(a.lo <= b.hi + 1e-12);
        CHECK(m.width() <= a.width() + 1e-12);
        CHECK(b.width() <= m.width() + 1e-12);
        // once the mesh floor stops binding, the stopping rule gives the target width
        CHECK(b.width() <= 0.02 + 1e-12);
    }
}

TEST_CASE("scalar codomain: two routes agree") {
    auto l1 = make_l1(2);
    auto r = make_real();
    ModulusOptions o;
    for (double eps : {0.1, 0.25, 0.5}) {
        const ModulusBracket bb = operator_modulus(*l1, *r, eps, o);
        const ModulusBracket net = functional_modulus(*l1, eps, o, true);
        CHECK(bb.lo <= net.hi + 1e-12);
        CHECK(net.lo <= bb.hi + 1e-12);
        CHECK(net.kind == ModulusKind::OperatorSpherical);
    }
    // A non-l1 domain goes through the functional nets and is still certified.
    const ModulusBracket h = operator_modulus(*make_hexagon(0.75).space, *r, 0.1, o);
    CHECK(h.certified);
    CHECK(operator_modulus_certifiable(*make_hexagon(0.75).space, *r));
}

TEST_CASE("operator modulus: heuristic fallback is flagged") {
    auto hex = make_hexagon(0.75).space;
    auto linf = make_linf(2);
    CHECK_FALSE(operator_modulus_certifiable(*hex, *linf));
    CHECK(operator_modulus_certifiable(*make_l1(2), *linf));
    ModulusOptions o;
    o.samples = 60;
    o.codomain_rho = 0.0;
    const ModulusBracket b = operator_modulus(*hex, *linf, 0.1, o);
    CHECK_FALSE(b.certified);
    CHECK(b.hi == doctest::Approx(std::sqrt(0.2)));
    CHECK(b.lo <= b.hi);
    CHECK_THROWS_AS(operator_modulus(*hex, *linf, 1.2, o), InputError);
    ModulusOptions bad;
    bad.outer_mesh = 0.0;
    CHECK_THROWS_AS(operator_modulus(*make_l1(2), *linf, 0.1, bad), InputError);
}

TEST_CASE("functional modulus") {
    auto l1 = make_l1(2);
    auto linf = make_linf(2);
    ModulusOptions o;
    const ModulusBracket a = functional_modulus(*l1, 0.125, o);
    CHECK(a.certified);
    CHECK(a.kind == ModulusKind::FunctionalSpherical);
    CHECK(a.contains(0.5));
    for (double eps : {0.005, 0.02, 0.08}) {
        const ModulusBracket b = functional_modulus(*linf, eps, o);
        const double r = b.outer_mesh;
        CHECK(b.lo <= std::sqrt(2 * eps) + 1e-9);
        CHECK(b.hi <= std::sqrt(2 * (eps + 2 * r)) + r + 1e-9);
    }
    const ModulusBracket c = functional_modulus(*l1, 1.9, o);
    CHECK(c.lo >= 0.0);
    CHECK(c.hi <= 2.0);
    ModulusOptions ball;
    ball.spherical = false;
    ball.outer_mesh = 0.02;
    const ModulusBracket d = functional_modulus(*l1, 0.125, ball);
    CHECK(d.kind == ModulusKind::Functional);
    CHECK(d.hi >= a.lo - 1e-12);
    CHECK(d.lo <= std::sqrt(0.25) + 1e-9);
    CHECK_THROWS_AS(functional_modulus(*l1, 2.0, o), InputError);
    CHECK_THROWS_AS(functional_modulus(*make_linf(4), 0.1, o), UnsupportedDimensionError);
}

TEST_CASE("modified modulus") {
    auto l1 = make_l1(2);
    ModulusOptions o;
    o.target_width = 0.015;
    for (double eps : {0.09, 0.16, 0.25}) {
        const ModulusBracket b = modified_modulus(*l1, *make_real(), eps, o);
        CHECK(b.kind == ModulusKind::ModifiedSpherical);
        CHECK(b.certified);
        CHECK(b.contains(std::sqrt(eps)));
        CHECK(b.width() <= 0.02);
    }
    ModulusOptions w;
    for (double eps : {0.05, 0.16}) CHECK(modified_modulus(*l1, *make_linf(2), eps, w).hi <= std::sqrt(eps) + w.target_width + 1e-9);
    ModulusOptions lo_only;
    lo_only.max_cells = 100000;
    const ModulusBracket h = modified_modulus(*l1, *make_hexagon(0.75).space, 0.1, lo_only);
    CHECK(h.lo >= std::sqrt(0.6) - 0.02);
    CHECK(h.hi <= 1.0);
    CHECK_FALSE(modified_modulus_certifiable(*make_hexagon(0.5).space, *make_real()));
}

TEST_CASE("psi ratio") {
    auto l1 = make_l1(2);
    ModulusOptions o;
    o.target_width = 0.01;
    o.codomain_rho = 0.0;
    const PsiRatioReport r = psi_ratio(*l1, *make_linf(2), {0.1, 0.05, 0.02}, o);
    REQUIRE(r.rows.size() == 3);
    for (const PsiRatio& row : r.rows) {
        CHECK(row.ratio_lo <= 1.0 + 1e-9);
        CHECK(row.ratio_hi >= 1.0 - 1e-9);
    }
    CHECK(*r.upper_bound == doctest::Approx(1.0));
    ModulusOptions h = o;
    h.codomain_rho = 0.5;
    const PsiRatioReport q = psi_ratio(*l1, *make_hexagon(0.5).space, {0.01}, h);
    CHECK(q.rows[0].ratio_lo >= *q.lower_bound - 0.1);
    CHECK(q.rows[0].ratio_lo <= std::sqrt(3.0) + 1e-9);
    CHECK(*q.lower_bound == doctest::Approx(1.0));
    CHECK(*q.upper_bound == doctest::Approx(std::sqrt(3.0)));
    CHECK_THROWS_AS(psi_ratio(*l1, *make_linf(2), {0.05, 0.1}, o), InputError);
    CHECK_THROWS_AS(psi_ratio(*l1, *make_linf(2), {0.2}, o), InputError);
}

TEST_CASE("psi construction") {
    for (auto [n, rho] : {std::pair{20, 0.5}, std::pair{50, 0.5}, std::pair{50, 0.8}}) {
        const PsiConstructionReport r = psi_construction_experiment(n, rho, 0.05);
        const double k_real = 0.5 * n * (1 - rho) + 1;
        CHECK(r.k == static_cast<int>(std::lround(k_real)));
        CHECK(std::abs(r.theta) <= 0.5);
        const double d = n * (1 - rho) + 2 + 2 * r.theta;
        CHECK(r.eps0_limit == doctest::Approx(std::pow(2 + 2 * r.theta, 2) / (n * rho * d)));
        CHECK(r.eps0 <= std::min(0.05, r.eps0_limit));
        CHECK(r.branch_residual < 1e-9);
        CHECK(std::abs(r.z_star_tx - (1 - r.eps0)) < 1e-12);
        CHECK(std::abs(r.t_norm - 1.0) < 1e-12);
        CHECK(r.in_pi_eps_spherical);
        CHECK(r.face_distance >= r.face_lower_bound - 1e-9);
        CHECK(std::abs(r.c_value - r.point_cost) < 1e-12);
        CHECK(r.c_ratio >= std::min(std::sqrt(2 * rho / (1 - rho)), 1.0) - 0.1);
        CHECK(r.c_ratio <= std::sqrt((1 + rho) / (1 - rho)));
        CHECK(r.t >= -1.0);
        CHECK(r.t <= 1.0);

        // Past eps0_limit the branches still balance but t < -1, so ||T|| > 1.
        const PsiConstructionReport big = psi_construction_experiment(n, rho, 0.05, 0.049);
        CHECK(big.branch_residual < 1e-9);
        CHECK(big.c_ratio == doctest::Approx(r.c_ratio).epsilon(1e-9));
        CHECK(big.t < -1.0);
        CHECK(big.t_norm > 1.0);
        CHECK_FALSE(big.in_pi_eps_spherical);
    }
    // C approaches sqrt(2 eps0) sqrt(2 rho/(1 - rho)) as n grows.
    double prev = 1e9;
    for (int n : {20, 100, 1000, 10000}) {
        const double theta = std::lround(0.5 * n * 0.5 + 1) - (0.5 * n * 0.5 + 1);
        BoundParams p = re(0.5, 0.049);
        p.n = n;
        p.theta = theta;
        const double gap = std::abs(bound("psi_construction", p).value - std::sqrt(0.098) * std::sqrt(2.0));
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev < 1e-3);
    CHECK_THROWS_AS(psi_construction_experiment(1, 0.5, 0.05, 0.04), InputError);
    CHECK_THROWS_AS(psi_construction_experiment(20, 0.01, 0.05, 0.04), InputError);
    CHECK_THROWS_AS(psi_construction_experiment(20, 0.5, 0.05, 0.06), InputError);
}

TEST_CASE("noncontinuity table") {
    const auto rows = noncontinuity_table(0.25, {0.6, 0.75, 0.9, 0.95, 0.99});
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) {
        CHECK(r.limit_upper == doctest::Approx(std::sqrt(0.5)));
        CHECK(r.bm_upper >= 1.0);
        CHECK(r.bm_upper <= 2 * r.rho / (3 * r.rho - 1) + 1e-12);
        CHECK(r.gap > 0.0);
    }
    CHECK(rows[2].hexagon_lower == 1.0);
    CHECK(rows[3].bm_upper <= 1.03);
    CHECK(rows[4].bm_upper <= 2 * 0.99 / 1.97 + 1e-12);
    const auto r4 = noncontinuity_table(0.4, {0.9});
    CHECK(r4[0].gap == doctest::Approx(1 - std::sqrt(0.8)));
    CHECK_THROWS_AS(noncontinuity_table(0.5, {0.9}), InputError);
    CHECK_THROWS_AS(noncontinuity_table(0.25, {0.3}), InputError);
}

TEST_CASE("conjecture scan over random planar domains") {
    ModulusOptions o;
    o.outer_mesh = 0.01;
    const auto rows = conjecture_scan(4, {0.05, 0.2}, o);
    REQUIRE(rows.size() == 8);
    for (const auto& r : rows) {
        CHECK(r.bracket.certified);
        CHECK(r.bracket.lo <= r.bracket.hi);
        CHECK(r.excess == doctest::Approx(r.bracket.lo - r.bound));
    }
    const auto again = conjecture_scan(4, {0.05, 0.2}, o);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].bracket.hi == again[i].bracket.hi);
}

TEST_CASE("operator modulus: worker count does not change the bracket") {
    auto l1 = make_l1(2);
    auto hex = make_hexagon(0.75).space;
    ModulusOptions one;
    ModulusOptions three = one;
    three.jobs = 3;
    for (double eps : {0.05, 0.25}) {
        const ModulusBracket a = operator_modulus(*l1, *hex, eps, one);
        const ModulusBracket b = operator_modulus(*l1, *hex, eps, three);
        CHECK(a.lo == b.lo);
        CHECK(a.hi == b.hi);
        CHECK(a.evaluations == b.evaluations);
    }
}
