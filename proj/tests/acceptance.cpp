// Runs the ten acceptance criteria with pinned tolerances; one PASS/FAIL line each.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bpb/constructions.hpp"
#include "bpb/moduli.hpp"
#include "bpb/sampling.hpp"
#include "bpb/space_zoo.hpp"
#include "oracles.hpp"

using namespace bpb;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail << "first failure: " << what << "; ";
            pass = false;
        }
    }
};

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<void(Outcome&)> body;
};

std::string f6(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
}

// ---- 1 ----
void beta_verification(Outcome& o) {
    for (double rho : {0.5, 0.6, 0.75, 0.9}) {
        const HexagonBundle h = make_hexagon(rho);
        o.check(verify_beta(h.beta).pass, "hexagon " + f6(rho) + " verify");
        o.check(std::abs(minimal_rho(h.beta) - rho) <= 1e-12, "hexagon " + f6(rho) + " minimal rho");
    }
    for (auto [n, rho] : {std::pair{3, 0.4}, std::pair{5, 0.4}, std::pair{10, 0.5}}) {
        const ZBundle z = make_z(n, rho);
        const std::string tag = "Z(" + std::to_string(n) + ", " + f6(rho) + ")";
        o.check(verify_beta(z.beta).pass, tag + " verify");
        o.check(std::abs(minimal_rho(z.beta) - rho) <= 1e-12, tag + " minimal rho");
        // Off-diagonal values take exactly the two closed forms rho and 1/(n - 1 + rho n).
        const double c = 1.0 / (n - 1 + rho * n);
        double worst_pairs = 0.0, worst_z = 0.0;
        for (int a = 0; a < z.beta.size(); ++a)
            for (int g = 0; g < z.beta.size(); ++g) {
                if (a == g) continue;
                const double v = std::abs(z.beta.y_star[a].dot(z.beta.y[g]));
                o.check(std::abs(v - rho) <= 1e-12 || std::abs(v - c) <= 1e-12, tag + " off-diagonal value");
                (g == n ? worst_z : worst_pairs) = std::max(g == n ? worst_z : worst_pairs, v);
            }
        o.check(std::abs(worst_z - rho) <= 1e-12, tag + " e_j*(z) = rho");
        o.check(std::abs(worst_pairs - c) <= 1e-12, tag + " closed form 1/(n-1+rho n)");
    }
    o.detail << "7 structures verified";
}

// ---- 2 ----
void beta0_exact(Outcome& o) {
    auto l1 = make_l1(2);
    auto linf = make_linf(2);
    ModulusOptions opts;
    for (double eps : {0.125, 0.25, 0.45, 0.6}) {
        const ModulusBracket b = operator_modulus(*l1, *linf, eps, opts);
        const double v = std::min(std::sqrt(2 * eps), 1.0);
        o.check(b.certified, "eps " + f6(eps) + " certified");
        o.check(b.contains(v), "eps " + f6(eps) + " contains " + f6(v));
        if (eps < 0.5) o.check(b.width() <= 0.05, "eps " + f6(eps) + " width " + f6(b.width()));
        o.detail << "eps=" << eps << " [" << f6(b.lo) << ", " << f6(b.hi) << "] ";
    }
}

// ---- 3 ----
void hexagon_lower(Outcome& o) {
    auto l1 = make_l1(2);
    ModulusOptions opts;
    const ModulusBracket a = operator_modulus(*l1, *make_hexagon(0.75).space, 0.1, opts);
    o.check(a.certified && a.lo >= std::sqrt(0.6) - 0.02, "(0.75, 0.1) lo " + f6(a.lo));
    const ModulusBracket b = operator_modulus(*l1, *make_hexagon(0.9).space, 0.25, opts);
    o.check(b.certified && b.lo >= 1 - 0.02, "(0.9, 0.25) lo " + f6(b.lo));
    o.detail << "lo(0.75, 0.1) = " << f6(a.lo) << ", lo(0.9, 0.25) = " << f6(b.lo);
}

// ---- 4 and 5 share the instances ----
struct SweepStats {
    long instances = 0;
    long violations_pi = 0;
    long violations_bound = 0;
    long violations_s = 0;
    long constructions = 0;
    double worst_ratio = 0.0;
    double worst_s = 0.0;
};

SweepStats& sweep() {
    static SweepStats s = [] {
        SweepStats st;
        const std::vector<BetaStructure> targets{linf_beta(2), make_hexagon(0.5).beta, make_hexagon(0.75).beta,
                                                 make_z(5, 0.5).beta};
        const SpacePtr l1 = make_l1(2);
        std::mt19937_64 rng(2024);
        for (const BetaStructure& beta : targets) {
            const double rho = beta.rho;
            for (int i = 0; i < 1000; ++i) {
                const AlmostAttainingPair p = sample_almost_attaining(rng, l1, beta.space, i % 2 == 0);
                const PerturbationResult r = lindenstrauss_perturbation(beta, p.t, p.x, p.eps);
                ++st.instances;
                if (!AttainingPair{r.z, r.f, AttainMode::Exact, 1e-9}.holds()) ++st.violations_pi;
                const double bound = std::min(std::sqrt(2 * p.eps) * std::sqrt((1 + rho) / (1 - rho)), 2.0);
                if (!(r.max_distance() < bound)) ++st.violations_bound;
                st.worst_ratio = std::max(st.worst_ratio, r.max_distance() / bound);
                if (r.branch != "construction") continue;
                ++st.constructions;
                const double e = std::max(std::abs(r.s.norm() - (1 + r.eta)),
                                          std::abs(beta.space->norm(r.s.apply(r.z)) - r.s.norm()));
                st.worst_s = std::max(st.worst_s, e);
                if (e > 1e-10) ++st.violations_s;
            }
        }
        return st;
    }();
    return s;
}

void upper_suite(Outcome& o) {
    const SweepStats& s = sweep();
    o.check(s.instances == 4000, "instance count");
    o.check(s.violations_pi == 0, std::to_string(s.violations_pi) + " outputs outside Pi");
    o.check(s.violations_bound == 0, std::to_string(s.violations_bound) + " bound violations");
    o.detail << s.instances << " instances, max distance/bound " << f6(s.worst_ratio);
}

void s_identities(Outcome& o) {
    const SweepStats& s = sweep();
    o.check(s.constructions > 0, "no construction instances");
    o.check(s.violations_s == 0, std::to_string(s.violations_s) + " identity violations");
    o.detail << s.constructions << " construction instances of " << s.instances << ", max error " << f6(s.worst_s);
}

// ---- 6 ----
void modified_sharp(Outcome& o) {
    auto l1 = make_l1(2);
    auto r = make_real();
    ModulusOptions opts;
    opts.target_width = 0.015;
    for (double eps : {0.09, 0.16, 0.25}) {
        const ModulusBracket b = modified_modulus(*l1, *r, eps, opts);
        o.check(b.certified && b.contains(std::sqrt(eps)), "eps " + f6(eps) + " contains " + f6(std::sqrt(eps)));
        o.check(b.width() <= 0.02, "eps " + f6(eps) + " width " + f6(b.width()));
        o.detail << "eps=" << eps << " [" << f6(b.lo) << ", " << f6(b.hi) << "] ";
    }
}

// ---- 7 ----
void noncontinuity(Outcome& o) {
    const std::vector<double> rhos = {0.9, 0.95, 0.99};
    const auto rows = noncontinuity_table(0.25, rhos);
    double prev_bm = 1e9;
    for (const NoncontinuityRow& row : rows) {
        const std::string tag = "rho " + f6(row.rho);
        o.check(row.hexagon_lower >= 0.95, tag + " hexagon column");
        o.check(std::abs(row.limit_upper - std::sqrt(0.5)) <= 1e-12, tag + " beta=0 column");
        o.check(row.gap > 0.2, tag + " gap");
        o.check(row.bm_upper >= 1.0 && row.bm_upper < prev_bm, tag + " BM column decreasing to 1");
        prev_bm = row.bm_upper;
    }
    o.check(rows[1].bm_upper <= 1.03, "BM at 0.95 is " + f6(rows[1].bm_upper));
    // Bracket confirmation: certified lower ends beat the beta = 0 value.
    auto l1 = make_l1(2);
    ModulusOptions opts;
    for (const NoncontinuityRow& row : rows) {
        const ModulusBracket b = operator_modulus(*l1, *make_hexagon(row.rho).space, 0.25, opts);
        o.check(b.certified && b.lo >= row.hexagon_lower - 0.02, "rho " + f6(row.rho) + " bracket lo " + f6(b.lo));
        o.check(b.lo > row.limit_upper + 0.2, "rho " + f6(row.rho) + " bracket above the beta=0 value");
    }
    o.detail << "BM(0.95) = " << f6(rows[1].bm_upper) << ", BM(0.99) = " << f6(rows[2].bm_upper);
}

// ---- 8 ----
void psi_construction(Outcome& o) {
    for (auto [n, rho] : {std::pair{20, 0.5}, std::pair{50, 0.5}, std::pair{50, 0.8}}) {
        const std::string tag = "(" + std::to_string(n) + ", " + f6(rho) + ")";
        const PsiConstructionReport r = psi_construction_experiment(n, rho, 0.05);
        const double d = n * (1 - rho) + 2 + 2 * r.theta;
        const double residual = std::abs(2 * r.delta - 2 * n * rho * (r.eps0 / r.delta) / d);
        o.check(residual < 1e-9, tag + " branch residual " + f6(residual));
        // Independent membership check on the reported pair.
        const ZBundle z = make_z(n, rho);
        const LinearOperator t(make_l1(2), z.space, r.t_matrix);
        const PairClass pc = classify_pair(r.x, t, 0.05, 1e-12);
        o.check(pc.in_pi_eps_spherical && r.in_pi_eps_spherical, tag + " pair in the spherical set");
        const double lo = std::min(std::sqrt(2 * rho / (1 - rho)), 1.0) - 0.1;
        const double hi = std::sqrt((1 + rho) / (1 - rho));
        o.check(r.c_ratio >= lo && r.c_ratio <= hi, tag + " C ratio " + f6(r.c_ratio));
        o.detail << tag << " eps0=" << f6(r.eps0) << " C/sqrt(2 eps0)=" << f6(r.c_ratio) << " ";
    }
}

// ---- 9 ----
void a_identity(Outcome& o) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const double rho = 0.5 + 0.45 * i / 19.0;
            const double eps = 0.01 + 0.89 * j / 19.0;
            const double u = ell1_bound_a(rho, eps);
            worst = std::max(worst, std::abs(u * u * (1 - rho) + 2 * rho * eps * u - 2 * eps * (1 + rho)));
        }
    o.check(worst <= 1e-10, "quadratic residual " + f6(worst));
    o.check(std::abs(ell1_bound_a(0.5, 0.25) - 1.0) <= 1e-12, "A(0.5, 0.25)");
    o.detail << "max residual " << f6(worst);
}

// ---- 10 ----
SpacePtr random_space(std::mt19937_64& rng, int i) {
    switch (i % 5) {
        case 0: return make_l1(2);
        case 1: return make_hexagon(0.5 + 0.49 * std::uniform_real_distribution<double>(0, 1)(rng)).space;
        case 2: return make_linf(3);
        default: return std::make_shared<const PolyhedralSpace>("random", oracle::random_family(rng, 2 + i % 2));
    }
}

void property_suites(Outcome& o) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long norm_bad = 0, dual_bad = 0, lip_bad = 0, mono_bad = 0, pi_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const SpacePtr x = random_space(rng, i);
        const Vec a = oracle::random_vec(rng, x->dim()), b = oracle::random_vec(rng, x->dim());
        const double lam = 4 * u(rng) - 2;
        const double na = x->norm(a), nb = x->norm(b);
        if (!(na > 0) || std::abs(x->norm(lam * a) - std::abs(lam) * na) > 1e-12 * (1 + na) ||
            x->norm(a + b) > na + nb + 1e-12 || x->norm(Vec::Zero(x->dim())) != 0.0)
            ++norm_bad;
        // Dual norm is the max over ball vertices and bounds every pairing.
        const Vec f = oracle::random_vec(rng, x->dim());
        double vmax = 0.0;
        for (const Vec& v : x->extreme_points()) vmax = std::max(vmax, f.dot(v));
        const double fn = x->dual_norm(f);
        if (std::abs(fn - vmax) > 1e-9 * (1 + fn) || std::abs(f.dot(a)) > fn * na + 1e-9) ++dual_bad;
    }
    const SpacePtr l1 = make_l1(2);
    for (int i = 0; i < 1000; ++i) {
        const SpacePtr y = random_space(rng, i);
        const LinearOperator t = sample_unit_operator(rng, l1, y);
        const LinearOperator g(l1, y, t.matrix() + 0.3 * u(rng) * Mat::Random(y->dim(), 2));
        if (std::abs(t.norm() - g.norm()) > operator_distance(t, g) + 1e-12) ++lip_bad;
        // Pi subset of spherical Pi_eps subset of Pi_eps, and Pi_eps grows with eps.
        const AlmostAttainingPair p = sample_almost_attaining(rng, l1, y, i % 2 == 0);
        const double e1 = p.eps * (1 + u(rng)), e2 = e1 + u(rng);
        const PairClass c1 = classify_pair(p.x, p.t, e1), c2 = classify_pair(p.x, p.t, e2);
        const Vec v = l1->extreme_points()[static_cast<std::size_t>(t.witnesses().front())];
        const PairClass ca = classify_pair(v, t.scaled(1.0 / t.norm()), 1e-6);
        if (!c1.in_pi_eps || (c1.in_pi_eps && !c2.in_pi_eps) || (c1.in_pi_eps_spherical && !c1.in_pi_eps) ||
            (c1.in_pi && !c1.in_pi_eps_spherical) || !ca.in_pi || !ca.in_pi_eps_spherical)
            ++pi_bad;
    }
    // Brackets in eps: lo(eps1) <= hi(eps2) whenever eps1 <= eps2, on random planar domains.
    ModulusOptions opts;
    opts.outer_mesh = 0.05;
    for (int i = 0; i < 1000; ++i) {
        const SpacePtr x = i % 4 == 0 ? make_l1(2) : sample_polygon_space(rng, 2 + i % 4);
        const double e1 = 0.02 + 0.5 * u(rng), e2 = e1 + 0.3 * u(rng);
        const ModulusBracket b1 = functional_modulus(*x, e1, opts), b2 = functional_modulus(*x, e2, opts);
        if (b1.lo > b2.hi + 1e-12) ++mono_bad;
    }
    o.check(norm_bad == 0, std::to_string(norm_bad) + " norm axiom failures");
    o.check(dual_bad == 0, std::to_string(dual_bad) + " duality failures");
    o.check(lip_bad == 0, std::to_string(lip_bad) + " Lipschitz failures");
    o.check(mono_bad == 0, std::to_string(mono_bad) + " monotonicity failures");
    o.check(pi_bad == 0, std::to_string(pi_bad) + " inclusion failures");
    o.detail << "5 suites x 1000 instances";
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "beta verification", 1.0, beta_verification},
        {2, "beta = 0 exactness", 600.0, beta0_exact},
        {3, "hexagon lower bound", 600.0, hexagon_lower},
        {4, "upper-bound guarantee suite", 120.0, upper_suite},
        {5, "perturbed operator norm identities", 120.0, s_identities},
        {6, "modified modulus sharpness", 300.0, modified_sharp},
        {7, "non-continuity table", 600.0, noncontinuity},
        {8, "psi construction", 1.0, psi_construction},
        {9, "A(rho, eps) identity", 1.0, a_identity},
        {10, "property suites", 120.0, property_suites},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.check(s <= c.budget_s, "runtime " + f6(s) + " s over budget " + f6(c.budget_s) + " s");
        std::printf("criterion %2d %s  %s: %s [%.2f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.title.c_str(),
                    o.detail.str().c_str(), s);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
