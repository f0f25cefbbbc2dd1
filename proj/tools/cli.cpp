#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "bpb/constructions.hpp"
#include "bpb/moduli.hpp"
#include "bpb/sampling.hpp"
#include "bpb/space_zoo.hpp"

namespace bpb::cli {

using nlohmann::json;

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return buf;
}

namespace {

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

json cell_json(const std::string& s) {
    if (s.empty()) return nullptr;
    if (s == "true") return true;
    if (s == "false") return false;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && *end == '\0' && std::isfinite(v)) return v;
    return s;
}

json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(std::abs(v[i]) < 1e-14 ? 0.0 : v[i]);
    return a;
}

// ---- spaces ----

NamedSpace resolve(const std::string& name) {
    if (!name.empty() && name[0] == '@') {
        std::ifstream in(name.substr(1));
        if (!in) throw InputError("cannot read space file " + name.substr(1));
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw InputError("malformed space file " + name.substr(1) + ": " + e.what());
        }
        return NamedSpace{parse_space_json(j), std::nullopt};
    }
    return space_by_name(name);
}

const BetaStructure& need_beta(const NamedSpace& ns, const std::string& name) {
    if (!ns.beta) throw InputError("space " + name + " has no beta structure");
    return *ns.beta;
}

// ---- brackets and bounds ----

const std::vector<std::string> kBracketColumns = {"epsilon", "kind",       "lo",       "hi",
                                                  "outer_mesh", "inner_mesh", "certified"};

std::vector<std::string> bracket_cells(const ModulusBracket& b) {
    return {fmt(b.epsilon), to_string(b.kind), fmt(b.lo), fmt(b.hi), fmt(b.outer_mesh), fmt(b.inner_mesh),
            fmt_bool(b.certified)};
}

std::vector<std::string> blank_bracket(double eps, ModulusKind kind) {
    return {fmt(eps), to_string(kind), "", "", "", "", "false"};
}

BoundParams params(std::optional<double> rho, std::optional<double> eps) {
    BoundParams p;
    p.rho = rho;
    p.eps = eps;
    return p;
}

double bound_value(const std::string& name, const BoundParams& p) { return bound(name, p).value; }

template <class... Cols>
std::vector<std::string> concat(std::vector<std::string> a, const Cols&... rest) {
    (a.insert(a.end(), rest.begin(), rest.end()), ...);
    return a;
}

ModulusOptions modulus_options(const ExperimentConfig& cfg) {
    ModulusOptions o;
    if (cfg.outer_mesh) o.outer_mesh = *cfg.outer_mesh;
    if (cfg.target_width) o.target_width = *cfg.target_width;
    o.seed = cfg.seed;
    o.jobs = cfg.jobs;
    return o;
}

template <class T>
std::vector<T> or_default(const std::vector<T>& v, std::vector<T> def) {
    return v.empty() ? std::move(def) : v;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw InputError(what);
}

void expect(ExperimentResult& r, std::string name, bool pass, std::string detail) {
    r.assertions.push_back({std::move(name), pass, std::move(detail)});
}

// ---- experiments ----

ExperimentResult beta_upper_sweep(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const std::string domain_name = cfg.domain.empty() ? "l1:2" : cfg.domain;
    const auto codomains = or_default(cfg.codomains, {"linf:2", "hex:0.5", "hex:0.75", "z:5:0.5"});
    const auto epsilons = or_default(cfg.eps, {0.1});
    const int instances = cfg.instances.value_or(1000);
    require(instances >= 1, "instances must be positive");
    r.params = {{"domain", domain_name}, {"codomains", codomains}, {"eps", epsilons},
                {"instances", instances}, {"seed", cfg.seed}};
    r.table.columns = concat(std::vector<std::string>{"codomain", "rho", "instances", "construction_instances",
                                                      "in_pi_violations", "bound_violations", "max_distance_ratio",
                                                      "s_identity_error"},
                             kBracketColumns, std::vector<std::string>{"thm_beta_upper"});
    const SpacePtr x = resolve(domain_name).space;
    std::mt19937_64 rng(cfg.seed);
    for (const std::string& name : codomains) {
        const NamedSpace ns = resolve(name);
        const BetaStructure& beta = need_beta(ns, name);
        const double rho = beta.rho;
        int in_pi_bad = 0, bound_bad = 0, constructions = 0;
        double ratio = 0.0, s_err = 0.0;
        for (int i = 0; i < instances; ++i) {
            const AlmostAttainingPair p = sample_almost_attaining(rng, x, beta.space, i % 2 == 0);
            const PerturbationResult res = lindenstrauss_perturbation(beta, p.t, p.x, p.eps);
            if (!AttainingPair{res.z, res.f}.holds()) ++in_pi_bad;
            const double b = bound_value("thm_beta_upper", params(rho, p.eps));
            if (!(res.max_distance() < b)) ++bound_bad;
            ratio = std::max(ratio, res.max_distance() / b);
            if (res.branch == "construction") {
                ++constructions;
                s_err = std::max({s_err, std::abs(res.s.norm() - (1 + res.eta)),
                                  std::abs(beta.space->norm(res.s.apply(res.z)) - res.s.norm())});
            }
        }
        expect(r, "in_pi " + name, in_pi_bad == 0, std::to_string(in_pi_bad) + " of " + std::to_string(instances));
        expect(r, "strict upper bound " + name, bound_bad == 0,
               std::to_string(bound_bad) + " violations, max ratio " + fmt(ratio));
        expect(r, "S identities " + name, s_err <= 1e-10, "max error " + fmt(s_err));
        const std::vector<std::string> stats = {name,
                                                fmt(rho),
                                                std::to_string(instances),
                                                std::to_string(constructions),
                                                std::to_string(in_pi_bad),
                                                std::to_string(bound_bad),
                                                fmt(ratio),
                                                fmt(s_err)};
        ModulusOptions o = modulus_options(cfg);
        o.codomain_rho = rho;
        for (double eps : epsilons) {
            const double b = bound_value("thm_beta_upper", params(rho, eps));
            std::vector<std::string> br = blank_bracket(eps, ModulusKind::OperatorSpherical);
            if (!cfg.bounds_only && operator_modulus_certifiable(*x, *beta.space)) {
                const ModulusBracket m = operator_modulus(*x, *beta.space, eps, o);
                br = bracket_cells(m);
                expect(r, "bracket respects bound " + name + " eps=" + fmt(eps), m.lo <= b + 1e-9,
                       "lo " + fmt(m.lo) + " vs " + fmt(b));
            }
            r.table.add(concat(stats, br, std::vector<std::string>{fmt(b)}));
        }
    }
    return r;
}

ExperimentResult ell1_upper(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const auto rhos = or_default(cfg.rho, {0.5, 0.75, 0.9});
    const auto epsilons = or_default(cfg.eps, {0.1});
    const int instances = cfg.instances.value_or(1000);
    require(instances >= 1, "instances must be positive");
    r.params = {{"rho", rhos}, {"eps", epsilons}, {"instances", instances}, {"seed", cfg.seed}};
    r.table.columns = concat(std::vector<std::string>{"codomain", "rho", "instances", "in_pi_violations",
                                                      "bound_violations", "max_distance_ratio"},
                             kBracketColumns, std::vector<std::string>{"thm_ell1_upper", "thm_beta_upper"});
    const SpacePtr l1 = make_l1(2);
    std::mt19937_64 rng(cfg.seed);
    for (double rho : rhos) {
        const HexagonBundle h = make_hexagon(rho);
        const std::string name = "hex:" + fmt(rho);
        int in_pi_bad = 0, bound_bad = 0;
        double ratio = 0.0;
        for (int i = 0; i < instances; ++i) {
            const AlmostAttainingPair p = sample_almost_attaining(rng, l1, h.space, i % 3 == 0, 0.5);
            const PerturbationResult res = ell1_perturbation(h.beta, p.t, p.x, p.eps);
            if (!AttainingPair{res.z, res.f}.holds()) ++in_pi_bad;
            const double b = bound_value("thm_ell1_upper", params(rho, p.eps));
            if (res.max_distance() > b + 1e-12) ++bound_bad;
            ratio = std::max(ratio, res.max_distance() / b);
        }
        expect(r, "in_pi " + name, in_pi_bad == 0, std::to_string(in_pi_bad) + " of " + std::to_string(instances));
        expect(r, "upper bound " + name, bound_bad == 0,
               std::to_string(bound_bad) + " violations, max ratio " + fmt(ratio));
        ModulusOptions o = modulus_options(cfg);
        o.codomain_rho = rho;
        for (double eps : epsilons) {
            const double b1 = bound_value("thm_ell1_upper", params(rho, eps));
            const double b2 = bound_value("thm_beta_upper", params(rho, eps));
            expect(r, "ell1 bound below beta bound " + name + " eps=" + fmt(eps), b1 <= b2 + 1e-12,
                   fmt(b1) + " vs " + fmt(b2));
            std::vector<std::string> br = blank_bracket(eps, ModulusKind::OperatorSpherical);
            if (!cfg.bounds_only) {
                const ModulusBracket m = operator_modulus(*l1, *h.space, eps, o);
                br = bracket_cells(m);
                expect(r, "bracket respects bound " + name + " eps=" + fmt(eps), m.lo <= b1 + 1e-9,
                       "lo " + fmt(m.lo) + " vs " + fmt(b1));
            }
            r.table.add(concat(std::vector<std::string>{name, fmt(rho), std::to_string(instances),
                                                        std::to_string(in_pi_bad), std::to_string(bound_bad),
                                                        fmt(ratio)},
                               br, std::vector<std::string>{fmt(b1), fmt(b2)}));
        }
    }
    return r;
}

ExperimentResult beta0_sharp(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const auto epsilons = or_default(cfg.eps, {0.125, 0.25, 0.45, 0.6});
    const std::string y_name = cfg.codomains.empty() ? "linf:2" : cfg.codomains.front();
    r.params = {{"codomain", y_name}, {"eps", epsilons}, {"seed", cfg.seed}};
    r.table.columns = concat(kBracketColumns, std::vector<std::string>{"thm_beta0_exact", "width"});
    const NamedSpace y = resolve(y_name);
    const BetaStructure& beta = need_beta(y, y_name);
    require(beta.rho == 0.0, "codomain must have beta parameter 0");
    const SpacePtr l1 = make_l1(2);
    ModulusOptions o = modulus_options(cfg);
    o.codomain_rho = 0.0;
    for (double eps : epsilons) {
        const double v = bound_value("thm_beta0_exact", params(std::nullopt, eps));
        const ModulusBracket m = operator_modulus(*l1, *y.space, eps, o);
        expect(r, "contains eps=" + fmt(eps), m.certified && m.contains(v),
               "[" + fmt(m.lo) + ", " + fmt(m.hi) + "] vs " + fmt(v));
        expect(r, "width eps=" + fmt(eps), m.width() <= 0.05, fmt(m.width()));
        r.table.add(concat(bracket_cells(m), std::vector<std::string>{fmt(v), fmt(m.width())}));
    }
    return r;
}

ExperimentResult hexagon_lower(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const auto rhos = or_default(cfg.rho, {0.75});
    const auto epsilons = or_default(cfg.eps, {0.1});
    r.params = {{"rho", rhos}, {"eps", epsilons}, {"seed", cfg.seed}};
    r.table.columns = concat(std::vector<std::string>{"rho"}, kBracketColumns,
                             std::vector<std::string>{"thm_hexagon_lower", "thm_beta_upper"});
    const SpacePtr l1 = make_l1(2);
    for (double rho : rhos) {
        const HexagonBundle h = make_hexagon(rho);
        ModulusOptions o = modulus_options(cfg);
        o.codomain_rho = rho;
        for (double eps : epsilons) {
            const double lower = bound_value("thm_hexagon_lower", params(rho, eps));
            const double upper = bound_value("thm_beta_upper", params(rho, eps));
            const ModulusBracket m = operator_modulus(*l1, *h.space, eps, o);
            const std::string tag = "rho=" + fmt(rho) + " eps=" + fmt(eps);
            expect(r, "lower bound reached " + tag, m.certified && m.lo >= lower - 0.02,
                   "lo " + fmt(m.lo) + " vs " + fmt(lower) + " - 0.02");
            expect(r, "bracket respects upper bound " + tag, m.lo <= upper + 1e-9, fmt(m.lo) + " vs " + fmt(upper));
            r.table.add(concat(std::vector<std::string>{fmt(rho)}, bracket_cells(m),
                               std::vector<std::string>{fmt(lower), fmt(upper)}));
        }
    }
    return r;
}

ExperimentResult noncontinuity(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const double eps = cfg.eps.empty() ? 0.25 : cfg.eps.front();
    const auto rhos = or_default(cfg.rho, {0.6, 0.75, 0.9, 0.95, 0.99});
    r.params = {{"eps", eps}, {"rho", rhos}, {"seed", cfg.seed}, {"confirm", !cfg.bounds_only}};
    r.table.columns = concat(std::vector<std::string>{"rho", "hexagon_lower", "limit_upper", "bm_upper", "gap"},
                             kBracketColumns);
    const SpacePtr l1 = make_l1(2);
    for (const NoncontinuityRow& row : noncontinuity_table(eps, rhos, 400, cfg.seed)) {
        const std::string tag = "rho=" + fmt(row.rho);
        expect(r, "gap positive " + tag, row.gap > 0.0, fmt(row.gap));
        std::vector<std::string> br = blank_bracket(eps, ModulusKind::OperatorSpherical);
        if (!cfg.bounds_only) {
            ModulusOptions o = modulus_options(cfg);
            o.codomain_rho = row.rho;
            const ModulusBracket m = operator_modulus(*l1, *make_hexagon(row.rho).space, eps, o);
            br = bracket_cells(m);
            expect(r, "bracket confirms lower bound " + tag, m.certified && m.lo >= row.hexagon_lower - 0.02,
                   "lo " + fmt(m.lo) + " vs " + fmt(row.hexagon_lower));
        }
        r.table.add(concat(std::vector<std::string>{fmt(row.rho), fmt(row.hexagon_lower), fmt(row.limit_upper),
                                                    fmt(row.bm_upper), fmt(row.gap)},
                           br));
    }
    return r;
}

ExperimentResult psi_construction(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const int n = cfg.n.value_or(20);
    const double rho = cfg.rho.empty() ? 0.5 : cfg.rho.front();
    const double eps = cfg.eps.empty() ? 0.05 : cfg.eps.front();
    const PsiConstructionReport p = psi_construction_experiment(n, rho, eps, cfg.eps0, cfg.delta);
    r.params = {{"n", n}, {"rho", rho}, {"eps", eps}, {"eps0", p.eps0}, {"delta", p.delta}};
    r.table.columns = concat(std::vector<std::string>{"n", "rho", "eps0", "eps0_limit", "k", "theta", "delta", "t",
                                                      "z_star_tx", "t_norm", "in_pi_eps_spherical", "point_cost",
                                                      "face_lower_bound", "face_distance", "branch_residual",
                                                      "c_ratio"},
                             kBracketColumns, std::vector<std::string>{"psi_construction", "thm_beta_upper"});
    const double lower = std::min(std::sqrt(2 * rho / (1 - rho)), 1.0) - 0.1;
    const double upper = std::sqrt((1 + rho) / (1 - rho));
    expect(r, "branch equality", p.branch_residual < 1e-9, fmt(p.branch_residual));
    expect(r, "pair in spherical Pi_eps", p.in_pi_eps_spherical,
           "||T|| = " + fmt(p.t_norm) + ", z*(Tx) = " + fmt(p.z_star_tx));
    expect(r, "face distance at least the face bound", p.face_distance >= p.face_lower_bound - 1e-9,
           fmt(p.face_distance) + " vs " + fmt(p.face_lower_bound));
    expect(r, "C ratio in range", p.c_ratio >= lower && p.c_ratio <= upper,
           fmt(p.c_ratio) + " in [" + fmt(lower) + ", " + fmt(upper) + "]");
    BoundParams bp = params(rho, p.eps0);
    bp.n = n;
    bp.theta = p.theta;
    // Every attaining pair pays at least one of the two branch costs.
    ModulusBracket m;
    m.epsilon = eps;
    m.kind = ModulusKind::OperatorSpherical;
    m.lo = p.in_pi_eps_spherical ? std::min(p.point_cost, p.face_distance) : 0.0;
    m.hi = bound_value("thm_beta_upper", params(rho, eps));
    m.certified = false;
    r.table.add(concat(std::vector<std::string>{std::to_string(n), fmt(rho), fmt(p.eps0), fmt(p.eps0_limit),
                                                std::to_string(p.k), fmt(p.theta), fmt(p.delta), fmt(p.t),
                                                fmt(p.z_star_tx), fmt(p.t_norm), fmt_bool(p.in_pi_eps_spherical),
                                                fmt(p.point_cost), fmt(p.face_lower_bound), fmt(p.face_distance),
                                                fmt(p.branch_residual), fmt(p.c_ratio)},
                       bracket_cells(m),
                       std::vector<std::string>{fmt(bound_value("psi_construction", bp)), fmt(m.hi)}));
    return r;
}

ExperimentResult modified_sharp(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const auto epsilons = or_default(cfg.eps, {0.09, 0.16, 0.25});
    const std::string y_name = cfg.codomains.empty() ? "r:1" : cfg.codomains.front();
    r.params = {{"codomain", y_name}, {"eps", epsilons}, {"seed", cfg.seed}};
    r.table.columns = concat(kBracketColumns, std::vector<std::string>{"modified_ell1R", "modified_upper", "width"});
    const NamedSpace y = resolve(y_name);
    const SpacePtr l1 = make_l1(2);
    const double rho = y.beta ? y.beta->rho : 0.0;
    ModulusOptions o = modulus_options(cfg);
    if (!cfg.target_width) o.target_width = 0.015;
    for (double eps : epsilons) {
        const double v = bound_value("modified_ell1R", params(std::nullopt, eps));
        const double up = bound_value("modified_upper", params(rho, eps));
        const ModulusBracket m = modified_modulus(*l1, *y.space, eps, o);
        expect(r, "contains eps=" + fmt(eps), m.certified && m.contains(v),
               "[" + fmt(m.lo) + ", " + fmt(m.hi) + "] vs " + fmt(v));
        expect(r, "width eps=" + fmt(eps), m.width() <= 0.02, fmt(m.width()));
        r.table.add(concat(bracket_cells(m), std::vector<std::string>{fmt(v), fmt(up), fmt(m.width())}));
    }
    return r;
}

ExperimentResult nonsquare_upper(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const std::string domain_name = cfg.domain.empty() ? "hex:0.75" : cfg.domain;
    const auto codomains = or_default(cfg.codomains, {"linf:2", "hex:0.75"});
    const double eps = cfg.eps.empty() ? 0.02 : cfg.eps.front();
    const int instances = cfg.instances.value_or(500);
    require(instances >= 1, "instances must be positive");
    const SpacePtr x = resolve(domain_name).space;
    const double alpha = std::min(nonsquareness_parameter(*x).alpha_lo, nonsquareness_parameter(x->dual()).alpha_lo);
    require(alpha > 1e-12, "domain " + domain_name + " is not uniformly non-square");
    const double a0 = cfg.alpha0.value_or(alpha * (1.0 - 1e-6));
    require(a0 > 0.0 && a0 < alpha, "alpha0 must lie in (0, " + fmt(alpha) + ")");
    r.params = {{"domain", domain_name}, {"codomains", codomains}, {"eps", eps},
                {"instances", instances}, {"alpha0", a0}, {"seed", cfg.seed}};
    r.table.columns = concat(std::vector<std::string>{"codomain", "rho", "alpha0", "eps_threshold", "instances",
                                                      "in_pi_violations", "bound_violations", "max_distance_ratio"},
                             kBracketColumns, std::vector<std::string>{"thm_nonsquare_upper", "thm_beta_upper"});
    std::mt19937_64 rng(cfg.seed);
    for (const std::string& name : codomains) {
        const NamedSpace ns = resolve(name);
        const BetaStructure& beta = need_beta(ns, name);
        const double rho = beta.rho;
        const double thr = nonsquare_eps_threshold(rho, a0);
        require(eps < thr, "eps must be below " + fmt(thr) + " for codomain " + name);
        BoundParams bp = params(rho, eps);
        bp.alpha0 = a0;
        const double b = bound_value("thm_nonsquare_upper", bp);
        const double b_beta = bound_value("thm_beta_upper", params(rho, eps));
        int in_pi_bad = 0, bound_bad = 0;
        double ratio = 0.0;
        for (int i = 0; i < instances; ++i) {
            const AlmostAttainingPair p = sample_pair_for_eps(rng, x, beta.space, eps, true);
            const PerturbationResult res = lindenstrauss_perturbation_nonsquare(beta, p.t, p.x, eps, a0);
            if (!AttainingPair{res.z, res.f}.holds()) ++in_pi_bad;
            if (!(res.max_distance() < b)) ++bound_bad;
            ratio = std::max(ratio, res.max_distance() / b);
        }
        expect(r, "in_pi " + name, in_pi_bad == 0, std::to_string(in_pi_bad) + " of " + std::to_string(instances));
        expect(r, "strict upper bound " + name, bound_bad == 0,
               std::to_string(bound_bad) + " violations, max ratio " + fmt(ratio));
        expect(r, "improves on the beta bound " + name, b < b_beta, fmt(b) + " vs " + fmt(b_beta));
        r.table.add(concat(std::vector<std::string>{name, fmt(rho), fmt(a0), fmt(thr), std::to_string(instances),
                                                    std::to_string(in_pi_bad), std::to_string(bound_bad), fmt(ratio)},
                           blank_bracket(eps, ModulusKind::OperatorSpherical),
                           std::vector<std::string>{fmt(b), fmt(b_beta)}));
    }
    return r;
}

ExperimentResult conjecture(const ExperimentConfig& cfg) {
    ExperimentResult r;
    const int spaces = cfg.spaces.value_or(20);
    const auto epsilons = or_default(cfg.eps, {0.05, 0.1, 0.2});
    ModulusOptions o = modulus_options(cfg);
    if (!cfg.outer_mesh) o.outer_mesh = 0.01;
    r.params = {{"spaces", spaces}, {"eps", epsilons}, {"outer_mesh", o.outer_mesh}, {"seed", cfg.seed}};
    r.table.columns = concat(std::vector<std::string>{"space", "num_functionals"}, kBracketColumns,
                             std::vector<std::string>{"bound", "excess"});
    const auto rows = conjecture_scan(spaces, epsilons, o);
    bool all_certified = true;
    int candidates = 0;
    double max_hi = 0.0, max_excess = -1e300;
    for (const ConjectureScanRow& row : rows) {
        all_certified = all_certified && row.bracket.certified;
        if (row.excess > 1e-9) ++candidates;
        max_excess = std::max(max_excess, row.excess);
        max_hi = std::max(max_hi, row.bracket.hi);
        r.table.add(concat(std::vector<std::string>{row.space, std::to_string(row.num_functionals)},
                           bracket_cells(row.bracket), std::vector<std::string>{fmt(row.bound), fmt(row.excess)}));
    }
    expect(r, "brackets certified", all_certified, std::to_string(rows.size()) + " brackets");
    r.notes = {{"exploratory", true},
               {"max_excess_of_lo_over_bound", max_excess},
               {"max_hi", max_hi},
               {"rows_with_lo_above_bound", candidates}};
    return r;
}

using Runner = std::function<ExperimentResult(const ExperimentConfig&)>;

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> m = {
        {"thm-beta-upper-sweep", beta_upper_sweep}, {"thm-ell1-upper", ell1_upper},
        {"thm-beta0-sharp", beta0_sharp},           {"thm-hexagon-lower", hexagon_lower},
        {"noncontinuity", noncontinuity},           {"psi-construction", psi_construction},
        {"modified-sharp", modified_sharp},         {"nonsquare-upper", nonsquare_upper},
        {"conjecture-scan", conjecture},
    };
    return m;
}

// ---- commands ----

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Uncertifiable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json space_report(const std::string& name) {
    const NamedSpace ns = resolve(name);
    const PolyhedralSpace& x = *ns.space;
    json j;
    j["name"] = name;
    j["dim"] = x.dim();
    json fam = json::array();
    for (int i = 0; i < x.num_functionals(); ++i) fam.push_back(vec_json(x.functional(i)));
    j["norming_family"] = fam;
    if (x.has_extreme_points()) {
        json ext = json::array();
        for (const Vec& v : x.extreme_points()) ext.push_back(vec_json(v));
        j["extreme_points"] = ext;
        json dual = json::array();
        const PolyhedralSpace xd = x.dual();
        for (const Vec& v : xd.extreme_points()) dual.push_back(vec_json(v));
        j["dual_vertices"] = dual;
    } else {
        j["extreme_points"] = nullptr;
        j["dual_vertices"] = nullptr;
    }
    if (ns.beta) {
        json pairs = json::array();
        for (int a = 0; a < ns.beta->size(); ++a)
            pairs.push_back({{"y", vec_json(ns.beta->y[static_cast<std::size_t>(a)])},
                             {"y_star", vec_json(ns.beta->y_star[static_cast<std::size_t>(a)])}});
        j["beta"] = {{"rho", ns.beta->rho}, {"pairs", pairs}};
    } else {
        j["beta"] = nullptr;
    }
    return j;
}

int beta_verify(const std::string& name, std::uint64_t seed, std::ostream& out) {
    const NamedSpace ns = resolve(name);
    const BetaStructure& beta = need_beta(ns, name);
    const BetaReport rep = verify_beta(beta, 1e-12, seed);
    json j;
    j["space"] = name;
    j["declared_rho"] = beta.rho;
    j["pass"] = rep.pass;
    j["worst_off_diagonal"] = rep.worst_off_diagonal;
    j["worst_violation"] = rep.worst_violation;
    bool min_ok = true;
    try {
        const double m = minimal_rho(beta);
        j["minimal_rho"] = m;
    } catch (const InvalidStructureError& e) {
        min_ok = false;
        j["minimal_rho"] = nullptr;
    }
    if (!rep.pass) {
        j["witness"] = {rep.witness.first + 1, rep.witness.second + 1};
        json tied = json::array();
        for (auto [a, g] : rep.tied_witnesses) tied.push_back({a + 1, g + 1});
        j["tied_witnesses"] = tied;
    }
    j["message"] = rep.message;
    out << j.dump(2) << "\n";
    return rep.pass && min_ok ? kPass : kAssertionFailed;
}

std::uint64_t effective_seed(std::uint64_t flag) {
    const char* env = std::getenv("BPB_SEED");
    if (!env || !*env) return flag;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || env[0] == '-') throw UsageError(std::string("BPB_SEED is not a nonnegative integer: ") + env);
    return v;
}

struct ModulusArgs {
    std::string kind;
    std::vector<std::string> positional;
    bool spherical = true;
    double outer_mesh = ModulusOptions{}.outer_mesh;
    double inner_mesh = ModulusOptions{}.inner_mesh;
    double target_width = ModulusOptions{}.target_width;
    long long max_cells = ModulusOptions{}.max_cells;
    int samples = ModulusOptions{}.samples;
    std::vector<std::string> bounds;
    std::optional<double> alpha0, rho, theta;
    std::optional<int> n;
    std::string format = "csv";
    bool allow_heuristic = false;
};

int run_modulus(const ModulusArgs& a, std::uint64_t seed, int jobs, std::ostream& out) {
    const bool functional = a.kind == "functional";
    const std::size_t want = functional ? 2 : 3;
    if (a.positional.size() != want)
        throw UsageError(functional ? "usage: modulus functional X EPS[,EPS...]"
                                    : "usage: modulus " + a.kind + " X Y EPS[,EPS...]");
    const NamedSpace x = resolve(a.positional[0]);
    std::optional<NamedSpace> y;
    if (!functional) y = resolve(a.positional[1]);
    std::vector<double> epsilons;
    {
        std::stringstream ss(a.positional.back());
        std::string item;
        while (std::getline(ss, item, ',')) {
            char* end = nullptr;
            const double v = std::strtod(item.c_str(), &end);
            if (item.empty() || *end != '\0') throw UsageError("not a number: " + item);
            epsilons.push_back(v);
        }
    }
    ModulusOptions o;
    o.spherical = a.spherical;
    o.outer_mesh = a.outer_mesh;
    o.inner_mesh = a.inner_mesh;
    o.target_width = a.target_width;
    o.max_cells = a.max_cells;
    o.samples = a.samples;
    o.seed = seed;
    o.jobs = jobs;
    std::optional<double> rho = a.rho;
    if (!rho && y && y->beta) rho = y->beta->rho;
    o.codomain_rho = rho;
    if (a.kind == "operator" && !operator_modulus_certifiable(*x.space, *y->space) && !a.allow_heuristic)
        throw Uncertifiable("no certified estimator for " + a.positional[0] + " -> " + a.positional[1] +
                            "; pass --allow-heuristic for a sampled bracket");
    if (a.kind == "modified" && !modified_modulus_certifiable(*x.space, *y->space) && !a.allow_heuristic)
        throw Uncertifiable("no certified estimator for the modified modulus " + a.positional[0] + " -> " +
                            a.positional[1] + "; pass --allow-heuristic for a sampled bracket");

    Table t;
    t.columns = concat(kBracketColumns, a.bounds);
    for (double eps : epsilons) {
        ModulusBracket m;
        if (functional)
            m = functional_modulus(*x.space, eps, o);
        else if (a.kind == "operator")
            m = operator_modulus(*x.space, *y->space, eps, o);
        else
            m = modified_modulus(*x.space, *y->space, eps, o);
        std::vector<std::string> row = bracket_cells(m);
        for (const std::string& name : a.bounds) {
            BoundParams bp = params(rho, eps);
            bp.alpha0 = a.alpha0;
            bp.n = a.n;
            bp.theta = a.theta;
            row.push_back(fmt(bound_value(name, bp)));
        }
        t.add(row);
    }
    if (a.format == "json")
        out << t.to_json().dump(2) << "\n";
    else
        out << t.to_csv();
    return kPass;
}

int run_reproduce(const std::string& name, const ExperimentConfig& cfg, const std::string& out_dir,
                  const std::string& format, std::ostream& out, std::ostream& err) {
    if (!runners().count(name)) throw UsageError("unknown experiment: " + name);
    const ExperimentResult r = run_experiment(name, cfg);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        std::ofstream(dir / (name + ".csv")) << r.table.to_csv();
        std::ofstream(dir / (name + ".json")) << r.summary().dump(2) << "\n";
        for (const Assertion& a : r.assertions)
            out << (a.pass ? "PASS " : "FAIL ") << a.name << ": " << a.detail << "\n";
    } else if (format == "json") {
        out << r.summary().dump(2) << "\n";
    } else {
        out << r.table.to_csv();
        for (const Assertion& a : r.assertions)
            err << (a.pass ? "PASS " : "FAIL ") << a.name << ": " << a.detail << "\n";
    }
    return r.pass() ? kPass : kAssertionFailed;
}

}  // namespace

void Table::add(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw InternalError("table row width does not match the header");
    rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
    std::string s;
    auto line = [&s](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) s += ',';
            s += csv_field(cells[i]);
        }
        s += "\r\n";
    };
    line(columns);
    for (const auto& r : rows) line(r);
    return s;
}

json Table::to_json() const {
    json a = json::array();
    for (const auto& r : rows) {
        json o = json::object();
        for (std::size_t i = 0; i < columns.size(); ++i) o[columns[i]] = cell_json(r[i]);
        a.push_back(o);
    }
    return a;
}

bool ExperimentResult::pass() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

json ExperimentResult::summary() const {
    json as = json::array();
    for (const Assertion& a : assertions) as.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
    return {{"experiment", name}, {"params", params}, {"pass", pass()},
            {"assertions", as},   {"rows", table.to_json()}, {"notes", notes}};
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "thm-beta-upper-sweep", "thm-ell1-upper", "thm-beta0-sharp", "thm-hexagon-lower", "noncontinuity",
        "psi-construction",     "modified-sharp", "nonsquare-upper", "conjecture-scan",
    };
    return names;
}

ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg) {
    const auto it = runners().find(name);
    if (it == runners().end()) throw InputError("unknown experiment: " + name);
    ExperimentResult r = it->second(cfg);
    r.name = name;
    return r;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bishop-Phelps-Bollobas moduli for operators between polyhedral spaces", "bpb"};
    app.require_subcommand(1);
    std::uint64_t seed = 1;
    int jobs = 1;

    auto* space = app.add_subcommand("space", "Inspect zoo spaces");
    space->require_subcommand(1);
    std::string space_name;
    auto* show = space->add_subcommand("show", "Dimension, norming family, vertices and dual vertices as JSON");
    show->add_option("name", space_name, "Space name, e.g. hex:0.75, z:10:0.5, l1:2, @file.json")->required();

    auto* beta = app.add_subcommand("beta", "Beta structures");
    beta->require_subcommand(1);
    std::string beta_name;
    auto* verify = beta->add_subcommand("verify", "Check the declared beta structure of a space");
    verify->add_option("name", beta_name, "Space name")->required();
    verify->add_option("--seed", seed, "Seed of the norming check");

    ModulusArgs ma;
    auto* modulus = app.add_subcommand("modulus", "Bracket a modulus at one or more eps");
    modulus->add_option("kind", ma.kind, "functional, operator or modified")
        ->required()
        ->check(CLI::IsMember({"functional", "operator", "modified"}));
    modulus->add_option("args", ma.positional, "X [Y] EPS[,EPS...]")->required();
    modulus->add_flag("--spherical,!--no-spherical", ma.spherical, "Spherical variant (default on)");
    modulus->add_option("--outer-mesh", ma.outer_mesh, "Outer net mesh or smallest cell radius");
    modulus->add_option("--inner-mesh", ma.inner_mesh, "Inner solve tolerance");
    modulus->add_option("--target-width", ma.target_width, "Branch and bound stopping width");
    modulus->add_option("--max-cells", ma.max_cells, "Branch and bound cell budget");
    modulus->add_option("--samples", ma.samples, "Heuristic mode sample count");
    modulus->add_option("--bounds", ma.bounds, "Bound formulas to add as columns")->delimiter(',');
    modulus->add_option("--alpha0", ma.alpha0, "alpha0 for the non-square bound");
    modulus->add_option("--rho", ma.rho, "rho for bound columns (default: codomain beta parameter)");
    modulus->add_option("--n", ma.n, "n for the psi bound");
    modulus->add_option("--theta", ma.theta, "theta for the psi bound");
    modulus->add_option("--format", ma.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    modulus->add_flag("--allow-heuristic", ma.allow_heuristic, "Accept uncertified brackets");
    modulus->add_option("--seed", seed, "Random seed");
    modulus->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    ExperimentConfig cfg;
    std::string experiment, out_dir, rformat = "csv";
    auto* reproduce = app.add_subcommand("reproduce", "Run a named experiment");
    reproduce->add_option("experiment", experiment, "Experiment name")->required();
    reproduce->add_option("--eps", cfg.eps, "eps value(s)")->delimiter(',');
    reproduce->add_option("--rho,--rhos", cfg.rho, "rho value(s)")->delimiter(',');
    reproduce->add_option("--codomains", cfg.codomains, "Codomain space names")->delimiter(',');
    reproduce->add_option("--domain", cfg.domain, "Domain space name");
    reproduce->add_option("--eps0", cfg.eps0, "eps0 of the psi construction");
    reproduce->add_option("--delta", cfg.delta, "delta of the psi construction");
    reproduce->add_option("--alpha0", cfg.alpha0, "alpha0 of the non-square construction");
    reproduce->add_option("--n", cfg.n, "Dimension of Z_rho^(n)");
    reproduce->add_option("--instances", cfg.instances, "Random instances per codomain");
    reproduce->add_option("--spaces", cfg.spaces, "Random domains in the conjecture scan");
    reproduce->add_option("--outer-mesh", cfg.outer_mesh, "Outer mesh");
    reproduce->add_option("--target-width", cfg.target_width, "Branch and bound stopping width");
    reproduce->add_flag("--bounds-only", cfg.bounds_only, "Skip modulus brackets");
    reproduce->add_option("--out", out_dir, "Directory for <name>.csv and <name>.json");
    reproduce->add_option("--format", rformat, "csv or json on stdout")->check(CLI::IsMember({"csv", "json"}));
    reproduce->add_option("--seed", seed, "Random seed");
    reproduce->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* list = app.add_subcommand("list", "List experiments and bound formulas");

    std::string bound_name;
    BoundParams bp;
    auto* bnd = app.add_subcommand("bound", "Evaluate a closed-form bound");
    bnd->add_option("name", bound_name, "Formula name")->required();
    bnd->add_option("--rho", bp.rho, "rho");
    bnd->add_option("--eps", bp.eps, "eps");
    bnd->add_option("--alpha0", bp.alpha0, "alpha0");
    bnd->add_option("--n", bp.n, "n");
    bnd->add_option("--theta", bp.theta, "theta");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kPass : kUsage;
    }

    try {
        seed = effective_seed(seed);
        if (show->parsed()) {
            out << space_report(space_name).dump(2) << "\n";
            return kPass;
        }
        if (verify->parsed()) return beta_verify(beta_name, seed, out);
        if (modulus->parsed()) return run_modulus(ma, seed, jobs, out);
        if (reproduce->parsed()) {
            cfg.seed = seed;
            cfg.jobs = jobs;
            return run_reproduce(experiment, cfg, out_dir, rformat, out, err);
        }
        if (list->parsed()) {
            out << "experiments:\n";
            for (const auto& n : experiment_names()) out << "  " << n << "\n";
            out << "bounds:\n";
            for (const auto& n : bound_names()) out << "  " << n << "\n";
            return kPass;
        }
        if (bnd->parsed()) {
            const BoundFormula f = bound(bound_name, bp);
            const char* side = f.side == BoundSide::Upper ? "upper" : f.side == BoundSide::Lower ? "lower" : "exact";
            out << "name,value,side\r\n" << f.name << "," << fmt(f.value) << "," << side << "\r\n";
            return kPass;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Uncertifiable& e) {
        err << "error: " << e.what() << "\n";
        return kUncertifiable;
    } catch (const UnsupportedDimensionError& e) {
        err << "error: " << e.what() << "\n";
        return kUncertifiable;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidSpaceError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kAssertionFailed;
    }
    return kUsage;
}

}  // namespace bpb::cli
