#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "bpb/constructions.hpp"
#include "bpb/moduli.hpp"

namespace bpb {

namespace {

double need(const std::optional<double>& v, const char* formula, const char* param) {
    if (!v) throw InputError(std::string(formula) + " needs parameter " + param);
    if (!std::isfinite(*v)) throw InputError(std::string(formula) + ": " + param + " must be finite");
    return *v;
}

void check(bool ok, const std::string& what) {
    if (!ok) throw InputError(what);
}

double rho_in(const BoundParams& p, const char* f, double lo, bool lo_closed = true) {
    const double rho = need(p.rho, f, "rho");
    check((lo_closed ? rho >= lo : rho > lo) && rho < 1.0, std::string(f) + ": rho out of range");
    return rho;
}

double eps_in(const BoundParams& p, const char* f, double hi) {
    const double eps = need(p.eps, f, "eps");
    check(eps > 0.0 && eps < hi, std::string(f) + ": eps out of range");
    return eps;
}

using Evaluator = std::function<BoundFormula(const BoundParams&)>;

BoundFormula make(const char* name, const BoundParams& p, double value, BoundSide side) {
    return BoundFormula{name, p, value, side};
}

const std::map<std::string, Evaluator>& table() {
    static const std::map<std::string, Evaluator> t = {
        {"thm_beta_upper",
         [](const BoundParams& p) {
             const double rho = rho_in(p, "thm_beta_upper", 0.0);
             const double eps = eps_in(p, "thm_beta_upper", 2.0);
             return make("thm_beta_upper", p, std::min(std::sqrt(2 * eps) * std::sqrt((1 + rho) / (1 - rho)), 2.0),
                         BoundSide::Upper);
         }},
        {"thm_nonsquare_upper",
         [](const BoundParams& p) {
             const double rho = rho_in(p, "thm_nonsquare_upper", 0.0);
             const double eps = eps_in(p, "thm_nonsquare_upper", 2.0);
             const double a0 = need(p.alpha0, "thm_nonsquare_upper", "alpha0");
             check(a0 > 0.0 && a0 <= 2.0, "thm_nonsquare_upper: alpha0 out of (0, 2]");
             return make("thm_nonsquare_upper", p,
                         std::sqrt(2 * eps * (1 - a0 / 3)) * std::sqrt((1 + rho) / (1 - rho)), BoundSide::Upper);
         }},
        {"thm_ell1_upper",
         [](const BoundParams& p) {
             const double rho = need(p.rho, "thm_ell1_upper", "rho");
             check(rho >= 0.0 && rho <= 1.0, "thm_ell1_upper: rho out of [0, 1]");
             const double eps = eps_in(p, "thm_ell1_upper", 2.0);
             return make("thm_ell1_upper", p, std::min(ell1_bound_a(rho, eps), 1.0), BoundSide::Upper);
         }},
        {"thm_beta0_exact",
         [](const BoundParams& p) {
             const double eps = eps_in(p, "thm_beta0_exact", 2.0);
             return make("thm_beta0_exact", p, std::min(std::sqrt(2 * eps), 1.0), BoundSide::Exact);
         }},
        {"thm_hexagon_lower",
         [](const BoundParams& p) {
             const double rho = rho_in(p, "thm_hexagon_lower", 0.5);
             const double eps = eps_in(p, "thm_hexagon_lower", 1.0);
             return make("thm_hexagon_lower", p, std::min(std::sqrt(2 * rho * eps / (1 - rho)), 1.0),
                         BoundSide::Lower);
         }},
        {"psi_construction",
         [](const BoundParams& p) {
             const double eps = eps_in(p, "psi_construction", 1.0);
             if (!p.n) throw InputError("psi_construction needs parameter n");
             const int n = *p.n;
             check(n >= 2, "psi_construction: n must be at least 2");
             const double rho = need(p.rho, "psi_construction", "rho");
             check(rho >= 1.0 / n && rho < 1.0, "psi_construction: rho out of [1/n, 1)");
             const double theta = need(p.theta, "psi_construction", "theta");
             check(std::abs(theta) <= 0.5 + 1e-12, "psi_construction: theta out of [-1/2, 1/2]");
             const double d = 1 - rho + (2 + 2 * theta) / n;
             return make("psi_construction", p, std::sqrt(2 * eps) * std::sqrt(2 * rho / d), BoundSide::Lower);
         }},
        {"modified_upper",
         [](const BoundParams& p) {
             const double rho = rho_in(p, "modified_upper", 0.0);
             const double eps = eps_in(p, "modified_upper", 1.0);
             return make("modified_upper", p, std::min(std::sqrt(eps) * std::sqrt((1 + rho) / (1 - rho)), 1.0),
                         BoundSide::Upper);
         }},
        {"modified_ell1R",
         [](const BoundParams& p) {
             const double eps = eps_in(p, "modified_ell1R", 1.0);
             return make("modified_ell1R", p, std::sqrt(eps), BoundSide::Exact);
         }},
        {"modified_lower",
         [](const BoundParams& p) {
             const double rho = rho_in(p, "modified_lower", 0.0);
             const double eps = eps_in(p, "modified_lower", 1.0);
             return make("modified_lower", p, std::min(std::sqrt(eps) * std::sqrt(2 * rho / (1 - rho)), 1.0),
                         BoundSide::Lower);
         }},
        {"bpb_functional",
         [](const BoundParams& p) {
             const double eps = eps_in(p, "bpb_functional", 2.0);
             return make("bpb_functional", p, std::sqrt(2 * eps), BoundSide::Upper);
         }},
    };
    return t;
}

}  // namespace

BoundFormula bound(const std::string& name, const BoundParams& params) {
    const auto& t = table();
    const auto it = t.find(name);
    if (it == t.end()) throw InputError("unknown bound formula: " + name);
    return it->second(params);
}

const std::vector<std::string>& bound_names() {
    static const std::vector<std::string> names = {
        "thm_beta_upper", "thm_nonsquare_upper", "thm_ell1_upper", "thm_beta0_exact", "thm_hexagon_lower",
        "psi_construction", "modified_upper", "modified_ell1R", "modified_lower", "bpb_functional",
    };
    return names;
}

}  // namespace bpb
