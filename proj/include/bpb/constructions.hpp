#pragma once

#include <optional>
#include <string>
#include <utility>

#include "bpb/beta_structure.hpp"
#include "bpb/linear_operator.hpp"
#include "bpb/polyhedral_space.hpp"

namespace bpb {

/// (y, zeta) with zeta(y) = ||zeta||, ||y|| = 1.
struct PhelpsResult {
    Vec y;
    Vec zeta;
    double x_distance = 0.0;  // ||x - y||
    double f_distance = 0.0;  // ||f - zeta||
};

/// Finds a unit y and a functional zeta attaining its norm at y with ||x - y|| < eta/k and
/// ||f - zeta|| < k. Searches every face G of B_X for the best pair with y in conv(G) and
/// zeta in the cone of the functionals active on G, minimizing
/// max{||x - y|| k/eta, ||f - zeta|| / k}.
/// Requires ||f|| = 1, f(x) > 1 - eta, 0 < k < 1 and an enumerable face lattice.
PhelpsResult phelps_step(const PolyhedralSpace& x_space, const Vec& x, const Vec& f, double eta, double k);

struct ScalarBpbResult {
    Vec z;
    Vec z_star;
    double achieved_x_dist = 0.0;
    double achieved_f_dist = 0.0;
    double guarantee_x = 0.0;
    double guarantee_f = 0.0;
    /// k_tilde < eps/2: only the functional bound is enforced, the vector bound is 2.
    bool trivial_branch = false;
};

/// Unit z and z* with z*(z) = 1, ||x - z|| < eps/k_tilde, ||f - z*|| < 2 k_tilde.
/// Requires ||x|| <= 1, ||f|| <= 1, f(x) > 1 - eps, 0 < eps < 1, 0 < k_tilde < 1.
ScalarBpbResult bpb_scalar(const PolyhedralSpace& x_space, const Vec& x, const Vec& f, double eps,
                           double k_tilde);

struct NonSquarenessEstimate {
    double alpha_lo = 0.0;
    double alpha_hi = 0.0;
    double mesh = 0.0;  // 0 when the value is exact
};

/// alpha(X) = 2 - sup_{x,y in B_X} (||x+y|| + ||x-y||)/2. The objective is convex in (x, y),
/// so the sup is attained at a pair of vertices and the bracket is exact.
NonSquarenessEstimate nonsquareness_parameter(const PolyhedralSpace& x_space);

/// Same bound with the functional step in the non-square regime: ||x - z|| < eps/k and
/// ||f - z*|| < 2k(1 - alpha0/3). Requires ||x|| = 1, alpha0 < alpha(X) and alpha0 < alpha(X*),
/// and eps/(2(1 - alpha0/3)) <= k <= 1/2.
ScalarBpbResult bpb_scalar_nonsquare(const PolyhedralSpace& x_space, const Vec& x, const Vec& f, double eps,
                                     double k, double alpha0);

/// z = (r0/(1-rho+rho r0)) y_a + (1 - r0 rho/(1-rho+rho r0)) y with r0 = 1 - y*_a(y).
/// Requires ||y|| <= 1, r in (0, 1) and y*_a(y) >= 1 - r.
Vec face_projection(const BetaStructure& beta, const Vec& y, int alpha0, double r);

struct PerturbationResult {
    PerturbationResult(Vec z_, LinearOperator f_, LinearOperator s_)
        : z(std::move(z_)), f(std::move(f_)), s(std::move(s_)) {}

    Vec z;
    LinearOperator f;  // the approximating operator
    LinearOperator s;  // before normalization; equal to f outside the main construction
    Vec z_star;  // functional of the scalar step used to build S, empty on other branches
    int alpha0 = -1;
    int alpha_sign = 1;  // y*_alpha0 was replaced by alpha_sign * y*_alpha0
    double eta = 0.0;
    double k = 0.0;
    double rho = 0.0;
    double alpha_nonsquare = 0.0;
    double x_distance = 0.0;
    double t_distance = 0.0;
    double guarantee_x = 0.0;  // bound on ||x - z||
    double guarantee_t = 0.0;  // bound on ||T - F||
    double guarantee = 0.0;    // bound on the max of both
    bool strict = true;        // guarantee holds with strict inequality
    std::string branch;

    double max_distance() const { return x_distance > t_distance ? x_distance : t_distance; }
};

/// Perturbation of an almost attaining pair (x, T), ||T|| <= 1, ||Tx|| > 1 - eps, into
/// (z, F) with ||F|| = ||F z|| = 1, for a codomain with a beta structure.
/// F = S/||S||, S(v) = T(v) + [(1+eta) z*(v) - (T* y*_a)(v)] y_a, eta = 2k rho/(1-rho).
/// k defaults to sqrt((eps/2)(1-rho)/(1+rho)); when that is below eps/2 the best of a few
/// direct attaining pairs is returned with the bound 2.
PerturbationResult lindenstrauss_perturbation(const BetaStructure& beta, const LinearOperator& t, const Vec& x,
                                              double eps, std::optional<double> k = std::nullopt);

/// Non-square domain variant: ||T|| = ||x|| = 1, eta = 2k(1-alpha0/3) rho/(1-rho),
/// k defaults to sqrt(eps/(2(1-alpha0/3)) (1-rho)/(1+rho)). alpha0 defaults to just below
/// min(alpha(X), alpha(X*)). Refuses eps at or above the admissible threshold.
PerturbationResult lindenstrauss_perturbation_nonsquare(const BetaStructure& beta, const LinearOperator& t,
                                                        const Vec& x, double eps,
                                                        std::optional<double> alpha0 = std::nullopt,
                                                        std::optional<double> k = std::nullopt);

/// Largest eps for which the non-square construction applies.
double nonsquare_eps_threshold(double rho, double alpha0);

/// Returns (z, S) with ||S z|| = ||S||, S not normalized:
/// S(v) = ||z*|| T(v) + [(1+eta) z*(v) - ||z*|| (T* y*_a)(v)] y_a.
/// k_tilde defaults to sqrt(eps(1-rho)/(1+rho)); eps >= (1-rho)/(1+rho) gives (x/||x||, 0).
PerturbationResult modified_perturbation(const BetaStructure& beta, const LinearOperator& t, const Vec& x,
                                         double eps, std::optional<double> k_tilde = std::nullopt);

/// A(rho, eps) = sqrt(2 eps)(1+rho) / (sqrt(1 - rho^2 + (eps/2) rho^2) + rho sqrt(eps/2)).
double ell1_bound_a(double rho, double eps);

/// Construction on the domain l1^2: approximates (x, T) within min{A(rho, eps), 1}
/// by a vertex with column normalization or by projecting both columns onto the face of y*_a.
PerturbationResult ell1_perturbation(const BetaStructure& beta, const LinearOperator& t, const Vec& x, double eps);

}  // namespace bpb
