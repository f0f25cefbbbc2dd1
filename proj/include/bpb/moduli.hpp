#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpb/linear_operator.hpp"
#include "bpb/polyhedral_space.hpp"

namespace bpb {

enum class ModulusKind {
    Functional,
    FunctionalSpherical,
    Operator,
    OperatorSpherical,
    Modified,
    ModifiedSpherical,
};

std::string to_string(ModulusKind kind);

/// Enclosure lo <= value <= hi of a sup-inf modulus.
struct ModulusBracket {
    double epsilon = 0.0;
    double lo = 0.0;
    double hi = 2.0;
    ModulusKind kind = ModulusKind::OperatorSpherical;
    double outer_mesh = 0.0;  // covering radius of the outer net, or the smallest B&B cell radius
    double inner_mesh = 0.0;  // tolerance of the inner solves
    /// lo comes from exact inner values at admissible points and hi from a covering of the
    /// admissible set with the Lipschitz slack. Heuristic brackets take hi from a closed-form bound.
    bool certified = false;
    long long evaluations = 0;  // outer points or cells processed

    double width() const { return hi - lo; }
    bool contains(double v, double slack = 0.0) const { return lo - slack <= v && v <= hi + slack; }
};

struct ModulusOptions {
    bool spherical = true;
    /// Functional moduli: sphere-net mesh. Operator moduli: smallest cell radius of the
    /// branch and bound.
    double outer_mesh = 0.004;
    double inner_mesh = 1e-10;
    /// Branch and bound stops refining a cell once its upper bound is within this of lo.
    double target_width = 0.04;
    long long max_cells = 40'000'000;
    int jobs = 1;
    std::uint64_t seed = 1;
    /// Heuristic mode: number of random admissible pairs.
    int samples = 400;
    /// Known beta parameter of the codomain, used for the heuristic upper bound.
    std::optional<double> codomain_rho;
};

/// Phi_X(eps) (or the spherical version): sup over x*(x) > 1 - eps of the distance in the
/// max-metric to the set of pairs (y, y*) in S_X x S_X* with y*(y) = 1. With
/// absolute = true the inner set uses |y*(y)| = 1 and the outer constraint |x*(x)| > 1 - eps,
/// which is the operator modulus into the scalars. eps in (0, 2), dim X <= 3.
ModulusBracket functional_modulus(const PolyhedralSpace& x, double eps, const ModulusOptions& opts = {},
                                  bool absolute = false);

/// True when operator_modulus returns a certified bracket: domain l1^2 with dim Y <= 3,
/// or a one-dimensional codomain.
bool operator_modulus_certifiable(const PolyhedralSpace& x, const PolyhedralSpace& y);
bool modified_modulus_certifiable(const PolyhedralSpace& x, const PolyhedralSpace& y);

/// Phi(X, Y, eps) or Phi^S(X, Y, eps). eps in (0, 1).
/// Domain l1^2: Lipschitz branch and bound over (x, T) with the exact inner value.
/// One-dimensional Y: functional nets with |y*(y)| = 1.
/// Otherwise: heuristic bracket, lo from random admissible pairs with the exact inner LP,
/// hi from the beta upper bound when codomain_rho is set (else 2); certified = false.
ModulusBracket operator_modulus(const PolyhedralSpace& x, const PolyhedralSpace& y, double eps,
                                const ModulusOptions& opts = {});

/// Modified modulus: inner pairs (z, F) with ||z|| = 1 and ||F z|| = ||F|| (F = 0 allowed).
ModulusBracket modified_modulus(const PolyhedralSpace& x, const PolyhedralSpace& y, double eps,
                                const ModulusOptions& opts = {});

/// Exact inf over attaining pairs (z, F) of max{||x - z||, ||T - F||}, by enumerating a face
/// of B_X holding z and a facet of B_Y holding its image (one LP per pair of faces).
/// Works for any domain and codomain with enumerable face lattices.
double inner_distance(const Vec& x, const LinearOperator& t, AttainMode mode = AttainMode::Exact);

/// Same value for the domain l1^2, from the vertex/edge decomposition of attaining operators.
double inner_distance_l1_plane(const Vec& x, const LinearOperator& t, AttainMode mode = AttainMode::Exact);

// ---- closed-form bounds ----

enum class BoundSide { Upper, Lower, Exact };

struct BoundParams {
    std::optional<double> rho;
    std::optional<double> eps;
    std::optional<double> alpha0;
    std::optional<int> n;
    std::optional<double> theta;
};

struct BoundFormula {
    std::string name;
    BoundParams params;
    double value = 0.0;
    BoundSide side = BoundSide::Upper;
};

/// Names: thm_beta_upper, thm_nonsquare_upper, thm_ell1_upper, thm_beta0_exact,
/// thm_hexagon_lower, psi_construction, modified_upper, modified_ell1R, modified_lower,
/// bpb_functional. Throws InputError for unknown names, missing or out-of-domain parameters.
BoundFormula bound(const std::string& name, const BoundParams& params);
const std::vector<std::string>& bound_names();

// ---- asymptotics and tables ----

struct PsiRatio {
    double eps = 0.0;
    ModulusBracket bracket;
    double ratio_lo = 0.0;  // lo / sqrt(2 eps)
    double ratio_hi = 0.0;
};

struct PsiRatioReport {
    std::vector<PsiRatio> rows;
    std::optional<double> lower_bound;  // min{sqrt(2 rho/(1-rho)), 1}
    std::optional<double> upper_bound;  // sqrt((1+rho)/(1-rho))
    /// Midpoints of the ratio brackets move monotonically as eps decreases, up to bracket widths.
    bool monotone_trend = true;
};

/// Spherical operator modulus divided by sqrt(2 eps) along a decreasing list of eps in (0, 0.1].
PsiRatioReport psi_ratio(const PolyhedralSpace& x, const PolyhedralSpace& y, const std::vector<double>& epsilons,
                         const ModulusOptions& opts = {});

struct PsiConstructionReport {
    int n = 0;
    double rho = 0.0;
    double eps = 0.0;
    double eps0 = 0.0;
    /// |t| <= 1, hence ||T|| = 1, exactly when eps0 <= eps0_limit.
    double eps0_limit = 0.0;
    int k = 0;
    double theta = 0.0;
    double delta = 0.0;
    double t = 0.0;
    Vec x;
    Mat t_matrix;  // n x 2, columns T(e1), T(e2)
    double z_star_tx = 0.0;  // z*(T x), equal to 1 - eps0
    double t_norm = 0.0;
    double tx_norm = 0.0;
    bool in_pi_eps_spherical = false;
    double point_cost = 0.0;          // 2 delta
    double face_lower_bound = 0.0;    // 2 n rho (eps0/delta) / (n(1-rho) + 2 + 2 theta)
    double face_distance = 0.0;       // distance from T(e2) to the face of z*, by LP
    double branch_residual = 0.0;     // |point_cost - face_lower_bound|
    double c_value = 0.0;             // C(eps0, rho, n, theta)
    double c_ratio = 0.0;             // C / sqrt(2 eps0)
};

/// x = (1 - delta, delta), T(e1) = rho sum e_i, T(e2) = t sum_{i <= k} e_i + sum_{i > k} e_i
/// into Z_rho^(n), with k the nearest integer to n(1-rho)/2 + 1, theta = k - (n(1-rho)/2 + 1)
/// and delta solving 2 delta = 2 n rho (eps0/delta) / (n(1-rho) + 2 + 2 theta) unless given.
/// eps0 defaults to 0.98 min{eps, eps0_limit} with eps0_limit = (2+2 theta)^2 / (n rho (n(1-rho)+2+2 theta)).
/// Requires n >= 2, rho in [1/n, 1), 0 < eps0 < eps < 1.
PsiConstructionReport psi_construction_experiment(int n, double rho, double eps,
                                                  std::optional<double> eps0 = std::nullopt,
                                                  std::optional<double> delta = std::nullopt);

struct NoncontinuityRow {
    double rho = 0.0;
    double hexagon_lower = 0.0;  // min{sqrt(2 rho eps/(1-rho)), 1}
    double limit_upper = 0.0;    // min{sqrt(2 eps), 1}, the l1^2 -> l1^2 value
    double bm_upper = 0.0;       // upper bound on d(Y_rho, l1^2)
    double gap = 0.0;            // hexagon_lower - limit_upper
};

/// Requires eps in (0, 1/2) and rho in [1/2, 1).
std::vector<NoncontinuityRow> noncontinuity_table(double eps, const std::vector<double>& rhos, int bm_budget = 400,
                                                  std::uint64_t seed = 1);

struct ConjectureScanRow {
    std::string space;  // "random:<index>"
    int num_functionals = 0;
    double eps = 0.0;
    ModulusBracket bracket;
    double bound = 0.0;  // min{sqrt(2 eps), 1}
    double excess = 0.0;  // bracket.lo - bound
};

/// Spherical operator modulus into the scalars for random symmetric polygons.
std::vector<ConjectureScanRow> conjecture_scan(int num_spaces, const std::vector<double>& epsilons,
                                               const ModulusOptions& opts = {});

}  // namespace bpb
