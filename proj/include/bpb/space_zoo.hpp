#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "bpb/beta_structure.hpp"
#include "bpb/polyhedral_space.hpp"

namespace bpb {

/// Vertices exactly +-e1, +-e2.
bool is_l1_plane(const PolyhedralSpace& x);

/// l1^n: norming family = one sign vector per +- pair. 1 <= n <= 4.
SpacePtr make_l1(int n);
/// linf^n: coordinate functionals. 1 <= n <= 16.
SpacePtr make_linf(int n);
/// The scalar field as a 1-dimensional space.
SpacePtr make_real();

BetaStructure linf_beta(int n);
/// Sign-vector pairs y_s = s/n, rho = (n-2)/n.
BetaStructure l1_beta(int n);

/// Y_rho, rho in [1/2, 1): R^2 with norm max{|x1 + (2-1/rho) x2|, |x2 + (2-1/rho) x1|, |x1 - x2|}.
struct HexagonBundle {
    double rho = 0.5;
    SpacePtr space;
    std::array<Vec, 6> vertices;       // a, b, c, d, e, f
    std::array<Vec, 6> dual_vertices;  // a*, ..., f*
    BetaStructure beta;
};
HexagonBundle make_hexagon(double rho);
/// Case-split form of the hexagon norm.
double hexagon_norm_closed_form(double rho, double x1, double x2);

/// Z_rho^(n): R^n with norm max{|x_i|, |sum x_i| / (rho n)}.
struct ZBundle {
    int n = 2;
    double rho = 0.5;
    SpacePtr space;
    Vec z;       // rho * sum e_i
    Vec z_star;  // sum e_i* / (rho n)
    BetaStructure beta;  // pairs (y_j, e_j*) then (z, z*)
};
ZBundle make_z(int n, double rho);
double z_norm_closed_form(double rho, const Vec& x);

/// A space resolved from a name such as "l1:2", "linf:3", "hex:0.75", "z:10:0.5", "r:1".
struct NamedSpace {
    SpacePtr space;
    std::optional<BetaStructure> beta;
};
/// Throws InputError for unknown or malformed names and out-of-range parameters.
NamedSpace space_by_name(const std::string& name);

/// {"name", "dim", "functionals": [[...], ...]}; rejects rank-deficient families.
SpacePtr parse_space_json(const nlohmann::json& j);
nlohmann::json space_to_json(const PolyhedralSpace& x);

/// Upper bound on the Banach-Mazur distance: min of ||T|| ||T^-1|| over the identity,
/// axis scalings and a seeded local search of `budget` steps. Equal dimensions <= 3.
double banach_mazur_upper(const PolyhedralSpace& x, const PolyhedralSpace& y, int budget = 400,
                          std::uint64_t seed = 1);

/// ||T||_{X->Y} for an invertible map given as a matrix, via the vertices of B_X.
double isomorphism_norm(const PolyhedralSpace& x, const PolyhedralSpace& y, const Mat& t);

}  // namespace bpb
