#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bpb/errors.hpp"

namespace bpb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

/// Largest dimension for which the unit ball's vertices are enumerated.
inline constexpr int kMaxEnumerationDim = 4;

struct Tolerances {
    double identity = 1e-12;  // norm identities, attainment
    double dedup = 1e-10;     // vertex deduplication, face membership
};

/// A norming functional taken with a sign: sign * f_index.
struct SignedFunctional {
    int index = 0;
    int sign = 1;
};

/// Face of the unit ball exposed by a functional of dual norm one.
struct Face {
    Vec supporting_functional;
    std::vector<int> vertex_indices;  // into PolyhedralSpace::extreme_points()
    std::vector<Vec> vertices;
    std::vector<SignedFunctional> active;  // every ±f_i equal to 1 on the whole face
    std::uint64_t mask = 0;

    int size() const { return static_cast<int>(vertices.size()); }
};

struct SphereNet {
    std::vector<Vec> points;
    double covering_radius = 0.0;  // in the space's own norm
};

/// Result of a nearest-point query against a polytope given by vertices.
struct NearestPoint {
    double distance = 0.0;
    Vec point;
    Vec weights;  // convex (or conic) weights on the vertices
};

/// R^dim with the norm ||x|| = max_i |f_i(x)| for a finite norming family.
///
/// The family must span the dual (rank dim). Extreme points of the unit ball,
/// its face lattice and the dual vertex list are computed at construction
/// for dim <= kMaxEnumerationDim; larger spaces only support the norm, the
/// LP-based dual norm and operations that do not need the vertex list.
class PolyhedralSpace {
public:
    PolyhedralSpace(std::string name, Mat functionals, Tolerances tol = {});

    int dim() const { return static_cast<int>(functionals_.cols()); }
    int num_functionals() const { return static_cast<int>(functionals_.rows()); }
    const std::string& name() const { return name_; }
    const Mat& functionals() const { return functionals_; }
    Vec functional(int i) const { return functionals_.row(i).transpose(); }
    const Tolerances& tolerances() const { return tol_; }

    bool has_extreme_points() const { return !extreme_points_.empty(); }
    /// Throws UnsupportedDimensionError when dim > kMaxEnumerationDim.
    const std::vector<Vec>& extreme_points() const;
    /// Proper nonempty faces of the unit ball, ordered by vertex count. Available when
    /// vertices are enumerated and there are at most 64 of them.
    const std::vector<Face>& faces() const;
    /// Maximal proper faces.
    std::vector<Face> facets() const;

    double norm(const Vec& x) const;
    /// Lowest index i with |f_i(x)| = norm(x).
    int norm_witness(const Vec& x) const;
    double dual_norm(const Vec& f) const;
    Face support_face(const Vec& f) const;

    /// The dual space: norming family = one representative of each ± pair of
    /// extreme points of this ball.
    PolyhedralSpace dual() const;

    SphereNet sphere_net(double mesh) const;

    /// Nearest point of conv(vertices) to w in this norm.
    NearestPoint nearest_in_hull(const Vec& w, const std::vector<Vec>& vertices) const;
    double distance_to_hull(const Vec& w, const std::vector<Vec>& vertices) const {
        return nearest_in_hull(w, vertices).distance;
    }
    /// Nearest point of the cone {sum l_j g_j : l_j >= 0} to w in this norm.
    NearestPoint nearest_in_cone(const Vec& w, const std::vector<Vec>& generators) const;

private:
    void check_dim(const Vec& x, const char* what) const;
    void build_faces();
    NearestPoint nearest_by_lp(const Vec& w, const std::vector<Vec>& vertices, bool convex) const;

    std::string name_;
    Mat functionals_;
    Tolerances tol_;
    std::vector<Vec> extreme_points_;
    std::vector<Face> faces_;
};

using SpacePtr = std::shared_ptr<const PolyhedralSpace>;

/// Unit-ball vertices of {x : |f_i(x)| <= 1} by the double description method.
/// Requires rank(functionals) = dim and dim <= kMaxEnumerationDim.
std::vector<Vec> enumerate_extreme_points(const Mat& functionals, double dedup_tol = 1e-10);

/// min over t in [lo, hi] of max_i |a_i + b_i t|, solved exactly over breakpoints.
/// hi may be +infinity. Returns (value, argmin).
std::pair<double, double> minimize_max_abs_affine(const Vec& a, const Vec& b, double lo = 0.0, double hi = 1.0);

}  // namespace bpb
