#pragma once

#include <json.hpp>
#include <vector>

#include "bpb/polyhedral_space.hpp"

namespace bpb {

/// Linear map between polyhedral spaces, stored as a codomain-dim x domain-dim matrix.
/// The operator norm is computed at construction as the max of ||T v|| over the
/// vertices v of the domain ball.
class LinearOperator {
public:
    LinearOperator(SpacePtr domain, SpacePtr codomain, Mat matrix);

    const Mat& matrix() const { return matrix_; }
    const SpacePtr& domain() const { return domain_; }
    const SpacePtr& codomain() const { return codomain_; }

    double norm() const { return norm_; }
    /// Indices into domain()->extreme_points() where ||T v|| = ||T|| within 1e-12.
    const std::vector<int>& witnesses() const { return witnesses_; }

    Vec apply(const Vec& x) const;
    /// T* y* as a functional on the domain.
    Vec adjoint(const Vec& y_star) const;

    LinearOperator scaled(double s) const;
    LinearOperator plus(const LinearOperator& other) const;
    LinearOperator minus(const LinearOperator& other) const;
    LinearOperator with_matrix(Mat m) const;

private:
    SpacePtr domain_;
    SpacePtr codomain_;
    Mat matrix_;
    double norm_ = 0.0;
    std::vector<int> witnesses_;
};

double operator_norm(const LinearOperator& t);
/// ||T - F||.
double operator_distance(const LinearOperator& t, const LinearOperator& f);
/// Rank-one map v -> g(v) w.
LinearOperator rank_one(SpacePtr domain, SpacePtr codomain, const Vec& g, const Vec& w);

struct PairClass {
    bool in_pi_eps = false;            // ||x|| <= 1, ||T|| <= 1, ||Tx|| > 1 - eps
    bool in_pi_eps_spherical = false;  // additionally ||x|| = ||T|| = 1
    bool in_pi = false;                // ||x|| = ||T|| = ||Tx|| = 1
    double x_norm = 0.0;
    double t_norm = 0.0;
    double tx_norm = 0.0;
};

PairClass classify_pair(const Vec& x, const LinearOperator& t, double eps, double tol = 1e-9);

/// True when ||T(l u + (1-l) v)|| = ||T|| for l in {0, 1/4, 1/2, 3/4, 1} and T u, T v lie on
/// a common face of ||T|| B_Y (some norming functional of Y takes the value ||T|| at both).
bool attains_on_segment(const LinearOperator& t, const Vec& u, const Vec& v, double tol = 1e-9);

enum class AttainMode { Exact, Modified };

/// (z, F) with ||z|| = 1 and ||F z|| = ||F||; Exact mode additionally requires ||F|| = 1.
struct AttainingPair {
    Vec z;
    LinearOperator f;
    AttainMode mode = AttainMode::Exact;
    double tol = 1e-9;

    bool holds() const;
};

nlohmann::json operator_to_json(const LinearOperator& t);
/// {"domain": name, "codomain": name, "matrix": [[...], ...]} with zoo space names.
LinearOperator operator_from_json(const nlohmann::json& j);

}  // namespace bpb
