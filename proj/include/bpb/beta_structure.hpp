#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bpb/polyhedral_space.hpp"

namespace bpb {

struct InvalidStructureError : Error {
    using Error::Error;
};

/// Paired families y_alpha in S_Y, y*_alpha in S_Y* with declared parameter rho.
struct BetaStructure {
    SpacePtr space;
    std::vector<Vec> y;
    std::vector<Vec> y_star;
    double rho = 0.0;

    int size() const { return static_cast<int>(y.size()); }
};

struct BetaReport {
    bool pass = false;
    double worst_violation = 0.0;
    /// 0-based (alpha, gamma) of the worst breach; (i, i) for diagonal or norm breaches,
    /// (-1, -1) when the norming condition fails.
    std::pair<int, int> witness{-1, -1};
    /// Every off-diagonal (alpha, gamma) within 1e-12 of the worst off-diagonal value.
    std::vector<std::pair<int, int>> tied_witnesses;
    double worst_off_diagonal = 0.0;
    std::string message;
};

/// Checks y*_a(y_a) = 1, |y*_a(y_g)| <= rho (a != g), unit norms, and that {y*_a} is 1-norming.
BetaReport verify_beta(const BetaStructure& s, double tol = 1e-12, std::uint64_t seed = 1);

/// max_{a != g} |y*_a(y_g)|. Throws InvalidStructureError if the diagonal or norming
/// conditions fail.
double minimal_rho(const BetaStructure& s, double tol = 1e-12);

struct LinftyIsometry {
    bool ok = false;
    Mat u;  // rows are y*_alpha
    std::string reason;
};

/// U(y) = (y*_1(y), ..., y*_n(y)) when |pairs| = dim and minimal_rho < 1/dim.
/// Refuses (ok = false) when the preconditions fail; throws InvalidStructureError when
/// minimal_rho < 1/dim but the number of pairs differs from dim.
LinftyIsometry linfty_isometry(const BetaStructure& s, std::uint64_t seed = 1);

}  // namespace bpb
