#pragma once

#include <random>
#include <string>

#include "bpb/linear_operator.hpp"

namespace bpb {

/// x in B_X, ||T|| <= 1 and ||Tx|| > 1 - eps.
struct AlmostAttainingPair {
    Vec x;
    LinearOperator t;
    double eps = 0.0;
};

/// Random unit vector of the space: a Gaussian direction scaled to the sphere.
Vec sample_unit(std::mt19937_64& rng, const PolyhedralSpace& x);

/// Random operator of norm one.
LinearOperator sample_unit_operator(std::mt19937_64& rng, SpacePtr domain, SpacePtr codomain);

/// Random pair with eps drawn so that the pair is admissible. x is a perturbed norming
/// vertex of T, so small eps values are common. Spherical pairs have ||x|| = ||T|| = 1.
AlmostAttainingPair sample_almost_attaining(std::mt19937_64& rng, SpacePtr domain, SpacePtr codomain, bool spherical,
                                            double max_eps = 0.999);

/// Random pair admissible for the given eps (rejection sampling).
AlmostAttainingPair sample_pair_for_eps(std::mt19937_64& rng, SpacePtr domain, SpacePtr codomain, double eps,
                                        bool spherical);

/// Random planar space with `num_functionals` >= 2 norming functionals at uniform angles
/// and lengths in [0.6, 1].
SpacePtr sample_polygon_space(std::mt19937_64& rng, int num_functionals, const std::string& name = "random");

}  // namespace bpb
