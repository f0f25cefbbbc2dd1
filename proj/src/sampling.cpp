#include "bpb/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace bpb {

namespace {

Vec gaussian(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g;
    Vec v(d);
    for (int j = 0; j < d; ++j) v(j) = g(rng);
    return v;
}

struct Draw {
    Vec x;
    Mat m;
};

Draw draw(std::mt19937_64& rng, const SpacePtr& domain, const SpacePtr& codomain, bool spherical, double spread) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const LinearOperator t = sample_unit_operator(rng, domain, codomain);
    const double t_scale = spherical ? 1.0 : 0.85 + 0.15 * u(rng);
    const auto& ext = domain->extreme_points();
    const Vec& v = ext[static_cast<std::size_t>(t.witnesses()[std::uniform_int_distribution<std::size_t>(
        0, t.witnesses().size() - 1)(rng)])];
    Vec x = v + spread * u(rng) * gaussian(rng, domain->dim());
    x /= domain->norm(x);
    if (!spherical) x *= 0.8 + 0.2 * u(rng);
    return {x, t_scale * t.matrix()};
}

}  // namespace

Vec sample_unit(std::mt19937_64& rng, const PolyhedralSpace& x) {
    Vec v = gaussian(rng, x.dim());
    while (v.norm() < 1e-9) v = gaussian(rng, x.dim());
    return v / x.norm(v);
}

LinearOperator sample_unit_operator(std::mt19937_64& rng, SpacePtr domain, SpacePtr codomain) {
    Mat m(codomain->dim(), domain->dim());
    for (int j = 0; j < m.cols(); ++j) m.col(j) = gaussian(rng, codomain->dim());
    LinearOperator t(domain, codomain, m);
    while (t.norm() < 1e-9) t = t.with_matrix(Mat::Identity(m.rows(), m.cols()));
    return t.scaled(1.0 / t.norm());
}

AlmostAttainingPair sample_almost_attaining(std::mt19937_64& rng, SpacePtr domain, SpacePtr codomain, bool spherical,
                                            double max_eps) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        Draw d = draw(rng, domain, codomain, spherical, 0.6);
        LinearOperator t(domain, codomain, d.m);
        const double gap = 1.0 - codomain->norm(t.apply(d.x));
        const double w = u(rng);
        const double eps = gap + w * w * 0.3 + 1e-6;
        if (eps < max_eps) return {d.x, t, eps};
    }
}

AlmostAttainingPair sample_pair_for_eps(std::mt19937_64& rng, SpacePtr domain, SpacePtr codomain, double eps,
                                        bool spherical) {
    const double spread = std::min(0.6, 2.0 * eps);
    for (;;) {
        Draw d = draw(rng, domain, codomain, spherical, spread);
        LinearOperator t(domain, codomain, d.m);
        if (codomain->norm(t.apply(d.x)) > 1.0 - eps) return {d.x, t, eps};
    }
}

SpacePtr sample_polygon_space(std::mt19937_64& rng, int num_functionals, const std::string& name) {
    if (num_functionals < 2) throw InputError("a planar space needs at least two functionals");
    std::uniform_real_distribution<double> angle(0.0, 3.14159265358979323846);
    std::uniform_real_distribution<double> length(0.6, 1.0);
    Mat f(num_functionals, 2);
    for (int i = 0; i < num_functionals; ++i) {
        const double a = angle(rng), r = length(rng);
        f(i, 0) = r * std::cos(a);
        f(i, 1) = r * std::sin(a);
    }
    return std::make_shared<const PolyhedralSpace>(name, f);
}

}  // namespace bpb
