#include "bpb/moduli.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <thread>
#include <vector>

#include "bpb/linear_program.hpp"
#include "bpb/sampling.hpp"
#include "bpb/space_zoo.hpp"

namespace bpb {

std::string to_string(ModulusKind kind) {
    switch (kind) {
        case ModulusKind::Functional: return "functional";
        case ModulusKind::FunctionalSpherical: return "functional-spherical";
        case ModulusKind::Operator: return "operator";
        case ModulusKind::OperatorSpherical: return "operator-spherical";
        case ModulusKind::Modified: return "modified";
        case ModulusKind::ModifiedSpherical: return "modified-spherical";
    }
    return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStrictMargin = 1e-12;
constexpr int kMaxM = 3;
constexpr int kMaxTerms = 32;
constexpr int kMaxFacets = 64;

using Pt = std::array<double, kMaxM>;

void require(bool ok, const std::string& what) {
    if (!ok) throw InputError(what);
}

/// min over l in [lo, hi] of max_i |a_i + b_i l|; hi may be infinite.
double min_max_abs(const double* a, const double* b, int n, double lo, double hi) {
    auto eval = [&](double l) {
        double v = 0.0;
        for (int i = 0; i < n; ++i) v = std::max(v, std::abs(a[i] + b[i] * l));
        return v;
    };
    double best = eval(lo);
    if (std::isfinite(hi)) best = std::min(best, eval(hi));
    auto consider = [&](double l) {
        if (l > lo && l < hi) best = std::min(best, eval(l));
    };
    for (int i = 0; i < n; ++i) {
        if (b[i] != 0.0) consider(-a[i] / b[i]);
        for (int j = i + 1; j < n; ++j) {
            const double d = b[i] - b[j];
            if (d != 0.0) consider((a[j] - a[i]) / d);
            const double s = b[i] + b[j];
            if (s != 0.0) consider(-(a[i] + a[j]) / s);
        }
    }
    return best;
}

/// Codomain of dimension <= 3 with its facets, for allocation-free distance queries.
class Codomain {
public:
    explicit Codomain(const PolyhedralSpace& y) : space_(&y), m_(y.dim()), nf_(y.num_functionals()) {
        if (m_ > kMaxM) throw UnsupportedDimensionError("codomain dimension must be at most 3");
        if (nf_ > kMaxTerms / 2) throw UnsupportedDimensionError("codomain has too many norming functionals");
        f_.resize(static_cast<std::size_t>(nf_ * m_));
        for (int i = 0; i < nf_; ++i)
            for (int k = 0; k < m_; ++k) f_[static_cast<std::size_t>(i * m_ + k)] = y.functionals()(i, k);
        for (const Face& facet : y.facets()) {
            std::vector<Pt> pts;
            for (const Vec& v : facet.vertices) pts.push_back(to_pt(v));
            facets_.push_back(pts);
            facet_vecs_.push_back(facet.vertices);
        }
        if (static_cast<int>(facets_.size()) > kMaxFacets) throw UnsupportedDimensionError("too many facets");
        for (int k = 0; k < m_; ++k) {
            Pt e{};
            e[static_cast<std::size_t>(k)] = 1.0;
            coord_norm_[static_cast<std::size_t>(k)] = norm(e);
        }
    }

    int m() const { return m_; }
    int num_facets() const { return static_cast<int>(facets_.size()); }
    const PolyhedralSpace& space() const { return *space_; }
    double coord_norm(int k) const { return coord_norm_[static_cast<std::size_t>(k)]; }

    Pt to_pt(const Vec& v) const {
        Pt p{};
        for (int k = 0; k < m_; ++k) p[static_cast<std::size_t>(k)] = v(k);
        return p;
    }
    Vec to_vec(const Pt& p) const {
        Vec v(m_);
        for (int k = 0; k < m_; ++k) v(k) = p[static_cast<std::size_t>(k)];
        return v;
    }

    double apply(int i, const Pt& w) const {
        double s = 0.0;
        for (int k = 0; k < m_; ++k) s += f_[static_cast<std::size_t>(i * m_ + k)] * w[static_cast<std::size_t>(k)];
        return s;
    }

    double norm(const Pt& w) const {
        double best = 0.0;
        for (int i = 0; i < nf_; ++i) best = std::max(best, std::abs(apply(i, w)));
        return best;
    }

    /// max of ||(s_k h_k)_k|| over sign patterns: the radius of a coordinate box.
    double box_radius(const Pt& h) const {
        double best = 0.0;
        for (int mask = 0; mask < (1 << (m_ - 1)); ++mask) {
            Pt s{};
            s[0] = h[0];
            for (int k = 1; k < m_; ++k)
                s[static_cast<std::size_t>(k)] = (mask >> (k - 1) & 1) ? -h[static_cast<std::size_t>(k)] : h[static_cast<std::size_t>(k)];
            best = std::max(best, norm(s));
        }
        return best;
    }

    /// Distance from w to facet g.
    double facet_distance(int g, const Pt& w) const {
        const auto& fv = facets_[static_cast<std::size_t>(g)];
        if (fv.size() == 1) return norm(minus(w, fv[0]));
        if (fv.size() == 2) {
            std::array<double, kMaxTerms> a{}, b{};
            const Pt d = minus(w, fv[0]);
            const Pt e = minus(fv[1], fv[0]);
            for (int i = 0; i < nf_; ++i) {
                a[static_cast<std::size_t>(i)] = apply(i, d);
                b[static_cast<std::size_t>(i)] = -apply(i, e);
            }
            return min_max_abs(a.data(), b.data(), nf_, 0.0, 1.0);
        }
        return space_->distance_to_hull(to_vec(w), facet_vecs_[static_cast<std::size_t>(g)]);
    }

    /// min over l >= 0 of max{dist(w1, l Phi_g), dist(w2, l Phi_g)}.
    double scaled_pair_distance(int g, const Pt& w1, const Pt& w2) const {
        const auto& fv = facets_[static_cast<std::size_t>(g)];
        if (fv.size() == 1) {
            std::array<double, kMaxTerms> a{}, b{};
            for (int i = 0; i < nf_; ++i) {
                const double fp = apply(i, fv[0]);
                a[static_cast<std::size_t>(i)] = apply(i, w1);
                a[static_cast<std::size_t>(nf_ + i)] = apply(i, w2);
                b[static_cast<std::size_t>(i)] = -fp;
                b[static_cast<std::size_t>(nf_ + i)] = -fp;
            }
            return min_max_abs(a.data(), b.data(), 2 * nf_, 0.0, kInf);
        }
        // Conic weights mu1, mu2 on the facet vertices with equal sums, and the bound t.
        const int k = static_cast<int>(fv.size());
        lp::Problem p(2 * k + 1);
        p.c.setZero();
        p.c(2 * k) = 1.0;
        Eigen::RowVectorXd eq = Eigen::RowVectorXd::Zero(2 * k + 1);
        eq.segment(0, k).setOnes();
        eq.segment(k, k).setConstant(-1.0);
        p.add_eq(eq, 0.0);
        const std::array<const Pt*, 2> ws{&w1, &w2};
        for (int r = 0; r < 2; ++r) {
            for (int i = 0; i < nf_; ++i) {
                Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(2 * k + 1);
                for (int v = 0; v < k; ++v) row(r * k + v) = apply(i, fv[static_cast<std::size_t>(v)]);
                const double fw = apply(i, *ws[static_cast<std::size_t>(r)]);
                // |fw - row.mu| <= t
                Eigen::RowVectorXd up = -row;
                up(2 * k) = -1.0;
                p.add_le(up, -fw);
                Eigen::RowVectorXd dn = row;
                dn(2 * k) = -1.0;
                p.add_le(dn, fw);
            }
        }
        const lp::Solution s = lp::solve(p);
        if (s.status != lp::Status::Optimal) throw InternalError("scaled facet distance LP failed");
        return s.objective;
    }

private:
    Pt minus(const Pt& a, const Pt& b) const {
        Pt r{};
        for (int k = 0; k < m_; ++k) r[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)];
        return r;
    }

    const PolyhedralSpace* space_;
    int m_;
    int nf_;
    std::vector<double> f_;
    std::vector<std::vector<Pt>> facets_;
    std::vector<std::vector<Vec>> facet_vecs_;
    Pt coord_norm_{};
};

Pt scaled(const Pt& p, double s) {
    Pt r{};
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = p[k] * s;
    return r;
}

/// l1 distance from x to the segment [s1 e1, s2 e2].
double l1_edge_distance(double x1, double x2, double s1, double s2) {
    auto f = [&](double l) { return std::abs(x1 - s1 * l) + std::abs(x2 - s2 * (1.0 - l)); };
    double best = std::min(f(0.0), f(1.0));
    for (double l : {s1 * x1, 1.0 - s2 * x2})
        if (l > 0.0 && l < 1.0) best = std::min(best, f(l));
    return best;
}

/// Exact inner value for the domain l1^2. Attaining operators either attain at +-e_i
/// (vertex branch) or map an edge [s1 e1, s2 e2] into a common facet of the codomain
/// ball, scaled by ||F|| in the modified setting (edge branch).
double l1_plane_inner(const Codomain& y, AttainMode mode, double x1, double x2, const Pt& u1, const Pt& u2) {
    const double n1 = y.norm(u1), n2 = y.norm(u2);
    double best = kInf;
    const std::array<double, 2> xs{x1, x2};
    const std::array<double, 2> ns{n1, n2};
    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        const double ni = ns[static_cast<std::size_t>(i)], nj = ns[static_cast<std::size_t>(j)];
        const double td = mode == AttainMode::Exact ? std::max(std::abs(1.0 - ni), std::max(0.0, nj - 1.0))
                                                    : std::max(0.0, (nj - ni) / 2.0);
        for (double s : {1.0, -1.0}) {
            const double xd = std::abs(xs[static_cast<std::size_t>(i)] - s) + std::abs(xs[static_cast<std::size_t>(j)]);
            best = std::min(best, std::max(xd, td));
        }
    }
    const int nfacets = y.num_facets();
    // Lazily filled facet distances of +-u1, +-u2: index [(point * 2 + sign) * nfacets + g].
    std::array<double, 4 * kMaxFacets> cache;
    cache.fill(-1.0);
    auto dist = [&](int point, int sign_index, int g) {
        double& c = cache[static_cast<std::size_t>((point * 2 + sign_index) * nfacets + g)];
        if (c < 0.0) c = y.facet_distance(g, scaled(point == 0 ? u1 : u2, sign_index == 0 ? 1.0 : -1.0));
        return c;
    };
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const double s1 = a == 0 ? 1.0 : -1.0, s2 = b == 0 ? 1.0 : -1.0;
            const double ed = l1_edge_distance(x1, x2, s1, s2);
            if (ed >= best) continue;
            for (int g = 0; g < nfacets; ++g) {
                if (mode == AttainMode::Exact) {
                    const double d1 = dist(0, a, g);
                    if (d1 >= best) continue;
                    const double d2 = dist(1, b, g);
                    best = std::min(best, std::max({ed, d1, d2}));
                } else {
                    const double v = y.scaled_pair_distance(g, scaled(u1, s1), scaled(u2, s2));
                    best = std::min(best, std::max(ed, v));
                }
            }
        }
    }
    return best;
}

// ---- branch and bound over (x, T) for the domain l1^2 ----

constexpr int kMaxDims = 2 + 2 * kMaxM;

struct Cell {
    std::array<double, kMaxDims> c{};
    std::array<double, kMaxDims> h{};
    double ub = 0.0;
    double radius = 0.0;
};

struct PieceResult {
    double lo = 0.0;
    double hi = 0.0;
    long long cells = 0;
};

class L1PlaneSearch {
public:
    L1PlaneSearch(const PolyhedralSpace& ys, double eps, const ModulusOptions& opts, AttainMode mode)
        : y_(ys), eps_(eps), opts_(opts), mode_(mode), m_(ys.dim()), dims_(1 + 2 * ys.dim() + (opts.spherical ? 0 : 1)) {}

    ModulusBracket run() {
        const double seed_lo = seed_lower();
        const Cell root = root_cell();
        const int pieces = 16;
        std::vector<Cell> tops;
        for (int p = 0; p < pieces; ++p) {
            Cell c = root;
            c.h[0] = root.h[0] / pieces;
            c.c[0] = root.c[0] - root.h[0] + (2 * p + 1) * c.h[0];
            tops.push_back(c);
        }
        std::vector<PieceResult> results(tops.size());
        const long long budget = std::max<long long>(1, opts_.max_cells / pieces);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < tops.size(); i = next++) results[i] = run_piece(tops[i], seed_lo, budget);
        };
        const int jobs = std::max(1, std::min(opts_.jobs, pieces));
        std::vector<std::thread> threads;
        for (int j = 1; j < jobs; ++j) threads.emplace_back(worker);
        worker();
        for (auto& t : threads) t.join();

        ModulusBracket out;
        out.epsilon = eps_;
        out.lo = seed_lo;
        out.hi = 0.0;
        for (const PieceResult& r : results) {
            out.lo = std::max(out.lo, r.lo);
            out.hi = std::max(out.hi, r.hi);
            out.evaluations += r.cells;
        }
        out.hi = std::min(std::max(out.hi, out.lo), mode_ == AttainMode::Exact ? 2.0 : 1.0);
        out.outer_mesh = opts_.outer_mesh;
        out.inner_mesh = opts_.inner_mesh;
        out.certified = true;
        return out;
    }

private:
    struct Decoded {
        double x1, x2;
        Pt u1, u2;
    };

    Decoded decode(const std::array<double, kMaxDims>& p) const {
        Decoded d{};
        const double t = opts_.spherical ? 1.0 : p[static_cast<std::size_t>(2 * m_ + 1)];
        d.x1 = t * (1.0 - p[0]);
        d.x2 = t * p[0];
        for (int k = 0; k < m_; ++k) {
            d.u1[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(1 + k)];
            d.u2[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(1 + m_ + k)];
        }
        return d;
    }

    Cell root_cell() const {
        Cell c;
        // x = t (1 - delta, delta) with 0 <= delta <= 1/2 covers S_X up to the symmetries of
        // l1^2; (x, T) -> (x, -T) lets the first coordinate of T(e1) be nonnegative.
        c.c[0] = 0.25;
        c.h[0] = 0.25;
        for (int k = 0; k < m_; ++k) {
            double r = 0.0;
            for (const Vec& v : y_.space().extreme_points()) r = std::max(r, std::abs(v(k)));
            const auto i1 = static_cast<std::size_t>(1 + k), i2 = static_cast<std::size_t>(1 + m_ + k);
            if (k == 0) {
                c.c[i1] = r / 2;
                c.h[i1] = r / 2;
            } else {
                c.c[i1] = 0.0;
                c.h[i1] = r;
            }
            c.c[i2] = 0.0;
            c.h[i2] = r;
        }
        if (!opts_.spherical) {
            const double tmin = std::max(0.0, 1.0 - eps_);
            const auto it = static_cast<std::size_t>(2 * m_ + 1);
            c.c[it] = (1.0 + tmin) / 2;
            c.h[it] = (1.0 - tmin) / 2;
        }
        return c;
    }

    double x_radius(const Cell& cell) const {
        double r = 2.0 * cell.h[0];
        if (!opts_.spherical) r += cell.h[static_cast<std::size_t>(2 * m_ + 1)];
        return r;
    }

    Pt column_half_widths(const Cell& cell, int col) const {
        Pt h{};
        for (int k = 0; k < m_; ++k) h[static_cast<std::size_t>(k)] = cell.h[static_cast<std::size_t>(1 + col * m_ + k)];
        return h;
    }

    double inner(const Decoded& d) const { return l1_plane_inner(y_, mode_, d.x1, d.x2, d.u1, d.u2); }

    bool admissible(const Decoded& d, double n1, double n2) const {
        const double tn = std::max(n1, n2);
        if (opts_.spherical ? std::abs(tn - 1.0) > 1e-12 : tn > 1.0 + 1e-12) return false;
        Pt tx{};
        for (int k = 0; k < m_; ++k)
            tx[static_cast<std::size_t>(k)] = d.x1 * d.u1[static_cast<std::size_t>(k)] + d.x2 * d.u2[static_cast<std::size_t>(k)];
        return y_.norm(tx) > 1.0 - eps_ + kStrictMargin;
    }

    /// Fills ub and radius; returns false when the cell holds no admissible pair.
    bool evaluate(Cell& cell, double& lo) const {
        const Decoded d = decode(cell.c);
        const double n1 = y_.norm(d.u1), n2 = y_.norm(d.u2);
        const double r1 = y_.box_radius(column_half_widths(cell, 0));
        const double r2 = y_.box_radius(column_half_widths(cell, 1));
        const double rx = x_radius(cell);
        if (n1 - r1 > 1.0 || n2 - r2 > 1.0) return false;
        if (opts_.spherical && n1 + r1 < 1.0 && n2 + r2 < 1.0) return false;
        Pt tx{};
        for (int k = 0; k < m_; ++k)
            tx[static_cast<std::size_t>(k)] = d.x1 * d.u1[static_cast<std::size_t>(k)] + d.x2 * d.u2[static_cast<std::size_t>(k)];
        const double ntx = y_.norm(tx);
        if (ntx + rx + std::abs(d.x1) * r1 + std::abs(d.x2) * r2 <= 1.0 - eps_) return false;

        cell.radius = std::max({rx, r1, r2});
        const double h = inner(d);
        cell.ub = h + cell.radius;
        if (cell.ub <= lo + opts_.target_width) return true;

        // Lower bound from the admissible pair obtained by rescaling T.
        const double tn = std::max(n1, n2);
        const double scale = opts_.spherical ? tn : std::max(1.0, tn);
        if (scale > 0.0 && ntx / scale > 1.0 - eps_ + kStrictMargin) {
            if (scale == 1.0 && admissible(d, n1, n2)) {
                lo = std::max(lo, h);
            } else {
                Decoded p = d;
                p.u1 = scaled(d.u1, 1.0 / scale);
                p.u2 = scaled(d.u2, 1.0 / scale);
                lo = std::max(lo, inner(p));
            }
        }
        return true;
    }

    int split_dim(const Cell& cell) const {
        int best = 0;
        double width = 2.0 * cell.h[0];
        for (int k = 0; k < m_; ++k) {
            for (int col = 0; col < 2; ++col) {
                const int i = 1 + col * m_ + k;
                const double w = cell.h[static_cast<std::size_t>(i)] * y_.coord_norm(k);
                if (w > width) {
                    width = w;
                    best = i;
                }
            }
        }
        if (!opts_.spherical) {
            const int i = 2 * m_ + 1;
            if (cell.h[static_cast<std::size_t>(i)] > width) best = i;
        }
        return best;
    }

    PieceResult run_piece(Cell top, double seed_lo, long long budget) const {
        PieceResult res;
        res.lo = seed_lo;
        std::vector<Cell> stack;
        if (evaluate(top, res.lo)) stack.push_back(top);
        res.cells = 1;
        while (!stack.empty()) {
            const Cell cell = stack.back();
            stack.pop_back();
            if (cell.ub <= res.lo + opts_.target_width || cell.radius < opts_.outer_mesh || res.cells >= budget) {
                res.hi = std::max(res.hi, cell.ub);
                continue;
            }
            const int dim = split_dim(cell);
            const auto sd = static_cast<std::size_t>(dim);
            std::array<Cell, 2> kids{cell, cell};
            for (int s = 0; s < 2; ++s) {
                kids[static_cast<std::size_t>(s)].h[sd] = cell.h[sd] / 2;
                kids[static_cast<std::size_t>(s)].c[sd] = cell.c[sd] + (s == 0 ? -1.0 : 1.0) * cell.h[sd] / 2;
            }
            std::array<bool, 2> ok{};
            for (int s = 0; s < 2; ++s) ok[static_cast<std::size_t>(s)] = evaluate(kids[static_cast<std::size_t>(s)], res.lo);
            res.cells += 2;
            // Deeper exploration of the more promising child first.
            const int first = kids[0].ub >= kids[1].ub ? 1 : 0;
            for (int s : {first, 1 - first})
                if (ok[static_cast<std::size_t>(s)]) stack.push_back(kids[static_cast<std::size_t>(s)]);
        }
        return res;
    }

    /// Lower bound from explicit admissible pairs: rank-one pairs along each direction and
    /// pairs mapping e1, e2 onto the two edges at a vertex of a polygonal codomain ball.
    double seed_lower() const {
        double best = 0.0;
        auto try_pair = [&](double delta, const Pt& u1, const Pt& u2) {
            Decoded d{1.0 - delta, delta, u1, u2};
            if (admissible(d, y_.norm(u1), y_.norm(u2))) best = std::max(best, inner(d));
        };
        std::vector<Pt> dirs;
        for (const Vec& v : y_.space().extreme_points()) dirs.push_back(y_.to_pt(v));
        if (m_ >= 2)
            for (const Vec& v : y_.space().sphere_net(0.1).points) dirs.push_back(y_.to_pt(v));

        const double eps0 = std::min(eps_, 0.5) * (1.0 - 1e-9);
        const double a = std::sqrt(eps0 / 2.0);
        for (const Pt& xi : dirs) try_pair(a, xi, scaled(xi, 1.0 - std::sqrt(2.0 * eps0)));

        if (m_ == 1) {
            for (int i = 0; i <= 50; ++i) {
                for (int j = 0; j <= 200; ++j) {
                    const double delta = 0.01 * i, v = -1.0 + 0.01 * j;
                    try_pair(delta, Pt{1.0, 0.0, 0.0}, Pt{v, 0.0, 0.0});
                    try_pair(delta, Pt{v, 0.0, 0.0}, Pt{1.0, 0.0, 0.0});
                }
            }
        }
        if (m_ == 2) {
            std::vector<Vec> ext = y_.space().extreme_points();
            std::sort(ext.begin(), ext.end(),
                      [](const Vec& p, const Vec& q) { return std::atan2(p(1), p(0)) < std::atan2(q(1), q(0)); });
            const int nv = static_cast<int>(ext.size());
            for (int i = 0; i < nv; ++i) {
                const Pt b = y_.to_pt(ext[static_cast<std::size_t>(i)]);
                const Pt pa = y_.to_pt(ext[static_cast<std::size_t>((i + nv - 1) % nv)]);
                const Pt pc = y_.to_pt(ext[static_cast<std::size_t>((i + 1) % nv)]);
                for (int order = 0; order < 2; ++order) {
                    const Pt& p1 = order == 0 ? pa : pc;
                    const Pt& p2 = order == 0 ? pc : pa;
                    auto cols = [&](double s) {
                        Pt c1{}, c2{};
                        for (int k = 0; k < 2; ++k) {
                            const auto kk = static_cast<std::size_t>(k);
                            c1[kk] = s * p1[kk] + (1 - s) * b[kk];
                            c2[kk] = s * p2[kk] + (1 - s) * b[kk];
                        }
                        return std::pair<Pt, Pt>{c1, c2};
                    };
                    auto feasible = [&](double delta, double s) {
                        const auto [c1, c2] = cols(s);
                        return admissible(Decoded{1.0 - delta, delta, c1, c2}, y_.norm(c1), y_.norm(c2));
                    };
                    auto scan = [&](auto delta_of) {
                        double last_ok = -1.0;
                        for (int j = 0; j <= 100; ++j) {
                            const double s = 0.01 * j;
                            const double delta = delta_of(s);
                            if (delta < 0.0 || delta > 0.5) continue;
                            if (feasible(delta, s)) {
                                const auto [c1, c2] = cols(s);
                                try_pair(delta, c1, c2);
                                last_ok = s;
                            } else if (last_ok >= 0.0) {
                                double lo_s = last_ok, hi_s = s;
                                for (int it = 0; it < 60; ++it) {
                                    const double mid = 0.5 * (lo_s + hi_s);
                                    (feasible(delta_of(mid), mid) ? lo_s : hi_s) = mid;
                                }
                                const auto [c1, c2] = cols(lo_s);
                                try_pair(delta_of(lo_s), c1, c2);
                                last_ok = -1.0;
                            }
                        }
                    };
                    scan([](double s) { return s / 2.0; });
                    for (int k = 0; k <= 25; ++k) scan([k](double) { return 0.02 * k; });
                }
            }
        }
        return best;
    }

    const Codomain y_;
    double eps_;
    ModulusOptions opts_;
    AttainMode mode_;
    int m_;
    int dims_;
};

// ---- nets for functionals ----

struct NetTables {
    std::vector<Vec> points;
    std::vector<double> dist;  // points.size() x faces
    std::vector<double> dist_neg;
    int faces = 0;
};

NetTables net_tables(const PolyhedralSpace& space, const std::vector<Vec>& points,
                     const std::vector<std::vector<Vec>>& face_vertices, bool with_negation) {
    NetTables t;
    t.points = points;
    t.faces = static_cast<int>(face_vertices.size());
    t.dist.resize(points.size() * face_vertices.size());
    if (with_negation) t.dist_neg.resize(t.dist.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t f = 0; f < face_vertices.size(); ++f) {
            t.dist[i * face_vertices.size() + f] = space.distance_to_hull(points[i], face_vertices[f]);
            if (with_negation) t.dist_neg[i * face_vertices.size() + f] = space.distance_to_hull(-points[i], face_vertices[f]);
        }
    }
    return t;
}

std::vector<Vec> radial_points(const SphereNet& net, double tmin, double rt, int levels, bool spherical) {
    if (spherical) return net.points;
    std::vector<Vec> out;
    for (int l = 0; l < levels; ++l) {
        const double t = std::min(1.0, tmin + (2 * l + 1) * rt);
        for (const Vec& p : net.points) out.push_back(t * p);
    }
    return out;
}

ModulusBracket heuristic_bracket(const PolyhedralSpace& xs, const PolyhedralSpace& ys, double eps,
                                 const ModulusOptions& opts, AttainMode mode) {
    auto dom = std::make_shared<const PolyhedralSpace>(xs);
    auto cod = std::make_shared<const PolyhedralSpace>(ys);
    std::mt19937_64 rng(opts.seed);
    ModulusBracket out;
    out.epsilon = eps;
    out.lo = 0.0;
    for (int i = 0; i < opts.samples; ++i) {
        const AlmostAttainingPair p = sample_pair_for_eps(rng, dom, cod, eps, opts.spherical);
        out.lo = std::max(out.lo, inner_distance(p.x, p.t, mode));
    }
    out.evaluations = opts.samples;
    if (mode == AttainMode::Exact) {
        out.hi = 2.0;
        if (opts.codomain_rho) out.hi = bound("thm_beta_upper", {opts.codomain_rho, eps, {}, {}, {}}).value;
    } else {
        out.hi = 1.0;
        if (opts.codomain_rho && opts.spherical)
            out.hi = bound("modified_upper", {opts.codomain_rho, eps, {}, {}, {}}).value;
    }
    out.hi = std::max(out.hi, out.lo);
    out.outer_mesh = 0.0;
    out.inner_mesh = opts.inner_mesh;
    out.certified = false;
    return out;
}

void check_options(const ModulusOptions& opts) {
    require(opts.outer_mesh > 0.0 && std::isfinite(opts.outer_mesh), "outer_mesh must be positive");
    require(opts.inner_mesh > 0.0 && std::isfinite(opts.inner_mesh), "inner_mesh must be positive");
    require(opts.target_width > 0.0, "target_width must be positive");
    require(opts.max_cells > 0, "max_cells must be positive");
}

}  // namespace

ModulusBracket functional_modulus(const PolyhedralSpace& x, double eps, const ModulusOptions& opts, bool absolute) {
    require(eps > 0.0 && eps < 2.0, "functional modulus needs eps in (0, 2)");
    check_options(opts);
    if (x.dim() > 3) throw UnsupportedDimensionError("functional modulus needs dim X <= 3");
    const PolyhedralSpace dual = x.dual();

    std::vector<std::vector<Vec>> primal_faces, dual_faces;
    for (const Face& f : x.faces()) {
        primal_faces.push_back(f.vertices);
        std::vector<Vec> act;
        for (const SignedFunctional& s : f.active) act.push_back(s.sign * x.functional(s.index));
        dual_faces.push_back(act);
    }

    const SphereNet nx = x.sphere_net(opts.outer_mesh);
    const SphereNet nf = dual.sphere_net(opts.outer_mesh);
    const double tmin = std::max(0.0, 1.0 - eps);
    const double rs = std::max(nx.covering_radius, nf.covering_radius);
    const double rt = opts.spherical ? 0.0 : rs;
    const int levels = opts.spherical ? 1 : std::max(1, static_cast<int>(std::ceil((1.0 - tmin) / (2.0 * rt) - 1e-12)));
    const double r = rs + rt;

    const NetTables tx = net_tables(x, radial_points(nx, tmin, rt, levels, opts.spherical), primal_faces, false);
    const NetTables tf = net_tables(dual, radial_points(nf, tmin, rt, levels, opts.spherical), dual_faces, absolute);
    const int faces = tx.faces;

    double lo = 0.0, hi = 0.0;
    long long count = 0;
    for (std::size_t i = 0; i < tx.points.size(); ++i) {
        const double* dx = &tx.dist[i * static_cast<std::size_t>(faces)];
        for (std::size_t j = 0; j < tf.points.size(); ++j) {
            double val = tf.points[j].dot(tx.points[i]);
            if (absolute) val = std::abs(val);
            if (val <= 1.0 - eps - 2.0 * r) continue;
            const double* df = &tf.dist[j * static_cast<std::size_t>(faces)];
            const double* dn = absolute ? &tf.dist_neg[j * static_cast<std::size_t>(faces)] : nullptr;
            double h = kInf;
            for (int f = 0; f < faces; ++f) {
                double d = df[f];
                if (dn) d = std::min(d, dn[f]);
                h = std::min(h, std::max(dx[f], d));
            }
            ++count;
            hi = std::max(hi, h + r);
            if (val > 1.0 - eps + kStrictMargin) lo = std::max(lo, h);
        }
    }
    ModulusBracket out;
    out.epsilon = eps;
    out.lo = std::max(0.0, lo - opts.inner_mesh);
    out.hi = std::min(2.0, std::max(hi + opts.inner_mesh, out.lo));
    out.kind = absolute ? (opts.spherical ? ModulusKind::OperatorSpherical : ModulusKind::Operator)
                        : (opts.spherical ? ModulusKind::FunctionalSpherical : ModulusKind::Functional);
    out.outer_mesh = r;
    out.inner_mesh = opts.inner_mesh;
    out.certified = true;
    out.evaluations = count;
    return out;
}

bool operator_modulus_certifiable(const PolyhedralSpace& x, const PolyhedralSpace& y) {
    if (is_l1_plane(x) && y.dim() <= 3) return true;
    return y.dim() == 1 && x.dim() <= 3;
}

bool modified_modulus_certifiable(const PolyhedralSpace& x, const PolyhedralSpace& y) {
    return is_l1_plane(x) && y.dim() <= 3;
}

ModulusBracket operator_modulus(const PolyhedralSpace& x, const PolyhedralSpace& y, double eps,
                                const ModulusOptions& opts) {
    require(eps > 0.0 && eps < 1.0, "operator modulus needs eps in (0, 1)");
    check_options(opts);
    const ModulusKind kind = opts.spherical ? ModulusKind::OperatorSpherical : ModulusKind::Operator;
    ModulusBracket out;
    if (is_l1_plane(x) && y.dim() <= 3) {
        out = L1PlaneSearch(y, eps, opts, AttainMode::Exact).run();
    } else if (y.dim() == 1 && x.dim() <= 3) {
        out = functional_modulus(x, eps, opts, true);
    } else {
        out = heuristic_bracket(x, y, eps, opts, AttainMode::Exact);
    }
    out.kind = kind;
    return out;
}

ModulusBracket modified_modulus(const PolyhedralSpace& x, const PolyhedralSpace& y, double eps,
                                const ModulusOptions& opts) {
    require(eps > 0.0 && eps < 1.0, "modified modulus needs eps in (0, 1)");
    check_options(opts);
    ModulusBracket out = modified_modulus_certifiable(x, y) ? L1PlaneSearch(y, eps, opts, AttainMode::Modified).run()
                                                            : heuristic_bracket(x, y, eps, opts, AttainMode::Modified);
    out.kind = opts.spherical ? ModulusKind::ModifiedSpherical : ModulusKind::Modified;
    return out;
}

double inner_distance(const Vec& x, const LinearOperator& t, AttainMode mode) {
    const PolyhedralSpace& xs = *t.domain();
    const PolyhedralSpace& ys = *t.codomain();
    require(x.size() == xs.dim(), "x has the wrong dimension");
    const int n = xs.dim(), m = ys.dim();
    const Mat reps = xs.dual().functionals();  // one extreme point of B_X per +- pair
    const Mat& g = ys.functionals();
    const bool modified = mode == AttainMode::Modified;
    const int nv = m * n + 1 + (modified ? 1 : 0);
    const int tv = m * n, lv = m * n + 1;
    auto var = [n](int r, int c) { return r * n + c; };

    double best = kInf;
    for (const Face& gface : xs.faces()) {
        const double dx = xs.distance_to_hull(x, gface.vertices);
        if (dx >= best) continue;
        for (const Face& phi : ys.facets()) {
            lp::Problem p(nv);
            p.c.setZero();
            p.c(tv) = 1.0;
            p.free.assign(static_cast<std::size_t>(nv), false);
            for (int i = 0; i < m * n; ++i) p.free[static_cast<std::size_t>(i)] = true;
            for (Eigen::Index vi = 0; vi < reps.rows(); ++vi) {
                const Vec v = reps.row(vi).transpose();
                const Vec tvv = t.apply(v);
                for (int j = 0; j < g.rows(); ++j) {
                    // row . F = g_j(F v)
                    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
                    for (int r = 0; r < m; ++r)
                        for (int c = 0; c < n; ++c) row(var(r, c)) = g(j, r) * v(c);
                    const double gt = g.row(j).dot(tvv);
                    // |g_j(T v) - g_j(F v)| <= t
                    Eigen::RowVectorXd a = -row;
                    a(tv) = -1.0;
                    p.add_le(a, -gt);
                    Eigen::RowVectorXd b = row;
                    b(tv) = -1.0;
                    p.add_le(b, gt);
                    // |g_j(F v)| <= 1 (or lambda)
                    Eigen::RowVectorXd c = row, d = -row;
                    if (modified) {
                        c(lv) = -1.0;
                        d(lv) = -1.0;
                        p.add_le(c, 0.0);
                        p.add_le(d, 0.0);
                    } else {
                        p.add_le(c, 1.0);
                        p.add_le(d, 1.0);
                    }
                }
            }
            for (const Vec& v : gface.vertices) {
                Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
                for (int r = 0; r < m; ++r)
                    for (int c = 0; c < n; ++c) row(var(r, c)) = phi.supporting_functional(r) * v(c);
                if (modified) {
                    row(lv) = -1.0;
                    p.add_eq(row, 0.0);
                } else {
                    p.add_eq(row, 1.0);
                }
            }
            const lp::Solution s = lp::solve(p);
            if (s.status != lp::Status::Optimal) continue;
            best = std::min(best, std::max(dx, s.objective));
        }
    }
    if (!std::isfinite(best)) throw InternalError("inner distance: no attaining operator found");
    return best;
}

double inner_distance_l1_plane(const Vec& x, const LinearOperator& t, AttainMode mode) {
    require(is_l1_plane(*t.domain()), "domain must be l1^2");
    require(x.size() == 2, "x has the wrong dimension");
    const Codomain y(*t.codomain());
    return l1_plane_inner(y, mode, x(0), x(1), y.to_pt(t.matrix().col(0)), y.to_pt(t.matrix().col(1)));
}

}  // namespace bpb
