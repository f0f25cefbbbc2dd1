#include "bpb/polyhedral_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "bpb/linear_program.hpp"

namespace bpb {

namespace {

int matrix_rank(const Mat& m, double tol = 1e-10) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::ColPivHouseholderQR<Mat> qr(m);
    qr.setThreshold(tol);
    return static_cast<int>(qr.rank());
}

Vec normalized_ray(const Vec& r) {
    const double s = r.cwiseAbs().maxCoeff();
    return s > 0 ? Vec(r / s) : r;
}

bool is_bit_subset(std::uint64_t a, std::uint64_t b) { return (a & ~b) == 0; }

void compositions(int parts, int total, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (parts == 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int k = 0; k <= total; ++k) {
        cur.push_back(k);
        compositions(parts - 1, total - k, cur, out);
        cur.pop_back();
    }
}

void subsets(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i < n; ++i) {
        cur.push_back(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<Vec> enumerate_extreme_points(const Mat& functionals, double dedup_tol) {
    const int d = static_cast<int>(functionals.cols());
    const int m = static_cast<int>(functionals.rows());
    if (d < 1) throw InvalidSpaceError("space must have dimension at least 1");
    if (d > kMaxEnumerationDim) {
        std::ostringstream os;
        os << "vertex enumeration supports dimension <= " << kMaxEnumerationDim << ", got " << d;
        throw UnsupportedDimensionError(os.str());
    }
    if (matrix_rank(functionals) < d) throw InvalidSpaceError("norming functionals do not span the dual space");

    // Homogenized cone {(x, x0) : x0 >= 0, x0 - f_i x >= 0, x0 + f_i x >= 0}, rows a with a.y >= 0.
    std::vector<Vec> rows;
    {
        Vec top = Vec::Zero(d + 1);
        top(d) = 1.0;
        rows.push_back(top);
        for (int i = 0; i < m; ++i) {
            Vec plus(d + 1), minus(d + 1);
            plus.head(d) = functionals.row(i).transpose();
            plus(d) = 1.0;
            minus.head(d) = -functionals.row(i).transpose();
            minus(d) = 1.0;
            rows.push_back(plus);
            rows.push_back(minus);
        }
    }

    // Initial simplicial cone: the x0 row plus d independent rows.
    std::vector<int> basis_rows{0};
    Mat k_mat(1, d + 1);
    k_mat.row(0) = rows[0].transpose();
    for (int r = 1; r < static_cast<int>(rows.size()) && static_cast<int>(basis_rows.size()) < d + 1; ++r) {
        Mat trial(k_mat.rows() + 1, d + 1);
        trial << k_mat, rows[static_cast<std::size_t>(r)].transpose();
        if (matrix_rank(trial) == trial.rows()) {
            k_mat = trial;
            basis_rows.push_back(r);
        }
    }
    if (static_cast<int>(basis_rows.size()) < d + 1) throw InvalidSpaceError("norming functionals do not span the dual space");

    const Mat k_inv = k_mat.inverse();
    std::vector<Vec> rays;
    for (int j = 0; j <= d; ++j) rays.push_back(normalized_ray(k_inv.col(j)));
    std::vector<int> processed = basis_rows;

    const double zero_tol = 1e-9;
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
        if (std::find(basis_rows.begin(), basis_rows.end(), r) != basis_rows.end()) continue;
        const Vec& a = rows[static_cast<std::size_t>(r)];
        std::vector<double> val(rays.size());
        std::vector<int> pos, zer, neg;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            val[i] = a.dot(rays[i]);
            if (val[i] > zero_tol)
                pos.push_back(static_cast<int>(i));
            else if (val[i] < -zero_tol)
                neg.push_back(static_cast<int>(i));
            else
                zer.push_back(static_cast<int>(i));
        }
        if (neg.empty()) {
            processed.push_back(r);
            continue;
        }
        std::vector<Vec> next;
        for (int i : pos) next.push_back(rays[static_cast<std::size_t>(i)]);
        for (int i : zer) next.push_back(rays[static_cast<std::size_t>(i)]);
        for (int ip : pos) {
            for (int in : neg) {
                const Vec& rp = rays[static_cast<std::size_t>(ip)];
                const Vec& rn = rays[static_cast<std::size_t>(in)];
                std::vector<int> common;
                for (int c : processed) {
                    const Vec& row = rows[static_cast<std::size_t>(c)];
                    if (std::abs(row.dot(rp)) <= zero_tol && std::abs(row.dot(rn)) <= zero_tol) common.push_back(c);
                }
                if (static_cast<int>(common.size()) < d - 1) continue;
                Mat cm(static_cast<Eigen::Index>(common.size()), d + 1);
                for (std::size_t c = 0; c < common.size(); ++c) cm.row(static_cast<Eigen::Index>(c)) = rows[static_cast<std::size_t>(common[c])].transpose();
                if (matrix_rank(cm) != d - 1) continue;
                // Recompute the new ray as the null vector of its active rows to stop error build-up.
                const Vec combo = val[static_cast<std::size_t>(ip)] * rn - val[static_cast<std::size_t>(in)] * rp;
                Mat act(cm.rows() + 1, d + 1);
                act << cm, a.transpose();
                Eigen::JacobiSVD<Mat> svd(act, Eigen::ComputeFullV);
                Vec ray = svd.matrixV().col(d);
                if (ray.dot(combo) < 0) ray = -ray;
                ray = normalized_ray(ray);
                bool dup = false;
                for (const Vec& q : next) {
                    if ((q - ray).cwiseAbs().maxCoeff() <= 1e-9) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) next.push_back(ray);
            }
        }
        rays = std::move(next);
        processed.push_back(r);
    }

    std::vector<Vec> verts;
    for (const Vec& ray : rays) {
        if (ray(d) <= zero_tol) throw InvalidSpaceError("unit ball is unbounded");
        Vec v = ray.head(d) / ray(d);
        bool dup = false;
        for (const Vec& w : verts) {
            if ((w - v).cwiseAbs().maxCoeff() <= dedup_tol) {
                dup = true;
                break;
            }
        }
        if (!dup) verts.push_back(v);
    }
    // Canonical order: lexicographic, so results do not depend on the norming family's order.
    std::sort(verts.begin(), verts.end(), [](const Vec& a, const Vec& b) {
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (a(i) < b(i) - 1e-12) return true;
            if (a(i) > b(i) + 1e-12) return false;
        }
        return false;
    });
    return verts;
}

std::pair<double, double> minimize_max_abs_affine(const Vec& a, const Vec& b, double lo, double hi) {
    const Eigen::Index m = a.size();
    std::vector<double> cand{lo};
    if (std::isfinite(hi)) cand.push_back(hi);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (b(i) != 0.0) cand.push_back(-a(i) / b(i));
        for (Eigen::Index j = i + 1; j < m; ++j) {
            if (b(i) != b(j)) cand.push_back((a(j) - a(i)) / (b(i) - b(j)));
            if (b(i) != -b(j)) cand.push_back(-(a(i) + a(j)) / (b(i) + b(j)));
        }
    }
    double best = std::numeric_limits<double>::infinity();
    double arg = 0.0;
    for (double t : cand) {
        if (!(t >= lo && t <= hi)) continue;
        const double v = (a + t * b).cwiseAbs().maxCoeff();
        if (v < best) {
            best = v;
            arg = t;
        }
    }
    return {best, arg};
}

PolyhedralSpace::PolyhedralSpace(std::string name, Mat functionals, Tolerances tol)
    : name_(std::move(name)), functionals_(std::move(functionals)), tol_(tol) {
    if (functionals_.rows() == 0 || functionals_.cols() == 0) throw InvalidSpaceError("empty norming family");
    if (!functionals_.allFinite()) throw InvalidSpaceError("norming family has non-finite entries");
    if (matrix_rank(functionals_) < dim()) throw InvalidSpaceError("norming functionals do not span the dual space");
    if (dim() <= kMaxEnumerationDim) {
        extreme_points_ = enumerate_extreme_points(functionals_, tol_.dedup);
        build_faces();
    }
}

void PolyhedralSpace::check_dim(const Vec& x, const char* what) const {
    if (x.size() != dim()) {
        std::ostringstream os;
        os << what << " has length " << x.size() << ", expected " << dim();
        throw InputError(os.str());
    }
}

const std::vector<Vec>& PolyhedralSpace::extreme_points() const {
    if (extreme_points_.empty()) throw UnsupportedDimensionError("extreme points are not enumerated for " + name_);
    return extreme_points_;
}

const std::vector<Face>& PolyhedralSpace::faces() const {
    if (faces_.empty()) throw UnsupportedDimensionError("face lattice is not available for " + name_);
    return faces_;
}

std::vector<Face> PolyhedralSpace::facets() const {
    std::vector<Face> out;
    for (const Face& f : faces()) {
        bool maximal = true;
        for (const Face& g : faces_) {
            if (g.mask != f.mask && is_bit_subset(f.mask, g.mask)) {
                maximal = false;
                break;
            }
        }
        if (maximal) out.push_back(f);
    }
    return out;
}

void PolyhedralSpace::build_faces() {
    const int nv = static_cast<int>(extreme_points_.size());
    if (nv > 64) return;  // faces() reports the lattice as unavailable
    const int m = num_functionals();
    // values(i, v) = f_i(v)
    Mat values(m, nv);
    for (int v = 0; v < nv; ++v) values.col(v) = functionals_ * extreme_points_[static_cast<std::size_t>(v)];

    std::set<std::uint64_t> seen;
    std::vector<std::uint64_t> queue;
    for (int i = 0; i < m; ++i) {
        for (int s : {1, -1}) {
            std::uint64_t mask = 0;
            for (int v = 0; v < nv; ++v)
                if (s * values(i, v) >= 1.0 - tol_.dedup) mask |= (std::uint64_t{1} << v);
            if (mask != 0 && seen.insert(mask).second) queue.push_back(mask);
        }
    }
    for (std::size_t q = 0; q < queue.size(); ++q) {
        const std::size_t count = queue.size();
        for (std::size_t p = 0; p < count; ++p) {
            const std::uint64_t inter = queue[q] & queue[p];
            if (inter != 0 && seen.insert(inter).second) queue.push_back(inter);
        }
    }

    std::vector<std::uint64_t> masks(seen.begin(), seen.end());
    std::sort(masks.begin(), masks.end(), [](std::uint64_t a, std::uint64_t b) {
        const int pa = __builtin_popcountll(a), pb = __builtin_popcountll(b);
        return pa != pb ? pa < pb : a < b;
    });
    for (std::uint64_t mask : masks) {
        Face f;
        f.mask = mask;
        for (int v = 0; v < nv; ++v) {
            if (mask & (std::uint64_t{1} << v)) {
                f.vertex_indices.push_back(v);
                f.vertices.push_back(extreme_points_[static_cast<std::size_t>(v)]);
            }
        }
        Vec sum = Vec::Zero(dim());
        for (int i = 0; i < m; ++i) {
            for (int s : {1, -1}) {
                bool all = true;
                for (int v : f.vertex_indices)
                    if (s * values(i, v) < 1.0 - tol_.dedup) all = false;
                if (all) {
                    f.active.push_back({i, s});
                    sum += s * functional(i);
                }
            }
        }
        f.supporting_functional = sum / static_cast<double>(f.active.size());
        faces_.push_back(std::move(f));
    }
}

double PolyhedralSpace::norm(const Vec& x) const {
    check_dim(x, "vector");
    return (functionals_ * x).cwiseAbs().maxCoeff();
}

int PolyhedralSpace::norm_witness(const Vec& x) const {
    check_dim(x, "vector");
    const Vec v = (functionals_ * x).cwiseAbs();
    const double n = v.maxCoeff();
    for (int i = 0; i < v.size(); ++i)
        if (v(i) >= n - tol_.identity * std::max(1.0, n)) return i;
    return 0;
}

double PolyhedralSpace::dual_norm(const Vec& f) const {
    check_dim(f, "functional");
    if (!extreme_points_.empty()) {
        double best = 0.0;
        for (const Vec& v : extreme_points_) best = std::max(best, std::abs(f.dot(v)));
        return best;
    }
    lp::Problem p(dim());
    p.c = -f;
    p.free.assign(static_cast<std::size_t>(dim()), true);
    for (int i = 0; i < num_functionals(); ++i) {
        p.add_le(functionals_.row(i), 1.0);
        p.add_ge(functionals_.row(i), -1.0);
    }
    const lp::Solution s = lp::solve(p);
    if (s.status != lp::Status::Optimal) throw InternalError("dual norm LP did not reach optimality");
    return -s.objective;
}

Face PolyhedralSpace::support_face(const Vec& f) const {
    check_dim(f, "functional");
    const auto& ext = extreme_points();
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec& v : ext) best = std::max(best, f.dot(v));
    if (best <= 0) throw InputError("support_face needs a nonzero functional");
    const double tol = tol_.dedup * std::max(1.0, best);
    Face face;
    face.supporting_functional = f / best;
    for (int v = 0; v < static_cast<int>(ext.size()); ++v) {
        if (f.dot(ext[static_cast<std::size_t>(v)]) >= best - tol) {
            face.vertex_indices.push_back(v);
            face.vertices.push_back(ext[static_cast<std::size_t>(v)]);
            face.mask |= (std::uint64_t{1} << v);
        }
    }
    for (int i = 0; i < num_functionals(); ++i) {
        for (int s : {1, -1}) {
            bool all = true;
            for (const Vec& v : face.vertices)
                if (s * functional(i).dot(v) < 1.0 - tol_.dedup) all = false;
            if (all) face.active.push_back({i, s});
        }
    }
    return face;
}

PolyhedralSpace PolyhedralSpace::dual() const {
    const auto& ext = extreme_points();
    std::vector<Vec> reps;
    for (const Vec& v : ext) {
        bool paired = false;
        for (const Vec& w : reps)
            if ((w + v).cwiseAbs().maxCoeff() <= tol_.dedup) paired = true;
        if (!paired) reps.push_back(v);
    }
    Mat g(static_cast<Eigen::Index>(reps.size()), dim());
    for (std::size_t i = 0; i < reps.size(); ++i) g.row(static_cast<Eigen::Index>(i)) = reps[i].transpose();
    return PolyhedralSpace(name_ + "*", g, tol_);
}

SphereNet PolyhedralSpace::sphere_net(double mesh) const {
    if (!(mesh > 0.0) || !std::isfinite(mesh)) throw InputError("sphere_net mesh must be positive");
    SphereNet net;
    std::set<std::vector<long long>> keys;
    auto add_point = [&](const Vec& p) {
        std::vector<long long> key(static_cast<std::size_t>(p.size()));
        for (Eigen::Index i = 0; i < p.size(); ++i) key[static_cast<std::size_t>(i)] = std::llround(p(i) * 1e9);
        if (keys.insert(key).second) net.points.push_back(p);
    };
    for (const Face& facet : facets()) {
        const int k = std::min(facet.size(), dim());
        std::vector<std::vector<int>> subs;
        std::vector<int> cur;
        subsets(facet.size(), k, 0, cur, subs);
        for (const auto& sub : subs) {
            std::vector<Vec> simplex;
            for (int i : sub) simplex.push_back(facet.vertices[static_cast<std::size_t>(i)]);
            const int s = static_cast<int>(simplex.size());
            if (s == 1) {
                add_point(simplex[0]);
                continue;
            }
            double diam = 0.0;
            for (int i = 0; i < s; ++i)
                for (int j = i + 1; j < s; ++j)
                    diam = std::max(diam, norm(simplex[static_cast<std::size_t>(i)] - simplex[static_cast<std::size_t>(j)]));
            const int n = std::max(1, static_cast<int>(std::ceil((s - 1) * diam / mesh - 1e-12)));
            const double radius = s == 2 ? diam / (2.0 * n) : (s - 1) * diam / n;
            net.covering_radius = std::max(net.covering_radius, radius);
            std::vector<std::vector<int>> comps;
            std::vector<int> c;
            compositions(s, n, c, comps);
            for (const auto& comp : comps) {
                Vec p = Vec::Zero(dim());
                for (int i = 0; i < s; ++i) p += (static_cast<double>(comp[static_cast<std::size_t>(i)]) / n) * simplex[static_cast<std::size_t>(i)];
                add_point(p);
            }
        }
    }
    return net;
}

NearestPoint PolyhedralSpace::nearest_in_hull(const Vec& w, const std::vector<Vec>& vertices) const {
    check_dim(w, "point");
    if (vertices.empty()) throw InputError("nearest_in_hull needs at least one vertex");
    const int k = static_cast<int>(vertices.size());
    NearestPoint out;
    if (k == 1) {
        out.point = vertices[0];
        out.distance = norm(w - vertices[0]);
        out.weights = Vec::Ones(1);
        return out;
    }
    if (k == 2) {
        const Vec a = functionals_ * (w - vertices[0]);
        const Vec b = -(functionals_ * (vertices[1] - vertices[0]));
        const auto [val, t] = minimize_max_abs_affine(a, b);
        out.distance = val;
        out.point = (1 - t) * vertices[0] + t * vertices[1];
        out.weights = Vec(2);
        out.weights << 1 - t, t;
        return out;
    }
    return nearest_by_lp(w, vertices, true);
}

NearestPoint PolyhedralSpace::nearest_in_cone(const Vec& w, const std::vector<Vec>& generators) const {
    check_dim(w, "point");
    NearestPoint out;
    if (generators.empty()) {
        out.point = Vec::Zero(dim());
        out.distance = norm(w);
        out.weights = Vec(0);
        return out;
    }
    if (generators.size() == 1) {
        const Vec a = functionals_ * w;
        const Vec b = -(functionals_ * generators[0]);
        const auto [val, t] = minimize_max_abs_affine(a, b, 0.0, std::numeric_limits<double>::infinity());
        out.point = t * generators[0];
        out.distance = norm(w - out.point);
        (void)val;
        out.weights = Vec::Constant(1, t);
        return out;
    }
    return nearest_by_lp(w, generators, false);
}

NearestPoint PolyhedralSpace::nearest_by_lp(const Vec& w, const std::vector<Vec>& vertices, bool convex) const {
    const int k = static_cast<int>(vertices.size());
    NearestPoint out;
    // Variables: weights mu (k, >= 0), t (>= 0). minimize t.
    const int m = num_functionals();
    lp::Problem p(k + 1);
    p.c(k) = 1.0;
    Mat fv(m, k);
    for (int j = 0; j < k; ++j) fv.col(j) = functionals_ * vertices[static_cast<std::size_t>(j)];
    const Vec fw = functionals_ * w;
    for (int i = 0; i < m; ++i) {
        Eigen::RowVectorXd row(k + 1);
        row.head(k) = -fv.row(i);
        row(k) = -1.0;
        p.add_le(row, -fw(i));
        row.head(k) = fv.row(i);
        p.add_le(row, fw(i));
    }
    if (convex) {
        Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(k + 1);
        sum.head(k).setOnes();
        p.add_eq(sum, 1.0);
    }
    const lp::Solution s = lp::solve(p);
    if (s.status != lp::Status::Optimal) throw InternalError("hull distance LP did not reach optimality");
    out.weights = s.x.head(k);
    out.point = Vec::Zero(dim());
    for (int j = 0; j < k; ++j) out.point += out.weights(j) * vertices[static_cast<std::size_t>(j)];
    out.distance = norm(w - out.point);
    return out;
}

}  // namespace bpb
