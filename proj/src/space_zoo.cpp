#include "bpb/space_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace bpb {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

double parse_number(const std::string& s, const std::string& whole) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw InputError("malformed number in space name '" + whole + "'");
    }
    if (pos != s.size() || !std::isfinite(v)) throw InputError("malformed number in space name '" + whole + "'");
    return v;
}

int parse_int(const std::string& s, const std::string& whole) {
    const double v = parse_number(s, whole);
    if (v != std::floor(v)) throw InputError("expected an integer in space name '" + whole + "'");
    return static_cast<int>(v);
}

}  // namespace

SpacePtr make_l1(int n) {
    if (n < 1 || n > 4) throw InputError("l1^n supported for 1 <= n <= 4");
    const int count = 1 << (n - 1);
    Mat f(count, n);
    for (int s = 0; s < count; ++s) {
        f(s, 0) = 1.0;
        for (int j = 1; j < n; ++j) f(s, j) = (s >> (j - 1)) & 1 ? -1.0 : 1.0;
    }
    return std::make_shared<const PolyhedralSpace>("l1:" + std::to_string(n), f);
}

SpacePtr make_linf(int n) {
    if (n < 1 || n > 16) throw InputError("linf^n supported for 1 <= n <= 16");
    return std::make_shared<const PolyhedralSpace>("linf:" + std::to_string(n), Mat::Identity(n, n));
}

SpacePtr make_real() { return std::make_shared<const PolyhedralSpace>("r:1", Mat::Ones(1, 1)); }

BetaStructure linf_beta(int n) {
    BetaStructure b;
    b.space = make_linf(n);
    for (int i = 0; i < n; ++i) {
        b.y.push_back(Vec::Unit(n, i));
        b.y_star.push_back(Vec::Unit(n, i));
    }
    b.rho = 0.0;
    return b;
}

BetaStructure l1_beta(int n) {
    BetaStructure b;
    b.space = make_l1(n);
    for (int i = 0; i < b.space->num_functionals(); ++i) {
        const Vec s = b.space->functional(i);
        b.y.push_back(s / n);
        b.y_star.push_back(s);
    }
    b.rho = static_cast<double>(n - 2) / n;
    if (b.rho < 0) b.rho = 0.0;
    return b;
}

HexagonBundle make_hexagon(double rho) {
    if (!(rho >= 0.5 && rho < 1.0)) throw InputError("hexagon space needs rho in [1/2, 1), got " + fmt(rho));
    HexagonBundle h;
    h.rho = rho;
    const double q = 2.0 - 1.0 / rho;
    const double w = rho / (3.0 * rho - 1.0);
    Mat f(3, 2);
    f << 1.0, q, q, 1.0, -1.0, 1.0;
    h.space = std::make_shared<const PolyhedralSpace>("hex:" + fmt(rho), f);
    h.vertices = {vec2(1.0, 0.0), vec2(w, w), vec2(0.0, 1.0), vec2(-1.0, 0.0), vec2(-w, -w), vec2(0.0, -1.0)};
    h.dual_vertices = {vec2(1.0, q), vec2(q, 1.0), vec2(-1.0, 1.0), vec2(-1.0, -q), vec2(-q, -1.0), vec2(1.0, -1.0)};
    const double den = 3.0 * rho - 1.0;
    h.beta.space = h.space;
    h.beta.y = {vec2(2.0 * rho * rho / den, (rho - rho * rho) / den), vec2((rho - rho * rho) / den, 2.0 * rho * rho / den),
                vec2(-0.5, 0.5)};
    h.beta.y_star = {h.dual_vertices[0], h.dual_vertices[1], h.dual_vertices[2]};
    h.beta.rho = rho;
    return h;
}

double hexagon_norm_closed_form(double rho, double x1, double x2) {
    const double q = 2.0 - 1.0 / rho;
    if (x1 * x2 <= 0) return std::abs(x1 - x2);
    if (std::abs(x1) > std::abs(x2)) return std::abs(x1 + q * x2);
    return std::abs(x2 + q * x1);
}

ZBundle make_z(int n, double rho) {
    if (n < 2) throw InputError("Z space needs n >= 2");
    if (n > 512) throw InputError("Z space supported for n <= 512");
    if (!(rho >= 1.0 / n - 1e-15 && rho < 1.0)) throw InputError("Z space needs rho in [1/n, 1), got " + fmt(rho));
    ZBundle z;
    z.n = n;
    z.rho = rho;
    Mat f(n + 1, n);
    f.topRows(n) = Mat::Identity(n, n);
    f.row(n).setConstant(1.0 / (rho * n));
    z.space = std::make_shared<const PolyhedralSpace>("z:" + std::to_string(n) + ":" + fmt(rho), f);
    z.z = Vec::Constant(n, rho);
    z.z_star = Vec::Constant(n, 1.0 / (rho * n));
    z.beta.space = z.space;
    const double c = 1.0 / (n - 1 + rho * n);
    for (int j = 0; j < n; ++j) {
        Vec y = Vec::Constant(n, -c);
        y(j) = 1.0;
        z.beta.y.push_back(y);
        z.beta.y_star.push_back(Vec::Unit(n, j));
    }
    z.beta.y.push_back(z.z);
    z.beta.y_star.push_back(z.z_star);
    z.beta.rho = rho;
    return z;
}

double z_norm_closed_form(double rho, const Vec& x) {
    return std::max(x.cwiseAbs().maxCoeff(), std::abs(x.sum()) / (rho * static_cast<double>(x.size())));
}

NamedSpace space_by_name(const std::string& name) {
    std::vector<std::string> parts;
    std::stringstream ss(name);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) throw InputError("empty space name");
    const std::string& kind = parts[0];
    NamedSpace out;
    if (kind == "l1" && parts.size() == 2) {
        const int n = parse_int(parts[1], name);
        out.space = make_l1(n);
        out.beta = l1_beta(n);
    } else if (kind == "linf" && parts.size() == 2) {
        const int n = parse_int(parts[1], name);
        out.beta = linf_beta(n);
        out.space = out.beta->space;
    } else if (kind == "hex" && parts.size() == 2) {
        HexagonBundle h = make_hexagon(parse_number(parts[1], name));
        out.space = h.space;
        out.beta = h.beta;
    } else if (kind == "z" && parts.size() == 3) {
        ZBundle z = make_z(parse_int(parts[1], name), parse_number(parts[2], name));
        out.space = z.space;
        out.beta = z.beta;
    } else if (kind == "r" && parts.size() == 2 && parts[1] == "1") {
        out.space = make_real();
        BetaStructure b;
        b.space = out.space;
        b.y = {Vec::Ones(1)};
        b.y_star = {Vec::Ones(1)};
        out.beta = b;
    } else {
        throw InputError("unknown space name '" + name + "' (expected l1:n, linf:n, hex:rho, z:n:rho or r:1)");
    }
    if (out.beta) out.beta->space = out.space;
    return out;
}

SpacePtr parse_space_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("space description must be a JSON object");
    if (!j.contains("dim") || !j["dim"].is_number_integer()) throw InputError("space description needs integer 'dim'");
    if (!j.contains("functionals") || !j["functionals"].is_array()) throw InputError("space description needs 'functionals' array");
    const int dim = j["dim"].get<int>();
    if (dim < 1) throw InputError("'dim' must be positive");
    const auto& rows = j["functionals"];
    if (rows.empty()) throw InvalidSpaceError("empty norming family");
    Mat f(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != dim) throw InputError("functional row length does not match 'dim'");
        for (int c = 0; c < dim; ++c) {
            if (!rows[i][static_cast<std::size_t>(c)].is_number()) throw InputError("functional entries must be numbers");
            f(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)].get<double>();
        }
    }
    const std::string name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "custom";
    return std::make_shared<const PolyhedralSpace>(name, f);
}

nlohmann::json space_to_json(const PolyhedralSpace& x) {
    nlohmann::json j;
    j["name"] = x.name();
    j["dim"] = x.dim();
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < x.num_functionals(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (int c = 0; c < x.dim(); ++c) r.push_back(x.functionals()(i, c));
        rows.push_back(r);
    }
    j["functionals"] = rows;
    return j;
}

double isomorphism_norm(const PolyhedralSpace& x, const PolyhedralSpace& y, const Mat& t) {
    double best = 0.0;
    for (const Vec& v : x.extreme_points()) best = std::max(best, y.norm(t * v));
    return best;
}

double banach_mazur_upper(const PolyhedralSpace& x, const PolyhedralSpace& y, int budget, std::uint64_t seed) {
    if (x.dim() != y.dim()) throw InputError("Banach-Mazur distance needs equal dimensions");
    if (x.dim() > 3) throw UnsupportedDimensionError("Banach-Mazur estimate supported for dimension <= 3");
    const int d = x.dim();
    auto cost = [&](const Mat& t) {
        Eigen::FullPivLU<Mat> lu(t);
        if (!lu.isInvertible()) return std::numeric_limits<double>::infinity();
        return isomorphism_norm(x, y, t) * isomorphism_norm(y, x, lu.inverse());
    };
    Mat best = Mat::Identity(d, d);
    double best_cost = cost(best);
    // Axis scalings relative to the first coordinate.
    const std::vector<double> grid{0.5, 0.6, 0.7, 0.8, 0.9, 1.1, 1.25, 1.4, 1.6, 1.8, 2.0};
    for (int axis = 1; axis < d; ++axis) {
        for (double s : grid) {
            Mat t = Mat::Identity(d, d);
            t(axis, axis) = s;
            const double c = cost(t);
            if (c < best_cost) {
                best_cost = c;
                best = t;
            }
        }
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    double step = 0.2;
    for (int it = 0; it < budget; ++it) {
        Mat t = best;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) t(r, c) += step * g(rng);
        const double c = cost(t);
        if (c < best_cost) {
            best_cost = c;
            best = t;
        } else if ((it + 1) % 50 == 0) {
            step *= 0.7;
        }
    }
    return std::max(best_cost, 1.0 - 1e-9);
}

bool is_l1_plane(const PolyhedralSpace& x) {
    if (x.dim() != 2 || !x.has_extreme_points() || x.extreme_points().size() != 4) return false;
    for (const Vec& v : x.extreme_points()) {
        const double a = std::abs(v(0)), b = std::abs(v(1));
        const bool axis = (std::abs(a - 1) <= 1e-12 && b <= 1e-12) || (std::abs(b - 1) <= 1e-12 && a <= 1e-12);
        if (!axis) return false;
    }
    return true;
}

}  // namespace bpb
