#pragma once

// Local model of a logarithmic connection z ds/dz = A(z) s with polynomial
// coefficient A(z): paths, parallel transport, monodromy, and polynomial
// gauge action. Transport reduces to the linear ODE core in ode.hpp.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "logconn/errors.hpp"
#include "logconn/ode.hpp"
#include "logconn/types.hpp"

namespace logconn {

struct PolyConnection {
    Eigen::Index n = 0;
    std::vector<CMatrix> coeffs;  // A(z) = sum coeffs[k] z^k

    PolyConnection() = default;
    explicit PolyConnection(std::vector<CMatrix> c) : coeffs(std::move(c)) {
        if (coeffs.empty()) throw Error("PolyConnection: needs at least A_0");
        n = coeffs[0].rows();
        for (const auto& m : coeffs) {
            require_square(m, "PolyConnection");
            require_finite(m, "PolyConnection");
            if (m.rows() != n) throw Error("PolyConnection: mixed coefficient sizes");
        }
    }

    CMatrix eval(complexd z) const {
        CMatrix v = coeffs.back();
        for (size_t k = coeffs.size() - 1; k-- > 0;) v = z * v + coeffs[k];
        return v;
    }
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

inline CMatrix residue(const PolyConnection& conn) { return conn.coeffs[0]; }

struct PathSpec {
    enum class Kind { circle, polyline, ray_segment };
    Kind kind = Kind::circle;
    int orientation = +1;  // -1 traverses the path backwards

    // circle: gamma(t) = center + radius e^{i(start_angle + 2 pi turns t)}, t in [0,1]
    complexd center{0.0, 0.0};
    double radius = 1.0;
    double turns = 1.0;
    double start_angle = 0.0;

    std::vector<complexd> points;  // polyline vertices

    // ray-segment: gamma(t) = t * direction, t in [t0, t1], t0, t1 > 0
    double t0 = 1.0, t1 = 1.0;
    complexd direction{1.0, 0.0};

    static PathSpec circle_path(complexd center, double radius, double turns,
                                double start_angle = 0.0, int orientation = +1) {
        PathSpec p;
        p.kind = Kind::circle;
        p.center = center;
        p.radius = radius;
        p.turns = turns;
        p.start_angle = start_angle;
        p.orientation = orientation;
        return p;
    }
    static PathSpec polyline_path(std::vector<complexd> pts, int orientation = +1) {
        PathSpec p;
        p.kind = Kind::polyline;
        p.points = std::move(pts);
        p.orientation = orientation;
        return p;
    }
    static PathSpec ray_segment_path(double t0, double t1, complexd direction,
                                     int orientation = +1) {
        PathSpec p;
        p.kind = Kind::ray_segment;
        p.t0 = t0;
        p.t1 = t1;
        p.direction = direction;
        p.orientation = orientation;
        return p;
    }
};

namespace detail {

inline complexd safe_gamma(complexd z, const char* what) {
    if (std::abs(z) < 1e-13) throw PathThroughSingularity(std::string(what) + ": path meets z = 0");
    return z;
}

inline double point_segment_distance(complexd p, complexd a, complexd b) {
    const complexd ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    double t = ((p - a) * std::conj(ab)).real() / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

}  // namespace detail

inline CMatrix transport(const PolyConnection& conn, const PathSpec& path,
                         double rtol = default_rtol) {
    switch (path.kind) {
        case PathSpec::Kind::circle: {
            if (std::abs(std::abs(path.center) - path.radius) < 1e-9)
                throw PathThroughSingularity("transport: circle passes through z = 0");
            const double sweep = 2.0 * pi * path.turns * path.orientation;
            auto G = [&](double t) {
                const complexd e = std::exp(complexd{0.0, path.start_angle + sweep * t});
                const complexd g = detail::safe_gamma(path.center + path.radius * e, "transport");
                const complexd dg = complexd{0.0, sweep} * path.radius * e;
                return CMatrix((dg / g) * conn.eval(g));
            };
            return detail::integrate_linear(G, 0.0, 1.0, conn.n, rtol);
        }
        case PathSpec::Kind::polyline: {
            if (path.points.size() < 2) throw Error("transport: polyline needs two points");
            std::vector<complexd> pts = path.points;
            if (path.orientation < 0) std::reverse(pts.begin(), pts.end());
            for (size_t s = 0; s + 1 < pts.size(); ++s)
                if (detail::point_segment_distance(0.0, pts[s], pts[s + 1]) < 1e-9)
                    throw PathThroughSingularity("transport: polyline passes through z = 0");
            CMatrix F = cidentity(conn.n);
            for (size_t s = 0; s + 1 < pts.size(); ++s) {
                const complexd za = pts[s], zb = pts[s + 1];
                auto G = [&](double t) {
                    const complexd g = detail::safe_gamma(za + t * (zb - za), "transport");
                    return CMatrix(((zb - za) / g) * conn.eval(g));
                };
                F = detail::integrate_linear(G, 0.0, 1.0, conn.n, rtol) * F;
            }
            return F;
        }
        case PathSpec::Kind::ray_segment: {
            if (path.t0 <= 0.0 || path.t1 <= 0.0)
                throw PathThroughSingularity("transport: ray-segment endpoint at z = 0");
            double ta = path.t0, tb = path.t1;
            if (path.orientation < 0) std::swap(ta, tb);
            auto G = [&](double t) {
                const complexd g = detail::safe_gamma(t * path.direction, "transport");
                return CMatrix((1.0 / t) * conn.eval(g));
            };
            return detail::integrate_linear(G, ta, tb, conn.n, rtol);
        }
    }
    throw Error("transport: unknown path kind");
}

// transport along the groupoid arrow gamma(t) = e^{t lambda} z0, t in [0,1];
// this is the fundamental-solution comparison Phi(lambda, z0)
inline CMatrix transport_arrow(const PolyConnection& conn, complexd lambda, complexd z0,
                               double rtol = default_rtol) {
    detail::safe_gamma(z0, "transport_arrow");
    auto G = [&](double t) {
        const complexd g = std::exp(t * lambda) * z0;
        return CMatrix(lambda * conn.eval(g));
    };
    return detail::integrate_linear(G, 0.0, 1.0, conn.n, rtol);
}

inline CMatrix monodromy(const PolyConnection& conn, double rtol = default_rtol) {
    return transport_arrow(conn, two_pi_i, complexd{1.0, 0.0}, rtol);
}

// M(z0) via conjugation of the base monodromy along a radial-then-angular path
inline CMatrix monodromy_at(const PolyConnection& conn, complexd z0,
                            double rtol = default_rtol) {
    detail::safe_gamma(z0, "monodromy_at");
    const double r = std::abs(z0);
    const double th = std::arg(z0);
    // F: 1 -> r -> z0
    CMatrix F = cidentity(conn.n);
    if (r != 1.0)
        F = transport(conn, PathSpec::ray_segment_path(1.0, r, complexd{1.0, 0.0}), rtol) * F;
    if (th != 0.0) F = transport(conn, PathSpec::circle_path(0.0, r, th / (2.0 * pi)), rtol) * F;
    const CMatrix M1 = monodromy(conn, rtol);
    return F * M1 * F.inverse();
}

// polynomial series helpers (coefficient lists, truncated arithmetic)
namespace series {

inline std::vector<CMatrix> mul(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b,
                                size_t maxdeg) {
    const Eigen::Index n = a[0].rows();
    std::vector<CMatrix> out(std::min(a.size() + b.size() - 1, maxdeg + 1),
                             CMatrix::Zero(n, n));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size() && i + j < out.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

// truncated inverse of g(z) = sum g_k z^k with invertible g_0
inline std::vector<CMatrix> inv(const std::vector<CMatrix>& g, size_t maxdeg) {
    const Eigen::Index n = g[0].rows();
    Eigen::FullPivLU<CMatrix> lu(g[0]);
    if (!lu.isInvertible()) throw Singular("series::inv: constant term singular");
    std::vector<CMatrix> out(maxdeg + 1, CMatrix::Zero(n, n));
    out[0] = lu.inverse();
    for (size_t k = 1; k <= maxdeg; ++k) {
        CMatrix rhs = CMatrix::Zero(n, n);
        for (size_t j = 1; j <= k && j < g.size(); ++j) rhs += g[j] * out[k - j];
        out[k] = -out[0] * rhs;
    }
    return out;
}

inline std::vector<CMatrix> deriv_z(const std::vector<CMatrix>& g) {
    // z g'(z) coefficient-wise: k g_k
    std::vector<CMatrix> out(g.size(), CMatrix::Zero(g[0].rows(), g[0].cols()));
    for (size_t k = 1; k < g.size(); ++k) out[k] = double(k) * g[k];
    return out;
}

inline CMatrix eval(const std::vector<CMatrix>& g, complexd z) {
    CMatrix v = g.back();
    for (size_t k = g.size() - 1; k-- > 0;) v = z * v + g[k];
    return v;
}

} // namespace series

// gauge action on z ds/dz = A s by s~ = g(z) s: the new coefficient is
// g A g^{-1} + z g' g^{-1}, truncated at out_degree; the monodromy moves
// to g(1) M g(1)^{-1}
inline PolyConnection gauge_transform(const PolyConnection& conn,
                                      const std::vector<CMatrix>& g, size_t out_degree) {
    std::vector<CMatrix> gA = series::mul(g, conn.coeffs, out_degree);
    std::vector<CMatrix> zgp = series::deriv_z(g);
    if (gA.size() < zgp.size()) gA.resize(zgp.size(), CMatrix::Zero(conn.n, conn.n));
    for (size_t k = 0; k < zgp.size(); ++k) gA[k] += zgp[k];
    std::vector<CMatrix> ginv = series::inv(g, out_degree);
    return PolyConnection(series::mul(gA, ginv, out_degree));
}

} // namespace logconn
