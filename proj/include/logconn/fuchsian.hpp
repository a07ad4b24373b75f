#pragma once

// Fuchsian systems ds/dz = (sum_i A_i / (z - d_i)) s on P^1: keyhole loop
// generators from a common basepoint, the global monodromy representation
// with its product relation, and per-pole local data assembled through the
// rescaled local model at each puncture.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "logconn/datum.hpp"
#include "logconn/ode.hpp"
#include "logconn/types.hpp"

namespace logconn {

struct FuchsianSystem {
    std::vector<complexd> poles;
    std::vector<CMatrix> residues;
    complexd basepoint{0.0, 0.0};
    bool basepoint_set = false;

    Eigen::Index n() const { return residues.empty() ? 0 : residues[0].rows(); }

    CMatrix eval(complexd z) const {
        CMatrix v = CMatrix::Zero(n(), n());
        for (size_t i = 0; i < poles.size(); ++i) {
            const complexd dz = z - poles[i];
            if (std::abs(dz) < 1e-12)
                throw PathThroughSingularity("FuchsianSystem: evaluation at pole " +
                                             std::to_string(i));
            v += residues[i] / dz;
        }
        return v;
    }
};

namespace detail {

// true when every straight segment from x0 to a keyhole entry point stays
// clear of the other keyhole neighborhoods (the loop_generators criterion,
// with a little margin so roundoff cannot flip the verdict)
inline bool basepoint_clear(const std::vector<complexd>& poles, complexd x0) {
    const size_t m = poles.size();
    std::vector<double> r(m);
    for (size_t i = 0; i < m; ++i) {
        double dmin = std::abs(x0 - poles[i]);
        for (size_t j = 0; j < m; ++j)
            if (j != i) dmin = std::min(dmin, std::abs(poles[i] - poles[j]));
        r[i] = dmin / 3.0;
        if (r[i] < 1e-6) return false;
    }
    for (size_t i = 0; i < m; ++i) {
        const complexd u = (x0 - poles[i]) / std::abs(x0 - poles[i]);
        const complexd entry = poles[i] + r[i] * u;
        for (size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            if (point_segment_distance(poles[j], x0, entry) < 2.1 * r[j]) return false;
        }
    }
    return true;
}

} // namespace detail

inline FuchsianSystem make_system(std::vector<complexd> poles, std::vector<CMatrix> residues) {
    FuchsianSystem sys;
    if (poles.empty() || poles.size() != residues.size())
        throw Error("make_system: need matching nonempty pole and residue lists");
    for (const auto& m : residues) {
        require_square(m, "make_system");
        require_finite(m, "make_system");
        if (m.rows() != residues[0].rows()) throw Error("make_system: mixed residue sizes");
    }
    for (size_t i = 0; i < poles.size(); ++i)
        for (size_t j = i + 1; j < poles.size(); ++j)
            if (std::abs(poles[i] - poles[j]) < 1e-9)
                throw DegenerateGeometry("make_system: poles " + std::to_string(i) + " and " +
                                         std::to_string(j) + " coincide");
    sys.poles = std::move(poles);
    sys.residues = std::move(residues);
    // default basepoint: deterministic search over a ring of viewpoints
    // around the pole cloud, keeping every approach segment clear of the
    // other keyholes; falls back to a point straight below the cloud
    double min_im = 1e300, spread = 0.0;
    complexd mean{0.0, 0.0};
    for (complexd d : sys.poles) {
        min_im = std::min(min_im, d.imag());
        mean += d;
        for (complexd e : sys.poles) spread = std::max(spread, std::abs(d - e));
    }
    mean /= double(sys.poles.size());
    const double L = std::max(1.0, spread);
    sys.basepoint = complexd{mean.real(), min_im - L};
    bool found = false;
    for (double f : {1.0, 1.6, 2.6, 4.2}) {
        for (int k = 0; k < 16 && !found; ++k) {
            const double phi = -pi / 2.0 + double(k) * pi / 8.0;
            const complexd cand = mean + f * L * std::exp(complexd{0.0, phi});
            if (detail::basepoint_clear(sys.poles, cand)) {
                sys.basepoint = cand;
                found = true;
            }
        }
        if (found) break;
    }
    return sys;
}

inline FuchsianSystem make_system(std::vector<complexd> poles, std::vector<CMatrix> residues,
                                  complexd basepoint) {
    FuchsianSystem sys = make_system(std::move(poles), std::move(residues));
    for (size_t i = 0; i < sys.poles.size(); ++i)
        if (std::abs(basepoint - sys.poles[i]) < 1e-9)
            throw DegenerateGeometry("make_system: basepoint sits on pole " + std::to_string(i));
    sys.basepoint = basepoint;
    sys.basepoint_set = true;
    return sys;
}

inline CMatrix residue_at_infinity(const FuchsianSystem& sys) {
    CMatrix v = CMatrix::Zero(sys.n(), sys.n());
    for (const auto& m : sys.residues) v += m;
    return -v;
}

struct LoopGenerators {
    std::vector<PathSpec> loops;   // circle around each pole, in product order
    std::vector<PathSpec> paths;   // approach segment from x0 to each circle
    std::vector<size_t> order;     // order[k] = input pole index of the k-th loop
    std::vector<double> radii;     // keyhole radii per input pole index
    complexd basepoint;
    double gap_angle = 0.0;        // escape direction (largest angular gap bisector)
};


inline LoopGenerators loop_generators(const FuchsianSystem& sys) {
    const size_t m = sys.poles.size();
    const complexd x0 = sys.basepoint;
    LoopGenerators gen;
    gen.basepoint = x0;
    gen.radii.resize(m);
    for (size_t i = 0; i < m; ++i) {
        double dmin = std::abs(x0 - sys.poles[i]);
        for (size_t j = 0; j < m; ++j)
            if (j != i) dmin = std::min(dmin, std::abs(sys.poles[i] - sys.poles[j]));
        gen.radii[i] = dmin / 3.0;
        if (gen.radii[i] < 1e-6)
            throw DegenerateGeometry("loop_generators: keyhole radius below 1e-6 at pole " +
                                     std::to_string(i));
    }

    // product order: ascending angle of d_i - x0, starting just past the
    // largest angular gap (the escape direction of the loop at infinity)
    std::vector<size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> ang(m);
    for (size_t i = 0; i < m; ++i) ang[i] = std::arg(sys.poles[i] - x0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        if (ang[a] != ang[b]) return ang[a] < ang[b];
        return std::abs(sys.poles[a] - x0) < std::abs(sys.poles[b] - x0);
    });
    double best_gap = -1.0;
    size_t cut = 0;
    for (size_t k = 0; k < m; ++k) {
        const double a1 = ang[idx[k]];
        const double a2 = k + 1 < m ? ang[idx[k + 1]] : ang[idx[0]] + 2.0 * pi;
        if (a2 - a1 > best_gap) {
            best_gap = a2 - a1;
            cut = k;
            gen.gap_angle = (a1 + a2) / 2.0;
        }
    }
    std::rotate(idx.begin(), idx.begin() + (cut + 1) % m, idx.end());
    gen.order = idx;

    for (size_t k = 0; k < m; ++k) {
        const size_t i = idx[k];
        const complexd d = sys.poles[i];
        const double r = gen.radii[i];
        const complexd u = (x0 - d) / std::abs(x0 - d);
        const complexd entry = d + r * u;
        // the segment must stay clear of every other keyhole disk, or the
        // loops stop being the standard generators
        for (size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            if (detail::point_segment_distance(sys.poles[j], x0, entry) < 2.0 * gen.radii[j])
                throw DegenerateGeometry(
                    "loop_generators: approach segment to pole " + std::to_string(i) +
                    " passes through the keyhole neighborhood of pole " + std::to_string(j));
        }
        gen.paths.push_back(PathSpec::polyline_path({x0, entry}));
        gen.loops.push_back(PathSpec::circle_path(d, r, 1.0, std::arg(u)));
    }
    return gen;
}

namespace detail {

// transport for ds/dz = B(z) s along a PathSpec (no 1/z weighting)
inline CMatrix fuchsian_transport(const FuchsianSystem& sys, const PathSpec& path, double rtol) {
    switch (path.kind) {
        case PathSpec::Kind::circle: {
            const double sweep = 2.0 * pi * path.turns * path.orientation;
            auto G = [&](double t) {
                const complexd e = std::exp(complexd{0.0, path.start_angle + sweep * t});
                const complexd g = path.center + path.radius * e;
                const complexd dg = complexd{0.0, sweep} * path.radius * e;
                return CMatrix(dg * sys.eval(g));
            };
            return integrate_linear(G, 0.0, 1.0, sys.n(), rtol);
        }
        case PathSpec::Kind::polyline: {
            std::vector<complexd> pts = path.points;
            if (path.orientation < 0) std::reverse(pts.begin(), pts.end());
            CMatrix F = cidentity(sys.n());
            for (size_t s = 0; s + 1 < pts.size(); ++s) {
                auto G = [&](double t) {
                    const complexd g = pts[s] + t * (pts[s + 1] - pts[s]);
                    return CMatrix((pts[s + 1] - pts[s]) * sys.eval(g));
                };
                F = integrate_linear(G, 0.0, 1.0, sys.n(), rtol) * F;
            }
            return F;
        }
        default:
            throw Error("fuchsian_transport: unsupported path kind");
    }
}

} // namespace detail

struct GlobalMonodromy {
    LoopGenerators gens;
    std::vector<CMatrix> M;  // aligned with gens.order (product order)
    CMatrix M_inf;           // independently transported loop at infinity
    double product_residual = 0.0;  // || M_inf M_m ... M_1 - I ||
};

inline GlobalMonodromy global_monodromy(const FuchsianSystem& sys, double rtol = default_rtol) {
    GlobalMonodromy out;
    out.gens = loop_generators(sys);
    const size_t m = sys.poles.size();
    for (size_t k = 0; k < m; ++k) {
        const CMatrix T = detail::fuchsian_transport(sys, out.gens.paths[k], rtol);
        const CMatrix C = detail::fuchsian_transport(sys, out.gens.loops[k], rtol);
        out.M.push_back(T.inverse() * C * T);
    }

    // loop at infinity: escape through the angular gap to a circle that
    // encloses every pole, traversed clockwise
    const complexd x0 = sys.basepoint;
    double R = 1.0;
    for (complexd d : sys.poles) R = std::max(R, 2.0 * std::abs(d - x0) + 1.0);
    const complexd far = x0 + R * std::exp(complexd{0.0, out.gens.gap_angle});
    const CMatrix T = detail::fuchsian_transport(
        sys, PathSpec::polyline_path({x0, far}), rtol);
    const CMatrix C = detail::fuchsian_transport(
        sys, PathSpec::circle_path(x0, R, 1.0, out.gens.gap_angle, -1), rtol);
    out.M_inf = T.inverse() * C * T;

    CMatrix P = cidentity(sys.n());
    for (size_t k = 0; k < m; ++k) P = out.M[k] * P;
    P = out.M_inf * P;
    out.product_residual = fnorm(P - cidentity(sys.n()));
    return out;
}

// local model at pole i in the coordinate w = (z - d_i) / r_i:
// w ds/dw = (A_i - sum_{k>=1} [sum_{j!=i} A_j (r_i/delta_j)^k] w^k) s,
// convergent for |w| < 3 since r_i <= dist(d_i, d_j)/3
inline PolyConnection local_model(const FuchsianSystem& sys, size_t i, double radius,
                                  int degree = 40) {
    const Eigen::Index n = sys.n();
    std::vector<CMatrix> coeffs(degree + 1, CMatrix::Zero(n, n));
    coeffs[0] = sys.residues[i];
    for (size_t j = 0; j < sys.poles.size(); ++j) {
        if (j == i) continue;
        const complexd ratio = radius / (sys.poles[j] - sys.poles[i]);
        complexd pw = 1.0;
        for (int k = 1; k <= degree; ++k) {
            pw *= ratio;
            coeffs[k] -= pw * sys.residues[j];
        }
    }
    return PolyConnection(std::move(coeffs));
}

struct PoleReport {
    size_t pole_index = 0;          // input index
    complexd pole;
    CMatrix M;                      // keyhole monodromy
    CMatrix h;                      // frame with h^-1 M h in C x U_N(S_i)
    ValidationReport validation;
    double charpoly_residual = 0.0; // spectra of M vs exp(2 pi i A_i)
    bool search_failed = false;
    std::string message;
};

struct GlobalReport {
    GlobalMonodromy monodromy;
    std::vector<PoleReport> poles;  // in product order
    CMatrix A_infinity;
    double tol = default_tol;
};

namespace detail {

// monic characteristic polynomial coefficients from eigenvalues
inline Eigen::VectorXcd charpoly(const CMatrix& M) {
    Eigen::ComplexEigenSolver<CMatrix> es(M);
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(M.rows() + 1);
    c(0) = 1.0;
    for (Eigen::Index k = 0; k < M.rows(); ++k) {
        const complexd lam = es.eigenvalues()(k);
        for (Eigen::Index j = k + 1; j >= 1; --j) c(j) = c(j) - lam * c(j - 1);
    }
    return c;
}

} // namespace detail

inline GlobalReport assemble_global_datum(const FuchsianSystem& sys, double rtol = default_rtol,
                                          double tol = default_tol) {
    GlobalReport rep;
    rep.tol = tol;
    rep.monodromy = global_monodromy(sys, rtol);
    rep.A_infinity = residue_at_infinity(sys);
    const double vtol = std::max(tol, monodromy_cluster_tol(sys.n(), rtol));

    for (size_t k = 0; k < sys.poles.size(); ++k) {
        const size_t i = rep.monodromy.gens.order[k];
        PoleReport pr;
        pr.pole_index = i;
        pr.pole = sys.poles[i];
        pr.M = rep.monodromy.M[k];

        const Eigen::VectorXcd c1 = detail::charpoly(pr.M);
        const Eigen::VectorXcd c2 = detail::charpoly(mat_exp(two_pi_i * sys.residues[i]));
        pr.charpoly_residual = (c1 - c2).norm() / std::max(1.0, c2.norm());

        try {
            const double r = rep.monodromy.gens.radii[i];
            PolyConnection loc = local_model(sys, i, r);
            MonodromyDatum dloc = functor_L(loc, rtol);
            // the keyhole circle is based at w = e^{i theta0} in the local
            // coordinate; move the local frame there and out to x0
            const double theta0 = std::arg(sys.basepoint - sys.poles[i]);
            CMatrix F = cidentity(sys.n());
            if (theta0 != 0.0)
                F = transport(loc, PathSpec::circle_path(0.0, 1.0, theta0 / (2.0 * pi)),
                              std::min(rtol, 1e-12));
            const CMatrix T =
                detail::fuchsian_transport(sys, rep.monodromy.gens.paths[k], rtol);
            pr.h = T.inverse() * F * dloc.h;
            MonodromyDatum d{pr.M, pr.h, sys.residues[i]};
            pr.validation = validate_datum(d, vtol);
            if (!pr.validation.pass) {
                pr.search_failed = true;
                pr.message = "validation residuals above tol: " + pr.validation.message;
            }
        } catch (const Error& e) {
            pr.search_failed = true;
            pr.message = std::string("local assembly failed: ") + e.what();
        }
        rep.poles.push_back(std::move(pr));
    }
    return rep;
}

} // namespace logconn
