#pragma once

// The ad(S)-weight decomposition of gl(n) for a semisimple S, and the
// subalgebras built from it: the resonance algebra u_N(S), the parabolic
// pair Lie P(a) / Lie U(a), the Levi projection chi, group membership
// tests, and the intertwiner algebra V(A) = c(A) + u_N(S).

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "logconn/jordan.hpp"
#include "logconn/matfun.hpp"
#include "logconn/spectral.hpp"
#include "logconn/types.hpp"

namespace logconn {

struct WeightCluster {
    complexd weight;
    std::vector<std::pair<int, int>> pairs;  // (i,j) with lambda_i - lambda_j ~ weight
};

struct WeightGrading {
    CMatrix S;
    std::vector<complexd> eigenvalues;
    std::vector<CMatrix> projectors;
    std::vector<WeightCluster> weights;  // lexicographic in (Re, Im)
    double tol = default_tol;

    CMatrix component(const CMatrix& X, size_t widx) const {
        CMatrix out = CMatrix::Zero(X.rows(), X.cols());
        for (auto [i, j] : weights[widx].pairs) out += projectors[i] * X * projectors[j];
        return out;
    }

    // index of the weight cluster within tol of w, or -1
    int weight_index(complexd w) const {
        int best = -1;
        double bestd = tol;
        for (size_t k = 0; k < weights.size(); ++k) {
            const double d = std::abs(weights[k].weight - w);
            if (d <= bestd) {
                bestd = d;
                best = static_cast<int>(k);
            }
        }
        return best;
    }

    CMatrix component_at(const CMatrix& X, complexd w) const {
        const int k = weight_index(w);
        if (k < 0) return CMatrix::Zero(X.rows(), X.cols());
        return component(X, static_cast<size_t>(k));
    }
};

inline WeightGrading grade(const CMatrix& S, double tol = default_tol) {
    require_square(S, "grade");
    SpectralData sd = spectral_decompose(S, tol);
    const double nn = fnorm(sd.nilpotent);
    if (nn > tol * std::max(1.0, fnorm(S)))
        throw NotSemisimple("grade: nilpotent part has norm " + std::to_string(nn));

    WeightGrading g;
    g.tol = tol;
    const size_t k = sd.clusters.size();
    g.S = CMatrix::Zero(S.rows(), S.cols());
    for (const auto& c : sd.clusters) {
        g.eigenvalues.push_back(c.eigenvalue);
        g.projectors.push_back(c.projector);
        g.S += c.eigenvalue * c.projector;
    }

    std::vector<complexd> diffs;
    std::vector<std::pair<int, int>> tags;
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            diffs.push_back(i == j ? complexd{0.0, 0.0} : g.eigenvalues[i] - g.eigenvalues[j]);
            tags.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    detail::PointClustering cl = detail::cluster_points(diffs, tol, "grade (weights)");
    g.weights.resize(cl.reps.size());
    for (size_t w = 0; w < cl.reps.size(); ++w) g.weights[w].weight = cl.reps[w];
    for (size_t d = 0; d < diffs.size(); ++d)
        g.weights[cl.assignment[d]].pairs.push_back(tags[d]);
    return g;
}

struct SubalgebraBasis {
    std::vector<CMatrix> basis;
    std::string label;
};

namespace detail {

// orthonormal bases of range(P) and range(P^H) for a (possibly oblique)
// projector P; singular values of a projector are either >= 1 or 0
inline void projector_ranges(const CMatrix& P, CMatrix& left, CMatrix& right) {
    Eigen::JacobiSVD<CMatrix> svd(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
    int r = 0;
    while (r < svd.singularValues().size() && svd.singularValues()(r) > 0.5) ++r;
    left = svd.matrixU().leftCols(r);
    right = svd.matrixV().leftCols(r);
}

// rank-1 spanning set {u v^H} of the weight component space P_i X P_j
inline void pair_basis(const CMatrix& Pi, const CMatrix& Pj, std::vector<CMatrix>& out) {
    CMatrix Ui, Vi, Uj, Vj;
    projector_ranges(Pi, Ui, Vi);
    projector_ranges(Pj, Uj, Vj);
    for (Eigen::Index a = 0; a < Ui.cols(); ++a)
        for (Eigen::Index b = 0; b < Vj.cols(); ++b)
            out.push_back(Ui.col(a) * Vj.col(b).adjoint());
}

// positive-integer recognition with a refusal band: inside tol of an
// integer >= 1 counts, between tol and 2 tol is ambiguous
inline bool positive_integer_weight(complexd w, double tol, const char* what) {
    const double k = std::round(w.real());
    const double dist = std::abs(w - complexd{k, 0.0});
    if (k >= 0.5 && dist <= tol) return true;
    if (k >= 0.5 && dist < 2.0 * tol)
        throw ClusterAmbiguity(std::string(what) + ": weight within (" + std::to_string(tol) +
                               ", " + std::to_string(2.0 * tol) + ") of integer " +
                               std::to_string(static_cast<long long>(k)));
    return false;
}

} // namespace detail

struct ResonanceData {
    SubalgebraBasis algebra;  // label u_N(S)
    bool resonant = false;
};

inline ResonanceData resonance_basis(const CMatrix& S, double tol = default_tol) {
    WeightGrading g = grade(S, tol);
    ResonanceData out;
    out.algebra.label = "u_N(S)";
    for (const auto& wc : g.weights) {
        if (!detail::positive_integer_weight(wc.weight, tol, "resonance_basis")) continue;
        for (auto [i, j] : wc.pairs)
            detail::pair_basis(g.projectors[i], g.projectors[j], out.algebra.basis);
    }
    out.resonant = !out.algebra.basis.empty();
    return out;
}

inline std::pair<SubalgebraBasis, SubalgebraBasis> parabolic_data(const CMatrix& a,
                                                                  double tol = default_tol) {
    WeightGrading g = grade(a, tol);
    const double scale = std::max(1.0, fnorm(a));
    for (complexd lam : g.eigenvalues)
        if (std::abs(lam.imag()) > tol * scale)
            throw NotRealSemisimple("parabolic_data: eigenvalue " + std::to_string(lam.real()) +
                                    "+" + std::to_string(lam.imag()) + "i is not real");
    SubalgebraBasis P{{}, "Lie P(a)"}, U{{}, "Lie U(a)"};
    for (const auto& wc : g.weights) {
        if (wc.weight.real() < -tol) continue;
        const bool positive = wc.weight.real() > tol;
        for (auto [i, j] : wc.pairs) {
            detail::pair_basis(g.projectors[i], g.projectors[j], P.basis);
            if (positive) detail::pair_basis(g.projectors[i], g.projectors[j], U.basis);
        }
    }
    return {std::move(P), std::move(U)};
}

// Levi projection: the weight-0 component of M, defined when M has no
// negative-weight components (the limit z^a M z^-a as z -> 0)
inline CMatrix chi(const CMatrix& S_or_a, const CMatrix& M, double tol = default_tol) {
    WeightGrading g = grade(S_or_a, tol);
    const double scale = std::max(1.0, fnorm(M));
    CMatrix zero_part;
    for (size_t w = 0; w < g.weights.size(); ++w) {
        const complexd wt = g.weights[w].weight;
        if (wt == complexd{0.0, 0.0}) {
            zero_part = g.component(M, w);
            continue;
        }
        if (std::abs(wt.real()) <= g.tol)
            throw ClusterAmbiguity("chi: weight with vanishing real part cannot be classified");
        if (wt.real() < 0.0) {
            const double leak = fnorm(g.component(M, w));
            if (leak > tol * scale)
                throw NotInParabolic("chi: negative-weight component has norm " +
                                     std::to_string(leak));
        }
    }
    if (zero_part.size() == 0) zero_part = CMatrix::Zero(M.rows(), M.cols());
    return zero_part;
}

enum class Group { C_S, C_exp2piiS, P_a, U_a, CU_N };

struct MembershipResult {
    bool member = false;
    double residual = 0.0;
};

inline MembershipResult membership(const CMatrix& S_or_a, const CMatrix& M, Group group,
                                   double tol = default_tol) {
    require_square(M, "membership");
    MembershipResult out;
    const double mscale = std::max(1.0, fnorm(M));

    if (group == Group::C_S || group == Group::C_exp2piiS) {
        const CMatrix ref = group == Group::C_S ? S_or_a : mat_exp(two_pi_i * S_or_a);
        out.residual = fnorm(M * ref - ref * M) / std::max(1.0, fnorm(M) * fnorm(ref));
        out.member = out.residual <= tol;
        return out;
    }

    WeightGrading g = grade(S_or_a, tol);
    if (group == Group::P_a || group == Group::U_a) {
        const double ascale = std::max(1.0, fnorm(S_or_a));
        for (complexd lam : g.eigenvalues)
            if (std::abs(lam.imag()) > tol * ascale)
                throw NotRealSemisimple("membership: parabolic groups need a real spectrum");
    }
    CMatrix forbidden = CMatrix::Zero(M.rows(), M.cols());
    CMatrix levi = CMatrix::Zero(M.rows(), M.cols());
    const CMatrix base = group == Group::U_a ? CMatrix(M - cidentity(M.rows())) : M;
    for (size_t w = 0; w < g.weights.size(); ++w) {
        const complexd wt = g.weights[w].weight;
        bool allowed = false;
        switch (group) {
            case Group::P_a: allowed = wt.real() > -g.tol; break;
            case Group::U_a: allowed = wt.real() > g.tol; break;
            case Group::CU_N:
                allowed = wt == complexd{0.0, 0.0} ||
                          detail::positive_integer_weight(wt, g.tol, "membership");
                break;
            default: break;
        }
        if (wt == complexd{0.0, 0.0}) levi = g.component(base, w);
        if (!allowed) forbidden += g.component(base, w);
    }
    out.residual = fnorm(forbidden) / mscale;
    out.member = out.residual <= tol;
    if (out.member && (group == Group::P_a || group == Group::CU_N)) {
        // group elements additionally need an invertible Levi part
        Eigen::JacobiSVD<CMatrix> svd(levi);
        const double smin = svd.singularValues()(svd.singularValues().size() - 1);
        if (smin <= tol * std::max(1.0, svd.singularValues()(0))) out.member = false;
    }
    return out;
}

inline SubalgebraBasis intertwiner_algebra(const CMatrix& A, double tol = default_tol) {
    require_square(A, "intertwiner_algebra");
    const Eigen::Index n = A.rows();
    const Eigen::Index N2 = n * n;

    // centralizer c(A): nullspace of X -> X A - A X
    CMatrix K = CMatrix::Zero(N2, N2);
    for (Eigen::Index col = 0; col < N2; ++col) {
        CMatrix G = CMatrix::Zero(n, n);
        G(col % n, col / n) = 1.0;
        CMatrix R = G * A - A * G;
        K.col(col) = Eigen::Map<Eigen::VectorXcd>(R.data(), N2);
    }
    Eigen::JacobiSVD<CMatrix> svd(K, Eigen::ComputeThinV);
    const double thr = tol * std::max(1.0, 2.0 * fnorm(A));
    SubalgebraBasis V;
    V.label = "V(A)";
    for (Eigen::Index i = 0; i < N2; ++i)
        if (svd.singularValues()(i) <= thr) {
            Eigen::VectorXcd v = svd.matrixV().col(i);
            V.basis.push_back(Eigen::Map<CMatrix>(v.data(), n, n));
        }

    AdditiveJC jc = additive_jc(A, tol);
    ResonanceData res = resonance_basis(jc.S, tol);
    // c(A) is purely weight-0 so the union stays independent
    for (auto& B : res.algebra.basis) V.basis.push_back(std::move(B));

    // verify product closure of the span
    CMatrix B(N2, static_cast<Eigen::Index>(V.basis.size()));
    for (size_t i = 0; i < V.basis.size(); ++i)
        B.col(static_cast<Eigen::Index>(i)) =
            Eigen::Map<Eigen::VectorXcd>(V.basis[i].data(), N2);
    Eigen::HouseholderQR<CMatrix> qr(B);
    CMatrix Q = qr.householderQ() * CMatrix::Identity(N2, B.cols());
    for (const auto& X : V.basis)
        for (const auto& Y : V.basis) {
            CMatrix prod = X * Y;
            Eigen::VectorXcd v = Eigen::Map<Eigen::VectorXcd>(prod.data(), N2);
            const double leak = (v - Q * (Q.adjoint() * v)).norm();
            if (leak > 100.0 * tol * std::max(1.0, v.norm()))
                throw Error("intertwiner_algebra: span not closed under product, leak " +
                            std::to_string(leak));
        }
    return V;
}

inline bool strict_reduction_predicate(const CMatrix& h, const CMatrix& Ms, const CMatrix& S,
                                       double tol = default_tol) {
    require_square(h, "strict_reduction_predicate");
    Eigen::FullPivLU<CMatrix> lu(h);
    if (!lu.isInvertible()) throw Singular("strict_reduction_predicate: h is singular");
    const CMatrix lhs = lu.solve(Ms * h);
    return fnorm(lhs - mat_exp(two_pi_i * S)) <= tol * fnorm(Ms);
}

} // namespace logconn
