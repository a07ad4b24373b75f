#pragma once

// Tolerance-aware spectral decomposition: single-linkage eigenvalue
// clustering with an explicit refusal band, Schur form with block
// reordering, and Sylvester-equation decoupling into spectral projectors.
// Sized for desk scale (n <= 12); everything downstream builds on this.

#include <algorithm>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "logconn/types.hpp"

namespace logconn {

struct SpectralCluster {
    complexd eigenvalue;  // cluster representative (mean of members)
    int multiplicity = 0;
    CMatrix projector;    // spectral projector onto the generalized eigenspace
};

struct SpectralData {
    std::vector<SpectralCluster> clusters;
    CMatrix nilpotent;  // M - sum lambda_k P_k; commutes with every P_k
    double tol = default_tol;
};

namespace detail {

// Single-linkage clustering of complex points with linking radius tol.
// Any pair strictly inside (tol, 2*tol) is refused: no clustering at this
// radius is stable against perturbations of size ~tol.
struct PointClustering {
    std::vector<int> assignment;       // point index -> cluster index
    std::vector<complexd> reps;        // cluster means
    std::vector<int> sizes;
};

inline PointClustering cluster_points(const std::vector<complexd>& pts, double tol,
                                      const char* what) {
    const int n = static_cast<int>(pts.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = std::abs(pts[i] - pts[j]);
            if (d > tol && d < 2.0 * tol)
                throw ClusterAmbiguity(std::string(what) +
                                       ": eigenvalue pair in the ambiguous band (tol, 2*tol)");
        }
    // union-find over links of length <= tol
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(pts[i] - pts[j]) <= tol) parent[find(i)] = find(j);

    PointClustering out;
    out.assignment.assign(n, -1);
    std::vector<int> root_to_cluster(n, -1);
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        if (root_to_cluster[r] < 0) {
            root_to_cluster[r] = static_cast<int>(out.reps.size());
            out.reps.push_back(complexd{0, 0});
            out.sizes.push_back(0);
        }
        int c = root_to_cluster[r];
        out.assignment[i] = c;
        out.reps[c] += pts[i];
        out.sizes[c] += 1;
    }
    for (size_t c = 0; c < out.reps.size(); ++c) out.reps[c] /= double(out.sizes[c]);

    // deterministic cluster order: lexicographic by (Re, Im) of the mean
    const int k = static_cast<int>(out.reps.size());
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (out.reps[a].real() != out.reps[b].real())
            return out.reps[a].real() < out.reps[b].real();
        return out.reps[a].imag() < out.reps[b].imag();
    });
    std::vector<int> rank(k);
    for (int i = 0; i < k; ++i) rank[order[i]] = i;
    std::vector<complexd> reps2(k);
    std::vector<int> sizes2(k);
    for (int c = 0; c < k; ++c) {
        reps2[rank[c]] = out.reps[c];
        sizes2[rank[c]] = out.sizes[c];
    }
    out.reps = std::move(reps2);
    out.sizes = std::move(sizes2);
    for (int i = 0; i < n; ++i) out.assignment[i] = rank[out.assignment[i]];

    // cluster representatives must themselves be separated, or the
    // SpectralData invariant (> 2*tol separation) is unenforceable
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            if (std::abs(out.reps[a] - out.reps[b]) <= 2.0 * tol)
                throw ClusterAmbiguity(std::string(what) +
                                       ": cluster representatives closer than 2*tol");
    return out;
}

// Swap the two diagonal entries of an upper-triangular 2x2 block by a
// unitary similarity (the complex ztrexc step). T is modified in place on
// rows/cols (k, k+1); Q accumulates the similarity.
inline void schur_swap_adjacent(CMatrix& T, CMatrix& Q, Eigen::Index k) {
    const complexd a = T(k, k), b = T(k, k + 1), d = T(k + 1, k + 1);
    // eigenvector of [[a,b],[0,d]] for eigenvalue d is (b, d-a)
    complexd v1 = b, v2 = d - a;
    const double nv = std::sqrt(std::norm(v1) + std::norm(v2));
    if (nv == 0.0) return;  // identical entries, nothing to swap
    v1 /= nv;
    v2 /= nv;
    Eigen::Matrix2cd G;
    G << v1, -std::conj(v2), v2, std::conj(v1);
    const Eigen::Index n = T.rows();
    T.block(k, 0, 2, n) = G.adjoint() * T.block(k, 0, 2, n);
    T.block(0, k, n, 2) = T.block(0, k, n, 2) * G;
    Q.block(0, k, n, 2) = Q.block(0, k, n, 2) * G;
    T(k + 1, k) = 0.0;  // structurally zero; kill roundoff
}

// Solve the triangular Sylvester equation T11 X - X T22 = C column by column.
// T11 (p x p) and T22 (q x q) upper triangular with disjoint spectra.
inline CMatrix sylvester_triangular(const CMatrix& T11, const CMatrix& T22, const CMatrix& C) {
    const Eigen::Index p = T11.rows(), q = T22.rows();
    CMatrix X(p, q);
    for (Eigen::Index j = 0; j < q; ++j) {
        Eigen::VectorXcd rhs = C.col(j);
        for (Eigen::Index i = 0; i < j; ++i) rhs += X.col(i) * T22(i, j);
        CMatrix Tshift = T11 - T22(j, j) * CMatrix::Identity(p, p);
        X.col(j) = Tshift.triangularView<Eigen::Upper>().solve(rhs);
    }
    return X;
}

// Schur-based block diagonalization: M = Z * blockdiag(B_1..B_k) * Z^-1 with
// one (upper-triangular) block per eigenvalue cluster. The columns of Z
// spanning block c form a basis of that cluster's generalized eigenspace.
struct Decoupling {
    CMatrix Z, Zinv;
    CMatrix D;                     // block diagonal, upper triangular
    std::vector<complexd> lambda;  // cluster representatives, one per block
    std::vector<int> offset, size;
};

inline Decoupling decouple(const CMatrix& M, double tol, const char* what) {
    require_square(M, what);
    require_finite(M, what);
    const Eigen::Index n = M.rows();

    Eigen::ComplexSchur<CMatrix> schur(M, true);
    if (schur.info() != Eigen::Success)
        throw Error(std::string(what) + ": Schur decomposition failed");
    CMatrix T = schur.matrixT();
    CMatrix Q = schur.matrixU();

    std::vector<complexd> eigs(n);
    for (Eigen::Index i = 0; i < n; ++i) eigs[i] = T(i, i);
    PointClustering cl = cluster_points(eigs, tol, what);
    const int k = static_cast<int>(cl.reps.size());

    // bubble the Schur form until cluster members are contiguous and ordered;
    // selection sort with adjacent unitary swaps keeps T triangular
    std::vector<int> key(n);
    for (Eigen::Index i = 0; i < n; ++i) key[i] = cl.assignment[i];
    for (Eigen::Index target = 0; target < n; ++target) {
        Eigen::Index best = target;
        for (Eigen::Index i = target + 1; i < n; ++i)
            if (key[i] < key[best]) best = i;
        for (Eigen::Index i = best; i > target; --i) {
            schur_swap_adjacent(T, Q, i - 1);
            std::swap(key[i - 1], key[i]);
        }
    }

    Decoupling dec;
    dec.lambda.assign(cl.reps.begin(), cl.reps.end());
    dec.offset.resize(k);
    dec.size.resize(k);
    {
        int off = 0;
        for (int c = 0; c < k; ++c) {
            dec.offset[c] = off;
            dec.size[c] = cl.sizes[c];
            off += cl.sizes[c];
        }
    }

    // annihilate the coupling blocks above the diagonal blocks, cluster by
    // cluster, with unit upper-triangular similarities I + X
    CMatrix V = CMatrix::Identity(n, n);
    for (int c = 0; c < k - 1; ++c) {
        const Eigen::Index o = dec.offset[c], p = dec.size[c];
        const Eigen::Index o2 = o + p, q = n - o2;
        CMatrix T11 = T.block(o, o, p, p);
        CMatrix T22 = T.block(o2, o2, q, q);
        CMatrix C = -T.block(o, o2, p, q);
        CMatrix X = sylvester_triangular(T11, T22, C);
        // T <- W^-1 T W and V <- V W for W = I + embedded X
        T.block(o, o2, p, q) += T11 * X - X * T22;  // becomes ~0
        // rows above o also feel the similarity
        if (o > 0) {
            T.block(0, o2, o, q) += T.block(0, o, o, p) * X;
        }
        V.block(0, o2, o2, q) += V.block(0, o, o2, p) * X;
        T.block(o, o2, p, q).setZero();
    }

    dec.Z = Q * V;
    // V is unit upper triangular: invert by triangular solve
    dec.Zinv = V.triangularView<Eigen::Upper>().solve(CMatrix::Identity(n, n)) * Q.adjoint();
    dec.D = T;
    return dec;
}

} // namespace detail

// Clustered eigenvalues with spectral projectors onto generalized
// eigenspaces: M = sum lambda_k P_k + nilpotent, nilpotent commuting with
// each P_k. Refuses (ClusterAmbiguity) when the spectrum cannot be
// clustered stably at radius tol.
inline SpectralData spectral_decompose(const CMatrix& M, double tol = default_tol) {
    if (tol <= 0.0) throw Error("spectral_decompose: tol must be positive");
    detail::Decoupling dec = detail::decouple(M, tol, "spectral_decompose");
    const Eigen::Index n = M.rows();
    SpectralData sd;
    sd.tol = tol;
    CMatrix S = CMatrix::Zero(n, n);
    for (size_t c = 0; c < dec.lambda.size(); ++c) {
        SpectralCluster cl;
        cl.eigenvalue = dec.lambda[c];
        cl.multiplicity = dec.size[c];
        CMatrix E = CMatrix::Zero(n, n);
        for (int i = 0; i < dec.size[c]; ++i) E(dec.offset[c] + i, dec.offset[c] + i) = 1.0;
        cl.projector = dec.Z * E * dec.Zinv;
        S += cl.eigenvalue * cl.projector;
        sd.clusters.push_back(std::move(cl));
    }
    sd.nilpotent = M - S;
    return sd;
}

} // namespace logconn
