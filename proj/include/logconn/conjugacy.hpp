#pragma once

// GL(n,C)-conjugacy testing: clustered spectra + Weyr characteristics
// decide the class; an explicit intertwiner is recovered from the
// nullspace of g -> g M1 - M2 g by seeded randomized sampling.

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "logconn/spectral.hpp"
#include "logconn/types.hpp"

namespace logconn {

// per-eigenvalue shape data: rank sequence of (M - lambda I)^k restricted to
// the cluster's generalized eigenspace, k = 1..multiplicity (the Weyr data)
struct EigStructure {
    complexd eigenvalue;
    int multiplicity = 0;
    std::vector<int> ranks;
};

inline std::vector<EigStructure> eigen_structure(const CMatrix& M, double tol = default_tol) {
    detail::Decoupling dec = detail::decouple(M, tol, "eigen_structure");
    std::vector<EigStructure> out;
    for (size_t c = 0; c < dec.lambda.size(); ++c) {
        const int p = dec.size[c];
        EigStructure es;
        es.eigenvalue = dec.lambda[c];
        es.multiplicity = p;
        CMatrix N = dec.D.block(dec.offset[c], dec.offset[c], p, p);
        for (int i = 0; i < p; ++i) N(i, i) = 0.0;  // flatten sub-tol diagonal deviations
        const double thr_scale = std::max(1.0, fnorm(N));
        CMatrix Nk = CMatrix::Identity(p, p);
        for (int k = 1; k <= p; ++k) {
            Nk = Nk * N;
            Eigen::JacobiSVD<CMatrix> svd(Nk);
            int rank = 0;
            for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
                if (svd.singularValues()(i) > tol * thr_scale * double(p)) ++rank;
            es.ranks.push_back(rank);
            if (rank == 0) break;  // later powers stay zero
        }
        out.push_back(std::move(es));
    }
    return out;
}

namespace detail {

// greedy eigenvalue matching: each cluster of `a` must own a unique partner
// in `b` within tol, with equal multiplicity
inline bool match_structures(const std::vector<EigStructure>& a,
                             const std::vector<EigStructure>& b, double tol,
                             bool compare_ranks, std::string* why) {
    if (a.size() != b.size()) {
        if (why) *why = "cluster counts differ";
        return false;
    }
    std::vector<bool> used(b.size(), false);
    for (const auto& ea : a) {
        int best = -1;
        double bestd = tol;
        for (size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(ea.eigenvalue - b[j].eigenvalue);
            if (d <= bestd) {
                bestd = d;
                best = static_cast<int>(j);
            }
        }
        if (best < 0) {
            if (why) *why = "unmatched eigenvalue cluster";
            return false;
        }
        used[best] = true;
        if (ea.multiplicity != b[best].multiplicity) {
            if (why) *why = "multiplicities differ";
            return false;
        }
        if (compare_ranks && ea.ranks != b[best].ranks) {
            if (why) *why = "Weyr characteristics differ";
            return false;
        }
    }
    return true;
}

} // namespace detail

struct ConjugacyResult {
    bool equal_class = false;
    CMatrix witness;          // g with g M1 g^-1 ~ M2, defined when equal_class
    double witness_residual = 0.0;  // ||g M1 - M2 g|| / ||M2 g||
    std::string reason;       // set when distinct
};

inline ConjugacyResult conjugacy_test(const CMatrix& M1, const CMatrix& M2,
                                      double tol = default_tol, unsigned long seed = 0,
                                      int trials = 64) {
    require_square(M1, "conjugacy_test");
    require_square(M2, "conjugacy_test");
    if (M1.rows() != M2.rows()) throw Error("conjugacy_test: dimension mismatch");
    const Eigen::Index n = M1.rows();

    ConjugacyResult res;
    std::vector<EigStructure> s1 = eigen_structure(M1, tol);
    std::vector<EigStructure> s2 = eigen_structure(M2, tol);
    std::string why;
    if (!detail::match_structures(s1, s2, tol, true, &why)) {
        res.equal_class = false;
        res.reason = why;
        return res;
    }
    res.equal_class = true;

    // cheap deterministic witness first
    if (fnorm(M1 - M2) <= tol * std::max(1.0, fnorm(M2))) {
        res.witness = CMatrix::Identity(n, n);
        res.witness_residual = fnorm(M1 - M2) / std::max(fnorm(M2), 1e-300);
        return res;
    }

    // intertwiner space: vec(g M1 - M2 g) = (M1^T (x) I - I (x) M2) vec(g)
    const Eigen::Index N2 = n * n;
    CMatrix K = CMatrix::Zero(N2, N2);
    for (Eigen::Index col = 0; col < N2; ++col) {
        CMatrix G = CMatrix::Zero(n, n);
        G(col % n, col / n) = 1.0;  // column-major unit
        CMatrix R = G * M1 - M2 * G;
        K.col(col) = Eigen::Map<Eigen::VectorXcd>(R.data(), N2);
    }
    Eigen::JacobiSVD<CMatrix> svd(K, Eigen::ComputeThinV);
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    const double thr = 10.0 * tol * std::max({1.0, fnorm(M1), fnorm(M2), smax / 1e6});
    std::vector<Eigen::VectorXcd> null_basis;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) <= thr) null_basis.push_back(svd.matrixV().col(i));
    if (null_basis.empty())  // keep the least-residual direction as a last resort
        null_basis.push_back(svd.matrixV().col(N2 - 1));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMatrix best;
    double best_rcond = -1.0;
    for (int t = 0; t < std::max(trials, 1); ++t) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(N2);
        for (const auto& b : null_basis) v += complexd(gauss(rng), gauss(rng)) * b;
        CMatrix G = Eigen::Map<CMatrix>(v.data(), n, n);
        Eigen::JacobiSVD<CMatrix> gs(G);
        const double rc = gs.singularValues()(n - 1) / std::max(gs.singularValues()(0), 1e-300);
        if (rc > best_rcond) {
            best_rcond = rc;
            best = G;
        }
        if (best_rcond > 1e-2) break;
    }
    best /= fnorm(best);
    res.witness = best;
    res.witness_residual = fnorm(best * M1 - M2 * best) / std::max(fnorm(M2 * best), 1e-300);
    return res;
}

} // namespace logconn
