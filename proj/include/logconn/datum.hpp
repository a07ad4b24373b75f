#pragma once

// Generalized monodromy data (M, h, A) and the two classification functors:
// L extracts a datum from a connection (monodromy + strict linearization
// frame + residue), R rebuilds the Levelt normal form from a datum.
// Equivalence of data is decided under conjugation by the invertible
// elements of V(A) = c(A) + u_N(S).

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "logconn/conjugacy.hpp"
#include "logconn/grading.hpp"
#include "logconn/local.hpp"
#include "logconn/types.hpp"

namespace logconn {

struct MonodromyDatum {
    CMatrix M;  // monodromy, invertible
    CMatrix h;  // trivialization frame, invertible
    CMatrix A;  // residue
};

struct DatumParts {
    CMatrix S, N;  // additive JC of A
    CMatrix a, b;  // real/imag split of S
};

inline DatumParts datum_parts(const MonodromyDatum& d, double tol = default_tol) {
    DatumParts p;
    AdditiveJC jc = additive_jc(d.A, tol);
    p.S = jc.S;
    p.N = jc.N;
    RealImagSplit ri = real_imag_split(p.S, tol);
    p.a = ri.a;
    p.b = ri.b;
    return p;
}

struct ValidationReport {
    bool pass = false;
    double weight_support_residual = 0.0;  // (i) support of h^-1 M h in {0} u N
    double chi_residual = 0.0;             // (ii) chi(h^-1 M h) vs exp(2 pi i A)
    double semisimple_residual = 0.0;      // (iii) (h^-1 M h)_s vs exp(2 pi i S)
    std::string message;
};

namespace detail {

inline void require_invertible(const CMatrix& m, const char* what) {
    Eigen::FullPivLU<CMatrix> lu(m);
    if (!lu.isInvertible()) throw Singular(std::string(what) + ": matrix is singular");
}

} // namespace detail

inline ValidationReport validate_datum(const MonodromyDatum& d, double tol = default_tol) {
    require_square(d.M, "validate_datum");
    detail::require_invertible(d.M, "validate_datum (M)");
    detail::require_invertible(d.h, "validate_datum (h)");
    const CMatrix Mp = d.h.fullPivLu().solve(d.M * d.h);
    AdditiveJC jc = additive_jc(d.A, tol);
    WeightGrading g = grade(jc.S, tol);

    ValidationReport rep;
    const double mscale = std::max(1.0, fnorm(Mp));
    CMatrix forbidden = CMatrix::Zero(d.M.rows(), d.M.cols());
    CMatrix levi = CMatrix::Zero(d.M.rows(), d.M.cols());
    for (size_t w = 0; w < g.weights.size(); ++w) {
        const complexd wt = g.weights[w].weight;
        if (wt == complexd{0.0, 0.0}) {
            levi = g.component(Mp, w);
            continue;
        }
        if (!detail::positive_integer_weight(wt, tol, "validate_datum"))
            forbidden += g.component(Mp, w);
    }
    rep.weight_support_residual = fnorm(forbidden) / mscale;

    const CMatrix E = mat_exp(two_pi_i * d.A);
    rep.chi_residual = fnorm(levi - E) / std::max(1.0, fnorm(E));

    const CMatrix Es = mat_exp(two_pi_i * jc.S);
    const CMatrix Ms = multiplicative_jc(Mp, tol).Ms;
    rep.semisimple_residual = fnorm(Ms - Es) / std::max(1.0, fnorm(Es));

    rep.pass = rep.weight_support_residual <= tol && rep.chi_residual <= tol &&
               rep.semisimple_residual <= tol;
    if (!rep.pass)
        rep.message = "residuals (support, chi, semisimple) = (" +
                      std::to_string(rep.weight_support_residual) + ", " +
                      std::to_string(rep.chi_residual) + ", " +
                      std::to_string(rep.semisimple_residual) + ") vs tol " +
                      std::to_string(tol);
    return rep;
}

// Levelt normal form A(z) = A + sum_{i>=1} N_i z^i where the N_i are the
// positive-integer-weight components of (1/2 pi i) log of the unipotent
// factor of h^-1 M h
inline PolyConnection functor_R(const MonodromyDatum& d, double tol = default_tol) {
    ValidationReport rep = validate_datum(d, tol);
    if (!rep.pass) throw ValidationFailure("functor_R: " + rep.message);

    const CMatrix Mp = d.h.fullPivLu().solve(d.M * d.h);
    AdditiveJC jc = additive_jc(d.A, tol);
    MultiplicativeJC mjc = multiplicative_jc(Mp, tol);
    const CMatrix Np = nilpotent_log(mjc.Mu, tol) / two_pi_i;

    WeightGrading g = grade(jc.S, tol);
    const Eigen::Index n = d.A.rows();
    std::vector<CMatrix> coeffs{d.A};
    CMatrix recovered = CMatrix::Zero(n, n);
    for (size_t w = 0; w < g.weights.size(); ++w) {
        const complexd wt = g.weights[w].weight;
        int k = 0;
        if (wt == complexd{0.0, 0.0})
            k = 0;
        else if (detail::positive_integer_weight(wt, tol, "functor_R"))
            k = static_cast<int>(std::llround(wt.real()));
        else
            continue;
        const CMatrix comp = g.component(Np, w);
        recovered += comp;
        if (k == 0) {
            if (fnorm(comp - jc.N) > tol * std::max(1.0, fnorm(jc.N)))
                throw ValidationFailure(
                    "functor_R: weight-0 part of log M'_u differs from nilpotent part of A");
            continue;
        }
        if (static_cast<size_t>(k) >= coeffs.size())
            coeffs.resize(static_cast<size_t>(k) + 1, CMatrix::Zero(n, n));
        coeffs[static_cast<size_t>(k)] += comp;
    }
    const double leak = fnorm(Np - recovered);
    if (leak > tol * std::max(1.0, fnorm(Np)))
        throw WeightLeak("functor_R: non-integer-weight components of log M'_u, norm " +
                         std::to_string(leak));
    return PolyConnection(std::move(coeffs));
}

// the classification functor from connections to data: monodromy, residue,
// and the strict linearization frame of the semisimplified connection
inline MonodromyDatum functor_L(const PolyConnection& conn, double rtol = default_rtol,
                                int order = 25, double gauge_tol = 1e-6) {
    MonodromyDatum d;
    d.M = monodromy(conn, std::min(rtol, 1e-12));
    d.A = residue(conn);
    GaugeSeries g = poincare_gauge(conn, order, GaugeMode::semisimple_strict, gauge_tol, rtol);
    d.h = series::eval(g.coeffs, complexd{1.0, 0.0});
    return d;
}

struct DatumInvariants {
    std::vector<std::pair<complexd, int>> spectrum_A;  // clustered, with multiplicities
    std::vector<EigStructure> weyr_A;
    std::vector<EigStructure> weyr_M;
    std::vector<EigStructure> weyr_Mu;                  // of the unipotent factor of h^-1 M h
    std::vector<std::pair<int, int>> resonance_dims;    // (weight k, dim of u_k(S))
};

inline DatumInvariants datum_invariants(const MonodromyDatum& d, double tol = default_tol) {
    DatumInvariants inv;
    SpectralData sd = spectral_decompose(d.A, tol);
    for (const auto& c : sd.clusters) inv.spectrum_A.emplace_back(c.eigenvalue, c.multiplicity);
    inv.weyr_A = eigen_structure(d.A, tol);
    inv.weyr_M = eigen_structure(d.M, tol);
    const CMatrix Mp = d.h.fullPivLu().solve(d.M * d.h);
    inv.weyr_Mu = eigen_structure(multiplicative_jc(Mp, tol).Mu, tol);

    AdditiveJC jc = additive_jc(d.A, tol);
    WeightGrading g = grade(jc.S, tol);
    for (const auto& wc : g.weights) {
        if (!detail::positive_integer_weight(wc.weight, tol, "datum_invariants")) continue;
        int dim = 0;
        for (auto [i, j] : wc.pairs) {
            // dim of P_i gl(n) P_j = rank(P_i) rank(P_j), read off multiplicities
            Eigen::Index mi = 0, mj = 0;
            // projector trace equals its rank
            mi = static_cast<Eigen::Index>(std::llround(g.projectors[i].trace().real()));
            mj = static_cast<Eigen::Index>(std::llround(g.projectors[j].trace().real()));
            dim += static_cast<int>(mi * mj);
        }
        inv.resonance_dims.emplace_back(static_cast<int>(std::llround(wc.weight.real())), dim);
    }
    return inv;
}

inline bool invariants_match(const DatumInvariants& a, const DatumInvariants& b, double tol) {
    if (a.spectrum_A.size() != b.spectrum_A.size()) return false;
    std::vector<bool> used(b.spectrum_A.size(), false);
    for (const auto& [lam, mult] : a.spectrum_A) {
        bool found = false;
        for (size_t j = 0; j < b.spectrum_A.size(); ++j) {
            if (used[j] || b.spectrum_A[j].second != mult) continue;
            if (std::abs(b.spectrum_A[j].first - lam) <= tol) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return detail::match_structures(a.weyr_A, b.weyr_A, tol, true, nullptr) &&
           detail::match_structures(a.weyr_M, b.weyr_M, tol, true, nullptr) &&
           detail::match_structures(a.weyr_Mu, b.weyr_Mu, tol, true, nullptr) &&
           a.resonance_dims == b.resonance_dims;
}

enum class EquivVerdict { equivalent, inequivalent_certified, undecided };

struct EquivalenceResult {
    EquivVerdict verdict = EquivVerdict::undecided;
    CMatrix witness;       // X with X M'_1 = M'_2 X, invertible, when equivalent
    double residual = 0.0;
    std::string reason;
};

inline EquivalenceResult equivalent(const MonodromyDatum& d1, const MonodromyDatum& d2,
                                    int trials = 64, unsigned long seed = 0,
                                    double tol = default_tol) {
    {
        ValidationReport r1 = validate_datum(d1, tol), r2 = validate_datum(d2, tol);
        if (!r1.pass) throw ValidationFailure("equivalent: first datum invalid; " + r1.message);
        if (!r2.pass) throw ValidationFailure("equivalent: second datum invalid; " + r2.message);
    }
    EquivalenceResult out;
    if (d1.A.rows() != d2.A.rows()) {
        out.verdict = EquivVerdict::inequivalent_certified;
        out.reason = "dimension mismatch";
        return out;
    }
    const Eigen::Index n = d1.A.rows();

    // residues must be conjugate; afterwards both data are expressed over
    // the common residue d1.A (M' = h^-1 M h is frame independent)
    ConjugacyResult rc = conjugacy_test(d1.A, d2.A, tol, seed);
    if (!rc.equal_class) {
        out.verdict = EquivVerdict::inequivalent_certified;
        out.reason = "residues in distinct conjugacy classes (" + rc.reason + ")";
        return out;
    }
    const CMatrix M1p = d1.h.fullPivLu().solve(d1.M * d1.h);
    const CMatrix M2p = d2.h.fullPivLu().solve(d2.M * d2.h);

    if (fnorm(M1p - M2p) <= tol * std::max(1.0, fnorm(M2p))) {
        out.verdict = EquivVerdict::equivalent;
        out.witness = cidentity(n);
        out.residual = fnorm(M1p - M2p) / std::max(1.0, fnorm(M2p));
        return out;
    }

    SubalgebraBasis V = intertwiner_algebra(d1.A, tol);
    const Eigen::Index dimV = static_cast<Eigen::Index>(V.basis.size());
    const Eigen::Index N2 = n * n;
    CMatrix K(N2, dimV);
    for (Eigen::Index k = 0; k < dimV; ++k) {
        CMatrix R = V.basis[static_cast<size_t>(k)] * M1p - M2p * V.basis[static_cast<size_t>(k)];
        K.col(k) = Eigen::Map<Eigen::VectorXcd>(R.data(), N2);
    }
    Eigen::JacobiSVD<CMatrix> svd(K, Eigen::ComputeThinV);
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    const double thr = 10.0 * tol * std::max({1.0, fnorm(M1p), fnorm(M2p), smax / 1e6});
    std::vector<Eigen::VectorXcd> null_coeffs;
    for (Eigen::Index i = 0; i < std::min(dimV, svd.singularValues().size()); ++i)
        if (svd.singularValues()(i) <= thr) null_coeffs.push_back(svd.matrixV().col(i));
    // SVD of a wide matrix reports min(N2, dimV) singular values; extra
    // null directions live past that range
    for (Eigen::Index i = svd.singularValues().size(); i < dimV; ++i)
        null_coeffs.push_back(svd.matrixV().col(i));

    auto element = [&](const Eigen::VectorXcd& c) {
        CMatrix X = CMatrix::Zero(n, n);
        for (Eigen::Index k = 0; k < dimV; ++k) X += c(k) * V.basis[static_cast<size_t>(k)];
        return X;
    };
    auto try_witness = [&](CMatrix X) -> bool {
        const double xn = fnorm(X);
        if (!(xn > 1e-300)) return false;
        X /= xn;  // the defect is linear in X, so judge at unit norm
        Eigen::JacobiSVD<CMatrix> xs(X);
        const double rcond =
            xs.singularValues()(n - 1) / std::max(xs.singularValues()(0), 1e-300);
        if (rcond < 1e-8) return false;
        const double resid = fnorm(X * M1p - M2p * X) / std::max(fnorm(M2p * X), 1e-300);
        if (resid >= tol) return false;
        out.verdict = EquivVerdict::equivalent;
        out.witness = X;
        out.residual = resid;
        return true;
    };

    if (!null_coeffs.empty()) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int t = 0; t < trials; ++t) {
            Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dimV);
            for (const auto& b : null_coeffs) c += complexd(gauss(rng), gauss(rng)) * b;
            if (try_witness(element(c))) return out;
        }
        // deterministic grid sweep of the determinant polynomial
        const int P = 2 * static_cast<int>(null_coeffs.size()) + 5;
        for (int l = 0; l < P; ++l) {
            Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dimV);
            for (size_t b = 0; b < null_coeffs.size(); ++b)
                c += std::exp(complexd{0.0, 2.0 * pi * double((b + 1) * l) / P}) *
                     null_coeffs[b];
            if (try_witness(element(c))) return out;
        }
    }

    DatumInvariants i1 = datum_invariants(d1, tol);
    DatumInvariants i2 = datum_invariants(d2, tol);
    if (!invariants_match(i1, i2, 10.0 * tol)) {
        out.verdict = EquivVerdict::inequivalent_certified;
        out.reason = null_coeffs.empty()
                         ? "no intertwiners in V(A) and invariants differ"
                         : "no invertible intertwiner found and invariants differ";
    } else {
        out.verdict = EquivVerdict::undecided;
        out.reason = "intertwiner space contains no sampled invertible element but "
                     "invariants agree";
    }
    return out;
}

} // namespace logconn
