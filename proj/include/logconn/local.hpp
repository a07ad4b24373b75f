#pragma once

// Local analysis of z ds/dz = A(z) s: the semisimplification twist by
// log M_u, the untwisting cocycle check, linearizability, and the Poincare
// gauge recursion that produces strict linearizations.

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "logconn/conjugacy.hpp"
#include "logconn/connection.hpp"
#include "logconn/jordan.hpp"
#include "logconn/matfun.hpp"
#include "logconn/types.hpp"

namespace logconn {

// Eigenvalue clustering radius for matrices produced by integration. A
// Jordan block of size p under perturbation delta splits its eigenvalue
// by about delta^(1/p), so the radius must dominate that splitting while
// the refusal band still rejects genuinely ambiguous spectra.
inline double monodromy_cluster_tol(Eigen::Index n, double rtol) {
    const double split = std::pow(1e4 * rtol, 1.0 / double(std::max<Eigen::Index>(n, 1)));
    return std::clamp(split, 1e-7, 0.05);
}

struct SemisimplifyResult {
    PolyConnection conn_s;
    CMatrix Mu;
    bool truncation_warning = false;
    double last_coeff_ratio = 0.0;  // |C_m| / max_k |C_k| when warning fires
};

// conn_s(z) = A(z) - (1/2 pi i) log M_u(z), with log M_u recovered from
// samples of the unipotent monodromy factor on |z| = 1/2 by DFT
inline SemisimplifyResult semisimplify(const PolyConnection& conn, int out_degree,
                                       double rtol = default_rtol) {
    const Eigen::Index n = conn.n;
    // DFT coefficient error scales like (sample noise) * 2^k at radius 1/2,
    // so the sampling runs tighter than the requested rtol
    const double srtol = std::min(rtol, 1e-12);
    const double ctol = monodromy_cluster_tol(n, srtol);

    SemisimplifyResult out;
    const CMatrix M1 = monodromy(conn, srtol);
    out.Mu = multiplicative_jc(M1, ctol).Mu;

    // sample M(z_j) on |z| = 1/2 by one radial transport and incremental arcs
    const int K = 2 * (out_degree + 1);
    std::vector<CMatrix> logs;
    logs.reserve(K);
    double max_log = 0.0;
    CMatrix cur = transport(conn, PathSpec::ray_segment_path(1.0, 0.5, complexd{1.0, 0.0}), srtol);
    for (int j = 0; j < K; ++j) {
        if (j > 0) {
            const PathSpec arc =
                PathSpec::circle_path(0.0, 0.5, 1.0 / K, 2.0 * pi * (j - 1) / K);
            cur = transport(conn, arc, srtol) * cur;
        }
        const CMatrix Mj = cur * M1 * cur.inverse();
        const CMatrix Mu_j = multiplicative_jc(Mj, ctol).Mu;
        logs.push_back(nilpotent_log(Mu_j, ctol));
        max_log = std::max(max_log, fnorm(logs.back()));
    }

    std::vector<CMatrix> C(out_degree + 1, CMatrix::Zero(n, n));
    const double noise_floor = 1e3 * srtol * std::max(1.0, max_log);
    double max_coeff = 0.0;
    for (int k = 0; k <= out_degree; ++k) {
        CMatrix ck = CMatrix::Zero(n, n);
        for (int j = 0; j < K; ++j)
            ck += logs[j] * std::exp(complexd{0.0, -2.0 * pi * j * k / K});
        ck *= std::pow(2.0, k) / double(K);
        if (fnorm(ck) <= noise_floor * std::pow(2.0, k)) ck.setZero();
        C[k] = ck;
        max_coeff = std::max(max_coeff, fnorm(ck));
    }
    if (max_coeff > 0.0) {
        out.last_coeff_ratio = fnorm(C[out_degree]) / max_coeff;
        out.truncation_warning = out.last_coeff_ratio > 1e-6;
    }

    std::vector<CMatrix> coeffs(std::max<size_t>(conn.coeffs.size(), C.size()),
                                CMatrix::Zero(n, n));
    for (size_t k = 0; k < conn.coeffs.size(); ++k) coeffs[k] = conn.coeffs[k];
    for (size_t k = 0; k < C.size(); ++k) coeffs[k] -= C[k] / two_pi_i;
    while (coeffs.size() > 1 && fnorm(coeffs.back()) == 0.0) coeffs.pop_back();
    out.conn_s = PolyConnection(std::move(coeffs));
    return out;
}

// max over samples of the cocycle defect
// || sigma(mu, e^l z) Phi(mu, e^l z) sigma(l, z) - sigma(mu + l, z) Phi(mu, e^l z) ||
// with sigma(l, z) = exp(-(l / 2 pi i) log M_u(e^l z))
inline double verify_cocycle(const PolyConnection& conn, int sample_count, unsigned long seed,
                             double rtol = default_rtol) {
    const double ctol = monodromy_cluster_tol(conn.n, rtol);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto rand_lambda = [&] {
        return complexd{unit(rng), unit(rng)} / std::sqrt(2.0);
    };
    auto sigma = [&](complexd lam, complexd z) {
        const CMatrix Mu = multiplicative_jc(monodromy_at(conn, std::exp(lam) * z, rtol), ctol).Mu;
        return mat_exp(-(lam / two_pi_i) * nilpotent_log(Mu, ctol));
    };

    double worst = 0.0;
    for (int s = 0; s < sample_count; ++s) {
        const complexd lam = rand_lambda(), mu = rand_lambda();
        const complexd z = std::exp(complexd{0.0, 2.0 * pi * unit(rng)}) * (1.0 + 0.25 * unit(rng));
        const complexd w = std::exp(lam) * z;
        const CMatrix Phi = transport_arrow(conn, mu, w, rtol);
        const CMatrix lhs = sigma(mu, w) * Phi * sigma(lam, z);
        const CMatrix rhs = sigma(mu + lam, z) * Phi;
        const double denom = std::max({1.0, fnorm(lhs), fnorm(rhs)});
        worst = std::max(worst, fnorm(lhs - rhs) / denom);
    }
    return worst;
}

struct LinearizabilityResult {
    bool linearizable = false;
    ConjugacyResult conjugacy;  // monodromy(conn) vs exp(2 pi i residue)
};

inline LinearizabilityResult linearizability(const PolyConnection& conn,
                                             double rtol = default_rtol) {
    const CMatrix M = monodromy(conn, rtol);
    const CMatrix E = mat_exp(two_pi_i * residue(conn));
    LinearizabilityResult out;
    out.conjugacy = conjugacy_test(M, E, monodromy_cluster_tol(conn.n, rtol));
    out.linearizable = out.conjugacy.equal_class;
    return out;
}

enum class GaugeMode { linearize_to_residue, semisimple_strict };

struct GaugeSeries {
    std::vector<CMatrix> coeffs;  // g(z) = sum g_k z^k, g_0 = I
    int order = 0;
    std::vector<std::pair<int, int>> resonant_choices;  // (order, kernel dim)
};

// solves z g' = A g - g A_0 order by order: (k - ad A_0) g_k = sum_j A_j g_{k-j};
// resonant orders use the minimal-norm solution and record the kernel dimension
inline GaugeSeries poincare_gauge(const PolyConnection& conn_in, int order, GaugeMode mode,
                                  double tol = default_tol, double rtol = default_rtol) {
    PolyConnection conn = conn_in;
    if (mode == GaugeMode::semisimple_strict)
        conn = semisimplify(conn_in, std::max(order, conn_in.degree()), rtol).conn_s;

    const Eigen::Index n = conn.n;
    const Eigen::Index N2 = n * n;
    const CMatrix& A0 = conn.coeffs[0];
    const int d = conn.degree();

    // matrix of ad A_0 acting on vec(X), column-major
    CMatrix adA = CMatrix::Zero(N2, N2);
    for (Eigen::Index col = 0; col < N2; ++col) {
        CMatrix G = CMatrix::Zero(n, n);
        G(col % n, col / n) = 1.0;
        CMatrix R = A0 * G - G * A0;
        adA.col(col) = Eigen::Map<Eigen::VectorXcd>(R.data(), N2);
    }

    GaugeSeries g;
    g.order = order;
    g.coeffs.assign(order + 1, CMatrix::Zero(n, n));
    g.coeffs[0] = cidentity(n);
    for (int k = 1; k <= order; ++k) {
        CMatrix rhs = CMatrix::Zero(n, n);
        for (int j = 1; j <= std::min(k, d); ++j) rhs += conn.coeffs[j] * g.coeffs[k - j];
        CMatrix Lk = double(k) * CMatrix::Identity(N2, N2) - adA;
        Eigen::JacobiSVD<CMatrix> svd(Lk, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double smax = svd.singularValues()(0);
        const double thr = tol * std::max(1.0, smax);
        int kernel_dim = 0;
        for (Eigen::Index i = 0; i < N2; ++i)
            if (svd.singularValues()(i) <= thr) ++kernel_dim;
        Eigen::VectorXcd b = Eigen::Map<Eigen::VectorXcd>(rhs.data(), N2);
        Eigen::VectorXcd y = svd.matrixU().adjoint() * b;
        for (Eigen::Index i = 0; i < N2; ++i)
            y(i) = svd.singularValues()(i) > thr ? y(i) / svd.singularValues()(i) : complexd{0, 0};
        Eigen::VectorXcd x = svd.matrixV() * y;
        if (kernel_dim > 0) {
            const double incons = (Lk * x - b).norm();
            if (incons > 10.0 * std::max(tol, 1e-10) * std::max(1.0, b.norm()))
                throw ResonantObstruction("poincare_gauge: right side not in image at order " +
                                          std::to_string(k) + ", defect " +
                                          std::to_string(incons));
            g.resonant_choices.emplace_back(k, kernel_dim);
        }
        g.coeffs[k] = Eigen::Map<CMatrix>(x.data(), n, n);
    }

    // residual check at 16 points on |z| = 1/2, with the unavoidable
    // truncation tail (orders > m of z g' - A g + g A_0) subtracted
    std::vector<CMatrix> tail(order + d + 1, CMatrix::Zero(n, n));
    for (int k = order + 1; k <= order + d; ++k)
        for (int j = k - order; j <= std::min(d, k); ++j)
            tail[k] -= conn.coeffs[j] * g.coeffs[k - j];
    double worst = 0.0;
    for (int s = 0; s < 16; ++s) {
        const complexd z = 0.5 * std::exp(complexd{0.0, 2.0 * pi * s / 16.0});
        const CMatrix gz = series::eval(g.coeffs, z);
        const CMatrix zgp = series::eval(series::deriv_z(g.coeffs), z);
        const CMatrix defect = zgp - conn.eval(z) * gz + gz * A0 - series::eval(tail, z);
        worst = std::max(worst, fnorm(defect) / std::max(1.0, fnorm(gz)));
    }
    if (worst > tol)
        throw TruncationFailure("poincare_gauge: defining residual " + std::to_string(worst) +
                                " exceeds tol at order " + std::to_string(order));
    return g;
}

} // namespace logconn
