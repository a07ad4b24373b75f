#pragma once

#include <complex>

#include <unsupported/Eigen/MatrixFunctions>

#include "logconn/types.hpp"

namespace logconn {

// exp: gl(n,C) -> GL(n,C), scaling-and-squaring Pade via Eigen.
inline CMatrix mat_exp(const CMatrix& X) {
    require_square(X, "mat_exp");
    require_finite(X, "mat_exp");
    CMatrix E = X.exp();
    if (!E.allFinite()) throw NonFinite("mat_exp: overflow");
    return E;
}

// log of a unipotent matrix: the series terminates, N = sum_{k=1}^{n-1}
// (-1)^{k+1} (U-I)^k / k, and exp(N) = U exactly in exact arithmetic.
inline CMatrix nilpotent_log(const CMatrix& U, double tol = default_tol) {
    require_square(U, "nilpotent_log");
    require_finite(U, "nilpotent_log");
    const Eigen::Index n = U.rows();
    const CMatrix D = U - CMatrix::Identity(n, n);
    // unipotency check: (U-I)^n must vanish at a scale-aware tolerance
    CMatrix Dn = D;
    for (Eigen::Index k = 1; k < n; ++k) Dn = Dn * D;
    const double scale = std::max(1.0, std::pow(fnorm(D), double(n)));
    if (fnorm(Dn) > tol * scale)
        throw NotUnipotent("nilpotent_log: (U-I)^n does not vanish at this tolerance");
    CMatrix N = CMatrix::Zero(n, n);
    CMatrix P = CMatrix::Identity(n, n);
    double sign = 1.0;
    for (Eigen::Index k = 1; k <= n - 1; ++k) {
        P = P * D;
        N += (sign / double(k)) * P;
        sign = -sign;
    }
    return N;
}

// principal z^a = exp(log(z) * a), z != 0
inline CMatrix mat_zpow(complexd z, const CMatrix& a) {
    if (z == complexd{0, 0}) throw Error("mat_zpow: z must be nonzero");
    return mat_exp(std::log(z) * a);
}

} // namespace logconn
