#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "logconn/errors.hpp"

namespace logconn {

using complexd = std::complex<double>;

// Dense n x n complex matrix, the universal carrier for elements of
// GL(n,C) and gl(n,C). Column vectors only appear internally.
using CMatrix = Eigen::MatrixXcd;

inline constexpr double default_tol = 1e-9;   // algebraic clustering radius
inline constexpr double default_rtol = 1e-10; // ODE local relative error

inline constexpr complexd iunit{0.0, 1.0};
inline const double pi = 3.14159265358979323846;
inline const complexd two_pi_i{0.0, 2.0 * 3.14159265358979323846};

inline double fnorm(const CMatrix& m) { return m.norm(); } // Frobenius

// residual scaled against a reference magnitude, so tolerances behave the
// same for ||M|| ~ 1e-3 and ||M|| ~ 1e3 inputs
inline double scaled_residual(double residual, double ref) {
    return residual / std::max(1.0, ref);
}

inline void require_finite(const CMatrix& m, const std::string& what) {
    if (!m.allFinite()) throw NonFinite(what + ": non-finite entries");
}

inline void require_square(const CMatrix& m, const std::string& what) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw Error(what + ": matrix must be square and nonempty");
}

inline CMatrix cidentity(Eigen::Index n) { return CMatrix::Identity(n, n); }

} // namespace logconn
